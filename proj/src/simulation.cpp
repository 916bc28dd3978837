#include "tsseg/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "tsseg/errors.hpp"
#include "tsseg/linalg.hpp"

namespace tsseg {

namespace {

double spectral_radius(const std::vector<double>& ar) {
    if (ar.empty()) return 0.0;
    const Eigen::Index k = static_cast<Eigen::Index>(ar.size());
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) companion(0, i) = ar[static_cast<size_t>(i)];
    companion.bottomLeftCorner(k - 1, k - 1).setIdentity();
    return companion.eigenvalues().cwiseAbs().maxCoeff();
}

void validate_design(const LatentDesign& design) {
    if (design.blocks.empty()) throw ContractError("design has no blocks");
    if (design.burn_in < 0) throw ContractError("burn-in must be nonnegative");
    for (const auto& block : design.blocks) {
        if (block.size < 1) throw ContractError("block size must be at least 1");
        const double radius = spectral_radius(block.ar);
        if (radius >= 1.0)
            throw ContractError("block recursion is not causal: companion spectral radius " +
                                std::to_string(radius));
    }
}

// eta_t = sum_l ar[l] eta_{t-l-1} + eps_t + sum_m ma[m] eps_{t-m-1},
// zero-initialized and run through the burn-in.
Eigen::VectorXd simulate_arma(const BlockRecursion& block, Eigen::Index length,
                              std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd eps(length), eta(length);
    for (Eigen::Index t = 0; t < length; ++t) {
        eps[t] = gauss(rng);
        double value = eps[t];
        for (size_t l = 0; l < block.ar.size(); ++l) {
            const Eigen::Index s = t - static_cast<Eigen::Index>(l) - 1;
            if (s >= 0) value += block.ar[l] * eta[s];
        }
        for (size_t m = 0; m < block.ma.size(); ++m) {
            const Eigen::Index s = t - static_cast<Eigen::Index>(m) - 1;
            if (s >= 0) value += block.ma[m] * eps[s];
        }
        eta[t] = value;
    }
    return eta;
}

double type7_quantile(const std::vector<double>& sorted, double prob) {
    if (sorted.empty()) return 0.0;
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

int LatentDesign::p() const {
    int total = 0;
    for (const auto& block : blocks) total += block.size;
    return total;
}

GroupPartition LatentDesign::truth() const {
    GroupPartition partition;
    int next = 0;
    for (const auto& block : blocks) {
        std::vector<int> members(static_cast<size_t>(block.size));
        std::iota(members.begin(), members.end(), next);
        next += block.size;
        partition.groups.push_back(std::move(members));
    }
    return partition;
}

LatentDesign LatentDesign::example5() {
    LatentDesign design;
    design.name = "example5";
    design.blocks = {
        {3, {0.5, 0.3}, {-0.9, 0.3, 1.2, 1.3}},
        {2, {0.8, -0.5}, {1.0, 0.8, 1.8}},
        {1, {-0.7, -0.5}, {-1.0, -0.8}},
    };
    return design;
}

LatentDesign LatentDesign::example6() {
    LatentDesign design;
    design.name = "example6";
    design.blocks = {
        {6, {0.5, 0.3}, {-0.9, 0.3, 1.2, 1.3}},
        {5, {-0.4, 0.5}, {1.0, 0.8, 1.5, 1.8}},
        {4, {0.85, -0.3}, {1.0, 0.5, 1.2}},
        {3, {0.8, -0.5}, {1.0, 0.8, 1.8}},
        {2, {-0.7, -0.5}, {-1.0, -0.8}},
    };
    return design;
}

LatentDesign LatentDesign::custom(std::vector<BlockRecursion> blocks, int burn_in) {
    LatentDesign design;
    design.name = "custom";
    design.blocks = std::move(blocks);
    design.burn_in = burn_in;
    validate_design(design);
    return design;
}

GeneratedSeries generate(const LatentDesign& design, int n, std::uint64_t seed) {
    validate_design(design);
    if (n < 50) throw ContractError("simulation length must be at least 50");
    const Eigen::Index p = design.p();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-3.0, 3.0);
    Eigen::MatrixXd A(p, p);
    for (Eigen::Index r = 0; r < p; ++r)
        for (Eigen::Index c = 0; c < p; ++c) A(r, c) = uniform(rng);

    Eigen::MatrixXd x(n, p);
    Eigen::Index offset = 0;
    for (const auto& block : design.blocks) {
        const Eigen::Index shift = block.size - 1;
        Eigen::VectorXd eta = simulate_arma(block, design.burn_in + n + shift, rng);
        for (Eigen::Index j = 0; j < block.size; ++j)
            x.col(offset + j) = eta.segment(design.burn_in + j, n);
        offset += block.size;
    }

    GeneratedSeries out;
    out.Y = TimeSeriesMatrix(x * A.transpose());
    out.A_true = std::move(A);
    out.truth = design.truth();
    return out;
}

ReplicationOutcome classify(const SegmentationResult& result, const GroupPartition& truth,
                            const Eigen::MatrixXd& A_true, const Eigen::MatrixXd& whitener) {
    const Eigen::Index p = A_true.rows();
    const int q = truth.group_count();
    const int q_hat = result.partition.group_count();

    ReplicationOutcome outcome;
    outcome.q_hat = q_hat;
    outcome.classification = Classification::Other;

    // The estimate lives in the normalized coordinates, so the comparable
    // truth loadings are whitener * A restricted to each block.
    Eigen::MatrixXd normalized = whitener * A_true;
    std::vector<SubspaceBasis> truth_bases;
    truth_bases.reserve(truth.groups.size());
    for (const auto& block : truth.groups) {
        Eigen::MatrixXd cols(p, static_cast<Eigen::Index>(block.size()));
        for (size_t c = 0; c < block.size(); ++c) cols.col(static_cast<Eigen::Index>(c)) = normalized.col(block[c]);
        truth_bases.push_back(SubspaceBasis::orthonormalize(cols));
    }

    // Attribute each estimated component to the block capturing most of it.
    std::vector<int> column_block(static_cast<size_t>(p), 0);
    for (Eigen::Index c = 0; c < p; ++c) {
        double best = -1.0;
        for (int b = 0; b < q; ++b) {
            const double energy =
                (truth_bases[static_cast<size_t>(b)].matrix.transpose() * result.gamma.col(c)).squaredNorm();
            if (energy > best) {
                best = energy;
                column_block[static_cast<size_t>(c)] = b;
            }
        }
    }

    // Each block must claim exactly its own rank of components, and all of
    // them must fall inside a single estimated group.
    std::vector<int> claimed(static_cast<size_t>(q), 0);
    for (int b : column_block) ++claimed[static_cast<size_t>(b)];
    bool consistent = true;
    for (int b = 0; b < q; ++b)
        consistent = consistent &&
                     claimed[static_cast<size_t>(b)] == static_cast<int>(truth.groups[static_cast<size_t>(b)].size());

    std::vector<int> group_of = result.partition.labels(static_cast<int>(p));
    bool split = false;
    for (int b = 0; b < q && !split; ++b) {
        int seen = -1;
        for (Eigen::Index c = 0; c < p; ++c) {
            if (column_block[static_cast<size_t>(c)] != b) continue;
            if (seen < 0) seen = group_of[static_cast<size_t>(c)];
            else if (group_of[static_cast<size_t>(c)] != seen) split = true;
        }
    }

    if (consistent && !split && q_hat == q) {
        outcome.classification = Classification::Correct;
        std::vector<SubspaceBasis> estimate_bases;
        estimate_bases.reserve(result.partition.groups.size());
        for (int g = 0; g < q_hat; ++g)
            estimate_bases.push_back(SubspaceBasis::from_orthonormal(result.group_basis(g)));
        outcome.dbar = mean_error_Dbar(estimate_bases, truth_bases);
    } else if (consistent && !split && q_hat < q) {
        outcome.classification = Classification::Incomplete;
    }
    return outcome;
}

std::uint64_t replication_seed(std::uint64_t master_seed, int replication) {
    // splitmix64 over master + index keeps streams decorrelated
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(replication + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

MonteCarloReport monte_carlo(const LatentDesign& design, int n, int reps,
                             const SegmentConfig& cfg, std::uint64_t master_seed, int threads) {
    if (reps < 1) throw ContractError("replication count must be at least 1");
    validate_design(design);

    std::vector<ReplicationOutcome> outcomes(static_cast<size_t>(reps));
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto run_range = [&](int begin, int step) {
        for (int r = begin; r < reps; r += step) {
            try {
                const std::uint64_t seed = replication_seed(master_seed, r);
                GeneratedSeries data = generate(design, n, seed);
                SegmentationResult seg = segment(data.Y, cfg);
                outcomes[static_cast<size_t>(r)] = classify(seg, data.truth, data.A_true, seg.whitener);
                outcomes[static_cast<size_t>(r)].seed = seed;
            } catch (const NumericError& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::make_exception_ptr(
                        NumericError("replication " + std::to_string(r) + ": " + e.what()));
                return;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::make_exception_ptr(std::runtime_error(
                        "replication " + std::to_string(r) + ": " + e.what()));
                return;
            }
        }
    };

    int worker_count = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    worker_count = std::clamp(worker_count, 1, reps);
    if (worker_count == 1) {
        run_range(0, 1);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<size_t>(worker_count));
        for (int w = 0; w < worker_count; ++w) workers.emplace_back(run_range, w, worker_count);
        for (auto& worker : workers) worker.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    MonteCarloReport report;
    report.n = n;
    report.reps = reps;
    report.q_hat_histogram.assign(static_cast<size_t>(design.p()), 0);
    const int q = static_cast<int>(design.blocks.size());
    std::vector<double> dbars;
    for (const auto& outcome : outcomes) {
        if (outcome.q_hat >= 1 && outcome.q_hat <= design.p())
            ++report.q_hat_histogram[static_cast<size_t>(outcome.q_hat - 1)];
        switch (outcome.classification) {
            case Classification::Correct:
                report.correct += 1.0;
                dbars.push_back(*outcome.dbar);
                break;
            case Classification::Incomplete:
                report.incomplete += 1.0;
                if (outcome.q_hat == q - 1) report.incomplete_q_minus_1 += 1.0;
                break;
            case Classification::Other:
                report.other += 1.0;
                break;
        }
    }
    const double denom = static_cast<double>(reps);
    report.correct /= denom;
    report.incomplete /= denom;
    report.incomplete_q_minus_1 /= denom;
    report.other /= denom;

    std::sort(dbars.begin(), dbars.end());
    report.dbar_quantiles.count = static_cast<int>(dbars.size());
    if (!dbars.empty()) {
        report.dbar_quantiles.min = dbars.front();
        report.dbar_quantiles.q1 = type7_quantile(dbars, 0.25);
        report.dbar_quantiles.median = type7_quantile(dbars, 0.5);
        report.dbar_quantiles.q3 = type7_quantile(dbars, 0.75);
        report.dbar_quantiles.max = dbars.back();
    }
    report.outcomes = std::move(outcomes);
    return report;
}

}  // namespace tsseg
