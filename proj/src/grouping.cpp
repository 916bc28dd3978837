#include "tsseg/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tsseg/ar.hpp"
#include "tsseg/errors.hpp"
#include "tsseg/linalg.hpp"

namespace tsseg {

namespace {

constexpr double kRatioDenomFloor = 1e-12;

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<int> parent_;
};

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const NumericError& e) {
        throw NumericError(std::string(name) + ": " + e.what());
    } catch (const ContractError& e) {
        throw ContractError(std::string(name) + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError(std::string(name) + ": " + e.what());
    }
}

std::vector<std::string> component_names(Eigen::Index p) {
    std::vector<std::string> names(p);
    for (Eigen::Index i = 0; i < p; ++i) names[i] = "x" + std::to_string(i + 1);
    return names;
}

/// Everything after the eigen step is shared between the serial-correlation
/// and volatility pipelines; test_series carries the series the permutation
/// tests run on (the transformed components, or their squares).
SegmentationResult finish_segmentation(const TimeSeriesMatrix& Y, const Standardized& std_data,
                                       const WMatrix& W, const EigenDecomposition& eig,
                                       const TimeSeriesMatrix& test_series,
                                       const SegmentConfig& cfg, bool volatility) {
    const Eigen::Index p = Y.p();
    SegmentationResult result;
    result.config = cfg;
    result.volatility = volatility;
    result.whitener = std_data.whitener;
    result.gamma = eig.eigenvectors;
    result.eigenvalues = eig.eigenvalues;

    const int m = cfg.resolve_m(Y.n(), p);
    result.resolved_m = m;

    result.graph.p = static_cast<int>(p);
    if (p >= 2) {
        TimeSeriesMatrix zw =
            stage("prewhiten", [&] { return prewhiten(test_series, cfg.prewhiten_max_order); });
        const Eigen::Index n_white = zw.n();

        for (int i = 0; i < p; ++i) {
            for (int j = i + 1; j < p; ++j) {
                std::vector<double> profile =
                    stage("cross correlation", [&] { return cross_corr_profile(zw, i, j, m); });
                PairStat stat;
                stat.i = i;
                stat.j = j;
                stat.max_corr = 0.0;
                stat.argmax_lag = 0;
                // smallest |h| wins, +h before -h
                for (int a = 0; a <= m; ++a) {
                    for (int h : {a, -a}) {
                        if (h == -a && a == 0) continue;
                        const double v = std::abs(profile[static_cast<size_t>(h + m)]);
                        if (v > stat.max_corr) {
                            stat.max_corr = v;
                            stat.argmax_lag = h;
                        }
                    }
                }
                if (cfg.method == GroupingMethod::fdr)
                    stat.pvalue = simes_pvalue(profile, n_white);
                result.graph.stats.push_back(stat);
            }
        }

        const size_t p0 = result.graph.stats.size();
        std::vector<size_t> order(p0);
        std::iota(order.begin(), order.end(), 0);
        size_t n_edges = 0;
        if (cfg.method == GroupingMethod::ratio) {
            std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                const auto& sa = result.graph.stats[a];
                const auto& sb = result.graph.stats[b];
                if (sa.max_corr != sb.max_corr) return sa.max_corr > sb.max_corr;
                return std::pair(sa.i, sa.j) < std::pair(sb.i, sb.j);
            });
            std::vector<double> L_sorted(p0);
            for (size_t k = 0; k < p0; ++k) L_sorted[k] = result.graph.stats[order[k]].max_corr;
            n_edges = static_cast<size_t>(stage("ratio selection", [&] {
                return ratio_select(L_sorted, cfg.c0);
            }));
        } else {
            std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                const auto& sa = result.graph.stats[a];
                const auto& sb = result.graph.stats[b];
                if (*sa.pvalue != *sb.pvalue) return *sa.pvalue < *sb.pvalue;
                return std::pair(sa.i, sa.j) < std::pair(sb.i, sb.j);
            });
            std::vector<double> P_sorted(p0);
            for (size_t k = 0; k < p0; ++k) P_sorted[k] = *result.graph.stats[order[k]].pvalue;
            n_edges = static_cast<size_t>(fdr_select(P_sorted, cfg.beta));
        }
        for (size_t k = 0; k < n_edges; ++k) {
            PairStat& s = result.graph.stats[order[k]];
            s.connected = true;
            result.graph.edges.emplace_back(s.i, s.j);
        }
        std::sort(result.graph.edges.begin(), result.graph.edges.end());
    }

    result.partition = union_groups(static_cast<int>(p), result.graph.edges);

    result.permutation.reserve(p);
    for (const auto& group : result.partition.groups)
        result.permutation.insert(result.permutation.end(), group.begin(), group.end());

    Eigen::MatrixXd a_hat(p, p);
    for (Eigen::Index c = 0; c < p; ++c) a_hat.col(c) = result.gamma.col(result.permutation[c]);
    result.transform_B = a_hat.transpose() * result.whitener;
    result.x_hat =
        TimeSeriesMatrix(Y.values * result.transform_B.transpose(), component_names(p));

    if (!volatility) {
        // Omega uses the un-thresholded aggregate on both sides so the
        // trace identity between the two coordinate systems is testable.
        const WMatrix& w_for_omega = W;
        result.omega_y = (cfg.threshold.mode == ThresholdConfig::Mode::none)
                             ? predictive_strength(w_for_omega)
                             : predictive_strength(build_w_plugin(std_data.series, cfg.k0));
        result.omega_x = predictive_strength(build_w_plugin(result.x_hat, cfg.k0));
    }
    return result;
}

void validate_segment_inputs(const TimeSeriesMatrix& Y, const SegmentConfig& cfg) {
    const Eigen::Index n = Y.n();
    const Eigen::Index p = Y.p();
    if (cfg.k0 < 1 || cfg.k0 + 1 >= n)
        throw ContractError("config: k0=" + std::to_string(cfg.k0) + " needs n > k0+1");
    if (cfg.prewhiten_max_order < 0 || n <= 10 * static_cast<Eigen::Index>(cfg.prewhiten_max_order))
        throw ContractError("config: n=" + std::to_string(n) +
                            " too short for prewhitening order " +
                            std::to_string(cfg.prewhiten_max_order));
    if (p >= 2) {
        const int m = cfg.resolve_m(n, p);
        if (n <= 4 * static_cast<Eigen::Index>(m))
            throw ContractError("config: lag bound m=" + std::to_string(m) + " needs n > 4m");
    }
    if (cfg.method == GroupingMethod::ratio && !(cfg.c0 > 0.0 && cfg.c0 <= 1.0))
        throw ContractError("config: c0 must lie in (0, 1]");
    if (cfg.method == GroupingMethod::fdr && !(cfg.beta > 0.0 && cfg.beta < 1.0))
        throw ContractError("config: beta must lie in (0, 1)");
}

}  // namespace

std::vector<int> GroupPartition::sizes() const {
    std::vector<int> out;
    out.reserve(groups.size());
    for (const auto& g : groups) out.push_back(static_cast<int>(g.size()));
    return out;
}

std::vector<int> GroupPartition::labels(int p) const {
    std::vector<int> lab(p, -1);
    for (size_t g = 0; g < groups.size(); ++g)
        for (int member : groups[g]) lab[static_cast<size_t>(member)] = static_cast<int>(g);
    return lab;
}

int SegmentConfig::default_m(Eigen::Index n, Eigen::Index p) {
    const double value = 10.0 * std::log10(static_cast<double>(n) / static_cast<double>(p));
    return std::max(1, static_cast<int>(std::lround(value)));
}

int SegmentConfig::resolve_m(Eigen::Index n, Eigen::Index p) const {
    return m > 0 ? m : default_m(n, p);
}

Eigen::MatrixXd SegmentationResult::group_basis(int g) const {
    const auto& members = partition.groups.at(static_cast<size_t>(g));
    Eigen::MatrixXd basis(gamma.rows(), static_cast<Eigen::Index>(members.size()));
    for (size_t c = 0; c < members.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = gamma.col(members[c]);
    return basis;
}

std::pair<double, int> max_cross_corr_stat(const TimeSeriesMatrix& Zw, int i, int j, int m) {
    std::vector<double> profile = cross_corr_profile(Zw, i, j, m);
    double best = -1.0;
    int best_lag = 0;
    for (int a = 0; a <= m; ++a) {
        for (int h : {a, -a}) {
            if (h == -a && a == 0) continue;
            const double v = std::abs(profile[static_cast<size_t>(h + m)]);
            if (v > best) {
                best = v;
                best_lag = h;
            }
        }
    }
    return {best, best_lag};
}

int ratio_select(const std::vector<double>& L_sorted, double c0) {
    const size_t p0 = L_sorted.size();
    if (p0 < 2) throw ContractError("ratio selection needs at least 2 maxima");
    if (!(c0 > 0.0 && c0 <= 1.0)) throw ContractError("c0 must lie in (0, 1]");

    // search j < c0 * p0 (and j+1 must exist); always at least j = 1
    size_t max_j = p0 - 1;
    const double cap = c0 * static_cast<double>(p0);
    while (max_j > 1 && static_cast<double>(max_j) >= cap) --max_j;

    size_t best_j = 1;
    double best_ratio = -1.0;
    for (size_t j = 1; j <= max_j; ++j) {
        const double denom = std::max(L_sorted[j], kRatioDenomFloor);
        const double ratio = L_sorted[j - 1] / denom;
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best_j = j;
        }
    }
    return static_cast<int>(best_j);
}

double simes_combine(std::vector<double> pvalues) {
    std::sort(pvalues.begin(), pvalues.end());
    const double count = static_cast<double>(pvalues.size());
    double best = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < pvalues.size(); ++j)
        best = std::min(best, pvalues[j] * count / static_cast<double>(j + 1));
    return std::min(best, 1.0);
}

double simes_pvalue(const std::vector<double>& rhos, Eigen::Index n) {
    const double root_n = std::sqrt(static_cast<double>(n));
    std::vector<double> pvalues(rhos.size());
    for (size_t k = 0; k < rhos.size(); ++k) {
        // two-sided normal tail: 2 * Phi(-sqrt(n) |rho|)
        pvalues[k] = std::erfc(root_n * std::abs(rhos[k]) / std::sqrt(2.0));
    }
    return simes_combine(std::move(pvalues));
}

int fdr_select(const std::vector<double>& P_sorted, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw ContractError("beta must lie in (0, 1)");
    const double p0 = static_cast<double>(P_sorted.size());
    int d = 0;
    for (size_t k = 0; k < P_sorted.size(); ++k) {
        if (P_sorted[k] <= static_cast<double>(k + 1) * beta / p0) d = static_cast<int>(k + 1);
    }
    return d;
}

GroupPartition union_groups(int p, const std::vector<std::pair<int, int>>& edges) {
    if (p < 1) throw ContractError("vertex count must be positive");
    UnionFind uf(p);
    for (const auto& [i, j] : edges) {
        if (i < 0 || j < 0 || i >= p || j >= p)
            throw ContractError("edge endpoint out of range");
        uf.unite(i, j);
    }
    std::vector<std::vector<int>> by_root(static_cast<size_t>(p));
    for (int v = 0; v < p; ++v) by_root[static_cast<size_t>(uf.find(v))].push_back(v);

    GroupPartition partition;
    for (auto& members : by_root) {
        if (members.empty()) continue;
        std::sort(members.begin(), members.end());
        partition.groups.push_back(std::move(members));
    }
    // roots are each group's smallest member, so the scan order is already
    // the canonical one
    return partition;
}

SegmentationResult segment(const TimeSeriesMatrix& Y, const SegmentConfig& cfg) {
    validate_segment_inputs(Y, cfg);
    Standardized std_data = stage("standardize", [&] { return standardize(Y); });
    WMatrix W = stage("W matrix", [&] {
        return cfg.threshold.mode == ThresholdConfig::Mode::none
                   ? build_w_plugin(std_data.series, cfg.k0)
                   : build_w_thresholded(std_data.series, cfg.k0, cfg.threshold);
    });
    EigenDecomposition eig = stage("eigendecomposition", [&] { return sym_eigen(W.matrix); });
    TimeSeriesMatrix z(std_data.series.values * eig.eigenvectors, component_names(Y.p()));
    return finish_segmentation(Y, std_data, W, eig, z, cfg, /*volatility=*/false);
}

SegmentationResult segment_volatility(const TimeSeriesMatrix& Y, const SegmentConfig& cfg) {
    validate_segment_inputs(Y, cfg);
    Standardized std_data = stage("standardize", [&] { return standardize(Y); });
    WMatrix W = stage("W matrix", [&] { return build_w_volatility(std_data.series, cfg.k0); });
    EigenDecomposition eig = stage("eigendecomposition", [&] { return sym_eigen(W.matrix); });
    Eigen::MatrixXd z = std_data.series.values * eig.eigenvectors;
    // Conditional-variance dependence shows up in the squares.
    TimeSeriesMatrix squared(z.array().square().matrix(), component_names(Y.p()));
    return finish_segmentation(Y, std_data, W, eig, squared, cfg, /*volatility=*/true);
}

}  // namespace tsseg
