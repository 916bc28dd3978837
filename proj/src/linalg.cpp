#include "tsseg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tsseg/errors.hpp"

namespace tsseg {

namespace {

constexpr double kEigenvalueFloor = 1e-10;  // relative to lambda_max

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

void check_symmetric(const Eigen::MatrixXd& S) {
    if (S.rows() != S.cols()) throw ContractError("matrix is not square");
    const double scale = max_abs(S);
    const double asym = max_abs(S - S.transpose());
    if (asym >= 1e-8 * std::max(scale, 1e-300))
        throw ContractError("matrix is not symmetric: max asymmetry " + std::to_string(asym));
}

/// Columns with unit norm and deterministic sign: largest-magnitude entry
/// positive, ties resolved to the lowest index.
void fix_signs(Eigen::MatrixXd& V) {
    for (Eigen::Index c = 0; c < V.cols(); ++c) {
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index r = 0; r < V.rows(); ++r) {
            const double a = std::abs(V(r, c));
            if (a > best_abs) {
                best_abs = a;
                best = r;
            }
        }
        if (V(best, c) < 0.0) V.col(c) = -V.col(c);
    }
}

double projector_trace(const Eigen::MatrixXd& Q1, const Eigen::MatrixXd& Q2) {
    return (Q1.transpose() * Q2).squaredNorm();  // tr(P1 P2) for orthonormal Q
}

double clamped_distance(double trace, double r) {
    const double inner = std::clamp(1.0 - trace / r, 0.0, 1.0);
    return std::sqrt(inner);
}

}  // namespace

SubspaceBasis SubspaceBasis::from_orthonormal(Eigen::MatrixXd m) {
    if (m.cols() < 1 || m.cols() > m.rows())
        throw ContractError("subspace basis must be p x r with 1 <= r <= p");
    Eigen::MatrixXd gram = m.transpose() * m;
    gram.diagonal().array() -= 1.0;
    if (max_abs(gram) >= 1e-8) throw ContractError("basis columns are not orthonormal");
    return SubspaceBasis{std::move(m)};
}

SubspaceBasis SubspaceBasis::orthonormalize(const Eigen::MatrixXd& m) {
    if (m.cols() < 1 || m.cols() > m.rows())
        throw ContractError("subspace basis must be p x r with 1 <= r <= p");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    if (qr.rank() < m.cols()) throw ContractError("matrix is rank deficient: rank " +
                                                  std::to_string(qr.rank()) + " < " +
                                                  std::to_string(m.cols()) + " columns");
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
    return SubspaceBasis{std::move(q)};
}

EigenDecomposition sym_eigen(const Eigen::MatrixXd& S) {
    check_symmetric(S);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(((S + S.transpose()) * 0.5).eval());
    if (solver.info() != Eigen::Success) throw NumericError("eigendecomposition failed to converge");

    const Eigen::Index p = S.rows();
    const Eigen::VectorXd& lambda = solver.eigenvalues();  // ascending
    std::vector<Eigen::Index> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    // descending; equal eigenvalues keep the backend's column order
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return lambda[a] > lambda[b]; });

    EigenDecomposition out;
    out.eigenvalues.resize(p);
    out.eigenvectors.resize(p, p);
    for (Eigen::Index c = 0; c < p; ++c) {
        out.eigenvalues[c] = lambda[idx[c]];
        out.eigenvectors.col(c) = solver.eigenvectors().col(idx[c]);
    }
    fix_signs(out.eigenvectors);
    return out;
}

Eigen::MatrixXd inv_sqrt(const Eigen::MatrixXd& S) {
    EigenDecomposition eig = sym_eigen(S);
    const double lambda_max = eig.eigenvalues[0];
    const double floor = kEigenvalueFloor * std::max(lambda_max, 0.0);
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
        if (!(eig.eigenvalues[i] > floor))
            throw NumericError("matrix is numerically singular: eigenvalue " +
                               std::to_string(eig.eigenvalues[i]) + " below floor " +
                               std::to_string(floor));
    }
    Eigen::VectorXd inv_roots = eig.eigenvalues.array().sqrt().inverse();
    Eigen::MatrixXd r =
        eig.eigenvectors * inv_roots.asDiagonal() * eig.eigenvectors.transpose();
    return ((r + r.transpose()) * 0.5).eval();
}

double distance_D(const SubspaceBasis& H1, const SubspaceBasis& H2) {
    if (H1.p() != H2.p()) throw ContractError("subspace bases live in different dimensions");
    if (H1.r() != H2.r())
        throw ContractError("subspace ranks differ (" + std::to_string(H1.r()) + " vs " +
                            std::to_string(H2.r()) + "); use distance_D_general");
    return clamped_distance(projector_trace(H1.matrix, H2.matrix), static_cast<double>(H1.r()));
}

double distance_D_general(const Eigen::MatrixXd& H1, const Eigen::MatrixXd& H2) {
    if (H1.rows() != H2.rows()) throw ContractError("subspace bases live in different dimensions");
    SubspaceBasis q1 = SubspaceBasis::orthonormalize(H1);
    SubspaceBasis q2 = SubspaceBasis::orthonormalize(H2);
    const double r = static_cast<double>(std::min(q1.r(), q2.r()));
    return clamped_distance(projector_trace(q1.matrix, q2.matrix), r);
}

double mean_error_Dbar(const std::vector<SubspaceBasis>& estimate,
                       const std::vector<SubspaceBasis>& truth) {
    if (estimate.empty() || estimate.size() != truth.size())
        throw ContractError("not a correct specification: group counts differ (" +
                            std::to_string(estimate.size()) + " vs " +
                            std::to_string(truth.size()) + ")");
    const Eigen::Index p = estimate.front().p();
    Eigen::Index est_total = 0, truth_total = 0;
    std::vector<Eigen::Index> est_ranks, truth_ranks;
    for (const auto& b : estimate) {
        est_total += b.r();
        est_ranks.push_back(b.r());
    }
    for (const auto& b : truth) {
        truth_total += b.r();
        truth_ranks.push_back(b.r());
    }
    if (est_total != p || truth_total != p)
        throw ContractError("not a correct specification: groups do not partition the dimension");
    std::vector<Eigen::Index> a = est_ranks, b = truth_ranks;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw ContractError("not a correct specification: rank multisets differ");

    // Greedy minimum-distance matching inside each equal-rank class.
    struct Candidate {
        double d;
        size_t e, t;
    };
    std::vector<Candidate> candidates;
    for (size_t e = 0; e < estimate.size(); ++e)
        for (size_t t = 0; t < truth.size(); ++t)
            if (estimate[e].r() == truth[t].r())
                candidates.push_back({distance_D(estimate[e], truth[t]), e, t});
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        if (x.d != y.d) return x.d < y.d;
        if (x.e != y.e) return x.e < y.e;
        return x.t < y.t;
    });
    std::vector<bool> e_used(estimate.size(), false), t_used(truth.size(), false);
    double total = 0.0;
    size_t matched = 0;
    for (const auto& c : candidates) {
        if (e_used[c.e] || t_used[c.t]) continue;
        e_used[c.e] = true;
        t_used[c.t] = true;
        total += c.d;
        ++matched;
    }
    return total / static_cast<double>(matched);
}

}  // namespace tsseg
