#ifndef TSSEG_GROUPING_HPP
#define TSSEG_GROUPING_HPP

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "tsseg/timeseries.hpp"
#include "tsseg/wmatrix.hpp"

namespace tsseg {

/// Maximum-cross-correlation statistic and supporting detail for one
/// component pair (i < j, 0-based).
struct PairStat {
    int i = 0;
    int j = 0;
    double max_corr = 0.0;             // L_hat over lags |h| <= m
    int argmax_lag = 0;                // smallest-|h| maximizer, + before -
    std::optional<double> pvalue;      // combined multiple-test P, when computed
    bool connected = false;
};

/// Tested pairs plus the selected edge set over p component vertices.
struct ConnectivityGraph {
    int p = 0;
    std::vector<PairStat> stats;                // all p(p-1)/2 pairs, (i,j) lex order
    std::vector<std::pair<int, int>> edges;     // connected pairs, i < j
};

/// Disjoint groups covering 0..p-1, ordered by smallest member, members
/// ascending within each group.
struct GroupPartition {
    std::vector<std::vector<int>> groups;

    int group_count() const { return static_cast<int>(groups.size()); }
    std::vector<int> sizes() const;
    /// Group index of each component, length p.
    std::vector<int> labels(int p) const;
};

enum class GroupingMethod { ratio, fdr };

struct SegmentConfig {
    int k0 = 5;
    int m = 0;  // 0 = default max(1, round(10*log10(n/p)))
    GroupingMethod method = GroupingMethod::ratio;
    double c0 = 0.75;
    double beta = 0.01;
    ThresholdConfig threshold;
    int prewhiten_max_order = 5;

    static int default_m(Eigen::Index n, Eigen::Index p);
    int resolve_m(Eigen::Index n, Eigen::Index p) const;
};

/// Output of the two-step segmentation. gamma holds the orthonormal
/// eigenvectors in eigenvalue order; transform_B and x_hat are stated in
/// permuted order, with the members of each group contiguous, so
/// x_hat rows = (transform_B * y_t)'. partition and graph indices refer to
/// the eigenvalue-ordered components; permutation[c] is the
/// eigenvalue-order index occupying column c of x_hat.
struct SegmentationResult {
    Eigen::MatrixXd gamma;        // p x p orthogonal
    Eigen::MatrixXd whitener;     // Sigma_hat(0)^{-1/2}
    Eigen::MatrixXd transform_B;  // permuted gamma' * whitener
    Eigen::VectorXd eigenvalues;  // descending
    GroupPartition partition;
    ConnectivityGraph graph;
    std::vector<int> permutation;
    TimeSeriesMatrix x_hat;
    SegmentConfig config;
    int resolved_m = 0;
    std::optional<double> omega_y;  // tr(W)-p on the standardized input
    std::optional<double> omega_x;  // same functional on x_hat
    bool volatility = false;

    /// Orthonormal basis of the estimated subspace of group g, i.e. the
    /// gamma columns belonging to that group.
    Eigen::MatrixXd group_basis(int g) const;
};

/// L_hat(i,j) = max_{|h|<=m} |rho_hat(h)| with its achieving lag. Among
/// equal maxima the smallest |h| wins and +h beats -h.
std::pair<double, int> max_cross_corr_stat(const TimeSeriesMatrix& Zw, int i, int j, int m);

/// Ratio rule over maxima sorted descending: r_hat = argmax L_j / L_{j+1}
/// with the search restricted to j < c0 * p0. Ties go to the smallest j;
/// denominators are floored at 1e-12.
int ratio_select(const std::vector<double>& L_sorted, double c0);

/// Combined P-value over the per-lag two-sided normal tests
/// p_k = 2 Phi(-sqrt(n) |rho(k)|):  P = min_j p_(j) (2m+1)/j, capped at 1.
double simes_pvalue(const std::vector<double>& rhos, Eigen::Index n);

/// The ordered-p-value combination step alone, for already-computed
/// per-lag p-values.
double simes_combine(std::vector<double> pvalues);

/// d = max{ k : P_(k) <= k * beta / p0 } over ascending P-values (0 when
/// the set is empty).
int fdr_select(const std::vector<double>& P_sorted, double beta);

/// Connected components of the edge graph, in canonical order.
GroupPartition union_groups(int p, const std::vector<std::pair<int, int>>& edges);

/// Full pipeline: standardize -> W -> eigenvectors -> transformed series ->
/// prewhiten -> pairwise statistics -> edge selection -> components ->
/// permuted output series.
SegmentationResult segment(const TimeSeriesMatrix& Y, const SegmentConfig& cfg);

/// Volatility variant: W from the ball-indicator estimator and the
/// permutation tests run on the squared transformed components, which
/// carry the conditional-variance dependence.
SegmentationResult segment_volatility(const TimeSeriesMatrix& Y, const SegmentConfig& cfg);

}  // namespace tsseg

#endif  // TSSEG_GROUPING_HPP
