#ifndef TSSEG_SIMULATION_HPP
#define TSSEG_SIMULATION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsseg/grouping.hpp"
#include "tsseg/timeseries.hpp"

namespace tsseg {

/// One latent block: consecutive components are lead-shifted copies of a
/// single causal ARMA recursion, so the block is serially cross-correlated
/// inside and independent of every other block.
struct BlockRecursion {
    int size = 1;                 // number of stacked lead-shifted components
    std::vector<double> ar;       // autoregressive coefficients, lag 1 first
    std::vector<double> ma;       // moving-average coefficients on past noise
};

struct LatentDesign {
    std::string name;             // "example5", "example6" or "custom"
    std::vector<BlockRecursion> blocks;
    int burn_in = 500;

    int p() const;
    GroupPartition truth() const;

    /// p = 6, three blocks of sizes 3, 2, 1.
    static LatentDesign example5();
    /// p = 20, five blocks of sizes 6, 5, 4, 3, 2.
    static LatentDesign example6();
    static LatentDesign custom(std::vector<BlockRecursion> blocks, int burn_in = 500);
};

struct GeneratedSeries {
    TimeSeriesMatrix Y;        // n x p observed series A * x
    Eigen::MatrixXd A_true;    // p x p mixing matrix, entries U(-3,3)
    GroupPartition truth;
};

/// Simulate the latent blocks (burn-in discarded, lead shifts realized by
/// generating ahead), draw A with independent U(-3,3) entries and return
/// Y_t = A x_t. Deterministic in seed.
GeneratedSeries generate(const LatentDesign& design, int n, std::uint64_t seed);

enum class Classification { Correct, Incomplete, Other };

struct ReplicationOutcome {
    Classification classification = Classification::Other;
    int q_hat = 0;
    std::optional<double> dbar;  // present iff Correct
    std::uint64_t seed = 0;
};

/// Compare an estimated segmentation against the known truth. Each
/// estimated component is attributed to the true block whose normalized
/// span captures most of its energy; the outcome is Correct when the
/// estimated groups reproduce the blocks one-to-one, Incomplete when they
/// merge whole blocks (q_hat < q, nothing split), and Other otherwise.
/// For Correct outcomes dbar is the mean matched subspace distance against
/// the whitener-normalized true loadings.
ReplicationOutcome classify(const SegmentationResult& result, const GroupPartition& truth,
                            const Eigen::MatrixXd& A_true, const Eigen::MatrixXd& whitener);

struct DbarQuantiles {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    int count = 0;
};

struct MonteCarloReport {
    int n = 0;
    int reps = 0;
    double correct = 0.0;
    double incomplete = 0.0;
    double incomplete_q_minus_1 = 0.0;
    double other = 0.0;
    DbarQuantiles dbar_quantiles;
    std::vector<int> q_hat_histogram;  // index q_hat-1 .. counts over all reps
    std::vector<ReplicationOutcome> outcomes;
};

/// Replicated recovery experiment: per-replication seeds derive from the
/// master seed, so reports are identical regardless of thread count.
MonteCarloReport monte_carlo(const LatentDesign& design, int n, int reps,
                             const SegmentConfig& cfg, std::uint64_t master_seed,
                             int threads = 0);

std::uint64_t replication_seed(std::uint64_t master_seed, int replication);

}  // namespace tsseg

#endif  // TSSEG_SIMULATION_HPP
