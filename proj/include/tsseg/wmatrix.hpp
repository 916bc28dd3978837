#ifndef TSSEG_WMATRIX_HPP
#define TSSEG_WMATRIX_HPP

#include <Eigen/Dense>
#include <optional>

#include "tsseg/timeseries.hpp"

namespace tsseg {

enum class WFlavor { plugin, thresholded, volatility };

/// Lag-aggregated autocovariance quadratic: the matrix whose eigenvectors
/// drive the segmentation. For plugin/thresholded flavors every eigenvalue
/// is >= 1 (identity plus a PSD sum); the volatility flavor is PSD.
struct WMatrix {
    Eigen::MatrixXd matrix;  // p x p symmetric
    int k0 = 0;
    WFlavor flavor = WFlavor::plugin;
    std::optional<double> threshold_u;  // resolved level, when thresholding
};

/// How to pick the hard-threshold level u applied entrywise to each
/// sample autocovariance before aggregation.
struct ThresholdConfig {
    enum class Mode { none, fixed, polynomial, logarithmic };
    Mode mode = Mode::none;
    double u = 0.0;         // fixed level
    double M = 1.0;         // scale constant for the two rate-based modes
    double exponent = 0.0;  // p-exponent of the polynomial mode

    static ThresholdConfig none() { return {}; }
    static ThresholdConfig fixed(double level);
    /// u = M * p^exponent * n^{-1/2}
    static ThresholdConfig polynomial(double M, double exponent);
    /// u = M * sqrt(log(p) / n)
    static ThresholdConfig logarithmic(double M);

    /// The level this config yields for given dimensions.
    double resolve(Eigen::Index p, Eigen::Index n) const;
};

/// W = I_p + sum_{k=1..k0} Sigma_hat(k) Sigma_hat(k)'.
WMatrix build_w_plugin(const TimeSeriesMatrix& Y, int k0);

/// Entrywise hard threshold: entries with |s_ij| < u are zeroed, entries
/// with |s_ij| >= u are kept unchanged.
Eigen::MatrixXd threshold_matrix(const Eigen::MatrixXd& S, double u);

/// W = I_p + sum_k T_u(Sigma_hat(k)) T_u(Sigma_hat(k))' with u resolved
/// from cfg. Mode none reproduces build_w_plugin bit for bit.
WMatrix build_w_thresholded(const TimeSeriesMatrix& Y, int k0, const ThresholdConfig& cfg);

/// Volatility-process variant: sum over the n data-driven norm balls B_t of
///   sum_{k=1..k0} [ (n-k)^{-1} sum_{t=k+1..n} y_t y_t' 1{||y_{t-k}|| <= r} ]^2.
/// The second moments are uncentered.
WMatrix build_w_volatility(const TimeSeriesMatrix& Y, int k0);

/// Omega = tr(W) - p, the aggregate squared-correlation mass that serial
/// dependence makes available for prediction. Defined for the plugin and
/// thresholded flavors only.
double predictive_strength(const WMatrix& W);

}  // namespace tsseg

#endif  // TSSEG_WMATRIX_HPP
