#ifndef TSSEG_TIMESERIES_HPP
#define TSSEG_TIMESERIES_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace tsseg {

/// An observed p-variate series: row t is the observation at time t.
/// Invariants: n >= 2, p >= 1, every entry finite.
struct TimeSeriesMatrix {
    Eigen::MatrixXd values;          // n x p, time runs down the rows
    std::vector<std::string> names;  // p column labels

    TimeSeriesMatrix() = default;
    TimeSeriesMatrix(Eigen::MatrixXd v, std::vector<std::string> col_names);
    explicit TimeSeriesMatrix(Eigen::MatrixXd v);

    Eigen::Index n() const { return values.rows(); }
    Eigen::Index p() const { return values.cols(); }
};

/// Sample autocovariance at one lag. The lag-0 matrix is symmetric PSD;
/// for k > 0 the matrix is generally non-symmetric.
struct LaggedCovariance {
    int lag = 0;
    Eigen::MatrixXd matrix;  // p x p
};

/// Parse a rectangular numeric CSV ('.' decimal, comma separated, rows in
/// time order). With has_header the first row supplies the column names,
/// otherwise columns are named c1..cp.
TimeSeriesMatrix load_csv(const std::string& path, bool has_header);

/// Same parser on an in-memory document (used by load_csv and tests).
TimeSeriesMatrix parse_csv(const std::string& text, bool has_header);

/// Sigma_hat(k) = (1/n) * sum_{t=1}^{n-k} (y_{t+k} - ybar)(y_t - ybar)'.
/// The divisor is n for every lag. Requires 0 <= k < n.
LaggedCovariance sample_autocov(const TimeSeriesMatrix& Y, int k);

/// Centered and whitened copy of Y plus the whitener it used.
struct Standardized {
    TimeSeriesMatrix series;   // rows (y_t - ybar)' * whitener
    Eigen::MatrixXd whitener;  // symmetric Sigma_hat(0)^{-1/2}
    Eigen::VectorXd mean;      // column means that were removed
};

/// Replace y_t by Sigma_hat(0)^{-1/2} (y_t - ybar) so the sample covariance
/// of the result is the identity. Rejects covariance matrices with an
/// eigenvalue below 1e-10 times the largest one instead of regularizing.
Standardized standardize(const TimeSeriesMatrix& Y);

/// Sample cross correlation rho_hat_{i,j}(h) of columns i and j at signed
/// lag h: the lagged cross product of the centered columns over the
/// full-sample denominator. Satisfies rho_{i,j}(h) = rho_{j,i}(-h) exactly.
double cross_corr(const TimeSeriesMatrix& Z, int i, int j, int h);

/// rho_hat_{i,j}(h) for all h = -m..m, indexed as profile[h + m].
std::vector<double> cross_corr_profile(const TimeSeriesMatrix& Z, int i, int j, int m);

}  // namespace tsseg

#endif  // TSSEG_TIMESERIES_HPP
