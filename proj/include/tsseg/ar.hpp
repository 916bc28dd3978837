#ifndef TSSEG_AR_HPP
#define TSSEG_AR_HPP

#include <Eigen/Dense>

#include "tsseg/timeseries.hpp"

namespace tsseg {

/// Univariate AR(order) fitted by conditional least squares with an
/// intercept. order is selected in 0..max_order by AIC computed on the
/// common effective sample t = max_order+1..n, so candidate orders are
/// comparable.
struct ARModel {
    int order = 0;
    Eigen::VectorXd coefficients;  // length order, lag 1 first
    double intercept = 0.0;
    double noise_variance = 0.0;   // residual variance (ML divisor)
};

struct FittedAR {
    ARModel model;
    Eigen::VectorXd residuals;  // on t = max_order+1..n, length n - max_order
};

/// Fit AR orders 0..max_order on the common sample and keep the AIC
/// minimizer, AIC = n_eff * log(sigma2_hat) + 2 * order. Requires
/// n > 10 * max_order and a non-constant series.
FittedAR fit_ar(const Eigen::VectorXd& y, int max_order);

/// Replace each column by the residuals of its own AR fit. All columns are
/// truncated to the common length n - max_order so the result stays
/// rectangular.
TimeSeriesMatrix prewhiten(const TimeSeriesMatrix& Z, int max_order);

}  // namespace tsseg

#endif  // TSSEG_AR_HPP
