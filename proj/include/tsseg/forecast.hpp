#ifndef TSSEG_FORECAST_HPP
#define TSSEG_FORECAST_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "tsseg/grouping.hpp"
#include "tsseg/timeseries.hpp"

namespace tsseg {

/// VAR(order) with intercept, least squares per equation. mask marks the
/// retained lag coefficients of a restricted fit; masked-out entries are
/// exactly zero.
struct VARModel {
    int order = 0;
    std::vector<Eigen::MatrixXd> coefficient_matrices;  // Phi_1..Phi_order, p x p
    Eigen::VectorXd intercept;                          // length p
    std::vector<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>> mask;  // per lag

    Eigen::Index p() const { return intercept.size(); }
};

struct ForecastReport {
    std::string method;
    Eigen::VectorXd mse_h1;  // per-series one-step MSE
    Eigen::VectorXd mse_h2;  // per-series two-step MSE
    double mean_h1 = 0.0;
    double mean_h2 = 0.0;
    double sd_h1 = 0.0;
    double sd_h2 = 0.0;
};

/// Fit VAR orders 0..max_order on the common effective sample and keep the
/// AIC minimizer, AIC = n_eff * log det(Sigma_eps) + 2 * (#coefficients).
VARModel fit_var(const TimeSeriesMatrix& Y, int max_order);

/// Zero every lag coefficient whose |t| is below t_threshold, then refit
/// each equation by least squares on its surviving regressors. Equations
/// that lose every regressor fall back to intercept-only.
VARModel restrict_var(const VARModel& model, const TimeSeriesMatrix& Y, double t_threshold);

/// Plug-in forecast: horizon 2 feeds the horizon-1 prediction back in as if
/// it were observed. history rows are observations, most recent last.
Eigen::VectorXd forecast(const VARModel& model, const Eigen::MatrixXd& history, int horizon);

struct RollingConfig {
    bool run_var = true;
    bool run_rvar = true;
    bool run_segmentation = true;
    int var_max_order = 5;
    double t_threshold = 2.0;
    SegmentConfig segment_cfg;
};

/// Expanding-window post-sample comparison over the last holdout_d
/// observations: for each target time the models are refit on all data
/// before the forecast origin, horizons 1 and 2 are produced by plug-in,
/// and per-series MSEs are averaged over the holdout. The segmentation
/// route refits the transform per window, models each group separately in
/// the transformed coordinates (AR for singletons, VAR otherwise) and maps
/// forecasts back through the inverse transform.
std::vector<ForecastReport> rolling_compare(const TimeSeriesMatrix& Y, int holdout_d,
                                            const RollingConfig& cfg);

}  // namespace tsseg

#endif  // TSSEG_FORECAST_HPP
