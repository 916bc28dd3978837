#include "tsseg/ar.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tsseg/errors.hpp"

namespace tsseg {

namespace {

constexpr double kVarianceFloor = 1e-300;  // keeps log(sigma2) finite

struct OrderFit {
    Eigen::VectorXd beta;  // intercept first, then lag coefficients
    Eigen::VectorXd residuals;
    double sigma2 = 0.0;
};

// Least squares of y_t on (1, y_{t-1}, .., y_{t-k}) over the fixed sample
// t = max_order+1..n, so every candidate order sees the same responses.
OrderFit fit_order(const Eigen::VectorXd& y, int order, int max_order) {
    const Eigen::Index n = y.size();
    const Eigen::Index n_eff = n - max_order;
    Eigen::MatrixXd design(n_eff, order + 1);
    design.col(0).setOnes();
    for (int l = 1; l <= order; ++l)
        design.col(l) = y.segment(max_order - l, n_eff);
    Eigen::VectorXd response = y.segment(max_order, n_eff);

    OrderFit fit;
    fit.beta = design.colPivHouseholderQr().solve(response);
    fit.residuals = response - design * fit.beta;
    fit.sigma2 = fit.residuals.squaredNorm() / static_cast<double>(n_eff);
    return fit;
}

}  // namespace

FittedAR fit_ar(const Eigen::VectorXd& y, int max_order) {
    if (max_order < 0) throw ContractError("max_order must be nonnegative");
    const Eigen::Index n = y.size();
    if (n <= 10 * static_cast<Eigen::Index>(max_order))
        throw ContractError("series too short: n=" + std::to_string(n) +
                            " needs n > 10*max_order=" + std::to_string(10 * max_order));

    const double mean = y.mean();
    const double variance = (y.array() - mean).square().sum() / static_cast<double>(n);
    const double scale = std::max(y.cwiseAbs().maxCoeff(), 1.0);
    if (variance <= 1e-24 * scale * scale)
        throw NumericError("degenerate variance: series is constant");

    const Eigen::Index n_eff = n - max_order;
    int best_order = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    OrderFit best;
    for (int k = 0; k <= max_order; ++k) {
        OrderFit fit = fit_order(y, k, max_order);
        const double aic = static_cast<double>(n_eff) * std::log(std::max(fit.sigma2, kVarianceFloor)) +
                           2.0 * k;
        if (aic < best_aic) {
            best_aic = aic;
            best_order = k;
            best = std::move(fit);
        }
    }

    FittedAR out;
    out.model.order = best_order;
    out.model.intercept = best.beta[0];
    out.model.coefficients = best.beta.tail(best_order);
    out.model.noise_variance = std::max(best.sigma2, kVarianceFloor);
    out.residuals = std::move(best.residuals);
    return out;
}

TimeSeriesMatrix prewhiten(const TimeSeriesMatrix& Z, int max_order) {
    const Eigen::Index n = Z.n();
    const Eigen::Index p = Z.p();
    Eigen::MatrixXd residuals(n - max_order, p);
    for (Eigen::Index c = 0; c < p; ++c) {
        try {
            residuals.col(c) = fit_ar(Z.values.col(c), max_order).residuals;
        } catch (const NumericError& e) {
            throw NumericError("prewhitening column " + std::to_string(c + 1) + " (" +
                               Z.names[static_cast<size_t>(c)] + "): " + e.what());
        }
    }
    return TimeSeriesMatrix(std::move(residuals), Z.names);
}

}  // namespace tsseg
