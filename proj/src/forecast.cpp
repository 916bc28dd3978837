#include "tsseg/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tsseg/ar.hpp"
#include "tsseg/errors.hpp"

namespace tsseg {

namespace {

constexpr double kVarianceFloor = 1e-300;

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Design matrix for y_t on (1, y_{t-1}', .., y_{t-order}') over
// t = skip+1..n (1-based), skip >= order.
Eigen::MatrixXd var_design(const Eigen::MatrixXd& values, int order, int skip) {
    const Eigen::Index n = values.rows();
    const Eigen::Index p = values.cols();
    const Eigen::Index n_eff = n - skip;
    Eigen::MatrixXd design(n_eff, 1 + order * p);
    design.col(0).setOnes();
    for (int l = 1; l <= order; ++l)
        design.middleCols(1 + (l - 1) * p, p) = values.middleRows(skip - l, n_eff);
    return design;
}

double log_det_covariance(const Eigen::MatrixXd& resid, Eigen::Index n_eff) {
    Eigen::MatrixXd sigma = resid.transpose() * resid / static_cast<double>(n_eff);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
        log_det += std::log(std::max(eig.eigenvalues()[i], kVarianceFloor));
    return log_det;
}

VARModel model_from_beta(const Eigen::MatrixXd& beta, int order, Eigen::Index p) {
    VARModel model;
    model.order = order;
    model.intercept = beta.row(0).transpose();
    for (int l = 1; l <= order; ++l) {
        // equation j reads its lag-l weights from beta rows, so
        // Phi_l(j, i) = beta(1 + (l-1)p + i, j)
        model.coefficient_matrices.push_back(
            beta.middleRows(1 + (l - 1) * p, p).transpose());
        model.mask.push_back(BoolMatrix::Constant(p, p, true));
    }
    return model;
}

struct SeriesStats {
    Eigen::VectorXd mse_h1;
    Eigen::VectorXd mse_h2;
};

void summarize(ForecastReport& report) {
    const Eigen::Index p = report.mse_h1.size();
    report.mean_h1 = report.mse_h1.mean();
    report.mean_h2 = report.mse_h2.mean();
    auto sd = [p](const Eigen::VectorXd& v, double mean) {
        if (p < 2) return 0.0;
        return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(p - 1));
    };
    report.sd_h1 = sd(report.mse_h1, report.mean_h1);
    report.sd_h2 = sd(report.mse_h2, report.mean_h2);
}

// One- and two-step predictions from every expanding window, assembled into
// per-series MSE over the holdout targets.
template <typename FitAndForecast>
ForecastReport run_rolling(const TimeSeriesMatrix& Y, int holdout_d, const std::string& label,
                           FitAndForecast&& fit_and_forecast) {
    const Eigen::Index n = Y.n();
    const Eigen::Index p = Y.p();
    const Eigen::Index first_target = n - holdout_d;  // 0-based time of first holdout row

    Eigen::MatrixXd err1 = Eigen::MatrixXd::Zero(holdout_d, p);
    Eigen::MatrixXd err2 = Eigen::MatrixXd::Zero(holdout_d, p);
    // window rows 0..fit_end give the 1-step prediction for fit_end+1 and
    // the plug-in 2-step prediction for fit_end+2
    for (Eigen::Index fit_end = first_target - 2; fit_end < n - 1; ++fit_end) {
        Eigen::MatrixXd window = Y.values.topRows(fit_end + 1);
        std::pair<Eigen::VectorXd, Eigen::VectorXd> pred;
        try {
            pred = fit_and_forecast(window);
        } catch (const NumericError& e) {
            throw NumericError(label + " window ending at row " + std::to_string(fit_end + 1) +
                               ": " + e.what());
        }
        const Eigen::Index t1 = fit_end + 1;
        const Eigen::Index t2 = fit_end + 2;
        if (t1 >= first_target && t1 < n)
            err1.row(t1 - first_target) = (pred.first.transpose() - Y.values.row(t1));
        if (t2 >= first_target && t2 < n)
            err2.row(t2 - first_target) = (pred.second.transpose() - Y.values.row(t2));
    }

    ForecastReport report;
    report.method = label;
    report.mse_h1 = err1.array().square().colwise().mean().transpose();
    report.mse_h2 = err2.array().square().colwise().mean().transpose();
    summarize(report);
    return report;
}

VARModel ar_as_var(const ARModel& ar) {
    VARModel model;
    model.order = ar.order;
    model.intercept = Eigen::VectorXd::Constant(1, ar.intercept);
    for (int l = 0; l < ar.order; ++l) {
        model.coefficient_matrices.push_back(Eigen::MatrixXd::Constant(1, 1, ar.coefficients[l]));
        model.mask.push_back(BoolMatrix::Constant(1, 1, true));
    }
    return model;
}

}  // namespace

VARModel fit_var(const TimeSeriesMatrix& Y, int max_order) {
    if (max_order < 0) throw ContractError("max_order must be nonnegative");
    const Eigen::Index n = Y.n();
    const Eigen::Index p = Y.p();
    if (n <= p * max_order + 10)
        throw ContractError("series too short for VAR: n=" + std::to_string(n) + " needs n > " +
                            std::to_string(p * max_order + 10));

    const Eigen::Index n_eff = n - max_order;
    Eigen::MatrixXd response = Y.values.bottomRows(n_eff);
    Eigen::MatrixXd full_design = var_design(Y.values, max_order, max_order);

    int best_order = -1;
    double best_aic = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd best_beta;
    for (int k = 0; k <= max_order; ++k) {
        const Eigen::Index cols = 1 + k * p;
        Eigen::MatrixXd design = full_design.leftCols(cols);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() < cols) continue;  // collinear candidate, not comparable
        Eigen::MatrixXd beta = qr.solve(response);
        Eigen::MatrixXd resid = response - design * beta;
        const double aic = static_cast<double>(n_eff) * log_det_covariance(resid, n_eff) +
                           2.0 * static_cast<double>(k * p * p + p);
        if (aic < best_aic) {
            best_aic = aic;
            best_order = k;
            best_beta = std::move(beta);
        }
    }
    if (best_order < 0)
        throw NumericError("VAR regressors are collinear at every candidate order");
    return model_from_beta(best_beta, best_order, p);
}

VARModel restrict_var(const VARModel& model, const TimeSeriesMatrix& Y, double t_threshold) {
    if (t_threshold < 0.0) throw ContractError("t-statistic threshold must be nonnegative");
    if (t_threshold == 0.0) return model;
    const Eigen::Index n = Y.n();
    const Eigen::Index p = Y.p();
    const int order = model.order;
    if (order == 0) return model;

    const Eigen::Index n_eff = n - order;
    const Eigen::Index cols = 1 + order * p;
    Eigen::MatrixXd design = var_design(Y.values, order, order);
    Eigen::MatrixXd response = Y.values.bottomRows(n_eff);

    Eigen::MatrixXd gram = design.transpose() * design;
    Eigen::LDLT<Eigen::MatrixXd> gram_ldlt(gram);
    if (gram_ldlt.info() != Eigen::Success || !gram_ldlt.isPositive())
        throw NumericError("regressor Gram matrix is near singular");
    Eigen::MatrixXd gram_inv = gram_ldlt.solve(Eigen::MatrixXd::Identity(cols, cols));
    Eigen::MatrixXd beta = gram_ldlt.solve(design.transpose() * response);

    VARModel restricted;
    restricted.order = order;
    restricted.intercept.resize(p);
    for (int l = 0; l < order; ++l) {
        restricted.coefficient_matrices.push_back(Eigen::MatrixXd::Zero(p, p));
        restricted.mask.push_back(BoolMatrix::Constant(p, p, false));
    }

    const Eigen::Index df = n_eff - cols;
    for (Eigen::Index eq = 0; eq < p; ++eq) {
        Eigen::VectorXd resid = response.col(eq) - design * beta.col(eq);
        const double sigma2 = resid.squaredNorm() / std::max<Eigen::Index>(df, 1);

        // keep the intercept plus every lag regressor with |t| >= threshold
        std::vector<Eigen::Index> keep{0};
        for (Eigen::Index c = 1; c < cols; ++c) {
            const double se = std::sqrt(std::max(sigma2 * gram_inv(c, c), kVarianceFloor));
            const double tstat = beta(c, eq) / se;
            if (std::abs(tstat) >= t_threshold) keep.push_back(c);
        }

        Eigen::MatrixXd sub(n_eff, static_cast<Eigen::Index>(keep.size()));
        for (size_t k = 0; k < keep.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = design.col(keep[k]);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
        if (qr.rank() < sub.cols())
            throw NumericError("restricted regressors are collinear in equation " +
                               std::to_string(eq + 1));
        Eigen::VectorXd sub_beta = qr.solve(response.col(eq));

        restricted.intercept[eq] = sub_beta[0];
        for (size_t k = 1; k < keep.size(); ++k) {
            const Eigen::Index c = keep[k];
            const int lag = static_cast<int>((c - 1) / p);
            const Eigen::Index src = (c - 1) % p;
            restricted.coefficient_matrices[static_cast<size_t>(lag)](eq, src) = sub_beta[static_cast<Eigen::Index>(k)];
            restricted.mask[static_cast<size_t>(lag)](eq, src) = true;
        }
    }
    return restricted;
}

Eigen::VectorXd forecast(const VARModel& model, const Eigen::MatrixXd& history, int horizon) {
    if (horizon < 1) throw ContractError("forecast horizon must be at least 1");
    if (history.rows() < model.order)
        throw ContractError("history too short: " + std::to_string(history.rows()) +
                            " rows for order " + std::to_string(model.order));
    const Eigen::Index p = model.p();
    if (model.order > 0 && history.cols() != p)
        throw ContractError("history dimension does not match model");

    Eigen::MatrixXd extended(history.rows() + horizon, history.cols());
    extended.topRows(history.rows()) = history;
    for (int step = 0; step < horizon; ++step) {
        const Eigen::Index t = history.rows() + step;
        Eigen::VectorXd value = model.intercept;
        for (int l = 1; l <= model.order; ++l)
            value += model.coefficient_matrices[static_cast<size_t>(l - 1)] *
                     extended.row(t - l).transpose();
        extended.row(t) = value.transpose();
    }
    return extended.row(extended.rows() - 1).transpose();
}

std::vector<ForecastReport> rolling_compare(const TimeSeriesMatrix& Y, int holdout_d,
                                            const RollingConfig& cfg) {
    const Eigen::Index n = Y.n();
    if (holdout_d < 2) throw ContractError("holdout must cover at least 2 observations");
    if (holdout_d >= n - 1)
        throw ContractError("holdout " + std::to_string(holdout_d) + " leaves no data to fit on");

    std::vector<ForecastReport> reports;

    auto one_two_step = [](const VARModel& model, const Eigen::MatrixXd& window) {
        return std::pair{forecast(model, window, 1), forecast(model, window, 2)};
    };

    if (cfg.run_var) {
        reports.push_back(run_rolling(Y, holdout_d, "var", [&](const Eigen::MatrixXd& window) {
            VARModel model = fit_var(TimeSeriesMatrix(window, Y.names), cfg.var_max_order);
            return one_two_step(model, window);
        }));
    }
    if (cfg.run_rvar) {
        reports.push_back(run_rolling(Y, holdout_d, "rvar", [&](const Eigen::MatrixXd& window) {
            TimeSeriesMatrix w(window, Y.names);
            VARModel model = restrict_var(fit_var(w, cfg.var_max_order), w, cfg.t_threshold);
            return one_two_step(model, window);
        }));
    }
    if (cfg.run_segmentation) {
        reports.push_back(
            run_rolling(Y, holdout_d, "segmentation", [&](const Eigen::MatrixXd& window) {
                TimeSeriesMatrix w(window, Y.names);
                SegmentationResult seg = segment(w, cfg.segment_cfg);
                const Eigen::Index p = w.p();
                Eigen::MatrixXd xhat = seg.x_hat.values;

                Eigen::VectorXd x1(p), x2(p);
                Eigen::Index offset = 0;
                for (const auto& group : seg.partition.groups) {
                    const Eigen::Index size = static_cast<Eigen::Index>(group.size());
                    Eigen::MatrixXd block = xhat.middleCols(offset, size);
                    VARModel model;
                    if (size == 1) {
                        model = ar_as_var(fit_ar(block.col(0), cfg.var_max_order).model);
                    } else {
                        model = fit_var(TimeSeriesMatrix(block), cfg.var_max_order);
                    }
                    x1.segment(offset, size) = forecast(model, block, 1);
                    x2.segment(offset, size) = forecast(model, block, 2);
                    offset += size;
                }
                Eigen::PartialPivLU<Eigen::MatrixXd> b_inv(seg.transform_B);
                return std::pair{Eigen::VectorXd(b_inv.solve(x1)),
                                 Eigen::VectorXd(b_inv.solve(x2))};
            }));
    }
    return reports;
}

}  // namespace tsseg
