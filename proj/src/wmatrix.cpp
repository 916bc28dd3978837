#include "tsseg/wmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tsseg/errors.hpp"

namespace tsseg {

namespace {

void check_horizon(const TimeSeriesMatrix& Y, int k0) {
    if (k0 < 1 || k0 >= Y.n())
        throw ContractError("lag horizon k0=" + std::to_string(k0) + " out of range [1, " +
                            std::to_string(Y.n()) + ")");
}

WMatrix build_w_common(const TimeSeriesMatrix& Y, int k0, double u, WFlavor flavor,
                       std::optional<double> threshold_u) {
    check_horizon(Y, k0);
    const Eigen::Index p = Y.p();
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(p, p);
    for (int k = 1; k <= k0; ++k) {
        Eigen::MatrixXd sigma = threshold_matrix(sample_autocov(Y, k).matrix, u);
        w += sigma * sigma.transpose();
    }
    w = ((w + w.transpose()) * 0.5).eval();
    return WMatrix{std::move(w), k0, flavor, threshold_u};
}

}  // namespace

ThresholdConfig ThresholdConfig::fixed(double level) {
    if (level < 0.0) throw ContractError("threshold level must be nonnegative");
    ThresholdConfig cfg;
    cfg.mode = Mode::fixed;
    cfg.u = level;
    return cfg;
}

ThresholdConfig ThresholdConfig::polynomial(double M, double exponent) {
    if (M <= 0.0) throw ContractError("threshold constant M must be positive");
    ThresholdConfig cfg;
    cfg.mode = Mode::polynomial;
    cfg.M = M;
    cfg.exponent = exponent;
    return cfg;
}

ThresholdConfig ThresholdConfig::logarithmic(double M) {
    if (M <= 0.0) throw ContractError("threshold constant M must be positive");
    ThresholdConfig cfg;
    cfg.mode = Mode::logarithmic;
    cfg.M = M;
    return cfg;
}

double ThresholdConfig::resolve(Eigen::Index p, Eigen::Index n) const {
    switch (mode) {
        case Mode::none:
            return 0.0;
        case Mode::fixed:
            return u;
        case Mode::polynomial:
            return M * std::pow(static_cast<double>(p), exponent) /
                   std::sqrt(static_cast<double>(n));
        case Mode::logarithmic:
            return M * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
    }
    throw ContractError("unknown threshold mode");
}

Eigen::MatrixXd threshold_matrix(const Eigen::MatrixXd& S, double u) {
    if (u < 0.0) throw ContractError("threshold level must be nonnegative");
    if (u == 0.0) return S;  // |s| >= 0 keeps every entry
    return (S.cwiseAbs().array() >= u).select(S, 0.0);
}

WMatrix build_w_plugin(const TimeSeriesMatrix& Y, int k0) {
    return build_w_common(Y, k0, 0.0, WFlavor::plugin, std::nullopt);
}

WMatrix build_w_thresholded(const TimeSeriesMatrix& Y, int k0, const ThresholdConfig& cfg) {
    const double u = cfg.resolve(Y.p(), Y.n());
    return build_w_common(Y, k0, u, WFlavor::thresholded, u);
}

WMatrix build_w_volatility(const TimeSeriesMatrix& Y, int k0) {
    check_horizon(Y, k0);
    const Eigen::Index n = Y.n();
    const Eigen::Index p = Y.p();

    Eigen::VectorXd norms(n);
    for (Eigen::Index t = 0; t < n; ++t) norms[t] = Y.values.row(t).norm();
    // The ball family is a set of events: equal radii give the same ball.
    std::vector<double> radii(norms.data(), norms.data() + n);
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    for (int k = 1; k <= k0; ++k) {
        // Terms y_t y_t' for t = k+1..n keyed by the conditioning norm
        // ||y_{t-k}||; sorting by the key turns every ball indicator into a
        // prefix sum over the sorted terms.
        const Eigen::Index terms = n - k;
        order.resize(static_cast<size_t>(terms));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::sort(order.begin(), order.end(),
                  [&](Eigen::Index a, Eigen::Index b) { return norms[a] < norms[b]; });

        Eigen::MatrixXd prefix = Eigen::MatrixXd::Zero(p, p);
        const double scale = 1.0 / static_cast<double>(terms);
        size_t consumed = 0;
        for (const double radius : radii) {
            while (consumed < order.size() && norms[order[consumed]] <= radius) {
                const Eigen::Index t = order[consumed] + k;  // row entering the average
                prefix.noalias() += Y.values.row(t).transpose() * Y.values.row(t);
                ++consumed;
            }
            Eigen::MatrixXd avg = prefix * scale;
            w.noalias() += avg * avg;
        }
    }
    w = ((w + w.transpose()) * 0.5).eval();
    return WMatrix{std::move(w), k0, WFlavor::volatility, std::nullopt};
}

double predictive_strength(const WMatrix& W) {
    if (W.flavor == WFlavor::volatility)
        throw ContractError("predictive strength is defined for the serial-correlation W only");
    return W.matrix.trace() - static_cast<double>(W.matrix.rows());
}

}  // namespace tsseg
