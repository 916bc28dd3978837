#include "tsseg/timeseries.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tsseg/errors.hpp"
#include "tsseg/linalg.hpp"

namespace tsseg {

namespace {

void validate(const Eigen::MatrixXd& v, const std::vector<std::string>& names) {
    if (v.rows() < 2) throw InputError("time series needs at least 2 rows, got " + std::to_string(v.rows()));
    if (v.cols() < 1) throw InputError("time series needs at least 1 column");
    if (!v.allFinite()) throw InputError("time series contains non-finite entries");
    if (static_cast<Eigen::Index>(names.size()) != v.cols())
        throw InputError("column name count does not match dimension");
}

std::vector<std::string> default_names(Eigen::Index p) {
    std::vector<std::string> names(p);
    for (Eigen::Index i = 0; i < p; ++i) names[i] = "c" + std::to_string(i + 1);
    return names;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_row(std::string_view line) {
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        std::string_view cell = (comma == std::string_view::npos)
                                    ? line.substr(start)
                                    : line.substr(start, comma - start);
        cells.emplace_back(trim(cell));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

}  // namespace

TimeSeriesMatrix::TimeSeriesMatrix(Eigen::MatrixXd v, std::vector<std::string> col_names)
    : values(std::move(v)), names(std::move(col_names)) {
    validate(values, names);
}

TimeSeriesMatrix::TimeSeriesMatrix(Eigen::MatrixXd v) : values(std::move(v)) {
    names = default_names(values.cols());
    validate(values, names);
}

TimeSeriesMatrix parse_csv(const std::string& text, bool has_header) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
            line.erase(0, 3);  // UTF-8 BOM
        first = false;
        if (trim(line).empty()) continue;
        rows.push_back(split_row(line));
    }
    if (rows.empty()) throw InputError("CSV parse error: no rows");

    std::vector<std::string> names;
    size_t body_start = 0;
    if (has_header) {
        names.assign(rows[0].begin(), rows[0].end());
        body_start = 1;
    }
    size_t n_rows = rows.size() - body_start;
    if (n_rows == 0) throw InputError("CSV parse error: no rows after header");

    size_t p = rows[body_start].size();
    Eigen::MatrixXd values(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(p));
    for (size_t r = 0; r < n_rows; ++r) {
        const auto& cells = rows[body_start + r];
        if (cells.size() != p)
            throw InputError("CSV parse error: row " + std::to_string(r + 1) + " has " +
                             std::to_string(cells.size()) + " cells, expected " + std::to_string(p));
        for (size_t c = 0; c < p; ++c) {
            const std::string& cell = cells[c];
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc() || ptr != cell.data() + cell.size())
                throw InputError("CSV parse error: row " + std::to_string(r + 1) + ", column " +
                                 std::to_string(c + 1) + ": not a number: '" + cell + "'");
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = value;
        }
    }
    if (n_rows < 2) throw InputError("CSV parse error: need at least 2 data rows, got 1");
    if (names.empty()) names = default_names(values.cols());
    return TimeSeriesMatrix(std::move(values), std::move(names));
}

TimeSeriesMatrix load_csv(const std::string& path, bool has_header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), has_header);
}

LaggedCovariance sample_autocov(const TimeSeriesMatrix& Y, int k) {
    const Eigen::Index n = Y.n();
    if (k < 0 || k >= n)
        throw ContractError("autocovariance lag " + std::to_string(k) + " out of range [0, " +
                            std::to_string(n) + ")");
    Eigen::RowVectorXd mean = Y.values.colwise().mean();
    Eigen::MatrixXd centered = Y.values.rowwise() - mean;
    const Eigen::Index len = n - k;
    Eigen::MatrixXd cov =
        (centered.bottomRows(len).transpose() * centered.topRows(len)) / static_cast<double>(n);
    if (k == 0) cov = ((cov + cov.transpose()) * 0.5).eval();  // exact symmetry at lag 0
    return LaggedCovariance{k, std::move(cov)};
}

Standardized standardize(const TimeSeriesMatrix& Y) {
    Eigen::MatrixXd cov = sample_autocov(Y, 0).matrix;
    Eigen::MatrixXd whitener = inv_sqrt(cov);  // rejects near-singular covariance
    Eigen::VectorXd mean = Y.values.colwise().mean();
    Eigen::MatrixXd std_values = (Y.values.rowwise() - mean.transpose()) * whitener;
    return Standardized{TimeSeriesMatrix(std::move(std_values), Y.names), std::move(whitener),
                        std::move(mean)};
}

std::vector<double> cross_corr_profile(const TimeSeriesMatrix& Z, int i, int j, int m) {
    const Eigen::Index n = Z.n();
    if (i < 0 || i >= Z.p() || j < 0 || j >= Z.p())
        throw ContractError("cross correlation column index out of range");
    if (m < 0 || m >= n)
        throw ContractError("cross correlation lag bound " + std::to_string(m) +
                            " out of range [0, " + std::to_string(n) + ")");
    Eigen::VectorXd zi = Z.values.col(i).array() - Z.values.col(i).mean();
    Eigen::VectorXd zj = Z.values.col(j).array() - Z.values.col(j).mean();
    const double si = zi.squaredNorm();
    const double sj = zj.squaredNorm();
    if (si <= 0.0)
        throw NumericError("cross correlation undefined: column " + std::to_string(i + 1) +
                           " has zero variance");
    if (sj <= 0.0)
        throw NumericError("cross correlation undefined: column " + std::to_string(j + 1) +
                           " has zero variance");
    const double denom = std::sqrt(si * sj);

    std::vector<double> profile(2 * m + 1);
    for (int h = -m; h <= m; ++h) {
        const Eigen::Index len = n - std::abs(h);
        double num = (h >= 0) ? zi.segment(h, len).dot(zj.segment(0, len))
                              : zi.segment(0, len).dot(zj.segment(-h, len));
        profile[static_cast<size_t>(h + m)] = num / denom;
    }
    return profile;
}

double cross_corr(const TimeSeriesMatrix& Z, int i, int j, int h) {
    const int m = std::abs(h);
    return cross_corr_profile(Z, i, j, m)[static_cast<size_t>(h + m)];
}

}  // namespace tsseg
