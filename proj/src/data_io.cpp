#include "fmuad/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fmuad {

namespace {

double parse_cell(const std::string& cell, const std::string& path, size_t line, size_t col) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError(path + ":" + std::to_string(line) + ": column " + std::to_string(col + 1) +
                         ": non-numeric cell '" + cell + "'");
    return value;
}

}  // namespace

SeriesMatrix load_csv_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");

    std::vector<std::vector<double>> rows;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            row.push_back(parse_cell(cell, path, lineno, col));
            ++col;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path + ":" + std::to_string(lineno) + ": ragged row, expected " +
                             std::to_string(rows.front().size()) + " columns, got " +
                             std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": file contains no data rows");

    const int t_len = static_cast<int>(rows.size());
    const int m = static_cast<int>(rows.front().size());
    SeriesMatrix series;
    series.values = Tensor::zeros({m, t_len});
    for (int t = 0; t < t_len; ++t)
        for (int f = 0; f < m; ++f)
            series.values.at(f, t) = rows[static_cast<size_t>(t)][static_cast<size_t>(f)];
    return series;
}

void write_csv_series(const SeriesMatrix& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out.precision(17);
    const int m = series.features();
    for (int t = 0; t < series.steps(); ++t) {
        for (int f = 0; f < m; ++f) {
            if (f) out << ",";
            out << series.values.at(f, t);
        }
        out << "\n";
    }
    if (!out) throw ParseError(path + ": write failed");
}

std::vector<bool> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::vector<bool> labels;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (line == "0")
            labels.push_back(false);
        else if (line == "1")
            labels.push_back(true);
        else
            throw ParseError(path + ":" + std::to_string(lineno) + ": label must be 0 or 1, got '" +
                             line + "'");
    }
    return labels;
}

void write_labels(const std::vector<bool>& labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    for (bool l : labels) out << (l ? "1" : "0") << "\n";
    if (!out) throw ParseError(path + ": write failed");
}

NormStats compute_norm_stats(const SeriesMatrix& train) {
    const int m = train.features();
    NormStats stats;
    stats.min.assign(static_cast<size_t>(m), 0.0);
    stats.max.assign(static_cast<size_t>(m), 0.0);
    for (int f = 0; f < m; ++f) {
        double lo = train.values.at(f, 0), hi = lo;
        for (int t = 1; t < train.steps(); ++t) {
            double v = train.values.at(f, t);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        stats.min[static_cast<size_t>(f)] = lo;
        stats.max[static_cast<size_t>(f)] = hi;
    }
    return stats;
}

void apply_normalization(SeriesMatrix& series, const NormStats& stats, bool clamp_test_range) {
    const int m = series.features();
    if (static_cast<size_t>(m) != stats.min.size())
        throw ContractError("normalization: stats cover " + std::to_string(stats.min.size()) +
                            " features, series has " + std::to_string(m));
    for (int f = 0; f < m; ++f) {
        double lo = stats.min[static_cast<size_t>(f)];
        double range = stats.max[static_cast<size_t>(f)] - lo;
        for (int t = 0; t < series.steps(); ++t) {
            double& v = series.values.at(f, t);
            v = range > 0.0 ? (v - lo) / range : 0.0;
            if (clamp_test_range) v = std::clamp(v, -1.0, 2.0);
        }
    }
}

Dataset load_csv_dataset(const std::string& train_path, const std::string& test_path,
                         const std::string& labels_path) {
    Dataset ds;
    ds.train = load_csv_series(train_path);
    ds.test = load_csv_series(test_path);
    if (ds.train.features() != ds.test.features())
        throw ParseError("train has " + std::to_string(ds.train.features()) +
                         " features but test has " + std::to_string(ds.test.features()));
    ds.test_labels = load_labels(labels_path);
    if (static_cast<int>(ds.test_labels.size()) != ds.test.steps())
        throw ParseError(labels_path + ": " + std::to_string(ds.test_labels.size()) +
                         " labels for " + std::to_string(ds.test.steps()) + " test rows");
    ds.stats = compute_norm_stats(ds.train);
    apply_normalization(ds.train, ds.stats, false);
    apply_normalization(ds.test, ds.stats, true);
    return ds;
}

}  // namespace fmuad
