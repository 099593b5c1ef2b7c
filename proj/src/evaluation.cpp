#include "standcount/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace standcount {

double r_squared(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.size() != predicted.size())
        throw InsufficientOverlap("r_squared: length mismatch");
    const std::size_t n = actual.size();
    if (n < 2)
        throw InsufficientOverlap("r_squared: need at least 2 pairs, got " + std::to_string(n));

    double mean = 0.0;
    for (double y : actual) mean += y;
    mean /= static_cast<double>(n);

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
    }
    if (ss_tot == 0.0)
        throw DegenerateGroundTruth("r_squared: ground truth is constant");
    return 1.0 - ss_res / ss_tot;
}

EvalResult join_and_eval(const CountReport& report, const std::vector<GroundTruthRow>& truth) {
    std::map<std::pair<int, int>, long> pred;
    for (const auto& r : report.rows)
        pred[{r.range_idx, r.row_idx}] = r.predicted;

    EvalResult res;
    std::map<std::pair<int, int>, long> truth_map;
    for (const auto& t : truth) {
        truth_map[{t.range_idx, t.row_idx}] = t.manual_count;
        if (!pred.count({t.range_idx, t.row_idx}))
            res.unmatched_truth.push_back({t.range_idx, t.row_idx});
    }
    for (const auto& [key, value] : pred)
        if (!truth_map.count(key))
            res.unmatched_pred.push_back(key);

    std::vector<double> actual, predicted;
    for (const auto& [key, t_count] : truth_map) {
        auto it = pred.find(key);
        if (it == pred.end()) continue;
        res.rows.push_back({key.first, key.second, it->second, t_count,
                            static_cast<double>(it->second - t_count)});
        actual.push_back(static_cast<double>(t_count));
        predicted.push_back(static_cast<double>(it->second));
    }
    res.n = static_cast<int>(actual.size());
    if (res.n < 2)
        throw InsufficientOverlap("join_and_eval: only " + std::to_string(res.n)
                                  + " (range,row) keys matched");
    res.r2 = r_squared(actual, predicted);
    for (double y : actual) res.mean_actual += y;
    res.mean_actual /= res.n;
    return res;
}

std::vector<GroundTruthRow> parse_truth_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line))
        throw ParseError("truth CSV: empty file");
    // tolerate trailing CR from foreign line endings
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "range,row,count")
        throw ParseError("truth CSV: expected header `range,row,count`, got `" + line + "`");

    std::vector<GroundTruthRow> out;
    std::map<std::pair<int, int>, bool> seen;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        GroundTruthRow row;
        char extra;
        if (std::sscanf(line.c_str(), "%d,%d,%ld%c", &row.range_idx, &row.row_idx,
                        &row.manual_count, &extra) != 3)
            throw ParseError("truth CSV line " + std::to_string(line_no)
                             + ": expected `range,row,count`");
        if (row.manual_count < 0)
            throw RangeError("truth CSV line " + std::to_string(line_no)
                             + ": count must be non-negative");
        if (seen.count({row.range_idx, row.row_idx}))
            throw ParseError("truth CSV line " + std::to_string(line_no)
                             + ": duplicate (range,row) key");
        seen[{row.range_idx, row.row_idx}] = true;
        out.push_back(row);
    }
    return out;
}

std::vector<GroundTruthRow> load_truth_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open truth CSV: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_truth_csv(ss.str());
}

std::string eval_rows_csv(const EvalResult& res) {
    std::string out = "range,row,predicted,actual,residual\n";
    char buf[128];
    for (const auto& r : res.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%ld,%ld,%.1f\n", r.range_idx, r.row_idx,
                      r.predicted, r.actual, r.residual);
        out += buf;
    }
    return out;
}

std::string eval_summary(const EvalResult& res) {
    std::ostringstream os;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", res.r2);
    os << "r2=" << buf << "\n"
       << "rows_compared=" << res.n << "\n"
       << "mean_actual=" << res.mean_actual << "\n";
    os << "unmatched_truth=";
    for (std::size_t i = 0; i < res.unmatched_truth.size(); ++i)
        os << (i ? ";" : "") << "(" << res.unmatched_truth[i].first << ","
           << res.unmatched_truth[i].second << ")";
    os << "\nunmatched_predictions=";
    for (std::size_t i = 0; i < res.unmatched_pred.size(); ++i)
        os << (i ? ";" : "") << "(" << res.unmatched_pred[i].first << ","
           << res.unmatched_pred[i].second << ")";
    os << "\n";
    return os.str();
}

}  // namespace standcount
