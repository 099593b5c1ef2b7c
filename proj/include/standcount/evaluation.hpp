#pragma once

#include <string>
#include <vector>

#include "standcount/layout.hpp"

namespace standcount {

struct GroundTruthRow {
    int range_idx = 0;
    int row_idx = 0;
    long manual_count = 0;
};

struct EvalRow {
    int range_idx = 0;
    int row_idx = 0;
    long predicted = 0;
    long actual = 0;
    double residual = 0.0;  // predicted - actual
};

struct EvalResult {
    double r2 = 0.0;
    int n = 0;
    double mean_actual = 0.0;
    std::vector<EvalRow> rows;                         // inner join, reading order
    std::vector<std::pair<int, int>> unmatched_truth;  // keys only in truth
    std::vector<std::pair<int, int>> unmatched_pred;   // keys only in predictions
};

// Coefficient of determination 1 - sum((y - yhat)^2) / sum((y - ybar)^2)
// over paired rows; may be negative. Throws InsufficientOverlap for
// fewer than 2 pairs (or length mismatch) and DegenerateGroundTruth
// when every actual value is identical.
double r_squared(const std::vector<double>& actual, const std::vector<double>& predicted);

// Inner join of predictions and truth on (range, row); unmatched keys
// on either side are reported, never silently dropped.
EvalResult join_and_eval(const CountReport& report, const std::vector<GroundTruthRow>& truth);

// `range,row,count` CSV with header.
std::vector<GroundTruthRow> parse_truth_csv(const std::string& text);
std::vector<GroundTruthRow> load_truth_csv(const std::string& path);

// Also accepts counts.csv output as truth input (same schema).
std::string eval_rows_csv(const EvalResult& res);
std::string eval_summary(const EvalResult& res);

}  // namespace standcount
