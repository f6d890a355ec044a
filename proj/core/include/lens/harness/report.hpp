#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lens/metrics.hpp"

namespace lens::harness {

// Mean over images of one (regime, attack, metric, k, w, epsilon) combo.
struct AggregateRow {
    std::string regime;
    std::string attack_id;
    std::string metric;
    std::size_t k = 0;
    std::size_t w = 0;
    double epsilon = 0.0;
    double mean = 0.0;
    double std = 0.0;        // population standard deviation
    std::size_t n = 0;       // valid rows
    std::size_t errors = 0;  // rows recorded with an error code
};

inline constexpr const char* kAggregateCsvHeader = "regime,attack_id,metric,k,w,epsilon,mean,std,n,errors";

// Groups records by (attack, metric, k, w, epsilon) in order of first
// appearance. Error rows count toward `errors` only.
std::vector<AggregateRow> aggregate(const std::string& regime, const std::vector<MetricRecord>& records);

// Rows with n == 0 render mean and std as NA.
std::string render_aggregate_csv(const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> parse_aggregate_csv(const std::string& text);

// Fixed-width tables per (regime, attack); one line per (k, w, epsilon).
// Columns in order: top-k, w-LENS-recall@k, w-LENS-prec@k and their -div
// forms, then the error count.
std::string render_report(const std::vector<AggregateRow>& rows);

}  // namespace lens::harness
