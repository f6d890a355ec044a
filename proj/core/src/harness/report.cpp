#include "lens/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "lens/error.hpp"
#include "lens/io.hpp"

namespace lens::harness {

std::vector<AggregateRow> aggregate(const std::string& regime, const std::vector<MetricRecord>& records) {
    using Key = std::tuple<std::string, std::string, std::size_t, std::size_t, double>;
    std::map<Key, std::size_t> index;
    std::vector<AggregateRow> rows;
    std::vector<std::vector<double>> values;
    for (const auto& r : records) {
        const Key key{r.attack_id, r.metric, r.k, r.w, r.epsilon};
        auto [it, inserted] = index.try_emplace(key, rows.size());
        if (inserted) {
            rows.push_back({regime, r.attack_id, r.metric, r.k, r.w, r.epsilon, 0.0, 0.0, 0, 0});
            values.emplace_back();
        }
        if (r.ok()) {
            values[it->second].push_back(r.value);
        } else {
            ++rows[it->second].errors;
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& v = values[i];
        rows[i].n = v.size();
        if (v.empty()) continue;
        double sum = 0.0;
        for (double x : v) sum += x;
        const double mean = sum / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        rows[i].mean = mean;
        rows[i].std = std::sqrt(ss / static_cast<double>(v.size()));
    }
    return rows;
}

std::string render_aggregate_csv(const std::vector<AggregateRow>& rows) {
    std::string out = std::string(kAggregateCsvHeader) + "\n";
    for (const auto& r : rows) {
        const bool valid = r.n > 0;
        out += r.regime + "," + r.attack_id + "," + r.metric + "," + std::to_string(r.k) + "," + std::to_string(r.w) + "," +
               format_double(r.epsilon) + "," + (valid ? format_double(r.mean) : "NA") + "," +
               (valid ? format_double(r.std) : "NA") + "," + std::to_string(r.n) + "," + std::to_string(r.errors) + "\n";
    }
    return out;
}

std::vector<AggregateRow> parse_aggregate_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kAggregateCsvHeader) throw ParseError("aggregate CSV header mismatch", 1);
    std::vector<AggregateRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 10) throw ParseError("expected 10 fields", line_no);
        AggregateRow r;
        r.regime = f[0];
        r.attack_id = f[1];
        r.metric = f[2];
        r.k = static_cast<std::size_t>(parse_int(f[3], line_no));
        r.w = static_cast<std::size_t>(parse_int(f[4], line_no));
        r.epsilon = parse_double(f[5], line_no);
        r.n = static_cast<std::size_t>(parse_int(f[8], line_no));
        r.errors = static_cast<std::size_t>(parse_int(f[9], line_no));
        if (r.n > 0) {
            r.mean = parse_double(f[6], line_no);
            r.std = parse_double(f[7], line_no);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

struct Column {
    const char* metric;
    const char* title;
};

constexpr Column kColumns[] = {
    {"topk", "top-k"},
    {"lens-recall", "LENS-recall@k"},
    {"lens-prec", "LENS-prec@k"},
    {"topk-div", "top-k-div"},
    {"lens-recall-div", "LENS-recall@k-div"},
    {"lens-prec-div", "LENS-prec@k-div"},
};

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

std::string render_report(const std::vector<AggregateRow>& rows) {
    constexpr std::size_t kKeyWidth = 6;
    constexpr std::size_t kEpsWidth = 10;
    constexpr std::size_t kColWidth = 18;
    if (rows.empty()) return "Attributional robustness summary\n\n(no data)\n";

    // Groups in first-appearance order.
    std::vector<std::pair<std::string, std::string>> groups;
    for (const auto& r : rows) {
        std::pair<std::string, std::string> g{r.regime, r.attack_id};
        if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
    }

    std::string out = "Attributional robustness summary\n";
    for (const auto& [regime, attack] : groups) {
        out += "\nregime: " + regime + "  attack: " + attack + "\n";
        std::string header = pad("k", kKeyWidth) + pad("w", kKeyWidth) + pad("epsilon", kEpsWidth);
        for (const auto& c : kColumns) header += pad(c.title, kColWidth);
        header += pad("errors", 8);
        out += header + "\n" + std::string(header.size(), '-') + "\n";

        using Key = std::tuple<std::size_t, std::size_t, double>;
        std::vector<Key> keys;
        for (const auto& r : rows) {
            if (r.regime != regime || r.attack_id != attack) continue;
            Key key{r.k, r.w, r.epsilon};
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
        }
        for (const auto& [k, w, eps] : keys) {
            std::string line = pad(std::to_string(k), kKeyWidth) + pad(std::to_string(w), kKeyWidth) + pad(fixed(eps), kEpsWidth);
            std::size_t errors = 0;
            for (const auto& c : kColumns) {
                std::string cell = "-";
                for (const auto& r : rows) {
                    if (r.regime == regime && r.attack_id == attack && r.metric == c.metric && r.k == k && r.w == w &&
                        r.epsilon == eps) {
                        cell = r.n > 0 ? fixed(r.mean) : "NA";
                        errors += r.errors;
                    }
                }
                line += pad(cell, kColWidth);
            }
            line += pad(std::to_string(errors), 8);
            out += line + "\n";
        }
    }
    return out;
}

}  // namespace lens::harness
