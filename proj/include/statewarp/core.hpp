#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "statewarp/parallel.hpp"
#include "statewarp/types.hpp"

namespace statewarp {

using Metric = std::function<double(const TimeSeries&, const TimeSeries&)>;

/// Shifts and scales every channel to mean 0 and population standard
/// deviation 1 (divisor L). A zero-variance channel maps to all zeros.
inline TimeSeries znormalize(const TimeSeries& x)
{
    x.require_finite("znormalize");
    const std::size_t L = x.length(), d = x.dims();
    TimeSeries out(L, d);
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (std::size_t t = 0; t < L; ++t) sum += x(t, j);
        const double mean = sum / static_cast<double>(L);
        double ss = 0.0;
        for (std::size_t t = 0; t < L; ++t) {
            double dv = x(t, j) - mean;
            ss += dv * dv;
        }
        const double sd = std::sqrt(ss / static_cast<double>(L));
        if (sd == 0.0) {
            for (std::size_t t = 0; t < L; ++t) out(t, j) = 0.0;
        } else {
            for (std::size_t t = 0; t < L; ++t) out(t, j) = (x(t, j) - mean) / sd;
        }
    }
    return out;
}

namespace detail {

inline std::string trim_cr(std::string s)
{
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
    return s;
}

inline bool parse_int(const std::string& tok, long& out)
{
    if (tok.empty()) return false;
    char* end = nullptr;
    out = std::strtol(tok.c_str(), &end, 10);
    return end && *end == '\0';
}

inline bool parse_double(const std::string& tok, double& out)
{
    if (tok.empty()) return false;
    char* end = nullptr;
    out = std::strtod(tok.c_str(), &end);
    return end && *end == '\0' && std::isfinite(out);
}

} // namespace detail

/// Reads one dataset in UCR row format: `label<delim>v1<delim>v2...`, one
/// univariate series per line. Series may differ in length; no normalization
/// is applied.
inline LabeledDataset load_ucr(const std::string& path, char delimiter = ',')
{
    std::ifstream in(path);
    if (!in) throw Error("load_ucr: cannot open " + path);

    LabeledDataset ds;
    std::string::size_type slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    std::string::size_type dot = base.find_last_of('.');
    ds.name = dot == std::string::npos ? base : base.substr(0, dot);

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::trim_cr(line);
        if (line.empty()) continue;

        std::vector<std::string> tokens;
        std::string::size_type start = 0;
        while (true) {
            std::string::size_type pos = line.find(delimiter, start);
            if (pos == std::string::npos) {
                tokens.push_back(line.substr(start));
                break;
            }
            tokens.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }

        long label = 0;
        if (!detail::parse_int(tokens[0], label))
            throw Error("load_ucr: " + path + ":" + std::to_string(lineno) +
                        ": label '" + tokens[0] + "' is not an integer");
        if (tokens.size() < 2)
            throw Error("load_ucr: " + path + ":" + std::to_string(lineno) + ": no values");

        std::vector<double> values;
        values.reserve(tokens.size() - 1);
        for (std::size_t k = 1; k < tokens.size(); ++k) {
            double v = 0.0;
            if (!detail::parse_double(tokens[k], v))
                throw Error("load_ucr: " + path + ":" + std::to_string(lineno) +
                            ": value '" + tokens[k] + "' is not a finite number");
            values.push_back(v);
        }
        ds.series.push_back(TimeSeries::from_values(std::move(values)));
        ds.labels.push_back(static_cast<int>(label));
    }
    if (ds.series.empty()) throw Error("load_ucr: " + path + ": no records");
    return ds;
}

/// Writes the same row format with 17-significant-digit rendering, which
/// round-trips doubles exactly.
inline void save_ucr(const std::string& path, const LabeledDataset& ds, char delimiter = ',')
{
    ds.validate();
    std::ofstream out(path);
    if (!out) throw Error("save_ucr: cannot open " + path);
    char buf[64];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const TimeSeries& s = ds.series[i];
        if (s.dims() != 1) throw Error("save_ucr: only univariate series are representable");
        out << ds.labels[i];
        for (std::size_t t = 0; t < s.length(); ++t) {
            std::snprintf(buf, sizeof buf, "%.17g", s(t, 0));
            out << delimiter << buf;
        }
        out << '\n';
    }
    if (!out) throw Error("save_ucr: write failed for " + path);
}

/// entries[i][j] = metric(a.series[i], b.series[j]). Cells are evaluated in
/// parallel; each cell is an independent metric call, so the result is
/// identical to sequential evaluation.
inline DistanceMatrix pairwise_distances(const LabeledDataset& a, const LabeledDataset& b,
                                         const Metric& metric)
{
    a.validate();
    b.validate();
    const std::size_t m = a.size(), n = b.size();
    DistanceMatrix out(m, n);
    parallel_for(m * n, [&](std::size_t cell) {
        std::size_t i = cell / n, j = cell % n;
        try {
            out(i, j) = metric(a.series[i], b.series[j]);
        } catch (const std::exception& e) {
            throw Error("pairwise_distances: pair (" + std::to_string(i) + "," +
                        std::to_string(j) + "): " + e.what());
        }
    });
    return out;
}

} // namespace statewarp
