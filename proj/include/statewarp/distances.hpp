#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "statewarp/types.hpp"

#include "json.hpp"

namespace statewarp {

/// Monotone, continuous, boundary-anchored index pairing between two series.
/// Pairs are 1-based, matching the usual warping-path convention.
struct AlignmentPath {
    std::vector<std::pair<int, int>> pairs;

    std::size_t size() const { return pairs.size(); }

    /// Checks boundary, continuity and monotonicity against the two lengths.
    bool valid(std::size_t len_q, std::size_t len_c) const
    {
        if (pairs.empty()) return false;
        if (pairs.front() != std::make_pair(1, 1)) return false;
        if (pairs.back() != std::make_pair(static_cast<int>(len_q), static_cast<int>(len_c)))
            return false;
        for (std::size_t i = 1; i < pairs.size(); ++i) {
            int da = pairs[i].first - pairs[i - 1].first;
            int db = pairs[i].second - pairs[i - 1].second;
            bool step = (da == 0 && db == 1) || (da == 1 && db == 0) || (da == 1 && db == 1);
            if (!step) return false;
        }
        return pairs.size() >= std::max(len_q, len_c);
    }
};

/// Two-column integer CSV (`a_index,b_index`), one row per matched pair.
inline void write_path_csv(std::ostream& out, const AlignmentPath& path)
{
    out << "a_index,b_index\n";
    for (const auto& [a, b] : path.pairs) out << a << ',' << b << '\n';
}

/// JSON array of [a, b] pairs for plot tooling.
inline nlohmann::json path_to_json(const AlignmentPath& path)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [a, b] : path.pairs) arr.push_back({a, b});
    return arr;
}

/// Stretch-penalty parameters: logistic weight steepness and its ceiling.
struct WdtwParams {
    double steepness = 0.05; // g_w
    double max_weight = 1.0; // w_max

    void validate() const
    {
        if (!(steepness >= 0.0)) throw Error("WdtwParams: steepness must be >= 0");
        if (!(max_weight > 0.0)) throw Error("WdtwParams: max_weight must be > 0");
    }
};

namespace detail {

inline double sq_point_dist(const double* a, const double* b, std::size_t d)
{
    if (d == 1) {
        double diff = a[0] - b[0];
        return diff * diff;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        double diff = a[k] - b[k];
        s += diff * diff;
    }
    return s;
}

inline void require_same_dims(const TimeSeries& q, const TimeSeries& c, const char* where)
{
    if (q.dims() != c.dims()) throw Error(std::string(where) + ": dimension mismatch");
}

inline void check_band(const TimeSeries& q, const TimeSeries& c, const std::optional<int>& band,
                       const char* where)
{
    if (!band) return;
    long diff = static_cast<long>(q.length()) - static_cast<long>(c.length());
    if (*band < std::labs(diff))
        throw Error(std::string(where) + ": infeasible band (radius " + std::to_string(*band) +
                    " < length difference " + std::to_string(std::labs(diff)) + ")");
}

} // namespace detail

struct DtwResult {
    double cost = 0.0;
    AlignmentPath path;
};

/// Cost-only warping distance: cumulative SQUARED point distance over the
/// best monotone path, O(L_Q * L_C) time and one rolling row of memory.
/// Cell order and arithmetic match the path-building variant exactly, so the
/// two agree bitwise.
inline double dtw_cost(const TimeSeries& q, const TimeSeries& c,
                       std::optional<int> band = std::nullopt)
{
    detail::require_same_dims(q, c, "dtw");
    detail::check_band(q, c, band, "dtw");

    // The recurrence is symmetric in its arguments, so roll over the shorter
    // side to keep the buffer at O(min(L_Q, L_C)).
    const TimeSeries& rows = q.length() >= c.length() ? q : c;
    const TimeSeries& cols = q.length() >= c.length() ? c : q;
    const std::size_t n_rows = rows.length(), n_cols = cols.length(), d = rows.dims();
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> prev(n_cols + 1, inf), cur(n_cols + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n_rows; ++i) {
        cur[0] = inf;
        std::size_t j_lo = 1, j_hi = n_cols;
        if (band) {
            long lo = static_cast<long>(i) - *band;
            long hi = static_cast<long>(i) + *band;
            if (lo > 1) j_lo = static_cast<std::size_t>(lo);
            if (hi < static_cast<long>(n_cols)) j_hi = static_cast<std::size_t>(hi);
            for (std::size_t j = 1; j < j_lo; ++j) cur[j] = inf;
            for (std::size_t j = j_hi + 1; j <= n_cols; ++j) cur[j] = inf;
        }
        const double* rp = rows.row(i - 1);
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            double local = detail::sq_point_dist(rp, cols.row(j - 1), d);
            double best = std::min(prev[j - 1], std::min(prev[j], cur[j - 1]));
            cur[j] = local + best;
        }
        std::swap(prev, cur);
    }
    return prev[n_cols];
}

/// Warping distance plus one optimal path. Ties in the backtrack prefer the
/// diagonal, then the left, then the down predecessor; the cost is unaffected.
inline DtwResult dtw(const TimeSeries& q, const TimeSeries& c,
                     std::optional<int> band = std::nullopt)
{
    detail::require_same_dims(q, c, "dtw");
    detail::check_band(q, c, band, "dtw");

    const std::size_t lq = q.length(), lc = c.length(), d = q.dims();
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> acc((lq + 1) * (lc + 1), inf);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * (lc + 1) + j]; };
    at(0, 0) = 0.0;

    for (std::size_t i = 1; i <= lq; ++i) {
        std::size_t j_lo = 1, j_hi = lc;
        if (band) {
            long lo = static_cast<long>(i) - *band;
            long hi = static_cast<long>(i) + *band;
            if (lo > 1) j_lo = static_cast<std::size_t>(lo);
            if (hi < static_cast<long>(lc)) j_hi = static_cast<std::size_t>(hi);
        }
        const double* qp = q.row(i - 1);
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            double local = detail::sq_point_dist(qp, c.row(j - 1), d);
            double best = std::min(at(i - 1, j - 1), std::min(at(i - 1, j), at(i, j - 1)));
            at(i, j) = local + best;
        }
    }

    DtwResult result;
    result.cost = at(lq, lc);

    std::size_t i = lq, j = lc;
    std::vector<std::pair<int, int>> rev;
    rev.emplace_back(static_cast<int>(i), static_cast<int>(j));
    while (i > 1 || j > 1) {
        if (i == 1) {
            --j;
        } else if (j == 1) {
            --i;
        } else {
            double diag = at(i - 1, j - 1), left = at(i, j - 1), down = at(i - 1, j);
            double best = std::min(diag, std::min(left, down));
            if (diag == best) {
                --i;
                --j;
            } else if (left == best) {
                --j;
            } else {
                --i;
            }
        }
        rev.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
    result.path.pairs.assign(rev.rbegin(), rev.rend());
    return result;
}

/// Lock-step distance; both series must share length and dimension.
inline double euclidean(const TimeSeries& q, const TimeSeries& c)
{
    if (q.length() != c.length()) throw Error("euclidean: length mismatch");
    detail::require_same_dims(q, c, "euclidean");
    double s = 0.0;
    for (std::size_t t = 0; t < q.length(); ++t)
        s += detail::sq_point_dist(q.row(t), c.row(t), q.dims());
    return std::sqrt(s);
}

namespace detail {

inline void enumerate_rec(const TimeSeries& q, const TimeSeries& c, std::size_t i, std::size_t j,
                          double acc, double& best)
{
    acc = acc + sq_point_dist(q.row(i), c.row(j), q.dims());
    if (i + 1 == q.length() && j + 1 == c.length()) {
        if (acc < best) best = acc;
        return;
    }
    if (i + 1 < q.length()) enumerate_rec(q, c, i + 1, j, acc, best);
    if (j + 1 < c.length()) enumerate_rec(q, c, i, j + 1, acc, best);
    if (i + 1 < q.length() && j + 1 < c.length()) enumerate_rec(q, c, i + 1, j + 1, acc, best);
}

} // namespace detail

/// Brute-force alignment oracle: walks every path satisfying the boundary,
/// continuity and monotonicity constraints and returns the minimum cumulative
/// cost. Intentionally shares no code with the dynamic program.
inline double enumerate_paths_cost(const TimeSeries& q, const TimeSeries& c)
{
    detail::require_same_dims(q, c, "enumerate_paths_cost");
    if (q.length() > 8 || c.length() > 8)
        throw Error("enumerate_paths_cost: lengths must be <= 8");
    double best = std::numeric_limits<double>::infinity();
    detail::enumerate_rec(q, c, 0, 0, 0.0, best);
    return best;
}

/// Keogh-Pazzani derivative estimate per channel; endpoints copy the nearest
/// interior value so the output keeps length L.
inline TimeSeries derivative_transform(const TimeSeries& q)
{
    const std::size_t L = q.length(), d = q.dims();
    if (L < 3) throw Error("derivative_transform: length must be >= 3");
    TimeSeries out(L, d);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t t = 1; t + 1 < L; ++t)
            out(t, j) = ((q(t, j) - q(t - 1, j)) + (q(t + 1, j) - q(t - 1, j)) / 2.0) / 2.0;
        out(0, j) = out(1, j);
        out(L - 1, j) = out(L - 2, j);
    }
    return out;
}

/// Derivative DTW: the warping distance on derivative-transformed inputs.
inline double ddtw(const TimeSeries& q, const TimeSeries& c)
{
    return dtw_cost(derivative_transform(q), derivative_transform(c));
}

/// Logistic stretch weights w_a = w_max / (1 + exp(-g_w * (a - L/2))) for
/// a = 0..L-1; nondecreasing in a whenever g_w > 0.
inline std::vector<double> wdtw_weights(std::size_t L, const WdtwParams& p)
{
    p.validate();
    std::vector<double> w(L);
    const double half = static_cast<double>(L) / 2.0;
    for (std::size_t a = 0; a < L; ++a)
        w[a] = p.max_weight / (1.0 + std::exp(-p.steepness * (static_cast<double>(a) - half)));
    return w;
}

/// Weighted DTW: local cost w(|i-j|) * squared point distance, full window.
inline double wdtw(const TimeSeries& q, const TimeSeries& c, const WdtwParams& p)
{
    detail::require_same_dims(q, c, "wdtw");
    const std::size_t lq = q.length(), lc = c.length(), d = q.dims();
    const std::vector<double> w = wdtw_weights(std::max(lq, lc), p);
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> prev(lc + 1, inf), cur(lc + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= lq; ++i) {
        cur[0] = inf;
        const double* qp = q.row(i - 1);
        for (std::size_t j = 1; j <= lc; ++j) {
            std::size_t a = i >= j ? i - j : j - i;
            double local = w[a] * detail::sq_point_dist(qp, c.row(j - 1), d);
            double best = std::min(prev[j - 1], std::min(prev[j], cur[j - 1]));
            cur[j] = local + best;
        }
        std::swap(prev, cur);
    }
    return prev[lc];
}

/// Weighted derivative DTW.
inline double wddtw(const TimeSeries& q, const TimeSeries& c, const WdtwParams& p)
{
    return wdtw(derivative_transform(q), derivative_transform(c), p);
}

/// Complexity estimate CE = sqrt(sum of squared one-step differences),
/// accumulated over all channels.
inline double complexity_estimate(const TimeSeries& q)
{
    const std::size_t L = q.length(), d = q.dims();
    if (L < 2) throw Error("complexity_estimate: length must be >= 2");
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t t = 0; t + 1 < L; ++t) {
            double diff = q(t + 1, j) - q(t, j);
            s += diff * diff;
        }
    return std::sqrt(s);
}

/// Complexity-invariant DTW: warping cost times the complexity ratio. The
/// denominator is floored at 1e-12 so constant series stay finite.
inline double cid_dtw(const TimeSeries& q, const TimeSeries& c)
{
    double ce_q = complexity_estimate(q);
    double ce_c = complexity_estimate(c);
    double cf = std::max(ce_q, ce_c) / std::max(std::min(ce_q, ce_c), 1e-12);
    return dtw_cost(q, c) * cf;
}

} // namespace statewarp
