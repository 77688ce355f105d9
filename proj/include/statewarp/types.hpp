#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace statewarp {

/// Thrown by every validation failure in the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A length-L, d-variate observation sequence stored row-major (one row per
/// time point). The universal input of every distance and converter.
class TimeSeries {
public:
    TimeSeries() = default;

    TimeSeries(std::size_t length, std::size_t dims, double fill = 0.0)
        : length_(length), dims_(dims), values_(length * dims, fill)
    {
        if (length == 0 || dims == 0) throw Error("TimeSeries: length and dims must be >= 1");
    }

    TimeSeries(std::vector<double> values, std::size_t length, std::size_t dims)
        : length_(length), dims_(dims), values_(std::move(values))
    {
        if (length == 0 || dims == 0) throw Error("TimeSeries: length and dims must be >= 1");
        if (values_.size() != length * dims) throw Error("TimeSeries: value count != length * dims");
    }

    /// Univariate convenience constructor.
    static TimeSeries from_values(std::vector<double> v)
    {
        std::size_t n = v.size();
        return TimeSeries(std::move(v), n, 1);
    }

    std::size_t length() const { return length_; }
    std::size_t dims() const { return dims_; }

    double operator()(std::size_t t, std::size_t j) const { return values_[t * dims_ + j]; }
    double& operator()(std::size_t t, std::size_t j) { return values_[t * dims_ + j]; }

    const double* row(std::size_t t) const { return values_.data() + t * dims_; }
    double* row(std::size_t t) { return values_.data() + t * dims_; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool all_finite() const
    {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    void require_finite(const char* where) const
    {
        if (!all_finite()) throw Error(std::string(where) + ": non-finite value in series");
    }

    bool operator==(const TimeSeries& o) const
    {
        return length_ == o.length_ && dims_ == o.dims_ && values_ == o.values_;
    }

private:
    std::size_t length_ = 0;
    std::size_t dims_ = 0;
    std::vector<double> values_;
};

/// A named collection of series with one opaque integer label per series.
struct LabeledDataset {
    std::vector<TimeSeries> series;
    std::vector<int> labels;
    std::string name;

    std::size_t size() const { return series.size(); }

    void validate() const
    {
        if (series.size() != labels.size()) throw Error("LabeledDataset: series/label count mismatch");
        if (series.empty()) throw Error("LabeledDataset: empty dataset");
    }
};

/// Rectangular table of pairwise distances. Row/column ids are the indices of
/// the source series within the datasets they were computed from.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    DistanceMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, 0.0)
    {
        row_ids_.resize(rows);
        col_ids_.resize(cols);
        for (std::size_t i = 0; i < rows; ++i) row_ids_[i] = static_cast<int>(i);
        for (std::size_t j = 0; j < cols; ++j) col_ids_[j] = static_cast<int>(j);
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }

    const std::vector<int>& row_ids() const { return row_ids_; }
    const std::vector<int>& col_ids() const { return col_ids_; }

    void validate() const
    {
        for (double v : entries_)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw Error("DistanceMatrix: entry not finite and nonnegative");
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
    std::vector<int> row_ids_;
    std::vector<int> col_ids_;
};

} // namespace statewarp
