#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "prefforge/common.hpp"

namespace prefforge {

// Dense row-major matrix of doubles. Row vectors are 1 x n tensors.
class Tensor2 {
public:
    Tensor2() = default;
    Tensor2(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        require(data_.size() == rows_ * cols_, "Tensor2: data length != rows*cols");
    }
    Tensor2(std::initializer_list<std::initializer_list<double>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            require(row.size() == cols_, "Tensor2: ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Tensor2 row(std::vector<double> v) {
        const std::size_t n = v.size();
        return Tensor2(1, n, std::move(v));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    std::vector<double> row_vector(std::size_t r) const {
        return std::vector<double>(row_ptr(r), row_ptr(r) + cols_);
    }

    bool same_shape(const Tensor2& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    bool all_finite() const {
        for (double x : data_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    void check_finite(const std::string& what) const {
        if (!all_finite()) throw DomainError(what + ": non-finite entries");
    }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    Tensor2& operator+=(const Tensor2& o) {
        require(same_shape(o), "Tensor2 +=: shape mismatch");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    Tensor2& operator*=(double s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend bool operator==(const Tensor2& a, const Tensor2& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
    require(a.cols() == b.rows(), "matmul: inner dimensions differ");
    Tensor2 out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ar = a.row_ptr(i);
        double* outr = out.row_ptr(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = ar[k];
            if (aik == 0.0) continue;
            const double* br = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols(); ++j) outr[j] += aik * br[j];
        }
    }
    return out;
}

inline Tensor2 transpose(const Tensor2& a) {
    Tensor2 out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(j, i) = a.at(i, j);
    return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size(), "dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size(), "distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace prefforge
