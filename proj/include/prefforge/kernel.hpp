#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "prefforge/common.hpp"
#include "prefforge/tensor.hpp"

namespace prefforge {

// Max-subtracted softmax. Entries positive, sum 1.
inline std::vector<double> softmax(const std::vector<double>& v) {
    require(!v.empty(), "softmax: empty input");
    double m = v[0];
    for (double x : v) {
        require_finite(x, "softmax");
        if (x > m) m = x;
    }
    std::vector<double> out(v.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - m);
        sum += out[i];
    }
    const double inv = 1.0 / sum;
    for (auto& x : out) x *= inv;
    return out;
}

inline double sigmoid(double x) {
    require_finite(x, "sigmoid");
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(sigmoid(x)) = -log(1 + exp(-x)), branch-stable for |x| > 700.
inline double log_sigmoid(double x) {
    require_finite(x, "log_sigmoid");
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

struct AttentionResult {
    Tensor2 output;   // q.rows x v.cols
    Tensor2 weights;  // q.rows x k.rows, rows are probability vectors
};

// Scaled dot-product attention: softmax(q k^T / sqrt(d_k)) v.
inline AttentionResult attention(const Tensor2& q, const Tensor2& k, const Tensor2& v,
                                 std::size_t d_k) {
    require(q.cols() == d_k && k.cols() == d_k, "attention: q/k column count must equal d_k");
    require(k.rows() == v.rows(), "attention: k and v row counts differ");
    require(k.rows() > 0, "attention: empty key set");
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));
    Tensor2 weights(q.rows(), k.rows());
    for (std::size_t i = 0; i < q.rows(); ++i) {
        std::vector<double> scores(k.rows());
        for (std::size_t j = 0; j < k.rows(); ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < d_k; ++c) s += q.at(i, c) * k.at(j, c);
            scores[j] = s * scale;
        }
        const std::vector<double> p = softmax(scores);
        for (std::size_t j = 0; j < k.rows(); ++j) weights.at(i, j) = p[j];
    }
    return {matmul(weights, v), std::move(weights)};
}

// Central finite differences, the gradient oracle every analytic backward is
// checked against.
inline std::vector<double> finite_diff_grad(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> theta,
    double eps) {
    require(eps >= 1e-7 && eps <= 1e-3, "finite_diff_grad: eps out of [1e-7, 1e-3]");
    std::vector<double> grad(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double orig = theta[i];
        theta[i] = orig + eps;
        const double fp = f(theta);
        theta[i] = orig - eps;
        const double fm = f(theta);
        theta[i] = orig;
        require_finite(fp, "finite_diff_grad: f(theta+eps)");
        require_finite(fm, "finite_diff_grad: f(theta-eps)");
        grad[i] = (fp - fm) / (2.0 * eps);
    }
    return grad;
}

// Relative error with denominator max(1, |reference|).
inline double rel_error(double got, double ref) {
    return std::fabs(got - ref) / std::max(1.0, std::fabs(ref));
}

}  // namespace prefforge
