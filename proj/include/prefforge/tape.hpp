#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "prefforge/common.hpp"
#include "prefforge/tensor.hpp"

namespace prefforge {
namespace tape {

using NodeId = int;

// Reverse-mode tape over Tensor2. Each op records a pullback closure; backward
// walks the nodes in reverse creation order, so accumulation is deterministic.
class Tape {
public:
    NodeId leaf(Tensor2 value, bool requires_grad = false) {
        return push(std::move(value), requires_grad, {});
    }

    NodeId matmul(NodeId a, NodeId b) {
        const Tensor2& A = value(a);
        const Tensor2& B = value(b);
        Tensor2 out = prefforge::matmul(A, B);
        return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t, const Tensor2& g) {
            if (t.needs(a)) t.accumulate(a, prefforge::matmul(g, prefforge::transpose(t.value(b))));
            if (t.needs(b)) t.accumulate(b, prefforge::matmul(prefforge::transpose(t.value(a)), g));
        });
    }

    NodeId add(NodeId a, NodeId b) {
        const Tensor2& A = value(a);
        const Tensor2& B = value(b);
        require(A.same_shape(B), "tape add: shape mismatch");
        Tensor2 out = A;
        out += B;
        return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t, const Tensor2& g) {
            if (t.needs(a)) t.accumulate(a, g);
            if (t.needs(b)) t.accumulate(b, g);
        });
    }

    // a (n x d) plus a 1 x d row broadcast over all rows.
    NodeId add_row(NodeId a, NodeId row) {
        const Tensor2& A = value(a);
        const Tensor2& R = value(row);
        require(R.rows() == 1 && R.cols() == A.cols(), "tape add_row: bias must be 1 x cols");
        Tensor2 out = A;
        for (std::size_t i = 0; i < out.rows(); ++i)
            for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j) += R.at(0, j);
        return push(std::move(out), needs(a) || needs(row), [a, row](Tape& t, const Tensor2& g) {
            if (t.needs(a)) t.accumulate(a, g);
            if (t.needs(row)) {
                Tensor2 gr(1, g.cols());
                for (std::size_t i = 0; i < g.rows(); ++i)
                    for (std::size_t j = 0; j < g.cols(); ++j) gr.at(0, j) += g.at(i, j);
                t.accumulate(row, gr);
            }
        });
    }

    NodeId scale(NodeId a, double s) {
        Tensor2 out = value(a);
        out *= s;
        return push(std::move(out), needs(a), [a, s](Tape& t, const Tensor2& g) {
            if (!t.needs(a)) return;
            Tensor2 ga = g;
            ga *= s;
            t.accumulate(a, ga);
        });
    }

    NodeId transpose(NodeId a) {
        Tensor2 out = prefforge::transpose(value(a));
        return push(std::move(out), needs(a), [a](Tape& t, const Tensor2& g) {
            if (t.needs(a)) t.accumulate(a, prefforge::transpose(g));
        });
    }

    NodeId slice_rows(NodeId a, std::size_t r0, std::size_t r1) {
        const Tensor2& A = value(a);
        require(r0 < r1 && r1 <= A.rows(), "tape slice_rows: bad range");
        Tensor2 out(r1 - r0, A.cols());
        for (std::size_t i = r0; i < r1; ++i)
            for (std::size_t j = 0; j < A.cols(); ++j) out.at(i - r0, j) = A.at(i, j);
        return push(std::move(out), needs(a), [a, r0](Tape& t, const Tensor2& g) {
            if (!t.needs(a)) return;
            Tensor2 ga(t.value(a).rows(), t.value(a).cols());
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j) ga.at(r0 + i, j) = g.at(i, j);
            t.accumulate(a, ga);
        });
    }

    NodeId slice_cols(NodeId a, std::size_t c0, std::size_t c1) {
        const Tensor2& A = value(a);
        require(c0 < c1 && c1 <= A.cols(), "tape slice_cols: bad range");
        Tensor2 out(A.rows(), c1 - c0);
        for (std::size_t i = 0; i < A.rows(); ++i)
            for (std::size_t j = c0; j < c1; ++j) out.at(i, j - c0) = A.at(i, j);
        return push(std::move(out), needs(a), [a, c0](Tape& t, const Tensor2& g) {
            if (!t.needs(a)) return;
            Tensor2 ga(t.value(a).rows(), t.value(a).cols());
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j) ga.at(i, c0 + j) = g.at(i, j);
            t.accumulate(a, ga);
        });
    }

    NodeId concat_rows(const std::vector<NodeId>& parts) {
        require(!parts.empty(), "tape concat_rows: empty");
        const std::size_t cols = value(parts[0]).cols();
        std::size_t rows = 0;
        bool any = false;
        for (NodeId p : parts) {
            require(value(p).cols() == cols, "tape concat_rows: column mismatch");
            rows += value(p).rows();
            any = any || needs(p);
        }
        Tensor2 out(rows, cols);
        std::size_t r = 0;
        for (NodeId p : parts) {
            const Tensor2& P = value(p);
            for (std::size_t i = 0; i < P.rows(); ++i, ++r)
                for (std::size_t j = 0; j < cols; ++j) out.at(r, j) = P.at(i, j);
        }
        return push(std::move(out), any, [parts](Tape& t, const Tensor2& g) {
            std::size_t r = 0;
            for (NodeId p : parts) {
                const std::size_t n = t.value(p).rows();
                if (t.needs(p)) {
                    Tensor2 gp(n, g.cols());
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < g.cols(); ++j) gp.at(i, j) = g.at(r + i, j);
                    t.accumulate(p, gp);
                }
                r += n;
            }
        });
    }

    NodeId concat_cols(const std::vector<NodeId>& parts) {
        require(!parts.empty(), "tape concat_cols: empty");
        const std::size_t rows = value(parts[0]).rows();
        std::size_t cols = 0;
        bool any = false;
        for (NodeId p : parts) {
            require(value(p).rows() == rows, "tape concat_cols: row mismatch");
            cols += value(p).cols();
            any = any || needs(p);
        }
        Tensor2 out(rows, cols);
        std::size_t c = 0;
        for (NodeId p : parts) {
            const Tensor2& P = value(p);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < P.cols(); ++j) out.at(i, c + j) = P.at(i, j);
            c += P.cols();
        }
        return push(std::move(out), any, [parts](Tape& t, const Tensor2& g) {
            std::size_t c = 0;
            for (NodeId p : parts) {
                const std::size_t n = t.value(p).cols();
                if (t.needs(p)) {
                    Tensor2 gp(g.rows(), n);
                    for (std::size_t i = 0; i < g.rows(); ++i)
                        for (std::size_t j = 0; j < n; ++j) gp.at(i, j) = g.at(i, c + j);
                    t.accumulate(p, gp);
                }
                c += n;
            }
        });
    }

    NodeId row_softmax(NodeId a) {
        const Tensor2& A = value(a);
        Tensor2 out(A.rows(), A.cols());
        for (std::size_t i = 0; i < A.rows(); ++i) {
            double m = A.at(i, 0);
            for (std::size_t j = 1; j < A.cols(); ++j) m = std::max(m, A.at(i, j));
            double sum = 0.0;
            for (std::size_t j = 0; j < A.cols(); ++j) {
                out.at(i, j) = std::exp(A.at(i, j) - m);
                sum += out.at(i, j);
            }
            const double inv = 1.0 / sum;
            for (std::size_t j = 0; j < A.cols(); ++j) out.at(i, j) *= inv;
        }
        const NodeId id = push(std::move(out), needs(a), {});
        node(id).backward = [a, id](Tape& t, const Tensor2& g) {
            if (!t.needs(a)) return;
            const Tensor2& p = t.value(id);
            Tensor2 ga(g.rows(), g.cols());
            for (std::size_t i = 0; i < g.rows(); ++i) {
                double dotgp = 0.0;
                for (std::size_t j = 0; j < g.cols(); ++j) dotgp += g.at(i, j) * p.at(i, j);
                for (std::size_t j = 0; j < g.cols(); ++j)
                    ga.at(i, j) = p.at(i, j) * (g.at(i, j) - dotgp);
            }
            t.accumulate(a, ga);
        };
        return id;
    }

    // Row-wise layer norm with learned gain/bias rows (1 x d).
    NodeId layer_norm(NodeId a, NodeId gain, NodeId bias, double eps = 1e-5) {
        const Tensor2& A = value(a);
        const Tensor2& G = value(gain);
        const Tensor2& B = value(bias);
        require(G.rows() == 1 && B.rows() == 1 && G.cols() == A.cols() && B.cols() == A.cols(),
                "tape layer_norm: gain/bias must be 1 x cols");
        const std::size_t n = A.rows(), d = A.cols();
        auto xhat = std::make_shared<Tensor2>(n, d);
        auto inv_std = std::make_shared<std::vector<double>>(n);
        Tensor2 out(n, d);
        for (std::size_t i = 0; i < n; ++i) {
            double mu = 0.0;
            for (std::size_t j = 0; j < d; ++j) mu += A.at(i, j);
            mu /= static_cast<double>(d);
            double var = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double c = A.at(i, j) - mu;
                var += c * c;
            }
            var /= static_cast<double>(d);
            const double inv = 1.0 / std::sqrt(var + eps);
            (*inv_std)[i] = inv;
            for (std::size_t j = 0; j < d; ++j) {
                const double xh = (A.at(i, j) - mu) * inv;
                xhat->at(i, j) = xh;
                out.at(i, j) = G.at(0, j) * xh + B.at(0, j);
            }
        }
        return push(std::move(out), needs(a) || needs(gain) || needs(bias),
                    [a, gain, bias, xhat, inv_std](Tape& t, const Tensor2& g) {
                        const std::size_t n = g.rows(), d = g.cols();
                        const Tensor2& G = t.value(gain);
                        if (t.needs(gain) || t.needs(bias)) {
                            Tensor2 gg(1, d), gb(1, d);
                            for (std::size_t i = 0; i < n; ++i)
                                for (std::size_t j = 0; j < d; ++j) {
                                    gg.at(0, j) += g.at(i, j) * xhat->at(i, j);
                                    gb.at(0, j) += g.at(i, j);
                                }
                            if (t.needs(gain)) t.accumulate(gain, gg);
                            if (t.needs(bias)) t.accumulate(bias, gb);
                        }
                        if (!t.needs(a)) return;
                        Tensor2 ga(n, d);
                        for (std::size_t i = 0; i < n; ++i) {
                            double mean_h = 0.0, mean_hx = 0.0;
                            for (std::size_t j = 0; j < d; ++j) {
                                const double h = g.at(i, j) * G.at(0, j);
                                mean_h += h;
                                mean_hx += h * xhat->at(i, j);
                            }
                            mean_h /= static_cast<double>(d);
                            mean_hx /= static_cast<double>(d);
                            for (std::size_t j = 0; j < d; ++j) {
                                const double h = g.at(i, j) * G.at(0, j);
                                ga.at(i, j) =
                                    (*inv_std)[i] * (h - mean_h - xhat->at(i, j) * mean_hx);
                            }
                        }
                        t.accumulate(a, ga);
                    });
    }

    NodeId tanh(NodeId a) {
        const Tensor2& A = value(a);
        Tensor2 out(A.rows(), A.cols());
        for (std::size_t i = 0; i < A.size(); ++i) out[i] = std::tanh(A[i]);
        const NodeId id = push(std::move(out), needs(a), {});
        node(id).backward = [a, id](Tape& t, const Tensor2& g) {
            if (!t.needs(a)) return;
            const Tensor2& y = t.value(id);
            Tensor2 ga(g.rows(), g.cols());
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] = g[i] * (1.0 - y[i] * y[i]);
            t.accumulate(a, ga);
        };
        return id;
    }

    // out[i, :] = table[idx[i], :]. Pullback scatter-adds in index order.
    NodeId gather_rows(NodeId table, std::vector<int> idx) {
        const Tensor2& T = value(table);
        for (int i : idx)
            require(i >= 0 && static_cast<std::size_t>(i) < T.rows(),
                    "tape gather_rows: index out of range");
        Tensor2 out(idx.size(), T.cols());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < T.cols(); ++j)
                out.at(i, j) = T.at(static_cast<std::size_t>(idx[i]), j);
        return push(std::move(out), needs(table),
                    [table, idx = std::move(idx)](Tape& t, const Tensor2& g) {
                        if (!t.needs(table)) return;
                        Tensor2 gt(t.value(table).rows(), t.value(table).cols());
                        for (std::size_t i = 0; i < idx.size(); ++i)
                            for (std::size_t j = 0; j < g.cols(); ++j)
                                gt.at(static_cast<std::size_t>(idx[i]), j) += g.at(i, j);
                        t.accumulate(table, gt);
                    });
    }

    const Tensor2& value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }

    bool needs(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }

    // Seeds d(objective)/d(root) = seed and propagates to all leaves.
    void backward(NodeId root, const Tensor2& seed) { backward_multi({{root, seed}}); }

    // Multi-root sweep: seeds several nodes (e.g. every logit node of a batch
    // built on one tape) and runs a single reverse pass. Seeds on the same
    // node accumulate.
    void backward_multi(const std::vector<std::pair<NodeId, Tensor2>>& seeds) {
        require(!seeds.empty(), "tape backward: no seeds");
        for (auto& n : nodes_) {
            if (n.requires_grad)
                n.grad = Tensor2(n.value.rows(), n.value.cols());
            else
                n.grad = Tensor2();
            n.touched = false;
        }
        NodeId top = 0;
        for (const auto& [root, seed] : seeds) {
            require(needs(root), "tape backward: root does not require grad");
            require(value(root).same_shape(seed), "tape backward: seed shape mismatch");
            accumulate(root, seed);
            top = std::max(top, root);
        }
        for (NodeId id = top; id >= 0; --id) {
            Node& n = node(id);
            if (!n.requires_grad || !n.touched || !n.backward) continue;
            n.backward(*this, n.grad);
        }
    }

    const Tensor2& grad(NodeId id) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        require(n.requires_grad, "tape grad: node does not require grad");
        return n.grad;
    }

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Tensor2 value;
        Tensor2 grad;
        bool requires_grad = false;
        bool touched = false;  // received gradient this sweep; untouched nodes are skipped
        std::function<void(Tape&, const Tensor2&)> backward;
    };

    Node& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }

    NodeId push(Tensor2 value, bool requires_grad,
                std::function<void(Tape&, const Tensor2&)> backward) {
        nodes_.push_back(
            Node{std::move(value), Tensor2(), requires_grad, false, std::move(backward)});
        return static_cast<NodeId>(nodes_.size() - 1);
    }

    void accumulate(NodeId id, const Tensor2& g) {
        Node& n = node(id);
        require(n.grad.same_shape(g), "tape accumulate: grad shape mismatch");
        n.grad += g;
        n.touched = true;
    }

    std::vector<Node> nodes_;
};

}  // namespace tape
}  // namespace prefforge
