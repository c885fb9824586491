#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "tamlec/tensor.hpp"

namespace tamlec::ag {

/// One record on the tape. Values are matrices ([rows, cols]); scalars are
/// [1, 1]. `backprop` scatters this node's grad into its parents' grads.
struct Node {
    std::size_t rows = 1, cols = 1;
    std::vector<double> value;
    std::vector<double> grad;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backprop;
    Tensor* param = nullptr;  // leaf bound to a parameter tensor
    bool requires_grad = false;

    std::size_t size() const { return rows * cols; }
    void ensure_grad() {
        if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    }
};

using Var = std::shared_ptr<Node>;

inline Var make_node(std::size_t rows, std::size_t cols) {
    auto n = std::make_shared<Node>();
    n->rows = rows;
    n->cols = cols;
    n->value.assign(rows * cols, 0.0);
    return n;
}

/// Constant (no gradient).
inline Var constant(std::size_t rows, std::size_t cols,
                    std::vector<double> data) {
    require_shape(data.size() == rows * cols, "constant data size");
    auto n = make_node(rows, cols);
    n->value = std::move(data);
    return n;
}

inline Var scalar(double v) { return constant(1, 1, {v}); }

/// Leaf over a parameter. Gradients accumulate into `p.grad` during
/// backward() when `train` is set.
inline Var leaf(Tensor& p, bool train = true) {
    std::size_t r = p.rows(), c = p.cols();
    auto n = make_node(r, c);
    n->value = p.data;
    n->requires_grad = train;
    if (train) n->param = &p;
    return n;
}

namespace detail {
inline void propagate_flags(const Var& out) {
    for (const auto& p : out->parents)
        if (p->requires_grad) {
            out->requires_grad = true;
            return;
        }
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Primitives
// ---------------------------------------------------------------------------

inline Var matmul(const Var& a, const Var& b) {
    require_shape(a->cols == b->rows, "matmul inner dims");
    auto out = make_node(a->rows, b->cols);
    const std::size_t m = a->rows, k = a->cols, n = b->cols;
    const double* A = a->value.data();
    const double* B = b->value.data();
    double* C = out->value.data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            const double av = A[i * k + p];
            if (av == 0.0) continue;
            const double* brow = B + p * n;
            double* crow = C + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    out->parents = {a, b};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [m, k, n](Node& o) {
            Node& A = *o.parents[0];
            Node& B = *o.parents[1];
            if (A.requires_grad) {
                A.ensure_grad();
                // dA += dC * B^T
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t p = 0; p < k; ++p) {
                        double acc = 0;
                        const double* gr = o.grad.data() + i * n;
                        const double* br = B.value.data() + p * n;
                        for (std::size_t j = 0; j < n; ++j) acc += gr[j] * br[j];
                        A.grad[i * k + p] += acc;
                    }
            }
            if (B.requires_grad) {
                B.ensure_grad();
                // dB += A^T * dC
                for (std::size_t p = 0; p < k; ++p)
                    for (std::size_t i = 0; i < m; ++i) {
                        const double av = A.value[i * k + p];
                        if (av == 0.0) continue;
                        const double* gr = o.grad.data() + i * n;
                        double* br = B.grad.data() + p * n;
                        for (std::size_t j = 0; j < n; ++j) br[j] += av * gr[j];
                    }
            }
        };
    return out;
}

/// C = A * B^T, with A [m,k] and B [n,k].
inline Var matmul_nt(const Var& a, const Var& b) {
    require_shape(a->cols == b->cols, "matmul_nt inner dims");
    auto out = make_node(a->rows, b->rows);
    const std::size_t m = a->rows, k = a->cols, n = b->rows;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0;
            const double* ar = a->value.data() + i * k;
            const double* br = b->value.data() + j * k;
            for (std::size_t p = 0; p < k; ++p) acc += ar[p] * br[p];
            out->value[i * n + j] = acc;
        }
    out->parents = {a, b};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [m, k, n](Node& o) {
            Node& A = *o.parents[0];
            Node& B = *o.parents[1];
            if (A.requires_grad) {
                A.ensure_grad();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) {
                        const double g = o.grad[i * n + j];
                        if (g == 0.0) continue;
                        const double* br = B.value.data() + j * k;
                        double* ar = A.grad.data() + i * k;
                        for (std::size_t p = 0; p < k; ++p) ar[p] += g * br[p];
                    }
            }
            if (B.requires_grad) {
                B.ensure_grad();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) {
                        const double g = o.grad[i * n + j];
                        if (g == 0.0) continue;
                        const double* ar = A.value.data() + i * k;
                        double* br = B.grad.data() + j * k;
                        for (std::size_t p = 0; p < k; ++p) br[p] += g * ar[p];
                    }
            }
        };
    return out;
}

inline Var add(const Var& a, const Var& b) {
    require_shape(a->rows == b->rows && a->cols == b->cols, "add shapes");
    auto out = make_node(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i)
        out->value[i] = a->value[i] + b->value[i];
    out->parents = {a, b};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [](Node& o) {
            for (auto& pp : o.parents) {
                Node& p = *pp;
                if (!p.requires_grad) continue;
                p.ensure_grad();
                for (std::size_t i = 0; i < o.size(); ++i)
                    p.grad[i] += o.grad[i];
            }
        };
    return out;
}

/// Bias broadcast: each row of a gets b (a row vector) added.
inline Var add_rowvec(const Var& a, const Var& b) {
    require_shape(b->rows == 1 && b->cols == a->cols, "add_rowvec shapes");
    auto out = make_node(a->rows, a->cols);
    for (std::size_t i = 0; i < a->rows; ++i)
        for (std::size_t j = 0; j < a->cols; ++j)
            out->value[i * a->cols + j] = a->value[i * a->cols + j] + b->value[j];
    out->parents = {a, b};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [](Node& o) {
            Node& A = *o.parents[0];
            Node& B = *o.parents[1];
            if (A.requires_grad) {
                A.ensure_grad();
                for (std::size_t i = 0; i < o.size(); ++i)
                    A.grad[i] += o.grad[i];
            }
            if (B.requires_grad) {
                B.ensure_grad();
                for (std::size_t i = 0; i < o.rows; ++i)
                    for (std::size_t j = 0; j < o.cols; ++j)
                        B.grad[j] += o.grad[i * o.cols + j];
            }
        };
    return out;
}

inline Var mul_scalar(const Var& a, double s) {
    auto out = make_node(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i) out->value[i] = a->value[i] * s;
    out->parents = {a};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [s](Node& o) {
            Node& A = *o.parents[0];
            A.ensure_grad();
            for (std::size_t i = 0; i < o.size(); ++i) A.grad[i] += o.grad[i] * s;
        };
    return out;
}

inline Var relu(const Var& a) {
    auto out = make_node(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i)
        out->value[i] = a->value[i] > 0 ? a->value[i] : 0.0;
    out->parents = {a};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [](Node& o) {
            Node& A = *o.parents[0];
            A.ensure_grad();
            for (std::size_t i = 0; i < o.size(); ++i)
                if (A.value[i] > 0) A.grad[i] += o.grad[i];
        };
    return out;
}

/// Row-wise softmax (over the last axis).
inline Var softmax_rows(const Var& a) {
    auto out = make_node(a->rows, a->cols);
    for (std::size_t i = 0; i < a->rows; ++i) {
        const double* x = a->value.data() + i * a->cols;
        double* y = out->value.data() + i * a->cols;
        double mx = x[0];
        for (std::size_t j = 1; j < a->cols; ++j) mx = std::max(mx, x[j]);
        double z = 0;
        for (std::size_t j = 0; j < a->cols; ++j) {
            y[j] = std::exp(x[j] - mx);
            z += y[j];
        }
        for (std::size_t j = 0; j < a->cols; ++j) y[j] /= z;
    }
    out->parents = {a};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [](Node& o) {
            Node& A = *o.parents[0];
            A.ensure_grad();
            for (std::size_t i = 0; i < o.rows; ++i) {
                const double* p = o.value.data() + i * o.cols;
                const double* g = o.grad.data() + i * o.cols;
                double dot = 0;
                for (std::size_t j = 0; j < o.cols; ++j) dot += p[j] * g[j];
                double* ga = A.grad.data() + i * o.cols;
                for (std::size_t j = 0; j < o.cols; ++j)
                    ga[j] += p[j] * (g[j] - dot);
            }
        };
    return out;
}

/// Replace entries where mask != 0 by `fill` (typically a large negative
/// number before a softmax). Masked positions pass no gradient.
inline Var mask_fill(const Var& a, const std::vector<std::uint8_t>& mask,
                     double fill) {
    require_shape(mask.size() == a->size(), "mask_fill mask size");
    auto out = make_node(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i)
        out->value[i] = mask[i] ? fill : a->value[i];
    out->parents = {a};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [mask](Node& o) {
            Node& A = *o.parents[0];
            A.ensure_grad();
            for (std::size_t i = 0; i < o.size(); ++i)
                if (!mask[i]) A.grad[i] += o.grad[i];
        };
    return out;
}

/// Per-row layer norm with learnable gain/bias row vectors.
inline Var layer_norm_rows(const Var& a, const Var& gain, const Var& bias,
                           double eps = 1e-5) {
    require_shape(gain->rows == 1 && gain->cols == a->cols &&
                      bias->rows == 1 && bias->cols == a->cols,
                  "layer_norm gain/bias shapes");
    auto out = make_node(a->rows, a->cols);
    const std::size_t n = a->cols;
    for (std::size_t i = 0; i < a->rows; ++i) {
        const double* x = a->value.data() + i * n;
        double* y = out->value.data() + i * n;
        double mean = 0;
        for (std::size_t j = 0; j < n; ++j) mean += x[j];
        mean /= static_cast<double>(n);
        double var = 0;
        for (std::size_t j = 0; j < n; ++j) var += (x[j] - mean) * (x[j] - mean);
        var /= static_cast<double>(n);
        double inv = 1.0 / std::sqrt(var + eps);
        for (std::size_t j = 0; j < n; ++j)
            y[j] = gain->value[j] * (x[j] - mean) * inv + bias->value[j];
    }
    out->parents = {a, gain, bias};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [eps, n](Node& o) {
            Node& A = *o.parents[0];
            Node& G = *o.parents[1];
            Node& B = *o.parents[2];
            if (A.requires_grad) A.ensure_grad();
            if (G.requires_grad) G.ensure_grad();
            if (B.requires_grad) B.ensure_grad();
            const double dn = static_cast<double>(n);
            for (std::size_t i = 0; i < o.rows; ++i) {
                const double* x = A.value.data() + i * n;
                const double* dy = o.grad.data() + i * n;
                double mean = 0;
                for (std::size_t j = 0; j < n; ++j) mean += x[j];
                mean /= dn;
                double var = 0;
                for (std::size_t j = 0; j < n; ++j)
                    var += (x[j] - mean) * (x[j] - mean);
                var /= dn;
                const double inv = 1.0 / std::sqrt(var + eps);
                if (G.requires_grad || B.requires_grad) {
                    for (std::size_t j = 0; j < n; ++j) {
                        const double xhat = (x[j] - mean) * inv;
                        if (G.requires_grad) G.grad[j] += dy[j] * xhat;
                        if (B.requires_grad) B.grad[j] += dy[j];
                    }
                }
                if (A.requires_grad) {
                    double mean_gdy = 0, mean_gdyx = 0;
                    for (std::size_t j = 0; j < n; ++j) {
                        const double gdy = G.value[j] * dy[j];
                        const double xhat = (x[j] - mean) * inv;
                        mean_gdy += gdy;
                        mean_gdyx += gdy * xhat;
                    }
                    mean_gdy /= dn;
                    mean_gdyx /= dn;
                    double* dx = A.grad.data() + i * n;
                    for (std::size_t j = 0; j < n; ++j) {
                        const double gdy = G.value[j] * dy[j];
                        const double xhat = (x[j] - mean) * inv;
                        dx[j] += (gdy - mean_gdy - xhat * mean_gdyx) * inv;
                    }
                }
            }
        };
    return out;
}

/// Gather rows `ids` from a [V, d] table; gradient scatters back.
inline Var embedding_lookup(const Var& table, const std::vector<std::size_t>& ids) {
    for (std::size_t id : ids)
        require_shape(id < table->rows, "embedding_lookup id in range");
    auto out = make_node(ids.size(), table->cols);
    const std::size_t d = table->cols;
    for (std::size_t i = 0; i < ids.size(); ++i)
        std::copy_n(table->value.data() + ids[i] * d, d,
                    out->value.data() + i * d);
    out->parents = {table};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [ids, d](Node& o) {
            Node& T = *o.parents[0];
            T.ensure_grad();
            for (std::size_t i = 0; i < ids.size(); ++i) {
                double* dst = T.grad.data() + ids[i] * d;
                const double* src = o.grad.data() + i * d;
                for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
            }
        };
    return out;
}

inline Var concat_rows(const std::vector<Var>& parts) {
    require_shape(!parts.empty(), "concat_rows nonempty");
    std::size_t rows = 0, cols = parts[0]->cols;
    for (const auto& p : parts) {
        require_shape(p->cols == cols, "concat_rows column agreement");
        rows += p->rows;
    }
    auto out = make_node(rows, cols);
    std::size_t off = 0;
    for (const auto& p : parts) {
        std::copy(p->value.begin(), p->value.end(), out->value.begin() + off);
        off += p->size();
    }
    out->parents = parts;
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [](Node& o) {
            std::size_t off = 0;
            for (auto& pp : o.parents) {
                Node& p = *pp;
                if (p.requires_grad) {
                    p.ensure_grad();
                    for (std::size_t i = 0; i < p.size(); ++i)
                        p.grad[i] += o.grad[off + i];
                }
                off += p.size();
            }
        };
    return out;
}

inline Var concat_cols(const std::vector<Var>& parts) {
    require_shape(!parts.empty(), "concat_cols nonempty");
    std::size_t rows = parts[0]->rows, cols = 0;
    for (const auto& p : parts) {
        require_shape(p->rows == rows, "concat_cols row agreement");
        cols += p->cols;
    }
    auto out = make_node(rows, cols);
    std::size_t off = 0;
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < rows; ++i)
            std::copy_n(p->value.data() + i * p->cols, p->cols,
                        out->value.data() + i * cols + off);
        off += p->cols;
    }
    out->parents = parts;
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [cols](Node& o) {
            std::size_t off = 0;
            for (auto& pp : o.parents) {
                Node& p = *pp;
                if (p.requires_grad) {
                    p.ensure_grad();
                    for (std::size_t i = 0; i < p.rows; ++i)
                        for (std::size_t j = 0; j < p.cols; ++j)
                            p.grad[i * p.cols + j] +=
                                o.grad[i * cols + off + j];
                }
                off += p.cols;
            }
        };
    return out;
}

inline Var slice_cols(const Var& a, std::size_t start, std::size_t len) {
    require_shape(start + len <= a->cols, "slice_cols bounds");
    auto out = make_node(a->rows, len);
    for (std::size_t i = 0; i < a->rows; ++i)
        std::copy_n(a->value.data() + i * a->cols + start, len,
                    out->value.data() + i * len);
    out->parents = {a};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [start, len](Node& o) {
            Node& A = *o.parents[0];
            A.ensure_grad();
            for (std::size_t i = 0; i < o.rows; ++i)
                for (std::size_t j = 0; j < len; ++j)
                    A.grad[i * A.cols + start + j] += o.grad[i * len + j];
        };
    return out;
}

inline Var slice_rows(const Var& a, std::size_t start, std::size_t len) {
    require_shape(start + len <= a->rows, "slice_rows bounds");
    auto out = make_node(len, a->cols);
    std::copy_n(a->value.data() + start * a->cols, len * a->cols,
                out->value.data());
    out->parents = {a};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [start](Node& o) {
            Node& A = *o.parents[0];
            A.ensure_grad();
            for (std::size_t i = 0; i < o.size(); ++i)
                A.grad[start * o.cols + i] += o.grad[i];
        };
    return out;
}

/// log(x) clamped at `floor`; increments *clamp_counter when clamping.
inline Var log_clamped(const Var& a, double floor = 1e-12,
                       std::size_t* clamp_counter = nullptr) {
    auto out = make_node(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i) {
        double x = a->value[i];
        if (x < floor) {
            x = floor;
            if (clamp_counter) ++*clamp_counter;
        }
        out->value[i] = std::log(x);
    }
    out->parents = {a};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [floor](Node& o) {
            Node& A = *o.parents[0];
            A.ensure_grad();
            for (std::size_t i = 0; i < o.size(); ++i) {
                double x = std::max(A.value[i], floor);
                A.grad[i] += o.grad[i] / x;
            }
        };
    return out;
}

/// log(1 - x) clamped so the argument never drops below `floor`.
inline Var log1m_clamped(const Var& a, double floor = 1e-12,
                         std::size_t* clamp_counter = nullptr) {
    auto out = make_node(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i) {
        double x = 1.0 - a->value[i];
        if (x < floor) {
            x = floor;
            if (clamp_counter) ++*clamp_counter;
        }
        out->value[i] = std::log(x);
    }
    out->parents = {a};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [floor](Node& o) {
            Node& A = *o.parents[0];
            A.ensure_grad();
            for (std::size_t i = 0; i < o.size(); ++i) {
                double x = std::max(1.0 - A.value[i], floor);
                A.grad[i] -= o.grad[i] / x;
            }
        };
    return out;
}

/// Scalar dot with a constant coefficient vector (flattened).
inline Var dot_const(const Var& a, const std::vector<double>& coeffs) {
    require_shape(coeffs.size() == a->size(), "dot_const size");
    auto out = make_node(1, 1);
    double acc = 0;
    for (std::size_t i = 0; i < a->size(); ++i) acc += a->value[i] * coeffs[i];
    out->value[0] = acc;
    out->parents = {a};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [coeffs](Node& o) {
            Node& A = *o.parents[0];
            A.ensure_grad();
            for (std::size_t i = 0; i < A.size(); ++i)
                A.grad[i] += o.grad[0] * coeffs[i];
        };
    return out;
}

inline Var sum(const Var& a) {
    auto out = make_node(1, 1);
    double acc = 0;
    for (double v : a->value) acc += v;
    out->value[0] = acc;
    out->parents = {a};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [](Node& o) {
            Node& A = *o.parents[0];
            A.ensure_grad();
            for (std::size_t i = 0; i < A.size(); ++i) A.grad[i] += o.grad[0];
        };
    return out;
}

inline Var mul_elem(const Var& a, const Var& b) {
    require_shape(a->rows == b->rows && a->cols == b->cols, "mul_elem shapes");
    auto out = make_node(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i)
        out->value[i] = a->value[i] * b->value[i];
    out->parents = {a, b};
    detail::propagate_flags(out);
    if (out->requires_grad)
        out->backprop = [](Node& o) {
            Node& A = *o.parents[0];
            Node& B = *o.parents[1];
            if (A.requires_grad) {
                A.ensure_grad();
                for (std::size_t i = 0; i < o.size(); ++i)
                    A.grad[i] += o.grad[i] * B.value[i];
            }
            if (B.requires_grad) {
                B.ensure_grad();
                for (std::size_t i = 0; i < o.size(); ++i)
                    B.grad[i] += o.grad[i] * A.value[i];
            }
        };
    return out;
}

// ---------------------------------------------------------------------------
// Backward pass
// ---------------------------------------------------------------------------

/// Reverse-mode sweep from a scalar root. Visits each node exactly once in
/// reverse topological order; leaves bound to parameters flush their grads
/// into the parameter tensors.
inline void backward(const Var& root) {
    require_shape(root->size() == 1, "backward root must be scalar");
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    // Iterative DFS post-order.
    std::vector<std::pair<Var, std::size_t>> stack{{root, 0}};
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Var p = node->parents[next++];
            if (p->requires_grad && seen.insert(p.get()).second)
                stack.emplace_back(p, 0);
        } else {
            order.push_back(node.get());
            stack.pop_back();
        }
    }
    for (Node* n : order) n->ensure_grad();
    root->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backprop) n->backprop(*n);
    }
    for (Node* n : order) {
        if (n->param) {
            n->param->ensure_grad();
            for (std::size_t i = 0; i < n->size(); ++i)
                n->param->grad[i] += n->grad[i];
        }
    }
}

// ---------------------------------------------------------------------------
// Gradient check
// ---------------------------------------------------------------------------

/// Compares reverse-mode gradients against central finite differences for
/// every component of every listed parameter. `f` must rebuild the graph from
/// the parameters' current values and return the scalar output. Returns the
/// max relative error, with |a-n| / max(|a|, |n|, 1).
inline double grad_check(const std::function<double()>& f,
                         const std::function<void()>& backward_fn,
                         std::vector<Tensor*> params, double h = 1e-5) {
    for (Tensor* p : params) {
        p->ensure_grad();
        p->zero_grad();
    }
    backward_fn();
    std::vector<std::vector<double>> analytic;
    for (Tensor* p : params) analytic.push_back(p->grad);
    double max_err = 0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor* p = params[pi];
        for (std::size_t i = 0; i < p->data.size(); ++i) {
            const double save = p->data[i];
            p->data[i] = save + h;
            const double fp = f();
            p->data[i] = save - h;
            const double fm = f();
            p->data[i] = save;
            const double numeric = (fp - fm) / (2 * h);
            const double a = analytic[pi][i];
            const double err =
                std::abs(a - numeric) /
                std::max({std::abs(a), std::abs(numeric), 1.0});
            max_err = std::max(max_err, err);
        }
    }
    return max_err;
}

}  // namespace tamlec::ag
