#include "xgraphbench/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xgb::kernels {

namespace {

void check(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

namespace serial {

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
    check(a.cols() == b.rows(), "matmul: inner dimensions differ");
    out.resize(a.rows(), b.cols());
    const int n = a.rows(), k = a.cols(), m = b.cols();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int t = 0; t < k; ++t) acc += a(i, t) * b(t, j);
            out(i, j) = acc;
        }
    }
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out) {
    check(a.rows() == b.rows(), "matmul_at_b: row counts differ");
    out.resize(a.cols(), b.cols());
    const int n = a.rows(), k = a.cols(), m = b.cols();
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int t = 0; t < n; ++t) acc += a(t, i) * b(t, j);
            out(i, j) = acc;
        }
    }
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out) {
    check(a.cols() == b.cols(), "matmul_a_bt: column counts differ");
    out.resize(a.rows(), b.rows());
    const int n = a.rows(), k = a.cols(), m = b.rows();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int t = 0; t < k; ++t) acc += a(i, t) * b(j, t);
            out(i, j) = acc;
        }
    }
}

void gin_aggregate(const Graph& g, double eps, const Matrix& h, Matrix& out) {
    check(h.rows() == g.num_nodes(), "gin_aggregate: feature rows != node count");
    out.resize(h.rows(), h.cols());
    const int d = h.cols();
    for (int u = 0; u < g.num_nodes(); ++u) {
        for (int j = 0; j < d; ++j) out(u, j) = (1.0 + eps) * h(u, j);
        for (int v : g.neighbors(u)) {
            for (int j = 0; j < d; ++j) out(u, j) += h(v, j);
        }
    }
}

void add_bias(Matrix& m, const std::vector<double>& bias) {
    check(static_cast<int>(bias.size()) == m.cols(), "add_bias: size mismatch");
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) m(i, j) += bias[j];
    }
}

void relu(const Matrix& in, Matrix& out) {
    out.resize(in.rows(), in.cols());
    for (int i = 0; i < in.rows(); ++i) {
        for (int j = 0; j < in.cols(); ++j) out(i, j) = in(i, j) > 0.0 ? in(i, j) : 0.0;
    }
}

void relu_backward(const Matrix& pre, const Matrix& dout, Matrix& din) {
    check(pre.same_shape(dout), "relu_backward: shape mismatch");
    din.resize(pre.rows(), pre.cols());
    for (int i = 0; i < pre.rows(); ++i) {
        for (int j = 0; j < pre.cols(); ++j) din(i, j) = pre(i, j) > 0.0 ? dout(i, j) : 0.0;
    }
}

void softmax_rows(const Matrix& logits, Matrix& probs) {
    probs.resize(logits.rows(), logits.cols());
    for (int i = 0; i < logits.rows(); ++i) {
        double mx = logits(i, 0);
        for (int j = 1; j < logits.cols(); ++j) mx = std::max(mx, logits(i, j));
        double sum = 0.0;
        for (int j = 0; j < logits.cols(); ++j) {
            probs(i, j) = std::exp(logits(i, j) - mx);
            sum += probs(i, j);
        }
        for (int j = 0; j < logits.cols(); ++j) probs(i, j) /= sum;
    }
}

void col_sums(const Matrix& m, std::vector<double>& out) {
    out.assign(static_cast<size_t>(m.cols()), 0.0);
    for (int j = 0; j < m.cols(); ++j) {
        double acc = 0.0;
        for (int i = 0; i < m.rows(); ++i) acc += m(i, j);
        out[static_cast<size_t>(j)] = acc;
    }
}

}  // namespace serial

// Parallel versions: identical per-element accumulation order, rows (or
// columns) distributed across threads.

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
    check(a.cols() == b.rows(), "matmul: inner dimensions differ");
    out.resize(a.rows(), b.cols());
    const int n = a.rows(), k = a.cols(), m = b.cols();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int t = 0; t < k; ++t) acc += a(i, t) * b(t, j);
            out(i, j) = acc;
        }
    }
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out) {
    check(a.rows() == b.rows(), "matmul_at_b: row counts differ");
    out.resize(a.cols(), b.cols());
    const int n = a.rows(), k = a.cols(), m = b.cols();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int t = 0; t < n; ++t) acc += a(t, i) * b(t, j);
            out(i, j) = acc;
        }
    }
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out) {
    check(a.cols() == b.cols(), "matmul_a_bt: column counts differ");
    out.resize(a.rows(), b.rows());
    const int n = a.rows(), k = a.cols(), m = b.rows();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int t = 0; t < k; ++t) acc += a(i, t) * b(j, t);
            out(i, j) = acc;
        }
    }
}

void gin_aggregate(const Graph& g, double eps, const Matrix& h, Matrix& out) {
    check(h.rows() == g.num_nodes(), "gin_aggregate: feature rows != node count");
    out.resize(h.rows(), h.cols());
    const int n = g.num_nodes();
    const int d = h.cols();
#pragma omp parallel for schedule(static)
    for (int u = 0; u < n; ++u) {
        for (int j = 0; j < d; ++j) out(u, j) = (1.0 + eps) * h(u, j);
        for (int v : g.neighbors(u)) {
            for (int j = 0; j < d; ++j) out(u, j) += h(v, j);
        }
    }
}

void add_bias(Matrix& m, const std::vector<double>& bias) {
    check(static_cast<int>(bias.size()) == m.cols(), "add_bias: size mismatch");
    const int n = m.rows(), c = m.cols();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < c; ++j) m(i, j) += bias[j];
    }
}

void relu(const Matrix& in, Matrix& out) {
    out.resize(in.rows(), in.cols());
    const int n = in.rows(), c = in.cols();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < c; ++j) out(i, j) = in(i, j) > 0.0 ? in(i, j) : 0.0;
    }
}

void relu_backward(const Matrix& pre, const Matrix& dout, Matrix& din) {
    check(pre.same_shape(dout), "relu_backward: shape mismatch");
    din.resize(pre.rows(), pre.cols());
    const int n = pre.rows(), c = pre.cols();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < c; ++j) din(i, j) = pre(i, j) > 0.0 ? dout(i, j) : 0.0;
    }
}

void softmax_rows(const Matrix& logits, Matrix& probs) {
    probs.resize(logits.rows(), logits.cols());
    const int n = logits.rows(), c = logits.cols();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double mx = logits(i, 0);
        for (int j = 1; j < c; ++j) mx = std::max(mx, logits(i, j));
        double sum = 0.0;
        for (int j = 0; j < c; ++j) {
            probs(i, j) = std::exp(logits(i, j) - mx);
            sum += probs(i, j);
        }
        for (int j = 0; j < c; ++j) probs(i, j) /= sum;
    }
}

void col_sums(const Matrix& m, std::vector<double>& out) {
    out.assign(static_cast<size_t>(m.cols()), 0.0);
    const int n = m.rows(), c = m.cols();
#pragma omp parallel for schedule(static)
    for (int j = 0; j < c; ++j) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += m(i, j);
        out[static_cast<size_t>(j)] = acc;
    }
}

}  // namespace xgb::kernels
