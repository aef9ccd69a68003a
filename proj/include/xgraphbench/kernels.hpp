#pragma once

#include <vector>

#include "xgraphbench/graph.hpp"
#include "xgraphbench/matrix.hpp"

namespace xgb::kernels {

// OpenMP-parallel kernels backing the GIN model. Every output element is
// accumulated in a fixed serial order inside its owning thread, so results
// are bit-identical to the serial reference implementations below for any
// thread count.

void matmul(const Matrix& a, const Matrix& b, Matrix& out);        // out = a * b
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out);   // out = a^T * b
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out);   // out = a * b^T

// out[u] = (1 + eps) * h[u] + sum_{v in N(u)} h[v]
void gin_aggregate(const Graph& g, double eps, const Matrix& h, Matrix& out);

// Transpose-free backward of gin_aggregate; the operator is symmetric so the
// same stencil applies to the incoming gradient.
inline void gin_aggregate_backward(const Graph& g, double eps, const Matrix& dout, Matrix& dh) {
    gin_aggregate(g, eps, dout, dh);
}

void add_bias(Matrix& m, const std::vector<double>& bias);
void relu(const Matrix& in, Matrix& out);
void relu_backward(const Matrix& pre, const Matrix& dout, Matrix& din);
void softmax_rows(const Matrix& logits, Matrix& probs);
void col_sums(const Matrix& m, std::vector<double>& out);

namespace serial {

// Reference implementations used by the unit tests and the kernel benchmark.

void matmul(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out);
void gin_aggregate(const Graph& g, double eps, const Matrix& h, Matrix& out);
void add_bias(Matrix& m, const std::vector<double>& bias);
void relu(const Matrix& in, Matrix& out);
void relu_backward(const Matrix& pre, const Matrix& dout, Matrix& din);
void softmax_rows(const Matrix& logits, Matrix& probs);
void col_sums(const Matrix& m, std::vector<double>& out);

}  // namespace serial

}  // namespace xgb::kernels
