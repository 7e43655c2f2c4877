#pragma once

#include <functional>

#include "ofm/matrix.hpp"

namespace ofm::kernels {

// The parallel kernels assign every output element to exactly one thread and
// keep the inner summation order fixed, so they are bit-identical to the
// serial reference for any thread count. Training determinism therefore does
// not depend on this switch; it only selects the execution path.
void set_parallel(bool enabled);
bool parallel_enabled();

// Serial reference implementations. Kept as the comparison baseline for the
// parallel kernels (tests assert bit-equality, bench compares throughput).
namespace serial {
void matmul(const Matrix& a, const Matrix& b, Matrix& out);     // out = a b
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);  // out = a b^T
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);  // out = a^T b
void add_row_bias(Matrix& m, const Matrix& bias);               // m[i,:] += bias
void column_sums(const Matrix& m, Matrix& out);                 // out: 1 x cols
void relu(const Matrix& z, Matrix& out);
void relu_grad(const Matrix& z, const Matrix& g, Matrix& out);
void mfm(const Matrix& z, Matrix& out);                          // out: rows x cols/2
void mfm_grad(const Matrix& z, const Matrix& g, Matrix& out);    // out: shape of z
}  // namespace serial

// OpenMP variants, same contracts.
namespace parallel {
void matmul(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);
void add_row_bias(Matrix& m, const Matrix& bias);
void column_sums(const Matrix& m, Matrix& out);
void relu(const Matrix& z, Matrix& out);
void relu_grad(const Matrix& z, const Matrix& g, Matrix& out);
void mfm(const Matrix& z, Matrix& out);
void mfm_grad(const Matrix& z, const Matrix& g, Matrix& out);
}  // namespace parallel

// Dispatching wrappers: validate shapes, allocate the result, run the
// selected variant. These are what the rest of the library calls.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);
void add_row_bias(Matrix& m, const Matrix& bias);
Matrix column_sums(const Matrix& m);
Matrix relu(const Matrix& z);
Matrix relu_grad(const Matrix& z, const Matrix& g);
Matrix mfm(const Matrix& z);
Matrix mfm_grad(const Matrix& z, const Matrix& g);

// Runs f(i) for i in [0, n). Parallel when enabled; rows must be independent.
// Callers keep any cross-row reduction serial, in ascending row order.
void for_rows(int64_t n, const std::function<void(int64_t)>& f);

}  // namespace ofm::kernels
