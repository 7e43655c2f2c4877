#include <algorithm>
#include <atomic>

#include "ofm/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

// OpenMP kernels. Work is split across output rows (or output columns for
// column_sums); the contracted-index loop inside each output element stays in
// ascending order, so results are bit-identical to the serial reference for
// any thread count.

namespace ofm::kernels {

namespace {
std::atomic<bool> g_parallel{true};
}

void set_parallel(bool enabled) { g_parallel.store(enabled, std::memory_order_relaxed); }

bool parallel_enabled() {
#ifdef _OPENMP
  return g_parallel.load(std::memory_order_relaxed);
#else
  return false;
#endif
}

namespace parallel {

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  const int64_t m = a.rows, k = a.cols, n = b.cols;
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < m; ++i) {
    double* ci = out.row(i);
    std::fill(ci, ci + n, 0.0);
    const double* ai = a.row(i);
    for (int64_t p = 0; p < k; ++p) {
      const double av = ai[p];
      const double* bp = b.row(p);
      for (int64_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  const int64_t m = a.rows, k = a.cols, n = b.rows;
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < m; ++i) {
    const double* ai = a.row(i);
    double* ci = out.row(i);
    for (int64_t j = 0; j < n; ++j) {
      const double* bj = b.row(j);
      double s = 0.0;
      for (int64_t p = 0; p < k; ++p) s += ai[p] * bj[p];
      ci[j] = s;
    }
  }
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  const int64_t m = a.rows, k1 = a.cols, k2 = b.cols;
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < k1; ++i) {
    double* ci = out.row(i);
    std::fill(ci, ci + k2, 0.0);
    for (int64_t r = 0; r < m; ++r) {
      const double av = a(r, i);
      const double* br = b.row(r);
      for (int64_t j = 0; j < k2; ++j) ci[j] += av * br[j];
    }
  }
}

void add_row_bias(Matrix& m, const Matrix& bias) {
  const double* b = bias.row(0);
  const int64_t rows = m.rows, cols = m.cols;
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < rows; ++i) {
    double* mi = m.row(i);
    for (int64_t j = 0; j < cols; ++j) mi[j] += b[j];
  }
}

void column_sums(const Matrix& m, Matrix& out) {
  double* o = out.row(0);
  const int64_t rows = m.rows, cols = m.cols;
#pragma omp parallel for schedule(static)
  for (int64_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (int64_t i = 0; i < rows; ++i) s += m(i, j);
    o[j] = s;
  }
}

void relu(const Matrix& z, Matrix& out) {
  const int64_t n = static_cast<int64_t>(z.data.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    out.data[i] = z.data[i] > 0.0 ? z.data[i] : 0.0;
  }
}

void relu_grad(const Matrix& z, const Matrix& g, Matrix& out) {
  const int64_t n = static_cast<int64_t>(z.data.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    out.data[i] = z.data[i] > 0.0 ? g.data[i] : 0.0;
  }
}

void mfm(const Matrix& z, Matrix& out) {
  const int64_t h = z.cols / 2, rows = z.rows;
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < rows; ++i) {
    const double* zi = z.row(i);
    double* oi = out.row(i);
    for (int64_t j = 0; j < h; ++j) {
      oi[j] = zi[h + j] > zi[j] ? zi[h + j] : zi[j];
    }
  }
}

void mfm_grad(const Matrix& z, const Matrix& g, Matrix& out) {
  const int64_t h = z.cols / 2, rows = z.rows;
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < rows; ++i) {
    const double* zi = z.row(i);
    const double* gi = g.row(i);
    double* oi = out.row(i);
    std::fill(oi, oi + z.cols, 0.0);
    for (int64_t j = 0; j < h; ++j) {
      if (zi[h + j] > zi[j]) {
        oi[h + j] = gi[j];
      } else {
        oi[j] = gi[j];
      }
    }
  }
}

}  // namespace parallel

namespace {

void check_matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    throw ArgumentError("matmul: inner dimensions differ, " + std::to_string(a.cols) +
                        " vs " + std::to_string(b.rows));
  }
}

bool use_parallel() { return parallel_enabled(); }

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_matmul(a, b);
  Matrix out(a.rows, b.cols);
  use_parallel() ? parallel::matmul(a, b, out) : serial::matmul(a, b, out);
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) {
    throw ArgumentError("matmul_nt: contracted dimensions differ, " + std::to_string(a.cols) +
                        " vs " + std::to_string(b.cols));
  }
  Matrix out(a.rows, b.rows);
  use_parallel() ? parallel::matmul_nt(a, b, out) : serial::matmul_nt(a, b, out);
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) {
    throw ArgumentError("matmul_tn: contracted dimensions differ, " + std::to_string(a.rows) +
                        " vs " + std::to_string(b.rows));
  }
  Matrix out(a.cols, b.cols);
  use_parallel() ? parallel::matmul_tn(a, b, out) : serial::matmul_tn(a, b, out);
  return out;
}

void add_row_bias(Matrix& m, const Matrix& bias) {
  require_shape(bias, 1, m.cols, "add_row_bias: bias");
  use_parallel() ? parallel::add_row_bias(m, bias) : serial::add_row_bias(m, bias);
}

Matrix column_sums(const Matrix& m) {
  Matrix out(1, m.cols);
  use_parallel() ? parallel::column_sums(m, out) : serial::column_sums(m, out);
  return out;
}

Matrix relu(const Matrix& z) {
  Matrix out(z.rows, z.cols);
  use_parallel() ? parallel::relu(z, out) : serial::relu(z, out);
  return out;
}

Matrix relu_grad(const Matrix& z, const Matrix& g) {
  require_shape(g, z.rows, z.cols, "relu_grad: grad");
  Matrix out(z.rows, z.cols);
  use_parallel() ? parallel::relu_grad(z, g, out) : serial::relu_grad(z, g, out);
  return out;
}

Matrix mfm(const Matrix& z) {
  if (z.cols % 2 != 0) {
    throw ArgumentError("mfm: width must be even, got " + std::to_string(z.cols));
  }
  Matrix out(z.rows, z.cols / 2);
  use_parallel() ? parallel::mfm(z, out) : serial::mfm(z, out);
  return out;
}

Matrix mfm_grad(const Matrix& z, const Matrix& g) {
  if (z.cols % 2 != 0) {
    throw ArgumentError("mfm_grad: width must be even, got " + std::to_string(z.cols));
  }
  require_shape(g, z.rows, z.cols / 2, "mfm_grad: grad");
  Matrix out(z.rows, z.cols);
  use_parallel() ? parallel::mfm_grad(z, g, out) : serial::mfm_grad(z, g, out);
  return out;
}

void for_rows(int64_t n, const std::function<void(int64_t)>& f) {
#ifdef _OPENMP
  if (parallel_enabled()) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) f(i);
    return;
  }
#endif
  for (int64_t i = 0; i < n; ++i) f(i);
}

}  // namespace ofm::kernels
