#include <algorithm>

#include "ofm/kernels.hpp"

// Serial reference kernels. Per output element the summation order is
// ascending over the contracted index; the parallel variants reproduce the
// same order, which makes the two paths bit-identical.

namespace ofm::kernels::serial {

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  const int64_t m = a.rows, k = a.cols, n = b.cols;
  std::fill(out.data.begin(), out.data.end(), 0.0);
  for (int64_t i = 0; i < m; ++i) {
    double* ci = out.row(i);
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
  std::fill(out.data.begin(), out.data.end(), 0.0);
  for (int64_t r = 0; r < m; ++r) {
    const double* ar = a.row(r);
    const double* br = b.row(r);
    for (int64_t i = 0; i < k1; ++i) {
      const double av = ar[i];
      double* ci = out.row(i);
      for (int64_t j = 0; j < k2; ++j) ci[j] += av * br[j];
    }
  }
}

void add_row_bias(Matrix& m, const Matrix& bias) {
  const double* b = bias.row(0);
  for (int64_t i = 0; i < m.rows; ++i) {
    double* mi = m.row(i);
    for (int64_t j = 0; j < m.cols; ++j) mi[j] += b[j];
  }
}

void column_sums(const Matrix& m, Matrix& out) {
  double* o = out.row(0);
  for (int64_t j = 0; j < m.cols; ++j) {
    double s = 0.0;
    for (int64_t i = 0; i < m.rows; ++i) s += m(i, j);
    o[j] = s;
  }
}

void relu(const Matrix& z, Matrix& out) {
  for (size_t i = 0; i < z.data.size(); ++i) {
    out.data[i] = z.data[i] > 0.0 ? z.data[i] : 0.0;
  }
}

void relu_grad(const Matrix& z, const Matrix& g, Matrix& out) {
  for (size_t i = 0; i < z.data.size(); ++i) {
    out.data[i] = z.data[i] > 0.0 ? g.data[i] : 0.0;
  }
}

// Halves take the elementwise max: out[i,j] = max(z[i,j], z[i,j+h]).
void mfm(const Matrix& z, Matrix& out) {
  const int64_t h = z.cols / 2;
  for (int64_t i = 0; i < z.rows; ++i) {
    const double* zi = z.row(i);
    double* oi = out.row(i);
    for (int64_t j = 0; j < h; ++j) {
      oi[j] = zi[h + j] > zi[j] ? zi[h + j] : zi[j];
    }
  }
}

// Gradient routes to the winning half; ties go to the lower-index half.
void mfm_grad(const Matrix& z, const Matrix& g, Matrix& out) {
  const int64_t h = z.cols / 2;
  std::fill(out.data.begin(), out.data.end(), 0.0);
  for (int64_t i = 0; i < z.rows; ++i) {
    const double* zi = z.row(i);
    const double* gi = g.row(i);
    double* oi = out.row(i);
    for (int64_t j = 0; j < h; ++j) {
      if (zi[h + j] > zi[j]) {
        oi[h + j] = gi[j];
      } else {
        oi[j] = gi[j];
      }
    }
  }
}

}  // namespace ofm::kernels::serial
