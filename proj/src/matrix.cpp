#include "ofm/matrix.hpp"

#include <cmath>
#include <cstring>

namespace ofm {

Matrix::Matrix(int64_t r, int64_t c, double fill) : rows(r), cols(c) {
  if (r < 0 || c < 0) {
    throw ArgumentError("Matrix: negative dimensions " + std::to_string(r) + "x" +
                        std::to_string(c));
  }
  data.assign(static_cast<size_t>(r * c), fill);
}

void require_shape(const Matrix& m, int64_t rows, int64_t cols, const std::string& what) {
  if (m.rows != rows || m.cols != cols) {
    throw ArgumentError(what + ": expected " + std::to_string(rows) + "x" +
                        std::to_string(cols) + ", got " + std::to_string(m.rows) + "x" +
                        std::to_string(m.cols));
  }
}

bool all_finite(const Matrix& m) {
  for (double v : m.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (double v : m.data) {
    double a = std::fabs(v);
    if (a > best) best = a;
  }
  return best;
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) return false;
  if (a.data.empty()) return true;
  return std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

uint64_t fingerprint_bytes(const void* p, size_t n, uint64_t h) {
  const auto* bytes = static_cast<const unsigned char*>(p);
  for (size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t fingerprint(const Matrix& m) {
  uint64_t h = fingerprint_bytes(&m.rows, sizeof(m.rows));
  h = fingerprint_bytes(&m.cols, sizeof(m.cols), h);
  if (!m.data.empty()) {
    h = fingerprint_bytes(m.data.data(), m.data.size() * sizeof(double), h);
  }
  return h;
}

double dot(const double* a, const double* b, int64_t n) {
  double s = 0.0;
  for (int64_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double norm2(const double* a, int64_t n) {
  double s = 0.0;
  for (int64_t i = 0; i < n; ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

int64_t argmax_index(const double* a, int64_t n) {
  if (n < 1) throw ArgumentError("argmax_index: empty row");
  int64_t best = 0;
  for (int64_t i = 1; i < n; ++i) {
    if (a[i] > a[best]) best = i;
  }
  return best;
}

int64_t argmin_index(const double* a, int64_t n) {
  if (n < 1) throw ArgumentError("argmin_index: empty row");
  int64_t best = 0;
  for (int64_t i = 1; i < n; ++i) {
    if (a[i] < a[best]) best = i;
  }
  return best;
}

}  // namespace ofm
