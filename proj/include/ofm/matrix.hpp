#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ofm/error.hpp"

namespace ofm {

// Dense row-major matrix of 64-bit floats. The sole numeric carrier in the
// library: inputs, codes, weights and biases are all Matrix values (biases
// as 1 x n rows).
struct Matrix {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int64_t r, int64_t c, double fill = 0.0);

  double& operator()(int64_t i, int64_t j) { return data[static_cast<size_t>(i * cols + j)]; }
  double operator()(int64_t i, int64_t j) const {
    return data[static_cast<size_t>(i * cols + j)];
  }
  double* row(int64_t i) { return data.data() + i * cols; }
  const double* row(int64_t i) const { return data.data() + i * cols; }

  int64_t size() const { return rows * cols; }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// Throws ArgumentError naming `what` unless m has the given shape.
void require_shape(const Matrix& m, int64_t rows, int64_t cols, const std::string& what);

bool all_finite(const Matrix& m);
double max_abs(const Matrix& m);

// Exact bitwise comparison (distinguishes -0.0 from 0.0, any NaN payloads).
bool bit_equal(const Matrix& a, const Matrix& b);

// FNV-1a over shape and raw data bytes. Used by freeze-contract tests.
uint64_t fingerprint(const Matrix& m);
uint64_t fingerprint_bytes(const void* p, size_t n, uint64_t h = 1469598103934665603ull);

double dot(const double* a, const double* b, int64_t n);
double norm2(const double* a, int64_t n);

// Ties break to the lowest index, so constant rows reduce to index 0.
int64_t argmax_index(const double* a, int64_t n);
int64_t argmin_index(const double* a, int64_t n);

}  // namespace ofm
