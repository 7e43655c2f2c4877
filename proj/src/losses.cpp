#include "ofm/losses.hpp"

#include <algorithm>
#include <cmath>

#include "ofm/kernels.hpp"

namespace ofm {

LossResult softmax_cce(const Matrix& logits, const std::vector<int>& labels) {
  const int64_t batch = logits.rows, n = logits.cols;
  if (batch < 1) throw ArgumentError("softmax_cce: empty batch");
  if (static_cast<int64_t>(labels.size()) != batch) {
    throw ArgumentError("softmax_cce: " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(batch) + " rows");
  }
  for (int64_t i = 0; i < batch; ++i) {
    if (labels[i] < 0 || labels[i] >= n) {
      throw ArgumentError("softmax_cce: label " + std::to_string(labels[i]) + " at row " +
                          std::to_string(i) + " out of range [0," + std::to_string(n) + ")");
    }
  }

  LossResult res;
  res.grad = Matrix(batch, n);
  std::vector<double> row_loss(batch);
  const double inv_batch = 1.0 / static_cast<double>(batch);

  kernels::for_rows(batch, [&](int64_t i) {
    const double* l = logits.row(i);
    double m = l[0];
    for (int64_t j = 1; j < n; ++j) m = std::max(m, l[j]);
    double sum = 0.0;
    for (int64_t j = 0; j < n; ++j) sum += std::exp(l[j] - m);
    const double lse = std::log(sum);
    row_loss[i] = lse - (l[labels[i]] - m);
    double* g = res.grad.row(i);
    for (int64_t j = 0; j < n; ++j) {
      g[j] = std::exp(l[j] - m) / sum * inv_batch;
    }
    g[labels[i]] -= inv_batch;
  });

  double total = 0.0;
  for (int64_t i = 0; i < batch; ++i) total += row_loss[i];
  res.value = total * inv_batch;
  return res;
}

LossResult reversed_cce(const Matrix& logits, const std::vector<int>& labels) {
  LossResult res = softmax_cce(logits, labels);
  res.value = -res.value;
  for (double& g : res.grad.data) g = -g;
  return res;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ArgumentError("cosine_similarity: lengths differ, " + std::to_string(u.size()) +
                        " vs " + std::to_string(v.size()));
  }
  const int64_t n = static_cast<int64_t>(u.size());
  const double d = dot(u.data(), v.data(), n);
  const double c = d / (norm2(u.data(), n) * norm2(v.data(), n) + kCosineNormEps);
  return std::clamp(c, -1.0, 1.0);
}

LossResult cosine_orthogonality_loss(const Matrix& w_s, const Matrix& codes) {
  const int64_t n_rows = w_s.rows, d = w_s.cols, batch = codes.rows;
  if (codes.cols != d) {
    throw ArgumentError("cosine_orthogonality_loss: code width " + std::to_string(codes.cols) +
                        " != weight width " + std::to_string(d));
  }
  if (batch < 1) throw ArgumentError("cosine_orthogonality_loss: empty batch");
  if (n_rows < 1) throw ArgumentError("cosine_orthogonality_loss: empty weight matrix");

  // Row norms of the frozen weights, computed once.
  std::vector<double> w_norm(n_rows);
  for (int64_t j = 0; j < n_rows; ++j) w_norm[j] = norm2(w_s.row(j), d);

  LossResult res;
  res.grad = Matrix(batch, d);
  std::vector<double> row_value(batch, 0.0);
  const double scale = 1.0 / (static_cast<double>(batch) * static_cast<double>(n_rows));

  kernels::for_rows(batch, [&](int64_t x) {
    const double* e = codes.row(x);
    double* g = res.grad.row(x);
    const double ne = norm2(e, d);
    if (ne == 0.0) return;  // zero code: zero similarity, zero gradient
    double acc = 0.0;
    for (int64_t j = 0; j < n_rows; ++j) {
      const double* w = w_s.row(j);
      const double dj = dot(w, e, d);
      const double gdenom = w_norm[j] * ne + kCosineNormEps;
      const double c = dj / gdenom;
      acc += c * c;
      // d(c^2)/de = (2 dj / g^2) w - (2 dj^2 / g^3) |w| e/|e|
      const double a1 = 2.0 * dj / (gdenom * gdenom) * scale;
      const double a2 = 2.0 * dj * dj / (gdenom * gdenom * gdenom) * w_norm[j] / ne * scale;
      for (int64_t k = 0; k < d; ++k) g[k] += a1 * w[k] - a2 * e[k];
    }
    row_value[x] = acc;
  });

  double total = 0.0;
  for (int64_t x = 0; x < batch; ++x) total += row_value[x];
  res.value = total * scale;
  return res;
}

Matrix grl_scale(const Matrix& grad, double lambda) {
  if (!std::isfinite(lambda)) throw ArgumentError("grl_scale: lambda must be finite");
  Matrix out(grad.rows, grad.cols);
  for (size_t i = 0; i < grad.data.size(); ++i) out.data[i] = -lambda * grad.data[i];
  return out;
}

}  // namespace ofm
