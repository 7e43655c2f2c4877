#pragma once

#include <span>
#include <vector>

#include "ofm/matrix.hpp"

namespace ofm {

// A scalar loss value together with its gradient. Which argument the gradient
// is taken with respect to is part of each loss's contract: the CCE losses
// differentiate with respect to the logits, the cosine-orthogonality loss
// with respect to the codes (its weight argument is held constant).
struct LossResult {
  double value = 0.0;
  Matrix grad;
};

// Batch-mean categorical cross entropy over softmax(logits).
//   value = mean_i( -log softmax(logits_i)[label_i] )
//   grad  = (softmax(logits) - onehot(labels)) / batch
// Log-sum-exp is stabilized by per-row max subtraction, so logits of any
// magnitude stay finite.
LossResult softmax_cce(const Matrix& logits, const std::vector<int>& labels);

// The conventional adversarial objective: exact negation of softmax_cce in
// both value and gradient.
LossResult reversed_cce(const Matrix& logits, const std::vector<int>& labels);

// u.v / (|u||v| + 1e-12), clamped to [-1, 1]. The epsilon guard makes the
// similarity of a zero vector 0 rather than a division error: a zero code
// carries no directional information.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// Orthogonality pressure between subsidiary weight rows and codes:
//   value = mean over (code x, weight row j) of CS(w_j, e_x)^2
// normalized by batch * n_rows so the scale is batch-size independent.
// The gradient is with respect to `codes` only; `w_s` is the frozen
// subsidiary output layer. Needs no labels.
LossResult cosine_orthogonality_loss(const Matrix& w_s, const Matrix& codes);

// Gradient-reversal scaling: -lambda * grad. Applied to d(cce)/d(codes) with
// a frozen subsidiary head and lambda = 1 it reproduces the reversed-CCE code
// gradient exactly.
Matrix grl_scale(const Matrix& grad, double lambda);

constexpr double kCosineNormEps = 1e-12;

}  // namespace ofm
