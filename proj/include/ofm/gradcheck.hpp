#pragma once

#include <functional>

#include "ofm/matrix.hpp"

namespace ofm {

// Central-difference gradient oracle: perturbs each entry of `param` in place
// by +-eps, evaluates `loss`, restores the entry, and returns
// (f(t+eps) - f(t-eps)) / (2 eps) per entry. `loss` must be deterministic and
// read `param` by reference. Throws NumericError on a non-finite loss value,
// ArgumentError when eps <= 0.
Matrix finite_difference_grad(const std::function<double()>& loss, Matrix& param, double eps);

// Worst entrywise discrepancy between an analytic and a numerical gradient:
// max over entries of |a - f| / max(|a| + |f|, abs_floor). The floor keeps
// near-zero entries from amplifying finite-difference noise.
double max_grad_discrepancy(const Matrix& analytic, const Matrix& fd,
                            double abs_floor = 1e-4);

}  // namespace ofm
