#include "ofm/gradcheck.hpp"

#include <cmath>

namespace ofm {

Matrix finite_difference_grad(const std::function<double()>& loss, Matrix& param,
                              double eps) {
  if (!(eps > 0.0)) throw ArgumentError("finite_difference_grad: eps must be > 0");
  Matrix grad(param.rows, param.cols);
  for (size_t i = 0; i < param.data.size(); ++i) {
    const double saved = param.data[i];
    param.data[i] = saved + eps;
    const double fp = loss();
    param.data[i] = saved - eps;
    const double fm = loss();
    param.data[i] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericError("finite_difference_grad: non-finite loss at entry " +
                         std::to_string(i));
    }
    grad.data[i] = (fp - fm) / (2.0 * eps);
  }
  return grad;
}

double max_grad_discrepancy(const Matrix& analytic, const Matrix& fd, double abs_floor) {
  if (!analytic.same_shape(fd)) {
    throw ArgumentError("max_grad_discrepancy: shape mismatch");
  }
  double worst = 0.0;
  for (size_t i = 0; i < analytic.data.size(); ++i) {
    const double a = analytic.data[i];
    const double f = fd.data[i];
    const double denom = std::max(std::fabs(a) + std::fabs(f), abs_floor);
    const double rel = std::fabs(a - f) / denom;
    if (rel > worst) worst = rel;
  }
  return worst;
}

}  // namespace ofm
