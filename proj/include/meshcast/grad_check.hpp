#pragma once

#include <functional>
#include <vector>

#include "meshcast/dense_matrix.hpp"

namespace meshcast {

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  int worst_matrix = -1;
  int worst_entry = -1;
  std::size_t entries_checked = 0;

  bool passes(double tolerance) const { return max_rel_error < tolerance; }
};

/// Central-difference check of analytic gradients: perturbs every parameter
/// entry by +/- epsilon, evaluates f, and compares (f+ - f-) / 2eps against
/// the supplied gradient entry. Relative error uses max(1, |a|, |n|) as the
/// denominator. f must be a pure function of the parameter values.
GradCheckReport finite_diff_check(
    const std::function<double(const std::vector<DenseMatrix>&)>& f,
    const std::vector<DenseMatrix>& params, const std::vector<DenseMatrix>& analytic_grads,
    double epsilon);

}  // namespace meshcast
