#include "meshcast/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meshcast {

GradCheckReport finite_diff_check(
    const std::function<double(const std::vector<DenseMatrix>&)>& f,
    const std::vector<DenseMatrix>& params, const std::vector<DenseMatrix>& analytic_grads,
    double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("finite_diff_check: epsilon must be positive");
  if (params.size() != analytic_grads.size()) {
    throw std::invalid_argument("finite_diff_check: params/grads count mismatch");
  }

  GradCheckReport report;
  std::vector<DenseMatrix> work = params;
  for (std::size_t m = 0; m < work.size(); ++m) {
    if (!params[m].same_shape(analytic_grads[m])) {
      throw std::invalid_argument("finite_diff_check: gradient shape mismatch");
    }
    for (std::size_t k = 0; k < work[m].data.size(); ++k) {
      const double original = work[m].data[k];
      work[m].data[k] = original + epsilon;
      const double f_plus = f(work);
      work[m].data[k] = original - epsilon;
      const double f_minus = f(work);
      work[m].data[k] = original;

      const double numeric = (f_plus - f_minus) / (2.0 * epsilon);
      const double analytic = analytic_grads[m].data[k];
      const double abs_err = std::abs(numeric - analytic);
      const double rel_err = abs_err / std::max({1.0, std::abs(numeric), std::abs(analytic)});
      ++report.entries_checked;
      if (rel_err > report.max_rel_error) {
        report.max_rel_error = rel_err;
        report.max_abs_error = abs_err;
        report.worst_matrix = static_cast<int>(m);
        report.worst_entry = static_cast<int>(k);
      }
    }
  }
  return report;
}

}  // namespace meshcast
