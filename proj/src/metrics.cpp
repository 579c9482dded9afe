#include "meshcast/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace meshcast {

void ErrorPool::add(const DenseMatrix& pred, const DenseMatrix& truth) {
  if (!pred.same_shape(truth) || pred.cols != 3) {
    throw std::invalid_argument("ErrorPool::add: expected matching N x 3 matrices");
  }
  for (int n = 0; n < pred.rows; ++n) {
    const double* p = pred.row_ptr(n);
    const double* t = truth.row_ptr(n);
    for (int c = 0; c < 3; ++c) {
      const double e = p[c] - t[c];
      sum_sq[c] += e * e;
    }
  }
  count += pred.rows;
}

void ErrorPool::merge(const ErrorPool& other) {
  for (int c = 0; c < 3; ++c) sum_sq[c] += other.sum_sq[c];
  count += other.count;
}

ChannelRmse ErrorPool::rmse() const {
  if (count == 0) throw std::invalid_argument("ErrorPool::rmse: empty pool");
  ChannelRmse out;
  out.vx = std::sqrt(sum_sq[0] / static_cast<double>(count));
  out.vy = std::sqrt(sum_sq[1] / static_cast<double>(count));
  out.thickness = std::sqrt(sum_sq[2] / static_cast<double>(count));
  return out;
}

RmseReport rmse_per_month(const std::vector<MonthPair>& months, int t0) {
  if (months.empty()) throw std::invalid_argument("rmse_per_month: empty window");
  RmseReport report;
  ErrorPool window;
  for (std::size_t i = 0; i < months.size(); ++i) {
    ErrorPool pool;
    pool.add(*months[i].pred, *months[i].truth);
    report.per_month.emplace_back(t0 + 1 + static_cast<int>(i), pool.rmse());
    window.merge(pool);
  }
  report.window_avg = window.rmse();
  return report;
}

ChannelRmse pooled_rmse(const std::vector<std::vector<MonthPair>>& trajectories) {
  if (trajectories.empty()) throw std::invalid_argument("pooled_rmse: empty input");
  ErrorPool pool;
  for (const auto& months : trajectories) {
    for (const auto& m : months) pool.add(*m.pred, *m.truth);
  }
  return pool.rmse();
}

}  // namespace meshcast
