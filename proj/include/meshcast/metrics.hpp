#pragma once

#include <vector>

#include "meshcast/dense_matrix.hpp"

namespace meshcast {

struct ChannelRmse {
  double vx = 0.0;
  double vy = 0.0;
  double thickness = 0.0;
};

struct RmseReport {
  // (month, rmse) for each month in the forecast window.
  std::vector<std::pair<int, ChannelRmse>> per_month;
  // Root of the node-and-time-pooled mean square, not the mean of per-month
  // RMSEs.
  ChannelRmse window_avg;
};

/// Squared-error pool over nodes, times, and trajectories. Channel counts are
/// node*time totals, so trajectories with more nodes weigh more.
struct ErrorPool {
  double sum_sq[3] = {0.0, 0.0, 0.0};
  long long count = 0;  // node*time samples per channel

  void add(const DenseMatrix& pred, const DenseMatrix& truth);
  void merge(const ErrorPool& other);
  ChannelRmse rmse() const;
};

/// One forecast month: prediction and truth, both N x 3 in physical units.
struct MonthPair {
  const DenseMatrix* pred = nullptr;
  const DenseMatrix* truth = nullptr;
};

/// Per-month pooled RMSE over months t0+1..t1. months[i] corresponds to
/// month t0+1+i.
RmseReport rmse_per_month(const std::vector<MonthPair>& months, int t0);

/// Window-averaged RMSE pooled over all nodes, months, and trajectories.
/// Each element of `trajectories` is one trajectory's forecast window.
ChannelRmse pooled_rmse(const std::vector<std::vector<MonthPair>>& trajectories);

}  // namespace meshcast
