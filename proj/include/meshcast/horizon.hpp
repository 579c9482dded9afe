#pragma once

#include <vector>

namespace meshcast {

/// Sorted set of positive lead times. psi(h) = h / H_max is the scalar
/// horizon encoding broadcast to every node.
class HorizonSet {
 public:
  explicit HorizonSet(std::vector<int> horizons);

  const std::vector<int>& members() const { return horizons_; }
  int h_max() const { return horizons_.back(); }
  bool contains(int h) const;
  double psi(int h) const;
  std::size_t size() const { return horizons_.size(); }

  bool operator==(const HorizonSet& other) const { return horizons_ == other.horizons_; }

 private:
  std::vector<int> horizons_;
};

}  // namespace meshcast
