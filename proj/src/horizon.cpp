#include "meshcast/horizon.hpp"

#include <algorithm>
#include <stdexcept>

namespace meshcast {

HorizonSet::HorizonSet(std::vector<int> horizons) : horizons_(std::move(horizons)) {
  if (horizons_.empty()) throw std::invalid_argument("HorizonSet: empty horizon set");
  for (int h : horizons_) {
    if (h <= 0) throw std::invalid_argument("HorizonSet: horizons must be positive");
  }
  std::sort(horizons_.begin(), horizons_.end());
  horizons_.erase(std::unique(horizons_.begin(), horizons_.end()), horizons_.end());
}

bool HorizonSet::contains(int h) const {
  return std::binary_search(horizons_.begin(), horizons_.end(), h);
}

double HorizonSet::psi(int h) const {
  if (!contains(h)) throw std::invalid_argument("HorizonSet::psi: horizon not in set");
  return static_cast<double>(h) / static_cast<double>(h_max());
}

}  // namespace meshcast
