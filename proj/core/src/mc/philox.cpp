#include "exitmoment/mc/philox.hpp"

#include <cmath>
#include <numbers>

namespace exitmoment::mc {

double PathStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace exitmoment::mc
