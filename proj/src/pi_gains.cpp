#include "dcgrid/pi_gains.hpp"

#include <cmath>

namespace dcgrid {

tf::TransferFunction pi_tf(const PiGains& g) {
  if (!std::isfinite(g.kp) || !std::isfinite(g.ki)) {
    throw ValidationError("PI gains must be finite");
  }
  if (g.ki == 0.0) {
    return tf::TransferFunction::gain(g.kp);
  }
  return {tf::Polynomial{g.ki, g.kp}, tf::Polynomial{0.0, 1.0}};
}

}  // namespace dcgrid
