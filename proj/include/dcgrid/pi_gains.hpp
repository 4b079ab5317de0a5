#pragma once

#include "dcgrid/tf_core.hpp"

namespace dcgrid {

/// Proportional and integral gain pair, C(s) = kp + ki/s.
struct PiGains {
  double kp = 0.0;
  double ki = 0.0;
};

/// (kp·s + ki)/s, or the constant kp when ki is zero.
tf::TransferFunction pi_tf(const PiGains& g);

}  // namespace dcgrid
