#pragma once

// PI synthesis by magnitude/phase placement at a chosen gain crossover.

#include <string>

#include "dcgrid/pi_gains.hpp"
#include "dcgrid/tf_core.hpp"

namespace dcgrid::tuner {

struct TuningSpec {
  double crossover_omega = 100.0;  // rad/s
  double phase_margin = 70.0;      // degrees

  void validate() const;
};

struct TunedController {
  PiGains gains;
  double achieved_margin = 0.0;     // degrees
  double achieved_crossover = 0.0;  // rad/s
  double plant_phase_deg = 0.0;     // unwrapped arg G(jω_c)
  double controller_phase_deg = 0.0;
};

/// The requested margin needs a controller phase outside (−90°, 0°].
class InfeasibleSpecError : public ValidationError {
 public:
  InfeasibleSpecError(const TuningSpec& spec, double margin_low, double margin_high);
  /// Achievable margins at this crossover form the interval (low, high].
  double margin_low() const { return low_; }
  double margin_high() const { return high_; }

 private:
  double low_;
  double high_;
};

TunedController design_pi(const tf::TransferFunction& plant, const TuningSpec& spec);

struct VerificationReport {
  bool ok = false;
  double crossover = 0.0;
  double margin = 0.0;
  double crossover_delta = 0.0;  // achieved − requested, rad/s
  double margin_delta = 0.0;     // achieved − requested, degrees
  std::string message;
};

/// Recomputes the loop C·G crossover and margin. A loop without a crossover
/// gives ok = false and an explanatory message.
VerificationReport verify_design(const tf::TransferFunction& plant, const PiGains& gains, const TuningSpec& spec);

/// Search band wide enough to contain omega.
tf::CrossoverSearch search_around(double omega);

}  // namespace dcgrid::tuner
