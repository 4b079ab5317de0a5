#include "dcgrid/loop_tuner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace dcgrid::tuner {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
// Phase rounding that should not turn a boundary spec infeasible.
constexpr double kPhaseSlackDeg = 1e-9;

}  // namespace

void TuningSpec::validate() const {
  if (!(crossover_omega > 0.0) || !std::isfinite(crossover_omega)) {
    throw ValidationError("tuning.crossover: must be positive");
  }
  if (!(phase_margin > 0.0 && phase_margin < 180.0)) {
    throw ValidationError("tuning.margin: must lie in (0, 180) degrees");
  }
}

InfeasibleSpecError::InfeasibleSpecError(const TuningSpec& spec, double margin_low, double margin_high)
    : ValidationError(fmt::format(
          "PI cannot reach a {:.3f} deg margin at {:.6g} rad/s: achievable margins are ({:.3f}, {:.3f}] deg",
          spec.phase_margin, spec.crossover_omega, margin_low, margin_high)),
      low_(margin_low),
      high_(margin_high) {}

tf::CrossoverSearch search_around(double omega) {
  tf::CrossoverSearch s;
  s.omega_min = std::min(s.omega_min, omega / 10.0);
  s.omega_max = std::max(s.omega_max, omega * 10.0);
  return s;
}

TunedController design_pi(const tf::TransferFunction& plant, const TuningSpec& spec) {
  spec.validate();
  const double wc = spec.crossover_omega;
  const tf::Complex g = plant.at_frequency(wc);
  const double mag = std::abs(g);
  if (!(mag > 0.0) || !std::isfinite(mag)) {
    throw ValidationError(fmt::format("plant response at {} rad/s is zero or infinite", wc));
  }
  const auto search = search_around(wc);
  const double phase_g = tf::unwrapped_phase_at(plant, wc, search);
  double theta = (-180.0 + spec.phase_margin) - phase_g;
  if (theta > 0.0 && theta <= kPhaseSlackDeg) {
    theta = 0.0;
  }
  if (!(theta > -90.0 && theta <= 0.0)) {
    throw InfeasibleSpecError(spec, 90.0 + phase_g, 180.0 + phase_g);
  }
  const double c = 1.0 / mag;
  TunedController out;
  out.gains.kp = c * std::cos(theta * kDegToRad);
  out.gains.ki = std::max(0.0, -c * std::sin(theta * kDegToRad) * wc);
  out.plant_phase_deg = phase_g;
  out.controller_phase_deg = theta;
  const auto loop = tf::tf_series(pi_tf(out.gains), plant);
  out.achieved_crossover = tf::gain_crossover(loop, search);
  out.achieved_margin = 180.0 + tf::unwrapped_phase_at(loop, out.achieved_crossover, search);
  return out;
}

VerificationReport verify_design(const tf::TransferFunction& plant, const PiGains& gains, const TuningSpec& spec) {
  VerificationReport r;
  const auto loop = tf::tf_series(pi_tf(gains), plant);
  const auto search = search_around(spec.crossover_omega);
  try {
    r.crossover = tf::gain_crossover(loop, search);
    r.margin = 180.0 + tf::unwrapped_phase_at(loop, r.crossover, search);
  } catch (const tf::NoCrossoverError& e) {
    r.ok = false;
    r.message = e.what();
    return r;
  }
  r.crossover_delta = r.crossover - spec.crossover_omega;
  r.margin_delta = r.margin - spec.phase_margin;
  r.ok = true;
  r.message = fmt::format("crossover {:.6g} rad/s (delta {:+.3g}), margin {:.4f} deg (delta {:+.3g})", r.crossover,
                          r.crossover_delta, r.margin, r.margin_delta);
  return r;
}

}  // namespace dcgrid::tuner
