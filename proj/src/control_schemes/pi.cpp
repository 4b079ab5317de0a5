#include <algorithm>
#include <cmath>

#include "dcgrid/control_schemes.hpp"

namespace dcgrid::control {

std::vector<double> compute_weights(std::span<const double> rated_powers) {
  if (rated_powers.empty()) {
    throw ValidationError("at least one rated power is required");
  }
  double total = 0.0;
  for (double p : rated_powers) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw ValidationError("rated powers must be positive");
    }
    total += p;
  }
  std::vector<double> w;
  w.reserve(rated_powers.size());
  for (double p : rated_powers) {
    w.push_back(p / total);
  }
  return w;
}

std::vector<double> compute_weights(const grid::GridConfig& grid) {
  std::vector<double> rated;
  for (const auto& c : grid.converters) {
    rated.push_back(c.rated_power);
  }
  return compute_weights(rated);
}

PiStepResult pi_step(const PiGains& gains, const PiState& state, double error, double dt, const PiLimits& limits) {
  if (!(dt > 0.0)) {
    throw ValidationError("PI step needs dt > 0");
  }
  const double prev_error = state.primed ? state.last_error : error;
  const double increment = gains.ki * 0.5 * (prev_error + error) * dt;
  double integrator = state.integrator + increment;
  const double unsaturated = gains.kp * error + integrator;
  // Conditional integration: hold the integrator if it would push further into saturation.
  if ((unsaturated > limits.upper && increment > 0.0) || (unsaturated < limits.lower && increment < 0.0)) {
    integrator = state.integrator;
  }
  integrator = std::clamp(integrator, limits.lower, limits.upper);
  const double output = std::clamp(gains.kp * error + integrator, limits.lower, limits.upper);
  return {output, PiState{integrator, output, error, true}};
}

PiController::PiController(PiGains gains, PiLimits limits) : gains_(gains), limits_(limits) {
  if (!std::isfinite(gains.kp) || !std::isfinite(gains.ki) || gains.ki < 0.0) {
    throw ValidationError("PI gains must be finite with ki >= 0");
  }
  if (!(limits.lower < limits.upper)) {
    throw ValidationError("PI limits must satisfy lower < upper");
  }
}

double PiController::step(double error, double dt) {
  const auto r = pi_step(gains_, state_, error, dt, limits_);
  state_ = r.state;
  return r.output;
}

bool PiController::integrator_within_limits() const {
  return std::isfinite(state_.integrator) && state_.integrator >= limits_.lower &&
         state_.integrator <= limits_.upper;
}

}  // namespace dcgrid::control
