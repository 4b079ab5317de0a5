#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "dcgrid/control_schemes.hpp"

namespace dcgrid::control {

namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ValidationError(fmt::format("{}: expected {} entries, got {}", what, want, got));
  }
}

}  // namespace

void ConventionalScheme::validate(std::size_t converters) const {
  require_size(droop_rd.size(), converters, "scheme.droop_rd");
  for (double rd : droop_rd) {
    if (!(rd >= 0.0) || !std::isfinite(rd)) {
      throw ValidationError("scheme.droop_rd: droop resistance must be >= 0");
    }
  }
  if (!(correction_clamp > 0.0)) {
    throw ValidationError("scheme.voltage_clamp: must be positive");
  }
}

std::vector<double> sharing_current_refs(std::span<const double> weights, std::span<const double> currents) {
  require_size(currents.size(), weights.size(), "currents");
  const double total = std::accumulate(currents.begin(), currents.end(), 0.0);
  std::vector<double> out;
  out.reserve(weights.size());
  for (double w : weights) {
    out.push_back(w * total);
  }
  return out;
}

ConventionalController::ConventionalController(ConventionalScheme scheme, std::size_t converters)
    : scheme_(std::move(scheme)) {
  scheme_.validate(converters);
  const auto lim = PiLimits::symmetric(scheme_.correction_clamp);
  voltage_.assign(converters, PiController(scheme_.voltage_pi, lim));
  current_.assign(converters, PiController(scheme_.current_pi, lim));
}

std::vector<ConventionalOutput> ConventionalController::step(std::span<const ConventionalMeasurement> meas,
                                                             const ConventionalRefs& refs, double dt, bool active) {
  const std::size_t n = voltage_.size();
  require_size(meas.size(), n, "measurements");
  require_size(refs.v_star.size(), n, "refs.v_star");
  require_size(refs.current_ref.size(), n, "refs.current_ref");
  if (!active) {
    reset();
  }
  std::vector<ConventionalOutput> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& o = out[i];
    if (active) {
      o.voltage_correction = voltage_[i].step(refs.bus_voltage_ref - meas[i].bus_voltage, dt);
      o.current_correction = current_[i].step(refs.current_ref[i] - meas[i].current, dt);
    }
    o.voltage_ref = refs.v_star[i] - scheme_.droop_rd[i] * meas[i].current + o.voltage_correction +
                    o.current_correction;
  }
  return out;
}

void ConventionalController::reset() {
  for (auto& p : voltage_) {
    p.reset();
  }
  for (auto& p : current_) {
    p.reset();
  }
}

void CascadeScheme::validate() const {
  const std::size_t n = weights.size();
  if (n == 0) {
    throw ValidationError("cascade scheme needs at least one converter");
  }
  require_size(power_pi.size(), n, "scheme.power_pi");
  require_size(bus_voltage_pi.size(), n, "scheme.bus_pi");
  require_size(outer_clamp.size(), n, "scheme.outer_clamp");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) {
      throw ValidationError("cascade weights must be positive");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError(fmt::format("cascade weights must sum to 1 (got {})", total));
  }
  for (double c : outer_clamp) {
    if (!(c > 0.0)) {
      throw ValidationError("scheme.outer_clamp: must be positive");
    }
  }
  if (!(inner_clamp > 0.0)) {
    throw ValidationError("scheme.voltage_clamp: must be positive");
  }
}

double cascade_power_reference(double weight, double total_power, double demand, double outer) {
  return weight * (total_power + demand + outer);
}

CascadeController::CascadeController(CascadeScheme scheme) : scheme_(std::move(scheme)) {
  scheme_.validate();
  for (std::size_t i = 0; i < scheme_.weights.size(); ++i) {
    outer_.emplace_back(scheme_.bus_voltage_pi[i], PiLimits::symmetric(scheme_.outer_clamp[i]));
    inner_.emplace_back(scheme_.power_pi[i], PiLimits::symmetric(scheme_.inner_clamp));
  }
}

std::vector<CascadeOutput> CascadeController::step(std::span<const CascadeMeasurement> meas, double demand, double dt,
                                                   bool active) {
  const std::size_t n = outer_.size();
  require_size(meas.size(), n, "measurements");
  std::vector<CascadeOutput> out(n);
  if (!active) {
    reset();
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& o = out[i];
    o.outer = outer_[i].step(0.0 - meas[i].bus_voltage, dt);
    o.power_ref = cascade_power_reference(scheme_.weights[i], meas[i].own_power + meas[i].neighbor_power, demand,
                                          o.outer);
    o.voltage_ref = inner_[i].step(o.power_ref - meas[i].own_power, dt);
  }
  return out;
}

void CascadeController::reset() {
  for (auto& p : outer_) {
    p.reset();
  }
  for (auto& p : inner_) {
    p.reset();
  }
}

}  // namespace dcgrid::control
