#include "dcgrid/stability_analysis.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace dcgrid::stability {

using tf::Complex;

void ImpedanceSweep::validate() const {
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw ValidationError("sweep: need 0 < r_min < r_max");
  }
  if (!(ratio_r_over_l > 0.0) || !std::isfinite(ratio_r_over_l)) {
    throw ValidationError("sweep.ratio: must be positive");
  }
  if (steps < 2) {
    throw ValidationError("sweep.steps: need at least 2 steps");
  }
}

std::vector<double> ImpedanceSweep::resistances() const {
  validate();
  return tf::log_space(r_min, r_max, steps);
}

Complex dominant_pole(const std::vector<Complex>& poles) {
  if (poles.empty()) {
    throw ValidationError("no poles to rank");
  }
  Complex best = poles.front();
  for (const Complex& p : poles) {
    if (p.real() > best.real() || (p.real() == best.real() && p.imag() > best.imag())) {
      best = p;
    }
  }
  return best;
}

namespace {

grid::GridConfig with_cable(grid::GridConfig g, double r1, double l1) {
  g.converters.at(0).cable = {r1, l1};
  g.validate();
  return g;
}

std::vector<Complex> closed_loop_poles(const tf::TransferFunction& loop) {
  return tf::poles(tf::tf_feedback(loop, tf::TransferFunction::gain(1.0)));
}

// Greedy nearest-neighbour: reorder `next` to follow `prev` trajectory by trajectory.
bool pair_poles(const std::vector<Complex>& prev, std::vector<Complex>& next) {
  std::vector<Complex> ordered;
  std::vector<bool> used(next.size(), false);
  bool ambiguous = false;
  for (const Complex& p : prev) {
    std::size_t best = next.size();
    std::size_t global = next.size();
    double best_d = std::numeric_limits<double>::infinity();
    double global_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < next.size(); ++j) {
      const double d = std::abs(next[j] - p);
      if (d < global_d) {
        global_d = d;
        global = j;
      }
      if (!used[j] && d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == next.size()) {
      break;
    }
    ambiguous = ambiguous || best != global;
    used[best] = true;
    ordered.push_back(next[best]);
  }
  for (std::size_t j = 0; j < next.size(); ++j) {
    if (!used[j]) {
      ordered.push_back(next[j]);
    }
  }
  next = std::move(ordered);
  return ambiguous || prev.size() != next.size();
}

LocusResult run_sweep(const ImpedanceSweep& sweep, const std::function<std::vector<Complex>(double, double)>& at) {
  LocusResult out;
  out.all_stable = true;
  for (double r : sweep.resistances()) {
    LocusStep step;
    step.r1 = r;
    step.l1 = r / sweep.ratio_r_over_l;
    step.poles = at(step.r1, step.l1);
    if (!out.steps.empty()) {
      step.pairing_ambiguous = pair_poles(out.steps.back().poles, step.poles);
    }
    step.stable = true;
    for (const Complex& p : step.poles) {
      step.stable = step.stable && p.real() < 0.0;
    }
    out.all_stable = out.all_stable && step.stable;
    out.steps.push_back(std::move(step));
  }
  out.terminal_dominant_pole = dominant_pole(out.steps.back().poles);
  return out;
}

}  // namespace

std::vector<Complex> power_loop_poles(const grid::GridConfig& grid, const PiGains& gains, double r1, double l1) {
  const auto g = with_cable(grid, r1, l1);
  return closed_loop_poles(tf::tf_series(pi_tf(gains), grid::power_plant_tf(g, 0)));
}

std::vector<Complex> voltage_loop_poles(const grid::GridConfig& grid, const PiGains& power_gains,
                                        const PiGains& voltage_gains, double r1, double l1,
                                        grid::VoltagePlantMode mode) {
  const auto g = with_cable(grid, r1, l1);
  return closed_loop_poles(tf::tf_series(pi_tf(voltage_gains), grid::voltage_loop_plant_tf(g, 0, power_gains, mode)));
}

LocusResult sweep_power_loop(const grid::GridConfig& grid, const PiGains& gains, const ImpedanceSweep& sweep) {
  return run_sweep(sweep, [&](double r, double l) { return power_loop_poles(grid, gains, r, l); });
}

LocusResult sweep_voltage_loop(const grid::GridConfig& grid, const PiGains& power_gains, const PiGains& voltage_gains,
                               const ImpedanceSweep& sweep, grid::VoltagePlantMode mode) {
  return run_sweep(sweep,
                   [&](double r, double l) { return voltage_loop_poles(grid, power_gains, voltage_gains, r, l, mode); });
}

double max_resistance_bound(const grid::GridConfig& grid, double regulation_ratio, double rated_current) {
  if (!(regulation_ratio >= 0.0) || !(rated_current > 0.0)) {
    throw ValidationError("sweep: regulation ratio must be >= 0 and rated current > 0");
  }
  return regulation_ratio * grid.nominal_bus_voltage / rated_current;
}

}  // namespace dcgrid::stability
