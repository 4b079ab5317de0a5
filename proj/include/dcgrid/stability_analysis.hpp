#pragma once

// Closed-loop pole trajectories as converter 1's cable impedance grows.

#include <cstddef>
#include <vector>

#include "dcgrid/grid_model.hpp"
#include "dcgrid/pi_gains.hpp"
#include "dcgrid/tf_core.hpp"

namespace dcgrid::stability {

struct ImpedanceSweep {
  double r_min = 0.1;                 // ohm
  double r_max = 2.0;                 // ohm
  double ratio_r_over_l = 0.5 / 3e-3;  // ohm/H
  std::size_t steps = 50;             // log-spaced

  void validate() const;
  std::vector<double> resistances() const;
};

struct LocusStep {
  double r1 = 0.0;
  double l1 = 0.0;
  std::vector<tf::Complex> poles;  // ordered to follow the trajectories of the previous step
  bool stable = false;
  bool pairing_ambiguous = false;  // nearest-neighbour pairing met a crossing
};

struct LocusResult {
  std::vector<LocusStep> steps;
  tf::Complex terminal_dominant_pole;
  bool all_stable = false;
};

/// Rightmost pole; the upper member of a conjugate pair.
tf::Complex dominant_pole(const std::vector<tf::Complex>& poles);

/// Closed-loop poles of the power loop with converter 1's cable set to (r1, l1).
std::vector<tf::Complex> power_loop_poles(const grid::GridConfig& grid, const PiGains& gains, double r1, double l1);
/// Closed-loop poles of the bus-voltage loop with converter 1's cable set to (r1, l1).
std::vector<tf::Complex> voltage_loop_poles(const grid::GridConfig& grid, const PiGains& power_gains,
                                            const PiGains& voltage_gains, double r1, double l1,
                                            grid::VoltagePlantMode mode = grid::VoltagePlantMode::AsWritten);

LocusResult sweep_power_loop(const grid::GridConfig& grid, const PiGains& gains, const ImpedanceSweep& sweep);
LocusResult sweep_voltage_loop(const grid::GridConfig& grid, const PiGains& power_gains,
                               const PiGains& voltage_gains, const ImpedanceSweep& sweep,
                               grid::VoltagePlantMode mode = grid::VoltagePlantMode::AsWritten);

/// regulation_ratio · V_gn / rated_current.
double max_resistance_bound(const grid::GridConfig& grid, double regulation_ratio = 0.05,
                            double rated_current = 10.0);

}  // namespace dcgrid::stability
