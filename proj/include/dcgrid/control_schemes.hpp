#pragma once

// Sampled secondary controllers: the conventional parallel voltage/current
// compensation and the cascade power/bus-voltage scheme.

#include <cstddef>
#include <deque>
#include <limits>
#include <span>
#include <vector>

#include "dcgrid/grid_model.hpp"
#include "dcgrid/pi_gains.hpp"

namespace dcgrid::control {

/// P_ir / sum(P_r). Throws ValidationError for an empty or non-positive rating list.
std::vector<double> compute_weights(std::span<const double> rated_powers);
std::vector<double> compute_weights(const grid::GridConfig& grid);

struct PiState {
  double integrator = 0.0;
  double last_output = 0.0;
  double last_error = 0.0;
  bool primed = false;  // false right after a reset: the first step treats the error as constant
};

/// Output (and integrator) bounds; conditional integration stops the integrator
/// from winding further into a saturated output.
struct PiLimits {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  static PiLimits symmetric(double bound) { return {-bound, bound}; }
};

struct PiStepResult {
  double output = 0.0;
  PiState state;
};

/// One trapezoidal PI update. Throws ValidationError for dt <= 0.
PiStepResult pi_step(const PiGains& gains, const PiState& state, double error, double dt,
                     const PiLimits& limits = {});

class PiController {
 public:
  PiController() = default;
  PiController(PiGains gains, PiLimits limits);

  double step(double error, double dt);
  void reset() { state_ = {}; }

  const PiGains& gains() const { return gains_; }
  const PiLimits& limits() const { return limits_; }
  const PiState& state() const { return state_; }
  /// True when the integrator lies within the clamp.
  bool integrator_within_limits() const;

 private:
  PiGains gains_;
  PiLimits limits_;
  PiState state_;
};

// ---------------------------------------------------------------------------
// Conventional scheme: V_ref,i = V_i* − R_d,i·I_i + δv_i + δi_i

struct ConventionalScheme {
  std::vector<double> droop_rd;  // ohm, per converter
  PiGains voltage_pi;            // V per V
  PiGains current_pi;            // V per A
  double correction_clamp = std::numeric_limits<double>::infinity();  // V, applies to δv and δi

  void validate(std::size_t converters) const;
};

struct ConventionalMeasurement {
  double current = 0.0;      // I_i
  double bus_voltage = 0.0;  // V_g,i
};

struct ConventionalRefs {
  std::vector<double> v_star;           // V_i*
  std::vector<double> current_ref;      // I_ref,i
  double bus_voltage_ref = 0.0;         // V_ref of the bus
};

struct ConventionalOutput {
  double voltage_ref = 0.0;
  double voltage_correction = 0.0;  // δv
  double current_correction = 0.0;  // δi
};

/// I_ref,i = w_i · sum(I).
std::vector<double> sharing_current_refs(std::span<const double> weights, std::span<const double> currents);

class ConventionalController {
 public:
  ConventionalController(ConventionalScheme scheme, std::size_t converters);

  /// Before activation the secondary corrections are zero and the integrators stay reset;
  /// the droop term is primary control and always acts.
  std::vector<ConventionalOutput> step(std::span<const ConventionalMeasurement> meas, const ConventionalRefs& refs,
                                       double dt, bool active = true);
  void reset();

  const ConventionalScheme& scheme() const { return scheme_; }
  const std::vector<PiController>& voltage_pis() const { return voltage_; }
  const std::vector<PiController>& current_pis() const { return current_; }

 private:
  ConventionalScheme scheme_;
  std::vector<PiController> voltage_;
  std::vector<PiController> current_;
};

// ---------------------------------------------------------------------------
// Cascade scheme: outer bus-voltage PI feeds a weighted power reference,
// inner power PI sets the sending-end voltage reference. No droop.

struct CascadeScheme {
  std::vector<PiGains> power_pi;        // V per W
  std::vector<PiGains> bus_voltage_pi;  // W per V
  std::vector<double> weights;
  std::vector<double> outer_clamp;  // W, per converter
  double inner_clamp = std::numeric_limits<double>::infinity();  // V

  void validate() const;
};

struct CascadeMeasurement {
  double own_power = 0.0;       // ΔP_i
  double bus_voltage = 0.0;     // ΔV_g,i
  double neighbor_power = 0.0;  // sum of the other converters' ΔP as received
};

struct CascadeOutput {
  double voltage_ref = 0.0;  // ΔV_i*
  double outer = 0.0;        // ΔP*_V,i
  double power_ref = 0.0;    // ΔP_i*
};

/// ΔP_i* = w_i·(sum of ΔP + demand + ΔP*_V,i).
double cascade_power_reference(double weight, double total_power, double demand, double outer);

class CascadeController {
 public:
  explicit CascadeController(CascadeScheme scheme);

  std::vector<CascadeOutput> step(std::span<const CascadeMeasurement> meas, double demand, double dt,
                                  bool active = true);
  void reset();

  const CascadeScheme& scheme() const { return scheme_; }
  const std::vector<PiController>& outer_pis() const { return outer_; }
  const std::vector<PiController>& inner_pis() const { return inner_; }

 private:
  CascadeScheme scheme_;
  std::vector<PiController> outer_;
  std::vector<PiController> inner_;
};

// ---------------------------------------------------------------------------
// Communication

/// Sampled zero-order hold with a fixed transport delay. A zero period
/// records every published value.
class CommChannel {
 public:
  CommChannel(double period, double delay);

  void publish(double t, double value);
  /// Latest value sampled at or before t − delay; zero before the first sample.
  double receive(double t) const;

  double period() const { return period_; }
  double delay() const { return delay_; }

 private:
  double period_;
  double delay_;
  double next_sample_ = -std::numeric_limits<double>::infinity();
  std::deque<std::pair<double, double>> samples_;
};

struct NeighborView {
  double power = 0.0;
  double bus_voltage = 0.0;
};

/// Two-converter link; each side sends its ΔP and ΔV_g.
class CommLink {
 public:
  CommLink(double period, double delay);

  void publish(double t, std::size_t i, const NeighborView& local);
  NeighborView receive(double t, std::size_t i) const;
  /// Publishes both local values, then returns what each converter sees of the other.
  std::vector<NeighborView> exchange(double t, std::span<const NeighborView> locals);

 private:
  std::vector<CommChannel> power_;
  std::vector<CommChannel> voltage_;
};

}  // namespace dcgrid::control
