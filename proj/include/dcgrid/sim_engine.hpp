#pragma once

// Fixed-step simulation of the two-source grid under a secondary control scheme.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dcgrid/control_schemes.hpp"
#include "dcgrid/grid_model.hpp"

namespace dcgrid::sim {

struct LoadEvent {
  double time = 0.0;   // s
  double power = 0.0;  // total load W, held from `time` on
};

struct LoadProfile {
  std::vector<LoadEvent> events;

  /// 2 kW from t = 0, stepping by 4 kW at t = 20 s.
  static LoadProfile default_profile();
  void validate() const;
  /// Load in force at t (zero before the first event).
  double at(double t) const;
};

/// Secondary control switched off and no droop: the bare network.
struct OpenLoop {};

using SchemeConfig = std::variant<OpenLoop, control::ConventionalScheme, control::CascadeScheme>;

struct Scenario {
  std::string name = "scenario";
  grid::GridConfig grid = grid::GridConfig::nominal();
  SchemeConfig scheme = OpenLoop{};
  LoadProfile load = LoadProfile::default_profile();
  double activation_time = 5.0;  // s
  double duration = 25.0;        // s
  double plant_dt = 1e-4;        // s
  double control_dt = 1e-3;      // s
  double comm_period = 1e-3;     // s
  double comm_delay = 1e-3;      // s
  double demand = 0.0;           // W, energy-manager power command for the cascade scheme

  void validate() const;
};

/// All series are deviations from the operating point and share the time grid.
struct SimResult {
  std::string scheme;
  std::vector<double> t;
  std::vector<double> p1, p2;        // W
  std::vector<double> vg;            // bus node, V
  std::vector<double> v1, v2;        // converter sending ends, V
  std::vector<double> i1, i2;        // P_i / V_gn, A
  std::vector<double> iref1, iref2;  // w_i · (I1 + I2), A
  std::vector<double> vref1, vref2;  // converter voltage references, V
  std::vector<double> outer1, outer2;  // cascade ΔP*_V,i (W) or conventional δv_i (V)
  std::vector<double> inner1, inner2;  // cascade ΔP_i* (W) or conventional δi_i (V)
  std::vector<double> load;          // W

  std::size_t size() const { return t.size(); }
};

/// Non-finite or runaway state; carries the time of divergence.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(double t, const std::string& what);
  double time() const { return time_; }

 private:
  double time_;
};

SimResult run(const Scenario& scenario);

/// Exact zero-order-hold discretization of x' = Ax + Bu over dt.
struct Discretized {
  Eigen::MatrixXd phi;
  Eigen::MatrixXd gamma;
};
Discretized discretize(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double dt);

/// Unit-step response of a proper transfer function sampled every dt up to t_end.
std::vector<double> step_response(const tf::TransferFunction& g, double t_end, double dt);

/// Trapezoid of (t − start)·|e| over [start, start + T]; end points interpolated.
double itae(std::span<const double> t, std::span<const double> abs_error, double start, double window);

/// Bus-voltage error |V_ref − mean terminal voltage|, taken at the bus node.
double itae_voltage(const SimResult& r, double start, double window = 2.0);
/// |I_ref1 − I1| + |I_ref2 − I2|.
double itae_current(const SimResult& r, double start, double window = 2.0);

struct ItaeReport {
  double itae_v = 0.0;
  double itae_i = 0.0;
  double window_start = 0.0;
  double window_t = 2.0;
};
ItaeReport itae_report(const SimResult& r, double start, double window = 2.0);

struct SettlingResult {
  bool settled = false;
  double time = 0.0;  // from window start; meaningful only when settled
};

/// Last exit from the band target ± band_percent% of the largest excursion
/// inside [start, end), closed at the end of the series. Still outside at the
/// last sample ⇒ not settled.
SettlingResult settling_time(std::span<const double> t, std::span<const double> series, double target,
                             double band_percent, double start, double end);

}  // namespace dcgrid::sim
