#pragma once

// Small-signal model of a two-source DC bus: cable impedances, first-order
// converter voltage loops and the tuning plants built from them.

#include <cstddef>
#include <string>
#include <vector>

#include "dcgrid/pi_gains.hpp"
#include "dcgrid/tf_core.hpp"

namespace dcgrid::grid {

struct CableParams {
  double resistance = 0.5;   // ohm
  double inductance = 3e-3;  // henry

  /// R + L·s
  tf::Polynomial impedance() const { return tf::Polynomial{resistance, inductance}; }
};

struct ConverterParams {
  double rated_power = 0.0;         // W
  double voltage_loop_tau = 0.005;  // s
  CableParams cable;
};

struct GridConfig {
  std::vector<ConverterParams> converters;
  double nominal_bus_voltage = 400.0;  // V_gn
  double voltage_reference = 400.0;    // V*

  /// Two NPC converters rated 2 kW and 1 kW on identical 0.5 Ω / 3 mH cables, 400 V bus.
  static GridConfig nominal();

  /// Throws ValidationError naming the offending field.
  void validate() const;

  /// P_ir / sum(P_r).
  std::vector<double> weights() const;
};

/// 1/(1 + τ·s)
tf::TransferFunction converter_voltage_tf(const ConverterParams& c);

/// G_v,i(s) · V_gn/(R_i + L_i·s): sending-end voltage reference to delivered power.
tf::TransferFunction power_plant_tf(const GridConfig& grid, std::size_t i);

/// Bus-node voltage as a cable divider of the two sending-end voltages.
struct DividerWeights {
  tf::TransferFunction from_v1;  // Z2/(Z1+Z2)
  tf::TransferFunction from_v2;  // Z1/(Z1+Z2)
};
DividerWeights bus_voltage_from_source_voltages(const GridConfig& grid);

/// ΔVg/ΔP = −(1/V_gn)·Z1·Z2/(Z1+Z2). Improper (degree 2 over 1).
tf::TransferFunction bus_voltage_from_load_change(const GridConfig& grid);

/// ΔVg = W1·ΔV1 + W2·ΔV2 + Z_L·ΔP.
struct BusVoltageRelation {
  tf::TransferFunction from_v1;
  tf::TransferFunction from_v2;
  tf::TransferFunction from_load;

  tf::Complex evaluate(tf::Complex s, tf::Complex dv1, tf::Complex dv2, tf::Complex dp) const;
  /// Steady-state (s = 0) bus voltage deviation.
  double dc(double dv1, double dv2, double dp) const;
};
BusVoltageRelation total_bus_voltage(const GridConfig& grid);

/// ΔP_i = (ΔV_i − ΔVg)·V_gn/(R_i + L_i·s).
struct PowerExchange {
  tf::TransferFunction admittance1;
  tf::TransferFunction admittance2;

  tf::Complex power(std::size_t i, tf::Complex s, tf::Complex dv_i, tf::Complex dvg) const;
};
PowerExchange power_exchange(const GridConfig& grid);

enum class VoltagePlantMode {
  AsWritten,    // (K_pP + K_iP/s)·G_v,i·Z_j/(Z1+Z2)
  ClosedInner,  // inner power loop closed through V_gn/(Z1+Z2) before the divider
};

std::string to_string(VoltagePlantMode mode);
VoltagePlantMode parse_voltage_plant_mode(const std::string& text);

/// Plant seen by the outer bus-voltage PI of converter i.
tf::TransferFunction voltage_loop_plant_tf(const GridConfig& grid, std::size_t i, const PiGains& power_pi,
                                           VoltagePlantMode mode = VoltagePlantMode::AsWritten);

/// Cable network for time simulation.
/// Inputs (ΔV1, ΔV2, ΔP_L); outputs (ΔP1, ΔP2, ΔVg); one state.
/// The impulsive response of ΔVg to load steps is not represented.
tf::MimoStateSpace network_state_space(const GridConfig& grid);

}  // namespace dcgrid::grid
