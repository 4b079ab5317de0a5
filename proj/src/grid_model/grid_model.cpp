#include "dcgrid/grid_model.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace dcgrid::grid {

using tf::Complex;
using tf::Polynomial;
using tf::TransferFunction;

namespace {

void require_two(const GridConfig& grid) {
  if (grid.converters.size() != 2) {
    throw ValidationError(
        fmt::format("grid.converters: exactly 2 converters are supported, got {}", grid.converters.size()));
  }
}

void require_index(const GridConfig& grid, std::size_t i) {
  require_two(grid);
  if (i >= grid.converters.size()) {
    throw ValidationError(fmt::format("converter index {} out of range", i));
  }
}

Polynomial z_sum(const GridConfig& grid) {
  return grid.converters[0].cable.impedance() + grid.converters[1].cable.impedance();
}

}  // namespace

GridConfig GridConfig::nominal() {
  GridConfig g;
  g.converters = {ConverterParams{2000.0, 0.005, CableParams{0.5, 3e-3}},
                  ConverterParams{1000.0, 0.005, CableParams{0.5, 3e-3}}};
  g.nominal_bus_voltage = 400.0;
  g.voltage_reference = 400.0;
  return g;
}

void GridConfig::validate() const {
  require_two(*this);
  if (!(nominal_bus_voltage > 0.0) || !std::isfinite(nominal_bus_voltage)) {
    throw ValidationError("grid.vgn: nominal bus voltage must be positive");
  }
  if (!(voltage_reference > 0.0) || !std::isfinite(voltage_reference)) {
    throw ValidationError("grid.vstar: voltage reference must be positive");
  }
  for (std::size_t i = 0; i < converters.size(); ++i) {
    const auto& c = converters[i];
    if (!(c.rated_power > 0.0) || !std::isfinite(c.rated_power)) {
      throw ValidationError(fmt::format("grid.rated_power[{}]: must be positive", i));
    }
    if (!(c.voltage_loop_tau > 0.0) || !std::isfinite(c.voltage_loop_tau)) {
      throw ValidationError(fmt::format("grid.tau[{}]: must be positive", i));
    }
    if (!(c.cable.resistance > 0.0) || !std::isfinite(c.cable.resistance)) {
      throw ValidationError(fmt::format("grid.cable_r[{}]: must be positive", i));
    }
    if (!(c.cable.inductance > 0.0) || !std::isfinite(c.cable.inductance)) {
      throw ValidationError(fmt::format("grid.cable_l[{}]: must be positive", i));
    }
  }
}

std::vector<double> GridConfig::weights() const {
  const double total = std::accumulate(converters.begin(), converters.end(), 0.0,
                                       [](double acc, const ConverterParams& c) { return acc + c.rated_power; });
  if (!(total > 0.0)) {
    throw ValidationError("grid.rated_power: total rated power must be positive");
  }
  std::vector<double> w;
  w.reserve(converters.size());
  for (const auto& c : converters) {
    w.push_back(c.rated_power / total);
  }
  return w;
}

TransferFunction converter_voltage_tf(const ConverterParams& c) {
  return {Polynomial{1.0}, Polynomial{1.0, c.voltage_loop_tau}};
}

TransferFunction power_plant_tf(const GridConfig& grid, std::size_t i) {
  require_index(grid, i);
  const auto& c = grid.converters[i];
  const TransferFunction line(Polynomial{grid.nominal_bus_voltage}, c.cable.impedance());
  return tf::tf_series(converter_voltage_tf(c), line);
}

DividerWeights bus_voltage_from_source_voltages(const GridConfig& grid) {
  require_two(grid);
  const Polynomial den = z_sum(grid);
  return {tf::cancel_common_factors({grid.converters[1].cable.impedance(), den}),
          tf::cancel_common_factors({grid.converters[0].cable.impedance(), den})};
}

TransferFunction bus_voltage_from_load_change(const GridConfig& grid) {
  require_two(grid);
  const Polynomial num = (-1.0 / grid.nominal_bus_voltage) *
                         (grid.converters[0].cable.impedance() * grid.converters[1].cable.impedance());
  return tf::cancel_common_factors({num, z_sum(grid)});
}

Complex BusVoltageRelation::evaluate(Complex s, Complex dv1, Complex dv2, Complex dp) const {
  return from_v1.eval(s) * dv1 + from_v2.eval(s) * dv2 + from_load.eval(s) * dp;
}

double BusVoltageRelation::dc(double dv1, double dv2, double dp) const {
  return evaluate(Complex(0.0, 0.0), dv1, dv2, dp).real();
}

BusVoltageRelation total_bus_voltage(const GridConfig& grid) {
  const auto w = bus_voltage_from_source_voltages(grid);
  return {w.from_v1, w.from_v2, bus_voltage_from_load_change(grid)};
}

Complex PowerExchange::power(std::size_t i, Complex s, Complex dv_i, Complex dvg) const {
  if (i > 1) {
    throw ValidationError(fmt::format("converter index {} out of range", i));
  }
  const auto& y = i == 0 ? admittance1 : admittance2;
  return y.eval(s) * (dv_i - dvg);
}

PowerExchange power_exchange(const GridConfig& grid) {
  require_two(grid);
  const Polynomial v{grid.nominal_bus_voltage};
  return {TransferFunction(v, grid.converters[0].cable.impedance()),
          TransferFunction(v, grid.converters[1].cable.impedance())};
}

std::string to_string(VoltagePlantMode mode) {
  return mode == VoltagePlantMode::AsWritten ? "as-written" : "closed-inner";
}

VoltagePlantMode parse_voltage_plant_mode(const std::string& text) {
  if (text == "as-written") {
    return VoltagePlantMode::AsWritten;
  }
  if (text == "closed-inner") {
    return VoltagePlantMode::ClosedInner;
  }
  throw ValidationError(fmt::format("unknown voltage plant mode '{}' (expected as-written or closed-inner)", text));
}

TransferFunction voltage_loop_plant_tf(const GridConfig& grid, std::size_t i, const PiGains& power_pi,
                                       VoltagePlantMode mode) {
  require_index(grid, i);
  const std::size_t j = 1 - i;
  const Polynomial zsum = z_sum(grid);
  const TransferFunction divider(grid.converters[j].cable.impedance(), zsum);
  const TransferFunction forward = tf::tf_series(pi_tf(power_pi), converter_voltage_tf(grid.converters[i]));
  if (mode == VoltagePlantMode::AsWritten) {
    return tf::tf_series(forward, divider);
  }
  const TransferFunction inner_path(Polynomial{grid.nominal_bus_voltage}, zsum);
  return tf::tf_series(tf::tf_feedback(forward, inner_path), divider);
}

tf::MimoStateSpace network_state_space(const GridConfig& grid) {
  require_two(grid);
  const double r1 = grid.converters[0].cable.resistance;
  const double r2 = grid.converters[1].cable.resistance;
  const double l1 = grid.converters[0].cable.inductance;
  const double l2 = grid.converters[1].cable.inductance;
  const double v = grid.nominal_bus_voltage;
  const double ls = l1 + l2;

  // State q = (L1+L2)·ΔP1 − L2·ΔP_L, so that ΔP1 = (q + L2·ΔP_L)/(L1+L2).
  tf::MimoStateSpace ss;
  ss.A = Eigen::MatrixXd::Constant(1, 1, -(r1 + r2) / ls);
  ss.B = Eigen::MatrixXd(1, 3);
  ss.B << v, -v, (r2 * l1 - r1 * l2) / ls;
  ss.C = Eigen::MatrixXd(3, 1);
  ss.D = Eigen::MatrixXd::Zero(3, 3);
  ss.C(0, 0) = 1.0 / ls;
  ss.D(0, 2) = l2 / ls;
  ss.C(1, 0) = -1.0 / ls;
  ss.D(1, 2) = l1 / ls;
  // ΔVg = ΔV1 − (R1·ΔP1 + L1·q'/(L1+L2))/V_gn
  ss.C(2, 0) = -r1 / (ls * v) - l1 * ss.A(0, 0) / (ls * v);
  ss.D.row(2) = -(l1 / (ls * v)) * ss.B.row(0);
  ss.D(2, 0) += 1.0;
  ss.D(2, 2) += -r1 * l2 / (ls * v);
  return ss;
}

}  // namespace dcgrid::grid
