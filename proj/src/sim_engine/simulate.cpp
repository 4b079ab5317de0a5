#include "dcgrid/sim_engine.hpp"

#include <cmath>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace dcgrid::sim {

namespace {

constexpr double kRunaway = 1e12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string scheme_label(const SchemeConfig& s) {
  return std::visit(Overloaded{[](const OpenLoop&) { return std::string("open-loop"); },
                                        [](const control::ConventionalScheme&) { return std::string("conventional"); },
                                        [](const control::CascadeScheme&) { return std::string("cascade"); }},
                    s);
}

// Converter voltage loops feeding the cable network.
// States: [converter 1 block, converter 2 block, network]; inputs: (Vref1, Vref2, P_L);
// outputs: (p1, p2, vg, v1, v2).
struct Plant {
  Eigen::MatrixXd a, b, c, d;
};

Plant assemble(const grid::GridConfig& g) {
  const auto c1 = tf::realize(grid::converter_voltage_tf(g.converters[0]));
  const auto c2 = tf::realize(grid::converter_voltage_tf(g.converters[1]));
  const auto net = grid::network_state_space(g);
  const Eigen::Index n1 = c1.A.rows();
  const Eigen::Index n2 = c2.A.rows();
  const Eigen::Index nn = net.A.rows();
  const Eigen::Index n = n1 + n2 + nn;

  // Converter outputs as a map from (state, input).
  Eigen::MatrixXd cv = Eigen::MatrixXd::Zero(2, n);
  Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(2, 3);
  cv.block(0, 0, 1, n1) = c1.C;
  cv.block(1, n1, 1, n2) = c2.C;
  dv(0, 0) = c1.D;
  dv(1, 1) = c2.D;
  // Network input vector (V1, V2, P_L) = cv·x + (dv + load selector)·u.
  Eigen::MatrixXd cin = Eigen::MatrixXd::Zero(3, n);
  Eigen::MatrixXd din = Eigen::MatrixXd::Zero(3, 3);
  cin.topRows(2) = cv;
  din.topRows(2) = dv;
  din(2, 2) = 1.0;

  Plant p;
  p.a = Eigen::MatrixXd::Zero(n, n);
  p.b = Eigen::MatrixXd::Zero(n, 3);
  p.a.block(0, 0, n1, n1) = c1.A;
  p.a.block(n1, n1, n2, n2) = c2.A;
  p.b.block(0, 0, n1, 1) = c1.B;
  p.b.block(n1, 1, n2, 1) = c2.B;
  p.a.block(n1 + n2, 0, nn, n) += net.B * cin;
  p.a.block(n1 + n2, n1 + n2, nn, nn) += net.A;
  p.b.bottomRows(nn) = net.B * din;

  p.c = Eigen::MatrixXd::Zero(5, n);
  p.d = Eigen::MatrixXd::Zero(5, 3);
  p.c.topRows(3) = net.D * cin;
  p.c.block(0, n1 + n2, 3, nn) += net.C;
  p.d.topRows(3) = net.D * din;
  p.c.bottomRows(2) = cv;
  p.d.bottomRows(2) = dv;
  return p;
}

bool finite_and_bounded(const Eigen::VectorXd& x) {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (!std::isfinite(x(k)) || std::abs(x(k)) > kRunaway) {
      return false;
    }
  }
  return true;
}

void check_integrators(const std::vector<control::PiController>& pis, double t) {
  for (const auto& pi : pis) {
    if (!pi.integrator_within_limits()) {
      throw NumericalError(fmt::format("controller integrator left its clamp at t = {} s", t));
    }
  }
}

std::size_t step_ratio(double control_dt, double plant_dt) {
  const double r = control_dt / plant_dt;
  const double rounded = std::round(r);
  if (rounded < 1.0 || std::abs(r - rounded) > 1e-9 * r) {
    throw ValidationError("scenario.control_dt must be an integer multiple of scenario.plant_dt");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

DivergenceError::DivergenceError(double t, const std::string& what)
    : NumericalError(fmt::format("simulation diverged at t = {:.6f} s: {}", t, what)), time_(t) {}

LoadProfile LoadProfile::default_profile() { return {{{0.0, 2000.0}, {20.0, 6000.0}}}; }

void LoadProfile::validate() const {
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (!std::isfinite(events[k].time) || !(events[k].power >= 0.0) || !std::isfinite(events[k].power)) {
      throw ValidationError(fmt::format("scenario.load_powers[{}]: load must be finite and >= 0", k));
    }
    if (k > 0 && !(events[k].time > events[k - 1].time)) {
      throw ValidationError("scenario.load_times: times must be strictly increasing");
    }
  }
}

double LoadProfile::at(double t) const {
  double p = 0.0;
  for (const auto& e : events) {
    if (e.time <= t + 1e-9) {
      p = e.power;
    }
  }
  return p;
}

void Scenario::validate() const {
  grid.validate();
  load.validate();
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ValidationError("scenario.duration: must be positive");
  }
  if (!(plant_dt > 0.0) || !(control_dt > 0.0)) {
    throw ValidationError("scenario.plant_dt and scenario.control_dt must be positive");
  }
  if (plant_dt > control_dt) {
    throw ValidationError("scenario.plant_dt must not exceed scenario.control_dt");
  }
  step_ratio(control_dt, plant_dt);
  if (!load.events.empty() && !(duration > load.events.back().time)) {
    throw ValidationError("scenario.duration must extend past the last load event");
  }
  if (!(activation_time >= 0.0)) {
    throw ValidationError("scenario.activation_time: must be >= 0");
  }
  if (!(comm_period >= 0.0) || !(comm_delay >= 0.0)) {
    throw ValidationError("scheme.comm_period: must be >= 0");
  }
  if (const auto* c = std::get_if<control::CascadeScheme>(&scheme)) {
    c->validate();
  }
  if (const auto* c = std::get_if<control::ConventionalScheme>(&scheme)) {
    c->validate(grid.converters.size());
  }
}

Discretized discretize(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double dt) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = a * dt;
  aug.topRightCorner(n, m) = b * dt;
  const Eigen::MatrixXd e = aug.exp();
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

std::vector<double> step_response(const tf::TransferFunction& g, double t_end, double dt) {
  const auto ss = tf::realize(g);
  const auto n = static_cast<Eigen::Index>(ss.order());
  std::vector<double> y;
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  y.reserve(steps + 1);
  if (n == 0) {
    y.assign(steps + 1, ss.D);
    return y;
  }
  const auto dz = discretize(ss.A, ss.B, dt);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k <= steps; ++k) {
    y.push_back((ss.C * x)(0) + ss.D);
    x = dz.phi * x + dz.gamma.col(0);
    if (!finite_and_bounded(x)) {
      throw DivergenceError(static_cast<double>(k) * dt, "step response grew without bound");
    }
  }
  return y;
}

SimResult run(const Scenario& sc) {
  sc.validate();
  const auto& g = sc.grid;
  const double vgn = g.nominal_bus_voltage;
  const auto weights = g.weights();
  const Plant plant = assemble(g);
  const auto dz = discretize(plant.a, plant.b, sc.plant_dt);
  const std::size_t ratio = step_ratio(sc.control_dt, sc.plant_dt);
  const auto steps = static_cast<std::size_t>(std::llround(sc.duration / sc.plant_dt));

  std::optional<control::ConventionalController> conventional;
  std::optional<control::CascadeController> cascade;
  if (const auto* c = std::get_if<control::ConventionalScheme>(&sc.scheme)) {
    conventional.emplace(*c, g.converters.size());
  } else if (const auto* c = std::get_if<control::CascadeScheme>(&sc.scheme)) {
    cascade.emplace(*c);
  }
  control::CommLink link(sc.comm_period, sc.comm_delay);

  SimResult r;
  r.scheme = scheme_label(sc.scheme);
  for (auto* v : {&r.t, &r.p1, &r.p2, &r.vg, &r.v1, &r.v2, &r.i1, &r.i2, &r.iref1, &r.iref2, &r.vref1, &r.vref2,
                  &r.outer1, &r.outer2, &r.inner1, &r.inner2, &r.load}) {
    v->reserve(steps + 1);
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(plant.a.rows());
  Eigen::Vector3d u = Eigen::Vector3d::Zero();
  double outer[2] = {0.0, 0.0};
  double inner[2] = {0.0, 0.0};

  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * sc.plant_dt;
    u(2) = sc.load.at(t);
    const Eigen::VectorXd y = plant.c * x + plant.d * u;
    const double p[2] = {y(0), y(1)};
    const double vg = y(2);
    const double cur[2] = {p[0] / vgn, p[1] / vgn};

    if (k % ratio == 0) {
      const bool active = t + 1e-9 >= sc.activation_time;
      const std::vector<control::NeighborView> locals{{p[0], vg}, {p[1], vg}};
      const auto seen = link.exchange(t, locals);
      if (conventional) {
        const std::vector<control::ConventionalMeasurement> meas{{cur[0], vg}, {cur[1], vg}};
        control::ConventionalRefs refs;
        refs.v_star = {0.0, 0.0};
        refs.current_ref = {weights[0] * (cur[0] + seen[0].power / vgn), weights[1] * (cur[1] + seen[1].power / vgn)};
        refs.bus_voltage_ref = 0.0;
        const auto out = conventional->step(meas, refs, sc.control_dt, active);
        for (int i = 0; i < 2; ++i) {
          u(i) = out[i].voltage_ref;
          outer[i] = out[i].voltage_correction;
          inner[i] = out[i].current_correction;
        }
        check_integrators(conventional->voltage_pis(), t);
        check_integrators(conventional->current_pis(), t);
      } else if (cascade) {
        const std::vector<control::CascadeMeasurement> meas{{p[0], vg, seen[0].power}, {p[1], vg, seen[1].power}};
        const auto out = cascade->step(meas, sc.demand, sc.control_dt, active);
        for (int i = 0; i < 2; ++i) {
          u(i) = out[i].voltage_ref;
          outer[i] = out[i].outer;
          inner[i] = out[i].power_ref;
        }
        check_integrators(cascade->outer_pis(), t);
        check_integrators(cascade->inner_pis(), t);
      }
    } else if (conventional) {
      // Droop is primary control and acts continuously on the measured current.
      for (int i = 0; i < 2; ++i) {
        u(i) = -std::get<control::ConventionalScheme>(sc.scheme).droop_rd[static_cast<std::size_t>(i)] * cur[i] +
               outer[i] + inner[i];
      }
    }

    r.t.push_back(t);
    r.p1.push_back(p[0]);
    r.p2.push_back(p[1]);
    r.vg.push_back(vg);
    r.v1.push_back(y(3));
    r.v2.push_back(y(4));
    r.i1.push_back(cur[0]);
    r.i2.push_back(cur[1]);
    r.iref1.push_back(weights[0] * (cur[0] + cur[1]));
    r.iref2.push_back(weights[1] * (cur[0] + cur[1]));
    r.vref1.push_back(u(0));
    r.vref2.push_back(u(1));
    r.outer1.push_back(outer[0]);
    r.outer2.push_back(outer[1]);
    r.inner1.push_back(inner[0]);
    r.inner2.push_back(inner[1]);
    r.load.push_back(u(2));

    if (k == steps) {
      break;
    }
    x = dz.phi * x + dz.gamma * u;
    if (!finite_and_bounded(x)) {
      throw DivergenceError(t + sc.plant_dt, "plant state is non-finite or beyond 1e12");
    }
  }
  return r;
}

}  // namespace dcgrid::sim
