#include "dcgrid/tf_core.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace dcgrid::tf {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kCrossoverTolDb = 1e-6;

double sign_phase(double lead) { return lead < 0.0 ? 180.0 : 0.0; }

// Phase as a sum of per-factor phases; continuous in omega away from roots on the axis.
double factor_phase(const TransferFunction& g, double omega) {
  const Complex jw(0.0, omega);
  double phase = sign_phase(g.num().leading()) - sign_phase(g.den().leading());
  for (const Complex& z : zeros(g)) {
    phase += std::arg(jw - z) * kRadToDeg;
  }
  for (const Complex& p : poles(g)) {
    phase -= std::arg(jw - p) * kRadToDeg;
  }
  return phase;
}

bool on_pole(const TransferFunction& g, double omega) {
  const Complex jw(0.0, omega);
  const Complex d = g.den().eval(jw);
  double scale = 0.0;
  double wk = 1.0;
  for (double c : g.den().coeffs()) {
    scale += std::abs(c) * wk;
    wk *= omega;
  }
  return std::abs(d) <= 1e-14 * scale;
}

double magnitude_db(const TransferFunction& g, double omega) {
  return 20.0 * std::log10(std::abs(g.at_frequency(omega)));
}

// First omega in the search band where level(omega) changes sign, refined by bisection.
double first_level_crossing(const std::function<double(double)>& level, const CrossoverSearch& search) {
  if (!(search.omega_min > 0.0) || !(search.omega_max > search.omega_min) || search.grid_points < 2) {
    throw ValidationError("crossover search band must satisfy 0 < omega_min < omega_max with >= 2 points");
  }
  const auto grid = log_space(search.omega_min, search.omega_max, search.grid_points);
  double prev_w = grid.front();
  double prev_v = level(prev_w);
  if (prev_v == 0.0) {
    return prev_w;
  }
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double w = grid[k];
    const double v = level(w);
    if (!std::isfinite(v)) {
      continue;
    }
    if (v == 0.0) {
      return w;
    }
    if (std::isfinite(prev_v) && std::signbit(v) != std::signbit(prev_v)) {
      double lo = prev_w;
      double hi = w;
      double lo_v = prev_v;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = std::sqrt(lo * hi);
        const double mv = level(mid);
        if (std::abs(mv) < kCrossoverTolDb * 1e-3 || hi / lo - 1.0 < 1e-15) {
          return mid;
        }
        if (std::signbit(mv) == std::signbit(lo_v)) {
          lo = mid;
          lo_v = mv;
        } else {
          hi = mid;
        }
      }
      const double mid = std::sqrt(lo * hi);
      if (std::abs(level(mid)) > kCrossoverTolDb) {
        throw NumericalError("crossover bisection did not converge");
      }
      return mid;
    }
    prev_w = w;
    prev_v = v;
  }
  throw NoCrossoverError(search.omega_min, search.omega_max);
}

}  // namespace

NoCrossoverError::NoCrossoverError(double lo, double hi)
    : NumericalError(fmt::format("no gain crossover in [{}, {}] rad/s", lo, hi)), lo_(lo), hi_(hi) {}

std::vector<double> log_space(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) {
    throw ValidationError("log_space needs 0 < lo <= hi and count > 0");
  }
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<FrequencyPoint> freq_response(const TransferFunction& g, std::span<const double> omegas) {
  std::vector<FrequencyPoint> out;
  out.reserve(omegas.size());
  bool anchored = false;
  double prev_phase = 0.0;
  for (double w : omegas) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("frequencies must be finite and non-negative");
    }
    FrequencyPoint pt;
    pt.omega = w;
    if (on_pole(g, w)) {
      pt.flagged = true;
      pt.magnitude_db = std::numeric_limits<double>::infinity();
      pt.phase_deg = std::numeric_limits<double>::quiet_NaN();
      out.push_back(pt);
      continue;
    }
    const Complex val = g.at_frequency(w);
    pt.magnitude_db = 20.0 * std::log10(std::abs(val));
    if (g.is_zero()) {
      pt.phase_deg = 0.0;
    } else if (!anchored) {
      pt.phase_deg = factor_phase(g, w);
      anchored = true;
    } else {
      const double raw = std::arg(val) * kRadToDeg;
      pt.phase_deg = raw + 360.0 * std::round((prev_phase - raw) / 360.0);
    }
    prev_phase = pt.phase_deg;
    out.push_back(pt);
  }
  return out;
}

double gain_crossover(const TransferFunction& g, const CrossoverSearch& search) {
  if (g.is_zero()) {
    throw NoCrossoverError(search.omega_min, search.omega_max);
  }
  return first_level_crossing([&](double w) { return magnitude_db(g, w); }, search);
}

double unwrapped_phase_at(const TransferFunction& g, double omega, const CrossoverSearch& search) {
  std::vector<double> path;
  if (omega > search.omega_min && search.grid_points >= 2) {
    for (double w : log_space(search.omega_min, search.omega_max, search.grid_points)) {
      if (w >= omega) {
        break;
      }
      path.push_back(w);
    }
  }
  path.push_back(omega);
  const auto resp = freq_response(g, path);
  return resp.back().phase_deg;
}

double phase_margin(const TransferFunction& g, const CrossoverSearch& search) {
  const double wc = gain_crossover(g, search);
  return 180.0 + unwrapped_phase_at(g, wc, search);
}

double bandwidth(const TransferFunction& g, const CrossoverSearch& search) {
  const double dc = g.dc_gain();
  if (!std::isfinite(dc) || dc == 0.0) {
    throw ValidationError("bandwidth needs a finite, nonzero DC gain");
  }
  const double ref_db = 20.0 * std::log10(std::abs(dc)) - 20.0 * std::log10(std::sqrt(2.0));
  return first_level_crossing([&](double w) { return magnitude_db(g, w) - ref_db; }, search);
}

}  // namespace dcgrid::tf
