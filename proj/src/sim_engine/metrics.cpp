#include <algorithm>
#include <cmath>

#include "dcgrid/sim_engine.hpp"

namespace dcgrid::sim {

namespace {

constexpr double kTimeSlack = 1e-9;

double lerp_at(std::span<const double> t, std::span<const double> y, double at) {
  const auto it = std::lower_bound(t.begin(), t.end(), at);
  const auto k = static_cast<std::size_t>(it - t.begin());
  if (k < t.size() && std::abs(t[k] - at) <= kTimeSlack) {
    return y[k];
  }
  if (k == 0 || k >= t.size()) {
    throw ValidationError("interpolation point outside the series");
  }
  const double a = (at - t[k - 1]) / (t[k] - t[k - 1]);
  return y[k - 1] + a * (y[k] - y[k - 1]);
}

void check_window(std::span<const double> t, double start, double end) {
  if (t.empty() || start < t.front() - kTimeSlack || end > t.back() + kTimeSlack || !(end > start)) {
    throw ValidationError("metric window lies outside the simulated series");
  }
}

}  // namespace

double itae(std::span<const double> t, std::span<const double> abs_error, double start, double window) {
  if (t.size() != abs_error.size()) {
    throw ValidationError("time and error series differ in length");
  }
  const double end = start + window;
  check_window(t, start, end);
  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(start, lerp_at(t, abs_error, start));
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] > start + kTimeSlack && t[k] < end - kTimeSlack) {
      pts.emplace_back(t[k], abs_error[k]);
    }
  }
  pts.emplace_back(end, lerp_at(t, abs_error, end));
  double acc = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double f0 = (pts[k - 1].first - start) * pts[k - 1].second;
    const double f1 = (pts[k].first - start) * pts[k].second;
    acc += 0.5 * (f0 + f1) * (pts[k].first - pts[k - 1].first);
  }
  return acc;
}

double itae_voltage(const SimResult& r, double start, double window) {
  std::vector<double> e(r.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    e[k] = std::abs(0.0 - r.vg[k]);
  }
  return itae(r.t, e, start, window);
}

double itae_current(const SimResult& r, double start, double window) {
  std::vector<double> e(r.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    e[k] = std::abs(r.iref1[k] - r.i1[k]) + std::abs(r.iref2[k] - r.i2[k]);
  }
  return itae(r.t, e, start, window);
}

ItaeReport itae_report(const SimResult& r, double start, double window) {
  return {itae_voltage(r, start, window), itae_current(r, start, window), start, window};
}

SettlingResult settling_time(std::span<const double> t, std::span<const double> series, double target,
                             double band_percent, double start, double end) {
  if (series.empty() || t.size() != series.size()) {
    throw ValidationError("settling_time needs a nonempty series matching its time grid");
  }
  if (!(band_percent > 0.0)) {
    throw ValidationError("settling band must be positive");
  }
  check_window(t, start, end);
  std::size_t first = t.size();
  std::size_t last = 0;
  double peak = 0.0;
  // Half-open [start, end) so a window ending at the next event excludes its step,
  // unless the window runs to the end of the series.
  const bool closed = end >= t.back() - kTimeSlack;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < start - kTimeSlack || t[k] > end + kTimeSlack || (!closed && t[k] > end - kTimeSlack)) {
      continue;
    }
    first = std::min(first, k);
    last = k;
    peak = std::max(peak, std::abs(series[k] - target));
  }
  if (first == t.size() || peak == 0.0) {
    return {true, 0.0};
  }
  const double band = band_percent / 100.0 * peak;
  std::size_t exit = t.size();
  for (std::size_t k = last + 1; k-- > first;) {
    if (std::abs(series[k] - target) > band) {
      exit = k;
      break;
    }
  }
  if (exit == t.size()) {
    return {true, 0.0};
  }
  if (exit == last) {
    return {false, 0.0};
  }
  // Interpolate where the excursion falls back to the band edge.
  const double d0 = std::abs(series[exit] - target);
  const double d1 = std::abs(series[exit + 1] - target);
  const double a = (d0 - band) / (d0 - d1);
  const double crossing = t[exit] + a * (t[exit + 1] - t[exit]);
  return {true, crossing - start};
}

}  // namespace dcgrid::sim
