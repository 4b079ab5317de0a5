#include <algorithm>
#include <cmath>

#include "dcgrid/control_schemes.hpp"

namespace dcgrid::control {

namespace {

// Absorbs rounding in sample instants computed as k·dt.
double time_slack(double period) { return 1e-9 * std::max(period, 1e-3); }

}  // namespace

CommChannel::CommChannel(double period, double delay) : period_(period), delay_(delay) {
  if (!(period >= 0.0) || !(delay >= 0.0) || !std::isfinite(period) || !std::isfinite(delay)) {
    throw ValidationError("communication period and delay must be finite and >= 0");
  }
}

void CommChannel::publish(double t, double value) {
  if (t + time_slack(period_) < next_sample_) {
    return;
  }
  if (!samples_.empty() && t < samples_.back().first) {
    throw ValidationError("communication samples must be published in time order");
  }
  samples_.emplace_back(t, value);
  next_sample_ = period_ > 0.0 ? t + period_ : t;
  // Keep what a receiver with this delay can still ask for.
  while (samples_.size() > 2 && samples_[1].first + delay_ + time_slack(period_) <= t) {
    samples_.pop_front();
  }
}

double CommChannel::receive(double t) const {
  const double horizon = t - delay_ + time_slack(period_);
  for (auto it = samples_.rbegin(); it != samples_.rend(); ++it) {
    if (it->first <= horizon) {
      return it->second;
    }
  }
  return 0.0;
}

CommLink::CommLink(double period, double delay)
    : power_(2, CommChannel(period, delay)), voltage_(2, CommChannel(period, delay)) {}

void CommLink::publish(double t, std::size_t i, const NeighborView& local) {
  if (i > 1) {
    throw ValidationError("communication link index out of range");
  }
  power_[i].publish(t, local.power);
  voltage_[i].publish(t, local.bus_voltage);
}

NeighborView CommLink::receive(double t, std::size_t i) const {
  if (i > 1) {
    throw ValidationError("communication link index out of range");
  }
  const std::size_t j = 1 - i;
  return {power_[j].receive(t), voltage_[j].receive(t)};
}

std::vector<NeighborView> CommLink::exchange(double t, std::span<const NeighborView> locals) {
  if (locals.size() != 2) {
    throw ValidationError("communication link carries exactly two converters");
  }
  publish(t, 0, locals[0]);
  publish(t, 1, locals[1]);
  return {receive(t, 0), receive(t, 1)};
}

}  // namespace dcgrid::control
