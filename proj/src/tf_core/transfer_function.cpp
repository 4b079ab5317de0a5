#include "dcgrid/tf_core.hpp"

#include <cmath>
#include <limits>

namespace dcgrid::tf {

TransferFunction::TransferFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) {
    throw ValidationError("transfer function denominator is the zero polynomial");
  }
}

double TransferFunction::dc_gain() const {
  const double d0 = den_[0];
  const double n0 = num_[0];
  if (d0 == 0.0) {
    if (n0 == 0.0) {
      return cancel_common_factors(*this).dc_gain();
    }
    return std::copysign(std::numeric_limits<double>::infinity(), n0);
  }
  return n0 / d0;
}

namespace {

bool roots_match(Complex a, Complex b) {
  if (a == b) {
    return true;
  }
  return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

TransferFunction cancel_common_factors(const TransferFunction& g) {
  if (g.num().is_zero()) {
    return {Polynomial::constant(0.0), Polynomial::constant(1.0)};
  }
  if (g.num().degree() == 0 || g.den().degree() == 0) {
    return g;
  }
  std::vector<Complex> z = roots(g.num());
  std::vector<Complex> p = roots(g.den());
  std::vector<bool> p_used(p.size(), false);
  std::vector<Complex> z_left;
  bool cancelled = false;
  for (const Complex& zi : z) {
    bool matched = false;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (!p_used[j] && roots_match(zi, p[j])) {
        p_used[j] = true;
        matched = true;
        cancelled = true;
        break;
      }
    }
    if (!matched) {
      z_left.push_back(zi);
    }
  }
  if (!cancelled) {
    return g;
  }
  std::vector<Complex> p_left;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!p_used[j]) {
      p_left.push_back(p[j]);
    }
  }
  return {Polynomial::from_roots(z_left, g.num().leading()),
          Polynomial::from_roots(p_left, g.den().leading())};
}

TransferFunction tf_series(const TransferFunction& g1, const TransferFunction& g2) {
  return cancel_common_factors({g1.num() * g2.num(), g1.den() * g2.den()});
}

TransferFunction tf_parallel(const TransferFunction& g1, const TransferFunction& g2) {
  if (g1.den() == g2.den()) {
    return cancel_common_factors({g1.num() + g2.num(), g1.den()});
  }
  return cancel_common_factors(
      {g1.num() * g2.den() + g2.num() * g1.den(), g1.den() * g2.den()});
}

TransferFunction tf_scale(const TransferFunction& g, double k) {
  if (!std::isfinite(k)) {
    throw ValidationError("scale factor is not finite");
  }
  return {k * g.num(), g.den()};
}

TransferFunction tf_feedback(const TransferFunction& forward, const TransferFunction& feedback) {
  const Polynomial den = forward.den() * feedback.den() + forward.num() * feedback.num();
  if (den.is_zero() || den.norm() <= 1e-14 * (forward.den() * feedback.den()).norm()) {
    throw NumericalError("feedback loop is degenerate: 1 + G*H vanishes identically");
  }
  return cancel_common_factors({forward.num() * feedback.den(), den});
}

std::vector<Complex> poles(const TransferFunction& g) { return roots(g.den()); }

std::vector<Complex> zeros(const TransferFunction& g) {
  if (g.num().is_zero()) {
    return {};
  }
  return roots(g.num());
}

}  // namespace dcgrid::tf
