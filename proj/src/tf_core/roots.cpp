#include "dcgrid/tf_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dcgrid::tf {

namespace {

using CVec = std::vector<Complex>;

constexpr int kLaguerreIterations = 80;
constexpr int kCycleBreakPeriod = 10;
constexpr int kPolishIterations = 8;

// Laguerre's method on a complex polynomial (ascending coefficients).
Complex laguerre(const CVec& a, Complex x) {
  static constexpr double kFractions[] = {0.5, 0.25, 0.75, 0.13, 0.38, 0.62, 0.88, 1.0};
  const double n = static_cast<double>(a.size() - 1);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 1; iter <= kLaguerreIterations; ++iter) {
    Complex b = a.back();
    Complex d(0.0, 0.0);
    Complex f(0.0, 0.0);
    double err = std::abs(b);
    const double abx = std::abs(x);
    for (std::size_t j = a.size() - 1; j-- > 0;) {
      f = x * f + d;
      d = x * d + b;
      b = x * b + a[j];
      err = std::abs(b) + abx * err;
    }
    err *= eps;
    if (std::abs(b) <= err) {
      return x;
    }
    const Complex g = d / b;
    const Complex g2 = g * g;
    const Complex h = g2 - 2.0 * f / b;
    const Complex sq = std::sqrt((n - 1.0) * (n * h - g2));
    Complex gp = g + sq;
    const Complex gm = g - sq;
    if (std::abs(gp) < std::abs(gm)) {
      gp = gm;
    }
    const Complex dx = std::abs(gp) > 0.0 ? n / gp : std::polar(1.0 + abx, static_cast<double>(iter));
    const Complex x1 = x - dx;
    if (x == x1) {
      return x;
    }
    if (iter % kCycleBreakPeriod != 0) {
      x = x1;
    } else {
      x -= kFractions[(iter / kCycleBreakPeriod) % 8] * dx;
    }
  }
  return x;
}

Complex polish(const Polynomial& p, const Polynomial& dp, Complex x) {
  Complex best = x;
  double best_res = std::abs(p.eval(x));
  for (int k = 0; k < kPolishIterations && best_res > 0.0; ++k) {
    const Complex slope = dp.eval(best);
    if (std::abs(slope) == 0.0) {
      break;
    }
    const Complex next = best - p.eval(best) / slope;
    const double res = std::abs(p.eval(next));
    if (!(res < best_res)) {
      break;
    }
    best = next;
    best_res = res;
  }
  return best;
}

bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) {
    return a.real() < b.real();
  }
  return a.imag() < b.imag();
}

// Snap near-real roots onto the axis and force exact conjugate pairs.
void symmetrize(const Polynomial& p, std::vector<Complex>& r) {
  for (Complex& z : r) {
    const double scale = std::max(1.0, std::abs(z));
    if (std::abs(z.imag()) <= 1e-10 * scale) {
      const Complex snapped(z.real(), 0.0);
      if (std::abs(p.eval(snapped)) <= std::max(std::abs(p.eval(z)), 1e-300) * 10.0) {
        z = snapped;
      }
    }
  }
  std::vector<bool> used(r.size(), false);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (used[i] || r[i].imag() <= 0.0) {
      continue;
    }
    std::size_t best = r.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j == i || used[j] || r[j].imag() >= 0.0) {
        continue;
      }
      const double dist = std::abs(r[j] - std::conj(r[i]));
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best < r.size()) {
      const Complex mean = 0.5 * (r[i] + std::conj(r[best]));
      r[i] = mean;
      r[best] = std::conj(mean);
      used[i] = used[best] = true;
    }
  }
  std::sort(r.begin(), r.end(), lex_less);
}

}  // namespace

std::vector<Complex> roots(const Polynomial& p) {
  if (p.degree() == 0) {
    return {};
  }
  const auto c = p.coeffs();
  std::vector<Complex> out;
  // Exact roots at the origin.
  std::size_t zeros_at_origin = 0;
  while (zeros_at_origin < c.size() - 1 && c[zeros_at_origin] == 0.0) {
    ++zeros_at_origin;
  }
  out.assign(zeros_at_origin, Complex(0.0, 0.0));
  std::vector<double> reduced_c(c.begin() + static_cast<std::ptrdiff_t>(zeros_at_origin), c.end());
  const Polynomial reduced(reduced_c);
  if (reduced.degree() == 0) {
    std::sort(out.begin(), out.end(), lex_less);
    return out;
  }
  if (reduced.degree() == 1) {
    out.emplace_back(-reduced[0] / reduced[1], 0.0);
    std::sort(out.begin(), out.end(), lex_less);
    return out;
  }

  CVec work(reduced.coeffs().begin(), reduced.coeffs().end());
  std::vector<Complex> found;
  found.reserve(reduced.degree());
  for (std::size_t deg = reduced.degree(); deg >= 1; --deg) {
    Complex x = laguerre(work, Complex(0.0, 0.0));
    if (std::abs(x.imag()) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x.real())) {
      x = Complex(x.real(), 0.0);
    }
    found.push_back(x);
    // Synthetic division by (s - x).
    Complex carry = work.back();
    CVec next(deg);
    for (std::size_t j = deg; j-- > 0;) {
      next[j] = carry;
      carry = work[j] + carry * x;
    }
    work = std::move(next);
  }

  const Polynomial dp = reduced.derivative();
  for (Complex& z : found) {
    z = polish(reduced, dp, z);
  }
  symmetrize(reduced, found);
  out.insert(out.end(), found.begin(), found.end());
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

}  // namespace dcgrid::tf
