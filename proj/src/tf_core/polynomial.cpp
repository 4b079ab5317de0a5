#include "dcgrid/tf_core.hpp"

#include <algorithm>
#include <cmath>

namespace dcgrid::tf {

namespace {

void trim(std::vector<double>& c) {
  while (c.size() > 1 && c.back() == 0.0) {
    c.pop_back();
  }
  if (c.empty()) {
    c.push_back(0.0);
  }
}

}  // namespace

Polynomial::Polynomial(std::vector<double> ascending) : coeffs_(std::move(ascending)) {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) {
      throw ValidationError("polynomial coefficient is not finite");
    }
  }
  trim(coeffs_);
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots, double lead) {
  std::vector<Complex> acc{Complex(lead, 0.0)};
  for (const Complex& r : roots) {
    std::vector<Complex> next(acc.size() + 1, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < acc.size(); ++k) {
      next[k + 1] += acc[k];
      next[k] -= r * acc[k];
    }
    acc = std::move(next);
  }
  std::vector<double> real(acc.size());
  std::transform(acc.begin(), acc.end(), real.begin(), [](Complex c) { return c.real(); });
  return Polynomial(std::move(real));
}

double Polynomial::norm() const {
  double sum = 0.0;
  for (double c : coeffs_) {
    sum += c * c;
  }
  return std::sqrt(sum);
}

Complex Polynomial::eval(Complex s) const {
  Complex acc(0.0, 0.0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * s + *it;
  }
  return acc;
}

double Polynomial::eval(double s) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * s + *it;
  }
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() == 1) {
    return Polynomial::constant(0.0);
  }
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) {
    d[k - 1] = static_cast<double>(k) * coeffs_[k];
  }
  return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = a[k] + b[k];
  }
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  return a + (-1.0) * b;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  return poly_mul(a, b);
}

Polynomial operator*(double k, const Polynomial& p) {
  std::vector<double> c(p.coeffs_);
  for (double& x : c) {
    x *= k;
  }
  return Polynomial(std::move(c));
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  std::vector<double> c(ca.size() + cb.size() - 1, 0.0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    for (std::size_t j = 0; j < cb.size(); ++j) {
      c[i + j] += ca[i] * cb[j];
    }
  }
  return Polynomial(std::move(c));
}

PolyDivision poly_divmod(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) {
    throw ValidationError("polynomial division by zero");
  }
  if (a.degree() < b.degree() || a.is_zero()) {
    return {Polynomial::constant(0.0), a};
  }
  std::vector<double> rem(a.coeffs().begin(), a.coeffs().end());
  const std::size_t db = b.degree();
  std::vector<double> quot(a.degree() - db + 1, 0.0);
  for (std::size_t k = quot.size(); k-- > 0;) {
    const double q = rem[k + db] / b.leading();
    quot[k] = q;
    for (std::size_t j = 0; j <= db; ++j) {
      rem[k + j] -= q * b[j];
    }
    rem[k + db] = 0.0;
  }
  rem.resize(db == 0 ? 1 : db);
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

}  // namespace dcgrid::tf
