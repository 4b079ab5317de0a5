#pragma once

// Rational transfer-function algebra for continuous-time SISO blocks.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dcgrid {

/// Raised when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation cannot produce a finite, meaningful result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dcgrid

namespace dcgrid::tf {

using Complex = std::complex<double>;

/// Real polynomial in s with coefficients stored in ascending powers.
/// Trailing (highest-power) zeros are trimmed; the zero polynomial is {0}.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> ascending);
  Polynomial(std::initializer_list<double> ascending)
      : Polynomial(std::vector<double>(ascending)) {}

  static Polynomial constant(double c) { return Polynomial({c}); }
  /// Monic-scaled product `lead * prod(s - r)` over the given roots.
  /// Roots must come in conjugate pairs; imaginary residue is discarded.
  static Polynomial from_roots(std::span<const Complex> roots, double lead = 1.0);

  std::size_t degree() const { return coeffs_.size() - 1; }
  std::span<const double> coeffs() const { return coeffs_; }
  double operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }
  double leading() const { return coeffs_.back(); }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  double norm() const;

  Complex eval(Complex s) const;
  double eval(double s) const;
  Polynomial derivative() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double k, const Polynomial& p);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<double> coeffs_;
};

Polynomial poly_mul(const Polynomial& a, const Polynomial& b);

struct PolyDivision {
  Polynomial quotient;
  Polynomial remainder;
};

/// Long division a = q*b + r with deg r < deg b.
PolyDivision poly_divmod(const Polynomial& a, const Polynomial& b);

/// All complex roots of p (conjugate-symmetric for real p), Newton-polished.
/// Constant polynomials have no roots.
std::vector<Complex> roots(const Polynomial& p);

class TransferFunction {
 public:
  TransferFunction() : num_(Polynomial::constant(0.0)), den_(Polynomial::constant(1.0)) {}
  TransferFunction(Polynomial num, Polynomial den);
  /// Constant gain k.
  static TransferFunction gain(double k) { return {Polynomial::constant(k), Polynomial::constant(1.0)}; }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }

  Complex eval(Complex s) const { return num_.eval(s) / den_.eval(s); }
  Complex at_frequency(double omega) const { return eval(Complex(0.0, omega)); }
  /// num(0)/den(0); infinite for a pole at the origin.
  double dc_gain() const;

  bool is_proper() const { return num_.is_zero() || num_.degree() <= den_.degree(); }
  bool is_zero() const { return num_.is_zero(); }

 private:
  Polynomial num_;
  Polynomial den_;
};

/// Removes pole/zero pairs whose roots agree within 1e-9 relative.
TransferFunction cancel_common_factors(const TransferFunction& g);

TransferFunction tf_series(const TransferFunction& g1, const TransferFunction& g2);
TransferFunction tf_parallel(const TransferFunction& g1, const TransferFunction& g2);
TransferFunction tf_scale(const TransferFunction& g, double k);
/// forward / (1 + forward*feedback). Throws NumericalError for an algebraic
/// loop whose closed-loop denominator vanishes identically.
TransferFunction tf_feedback(const TransferFunction& forward, const TransferFunction& feedback);

inline TransferFunction operator*(const TransferFunction& a, const TransferFunction& b) {
  return tf_series(a, b);
}
inline TransferFunction operator+(const TransferFunction& a, const TransferFunction& b) {
  return tf_parallel(a, b);
}

struct FrequencyPoint {
  double omega = 0.0;         // rad/s
  double magnitude_db = 0.0;  // dB
  double phase_deg = 0.0;     // unwrapped, degrees
  bool flagged = false;       // evaluated on an imaginary-axis pole
};

/// `count` log-spaced frequencies over [lo, hi].
std::vector<double> log_space(double lo, double hi, std::size_t count);

/// Bode samples. Phase is anchored at omegas.front() by summing the
/// per-root factor phases, then unwrapped cumulatively.
std::vector<FrequencyPoint> freq_response(const TransferFunction& g, std::span<const double> omegas);

struct CrossoverSearch {
  double omega_min = 1e-2;
  double omega_max = 1e5;
  std::size_t grid_points = 400;
};

class NoCrossoverError : public NumericalError {
 public:
  NoCrossoverError(double lo, double hi);
  double omega_min() const { return lo_; }
  double omega_max() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Lowest frequency where |g(jw)| = 1, to within 1e-6 dB.
double gain_crossover(const TransferFunction& g, const CrossoverSearch& search = {});
/// 180 + unwrapped phase of g at its gain crossover, in degrees.
double phase_margin(const TransferFunction& g, const CrossoverSearch& search = {});
/// Unwrapped phase (degrees) at omega, continued from the low end of the search grid.
double unwrapped_phase_at(const TransferFunction& g, double omega, const CrossoverSearch& search = {});
/// Lowest frequency where the gain falls 3 dB below |g(0)|. Requires finite nonzero DC gain.
double bandwidth(const TransferFunction& g, const CrossoverSearch& search = {});

std::vector<Complex> poles(const TransferFunction& g);
std::vector<Complex> zeros(const TransferFunction& g);

/// SISO state-space realization x' = Ax + Bu, y = Cx + Du.
struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;

  std::size_t order() const { return static_cast<std::size_t>(A.rows()); }
  Complex eval(Complex s) const;
};

/// Controllable-canonical realization. Throws ValidationError for improper g.
StateSpace realize(const TransferFunction& g);

/// Multi-input multi-output realization used for time simulation.
struct MimoStateSpace {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }
  /// Transfer matrix entry (output, input) at s.
  Complex eval(Complex s, Eigen::Index output, Eigen::Index input) const;
};

}  // namespace dcgrid::tf
