#include "dcgrid/tf_core.hpp"

namespace dcgrid::tf {

Complex StateSpace::eval(Complex s) const {
  const Eigen::Index n = A.rows();
  if (n == 0) {
    return D;
  }
  const Eigen::MatrixXcd m = s * Eigen::MatrixXcd::Identity(n, n) - A.cast<Complex>();
  const Eigen::VectorXcd x = m.partialPivLu().solve(B.cast<Complex>());
  return (C.cast<Complex>() * x)(0) + D;
}

Complex MimoStateSpace::eval(Complex s, Eigen::Index output, Eigen::Index input) const {
  if (output < 0 || output >= outputs() || input < 0 || input >= inputs()) {
    throw ValidationError("state-space channel index out of range");
  }
  const Eigen::Index n = A.rows();
  Complex direct = D(output, input);
  if (n == 0) {
    return direct;
  }
  const Eigen::MatrixXcd m = s * Eigen::MatrixXcd::Identity(n, n) - A.cast<Complex>();
  const Eigen::VectorXcd x = m.partialPivLu().solve(B.col(input).cast<Complex>());
  return (C.row(output).cast<Complex>() * x)(0) + direct;
}

StateSpace realize(const TransferFunction& g) {
  if (!g.is_proper()) {
    throw ValidationError("cannot realize an improper transfer function");
  }
  const Polynomial& den = g.den();
  const std::size_t n = den.degree();
  const double lead = den.leading();
  StateSpace ss;
  ss.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  ss.B = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  ss.C = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(n));
  const double d = g.num()[n] / lead;
  ss.D = d;
  if (n == 0) {
    return ss;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    ss.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = 1.0;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    ss.A(static_cast<Eigen::Index>(n - 1), col) = -den[k] / lead;
    ss.C(col) = g.num()[k] / lead - d * den[k] / lead;
  }
  ss.B(static_cast<Eigen::Index>(n - 1)) = 1.0;
  return ss;
}

}  // namespace dcgrid::tf
