#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "dcgrid/tf_core.hpp"

using namespace dcgrid;
using namespace dcgrid::tf;

namespace {

// Independent root oracle: eigenvalues of the companion matrix.
std::vector<Complex> companion_roots(const Polynomial& p) {
  const auto n = static_cast<Eigen::Index>(p.degree());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    c(i, i - 1) = 1.0;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, n - 1) = -p[static_cast<std::size_t>(i)] / p.leading();
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return out;
}

// Max over a of distance to its nearest unused partner in b.
double match_error(std::vector<Complex> a, std::vector<Complex> b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (const Complex& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](Complex u, Complex v) {
      return std::abs(u - x) < std::abs(v - x);
    });
    worst = std::max(worst, std::abs(*it - x) / std::max(1.0, std::abs(x)));
    b.erase(it);
  }
  return worst;
}

TransferFunction first_order(double tau) { return {Polynomial{1.0}, Polynomial{1.0, tau}}; }

TransferFunction plant_gop1() {
  return tf_series(first_order(0.005), TransferFunction(Polynomial{400.0}, Polynomial{0.5, 0.003}));
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TransferFunction random_proper(std::mt19937_64& rng, int max_order) {
  // Well-separated stable poles and minimum-phase zeros keep the step
  // response transient small relative to its final value.
  std::uniform_int_distribution<int> order(1, max_order);
  std::uniform_real_distribution<double> base(0.5, 2.0);
  std::uniform_real_distribution<double> jitter(0.8, 1.2);
  std::uniform_real_distribution<double> gain(0.5, 20.0);
  const int n = order(rng);
  std::vector<Complex> p;
  std::vector<Complex> z;
  double w = base(rng);
  for (int k = 0; k < n; ++k) {
    p.emplace_back(-w, 0.0);
    if (k + 1 < n) {
      z.emplace_back(-w * 2.0 * jitter(rng), 0.0);
    }
    w *= 4.0 * jitter(rng);
  }
  return {Polynomial::from_roots(z, gain(rng)), Polynomial::from_roots(p)};
}

}  // namespace

TEST_CASE("poly_mul convolves coefficients") {
  CHECK(poly_mul(Polynomial{1.0}, Polynomial{0.5, 0.003}) == Polynomial{0.5, 0.003});
  CHECK(poly_mul(Polynomial{1.0, 1.0}, Polynomial{1.0, -1.0}) == Polynomial{1.0, 0.0, -1.0});
  const Polynomial sq = poly_mul(Polynomial{0.5, 0.003}, Polynomial{0.5, 0.003});
  REQUIRE(sq.degree() == 2);
  CHECK(sq[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sq[1] == doctest::Approx(0.003).epsilon(1e-15));
  CHECK(sq[2] == doctest::Approx(9e-6).epsilon(1e-15));
}

TEST_CASE("polynomial trims and divides") {
  CHECK(Polynomial{1.0, 2.0, 0.0, 0.0}.degree() == 1);
  CHECK(Polynomial{0.0, 0.0}.is_zero());
  const auto d = poly_divmod(Polynomial{-1.0, 0.0, 1.0}, Polynomial{-1.0, 1.0});
  CHECK(d.quotient == Polynomial{1.0, 1.0});
  CHECK(d.remainder.is_zero());
  CHECK_THROWS_AS(TransferFunction(Polynomial{1.0}, Polynomial{0.0}), ValidationError);
}

TEST_CASE("series products") {
  const auto g = plant_gop1();
  const auto unit = tf_series(g, TransferFunction::gain(1.0));
  CHECK(rel(unit.at_frequency(37.0), g.at_frequency(37.0)) < 1e-14);
  CHECK(g.den().degree() == 2);
  CHECK(g.num()[0] == doctest::Approx(400.0));
  CHECK(g.den()[0] == doctest::Approx(0.5));
  CHECK(g.den()[1] == doctest::Approx(0.003 + 0.5 * 0.005));
  CHECK(g.den()[2] == doctest::Approx(0.005 * 0.003));

  const TransferFunction a(Polynomial{3.0, 1.0}, Polynomial{2.0, 1.0, 1.0});
  const TransferFunction b(Polynomial{1.0}, Polynomial{5.0, 0.2});
  const Complex jw(0.0, 10.0);
  const Complex lhs = tf_series(a, b).eval(jw);
  const Complex ga = (3.0 + jw) / (2.0 + jw + jw * jw);
  const Complex gb = 1.0 / (5.0 + 0.2 * jw);
  CHECK(std::abs(lhs) == doctest::Approx(std::abs(ga) * std::abs(gb)).epsilon(1e-12));
}

TEST_CASE("common factors cancel only when exact") {
  const TransferFunction g(Polynomial{0.5, 0.003}, Polynomial{1.0, 0.006});
  const auto h = tf_series(g, TransferFunction(Polynomial{1.0}, Polynomial{0.5, 0.003}));
  CHECK(h.den().degree() == 1);
  const TransferFunction near(Polynomial{1.0 + 1e-6, 1.0}, Polynomial{1.0, 1.0});
  CHECK(cancel_common_factors(near).den().degree() == 1);
  CHECK(cancel_common_factors(near).num().degree() == 1);
}

TEST_CASE("feedback closure") {
  const auto g = plant_gop1();
  const auto open = tf_feedback(g, TransferFunction::gain(0.0));
  CHECK(rel(open.at_frequency(5.0), g.at_frequency(5.0)) < 1e-14);
  const auto half = tf_feedback(TransferFunction::gain(1.0), TransferFunction::gain(1.0));
  CHECK(half.dc_gain() == doctest::Approx(0.5));
  CHECK(half.den().degree() == 0);
  const double k = 7.5;
  const auto cl = tf_feedback(TransferFunction(Polynomial{k}, Polynomial{0.0, 1.0}), TransferFunction::gain(1.0));
  const auto p = poles(cl);
  REQUIRE(p.size() == 1);
  CHECK(p[0].real() == doctest::Approx(-k));
  CHECK(rel(cl.at_frequency(3.0), Complex(k) / (Complex(0.0, 3.0) + k)) < 1e-14);
  CHECK_THROWS_AS(tf_feedback(TransferFunction::gain(1.0), TransferFunction::gain(-1.0)), NumericalError);
}

TEST_CASE("frequency response magnitude and phase") {
  const std::vector<double> w{0.1, 1.0, 1000.0};
  for (const auto& pt : freq_response(TransferFunction::gain(1.0), w)) {
    CHECK(pt.magnitude_db == doctest::Approx(0.0));
    CHECK(pt.phase_deg == doctest::Approx(0.0));
  }
  const TransferFunction integ(Polynomial{1.0}, Polynomial{0.0, 1.0});
  const std::vector<double> one{1.0};
  const auto pt = freq_response(integ, one).front();
  CHECK(pt.magnitude_db == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pt.phase_deg == doctest::Approx(-90.0));
  const std::vector<double> zero{0.0};
  CHECK(freq_response(integ, zero).front().flagged);

  // Fourth-order lag keeps unwrapping below -180.
  const auto lag = tf_series(tf_series(first_order(1.0), first_order(1.0)), tf_series(first_order(1.0), first_order(1.0)));
  const auto grid = log_space(1e-2, 1e3, 200);
  const auto resp = freq_response(lag, grid);
  CHECK(resp.back().phase_deg == doctest::Approx(-360.0).epsilon(1e-3));
  for (std::size_t k = 1; k < resp.size(); ++k) {
    CHECK(std::abs(resp[k].phase_deg - resp[k - 1].phase_deg) < 180.0);
  }
}

TEST_CASE("gain crossover") {
  const TransferFunction g(Polynomial{10.0}, Polynomial{0.0, 1.0});
  CHECK(gain_crossover(g) == doctest::Approx(10.0).epsilon(1e-8));
  CHECK(phase_margin(g) == doctest::Approx(90.0).epsilon(1e-9));
  const TransferFunction dbl(Polynomial{100.0}, Polynomial{0.0, 0.0, 1.0});
  CHECK(phase_margin(dbl) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(phase_margin(dbl)) < 1e-9);
  CHECK_THROWS_AS(gain_crossover(first_order(1.0)), NoCrossoverError);
  try {
    gain_crossover(first_order(1.0));
  } catch (const NoCrossoverError& e) {
    CHECK(e.omega_min() == 1e-2);
    CHECK(e.omega_max() == 1e5);
  }
  const auto gop = plant_gop1();
  const double wc = gain_crossover(gop);
  CHECK(std::abs(20.0 * std::log10(std::abs(gop.at_frequency(wc)))) < 1e-6);
  // Closed-form oracle: |G|^2 = 1 is a quadratic in w^2.
  const double a = 0.005 * 0.005 * 0.003 * 0.003;
  const double b = 0.005 * 0.005 * 0.25 + 0.003 * 0.003;
  const double c = 0.25 - 400.0 * 400.0;
  const double w2 = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
  CHECK(wc == doctest::Approx(std::sqrt(w2)).epsilon(1e-9));
  // -3 dB bandwidth, closed form with |G(0)|^2 / 2.
  const double c3 = 0.25 - 2.0 * 0.25;
  const double wb2 = (-b + std::sqrt(b * b - 4.0 * a * c3)) / (2.0 * a);
  CHECK(bandwidth(gop) == doctest::Approx(std::sqrt(wb2)).epsilon(1e-9));
}

TEST_CASE("poles and roots") {
  auto p = poles(TransferFunction(Polynomial{1.0}, Polynomial{13.65, 1.0}));
  REQUIRE(p.size() == 1);
  CHECK(p[0].real() == doctest::Approx(-13.65));
  p = poles(TransferFunction(Polynomial{1.0}, Polynomial{8.1, 2.08, 1.0}));
  REQUIRE(p.size() == 2);
  const double im = std::sqrt(8.1 - 1.04 * 1.04);
  CHECK(p[0].real() == doctest::Approx(-1.04));
  CHECK(p[1].real() == doctest::Approx(-1.04));
  CHECK(std::abs(p[0].imag()) == doctest::Approx(im));
  CHECK(p[0] == std::conj(p[1]));
  CHECK(poles(TransferFunction::gain(3.0)).empty());
  const auto z = roots(Polynomial{0.0, 0.0, 2.0, 1.0});
  REQUIRE(z.size() == 3);
  CHECK(z[0] == Complex(-2.0, 0.0));
  CHECK(z[1] == Complex(0.0, 0.0));
}

TEST_CASE("roots agree with the companion-matrix oracle") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> c(7);
    for (double& x : c) {
      x = coef(rng);
    }
    c.back() = std::abs(c.back()) + 0.5;
    const Polynomial poly(c);
    const auto r = roots(poly);
    for (const Complex& x : r) {
      CHECK(std::abs(poly.eval(x)) / poly.norm() < 1e-8);
    }
    CHECK(match_error(r, companion_roots(poly)) < 1e-6);
  }
  std::uniform_real_distribution<double> re(0.1, 100.0);
  std::uniform_real_distribution<double> imag(0.0, 50.0);
  std::uniform_int_distribution<int> deg(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Complex> rs;
    const int n = deg(rng);
    while (static_cast<int>(rs.size()) < n) {
      if (n - static_cast<int>(rs.size()) >= 2 && (rng() & 1U)) {
        const Complex x(-re(rng), imag(rng));
        rs.push_back(x);
        rs.push_back(std::conj(x));
      } else {
        rs.emplace_back(-re(rng), 0.0);
      }
    }
    const Polynomial poly = Polynomial::from_roots(rs, 0.01);
    CHECK(match_error(roots(poly), companion_roots(poly)) < 1e-6);
  }
}

TEST_CASE("realization") {
  const double tau = 0.005;
  auto ss = realize(first_order(tau));
  REQUIRE(ss.order() == 1);
  CHECK(ss.A(0, 0) == doctest::Approx(-1.0 / tau));
  CHECK(ss.B(0) * ss.C(0) == doctest::Approx(1.0 / tau));
  CHECK(ss.D == 0.0);
  ss = realize(TransferFunction::gain(2.5));
  CHECK(ss.order() == 0);
  CHECK(ss.D == 2.5);
  CHECK_THROWS_AS(realize(TransferFunction(Polynomial{0.0, 0.0, 1.0}, Polynomial{1.0, 1.0})), ValidationError);

  const auto gop = plant_gop1();
  ss = realize(gop);
  REQUIRE(ss.order() == 2);
  // Step response by exact discretization; final value V_gn / R1.
  const double dt = 1e-3;
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(3, 3);
  aug.topLeftCorner(2, 2) = ss.A * dt;
  aug.topRightCorner(2, 1) = ss.B * dt;
  const Eigen::MatrixXd e = aug.exp();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  for (int k = 0; k < 200; ++k) {
    x = e.topLeftCorner(2, 2) * x + e.topRightCorner(2, 1);
  }
  CHECK((ss.C * x)(0) + ss.D == doctest::Approx(800.0).epsilon(1e-3));
}

TEST_CASE("property: random proper transfer functions") {
  std::mt19937_64 rng(77);
  const auto grid = log_space(1e-2, 1e4, 50);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g1 = random_proper(rng, 4);
    const auto g2 = random_proper(rng, 4);
    const auto s = tf_series(g1, g2);
    const auto r1 = realize(g1);
    for (double w : grid) {
      const Complex jw(0.0, w);
      CHECK(rel(s.eval(jw), g1.eval(jw) * g2.eval(jw)) < 1e-9);
      CHECK(rel(r1.eval(jw), g1.eval(jw)) < 1e-9);
    }
    // DC gain of the realized system's step response.
    const double dc = g1.dc_gain();
    double slowest = 0.0;
    for (const Complex& p : poles(g1)) {
      slowest = std::max(slowest, -1.0 / p.real());
    }
    const double t_end = 10.0 * slowest;
    const auto n = static_cast<Eigen::Index>(r1.order());
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = r1.A * t_end;
    aug.topRightCorner(n, 1) = r1.B * t_end;
    const Eigen::MatrixXd e = aug.exp();
    const double y = (r1.C * e.topRightCorner(n, 1))(0) + r1.D;
    CHECK(y == doctest::Approx(dc).epsilon(1e-3));
  }
}
