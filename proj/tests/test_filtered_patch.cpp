#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "osc/filtered_patch.hpp"

using namespace osc;

TEST_CASE("expr parser and derivative basics") {
  Expr e = Expr::parse("x^2 + 1/2*y - sin(x)*cos(y)", 2);
  CHECK(e.eval({0.3, 0.4}) ==
        doctest::Approx(0.09 + 0.2 - std::sin(0.3) * std::cos(0.4)));
  Expr dx = e.derivative(0);
  CHECK(dx.eval({0.3, 0.4}) ==
        doctest::Approx(0.6 - std::cos(0.3) * std::cos(0.4)));
  // sin^2 + cos^2 - 1 is identically zero in the exponential basis
  Expr s = Expr::parse("sin(x)^2 + cos(x)^2 - 1", 1);
  CHECK(s.is_zero());
}

TEST_CASE("heisenberg patch passes check_filtration with [X,Y]=Z") {
  auto p = heisenberg_patch();
  auto report = p.check_filtration();
  CHECK(report.ok);
  // symbolic bracket oracle: [X,Y] expands as exactly Z
  CHECK(p.bracket_coeff(0, 1, 2) == Expr::constant(3, 1));
  CHECK(p.bracket_coeff(0, 1, 0).is_zero());
  CHECK(p.bracket_coeff(0, 1, 1).is_zero());
}

TEST_CASE("trivial filtration passes; all brackets vanish") {
  auto p = trivial_patch(2);
  CHECK(p.check_filtration().ok);
  for (int k = 0; k < 2; ++k) CHECK(p.bracket_coeff(0, 1, k).is_zero());
}

TEST_CASE("engel patch passes and has the engel brackets") {
  auto p = engel_patch();
  CHECK(p.check_filtration().ok);
  CHECK(p.bracket_coeff(0, 1, 2) == Expr::constant(4, 1));
  CHECK(p.bracket_coeff(0, 2, 3) == Expr::constant(4, 1));
  CHECK(p.bracket_coeff(1, 2, 3).is_zero());
}

TEST_CASE("depth-1 declaration of the heisenberg frame is rejected") {
  auto p = heisenberg_bad_patch();
  auto report = p.check_filtration();
  CHECK_FALSE(report.ok);
  CHECK(report.message.find("depth") != std::string::npos);
}

TEST_CASE("osculating algebras") {
  auto heis = heisenberg_patch();
  for (const RationalVec& x :
       {RationalVec{0, 0, 0}, RationalVec{1, Rational(-1, 2), 3}}) {
    auto alg = heis.osculating_at(x);
    CHECK(alg.validate().ok);
    CHECK(alg.c(0, 1, 2) == 1);
    CHECK(alg.weights() == std::vector<int>{1, 1, 2});
  }
  auto triv = trivial_patch(3);
  auto ab = triv.osculating_at(RationalVec{1, 2, 3});
  CHECK(ab.validate().ok);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(ab.c(i, j, k) == 0);
  auto engel = engel_patch();
  auto ea = engel.osculating_at(RationalVec{0, 0, 0, 0});
  CHECK(ea.validate().ok);
  CHECK(ea.c(0, 1, 2) == 1);
  CHECK(ea.c(0, 2, 3) == 1);
}

TEST_CASE("exp_chart on the trivial filtration is (x, x - t xi)") {
  auto p = trivial_patch(2);
  auto cp = p.exp_chart({0.5, -0.25}, {1.0, 2.0}, 0.125);
  CHECK(cp.second[0] == doctest::Approx(0.5 - 0.125));
  CHECK(cp.second[1] == doctest::Approx(-0.25 - 0.25));
  // xi = 0 stays put for all t
  for (double t : {-1.0, 0.5, 1.0}) {
    auto fixed = p.exp_chart({0.3, 0.7}, {0.0, 0.0}, t);
    CHECK(fixed.second == std::vector<double>{0.3, 0.7});
  }
  // t = 0 returns the fibre point
  auto fib = p.exp_chart({0.1, 0.2}, {3.0, 4.0}, 0.0);
  CHECK(fib.second == std::vector<double>{3.0, 4.0});
}

namespace {

// RK4 flow of the frozen field -psi(delta_t xi) at x, over unit time.
std::vector<double> flow_oracle(const FilteredPatch& p,
                                const std::vector<double>& x,
                                const std::vector<double>& xi, double t) {
  std::vector<double> v(p.dim());
  for (int j = 0; j < p.dim(); ++j)
    v[j] = std::pow(t, p.orders()[j]) * xi[j];
  auto A = p.frame_matrix(x);
  std::vector<double> rhs(p.dim(), 0.0);
  for (int k = 0; k < p.dim(); ++k)
    for (int j = 0; j < p.dim(); ++j) rhs[k] -= A[k][j] * v[j];
  std::vector<double> y = x;
  const int steps = 64;
  for (int s = 0; s < steps; ++s)
    for (int k = 0; k < p.dim(); ++k) y[k] += rhs[k] / steps;
  return y;
}

}  // namespace

TEST_CASE("heisenberg exp_chart matches the flow oracle") {
  auto p = heisenberg_patch();
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> x{u(rng), u(rng), u(rng)};
    std::vector<double> xi{u(rng), u(rng), u(rng)};
    auto cp = p.exp_chart(x, xi, 1.0);
    auto y = flow_oracle(p, x, xi, 1.0);
    for (int k = 0; k < 3; ++k)
      CHECK(cp.second[k] == doctest::Approx(y[k]).epsilon(1e-12));
  }
}

TEST_CASE("zoom equivariance of the chart") {
  // exp_chart(x, delta_lambda xi, t/lambda) hits the same point y.
  for (const auto& p : {trivial_patch(2), heisenberg_patch()}) {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<double> x(p.dim()), xi(p.dim());
      for (auto& c : x) c = u(rng);
      for (auto& c : xi) c = u(rng);
      double t = 0.7, lambda = 2.0;
      std::vector<double> xid(p.dim());
      for (int j = 0; j < p.dim(); ++j)
        xid[j] = std::pow(lambda, p.orders()[j]) * xi[j];
      auto a = p.exp_chart(x, xi, t);
      auto b = p.exp_chart(x, xid, t / lambda);
      for (int k = 0; k < p.dim(); ++k)
        CHECK(a.second[k] == doctest::Approx(b.second[k]).epsilon(1e-10));
    }
  }
}

TEST_CASE("exp_chart is injective on a sample grid") {
  auto p = heisenberg_patch();
  std::vector<double> x{0.1, -0.2, 0.05};
  std::vector<std::vector<double>> images;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c) {
        auto cp = p.exp_chart(x, {a * 0.3, b * 0.3, c * 0.3}, 1.0);
        for (const auto& seen : images) {
          double dist = 0;
          for (int k = 0; k < 3; ++k)
            dist += std::abs(cp.second[k] - seen[k]);
          CHECK(dist > 1e-9);
        }
        images.push_back(cp.second);
      }
}

TEST_CASE("osculating structure constants vary smoothly") {
  // On a frame with x-dependent brackets, finite differences of the bracket
  // coefficients match the symbolic derivative.
  const int n = 2;
  VectorField X1;
  X1.coeffs = {Expr::constant(n, 1), Expr(n)};
  VectorField X2;
  X2.coeffs = {Expr::parse("x^2", n), Expr::constant(n, 1)};
  FilteredPatch p({X1, X2}, {1, 1}, 1, false, 10.0);
  REQUIRE(p.check_filtration().ok);
  // [X1, X2] = 2x d/dx = 2x X1 - 2x^3 ... expand: 2x*X1 has dy comp 0; but
  // X1 column is (1,0), X2 column is (x^2,1): [X1,X2] = (2x, 0);
  // coefficients: c1*(1) + c2*x^2 = 2x, c2 = 0 -> c1 = 2x.
  const Expr& c1 = p.bracket_coeff(0, 1, 0);
  CHECK(c1 == Expr::parse("2*x", n));
  Expr dc1 = c1.derivative(0);
  for (double x : {-0.7, 0.0, 0.4}) {
    double h = 1e-5;
    double fd =
        (c1.eval({x + h, 0.0}) - c1.eval({x - h, 0.0})) / (2 * h);
    CHECK(fd == doctest::Approx(dc1.eval({x, 0.0})).epsilon(1e-8));
  }
}

TEST_CASE("domain errors") {
  FilteredPatch p({VectorField{{Expr::constant(1, 1)}}}, {1}, 1, false, 1.0,
                  2.0);
  CHECK_THROWS_AS(p.exp_chart({5.0}, {0.1}, 1.0), DomainError);
  CHECK_THROWS_AS(p.exp_chart({0.0}, {3.0}, 1.0), DomainError);  // radius
  CHECK_THROWS_AS(p.osculating_at(RationalVec{Rational(5)}), DomainError);
}
