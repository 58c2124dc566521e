#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "osc/graded_lie_algebra.hpp"

using namespace osc;

namespace {

RationalVec random_coords(const GradedLieAlgebra& alg, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-6, 6);
  std::uniform_int_distribution<int> den(1, 5);
  RationalVec v(alg.dim());
  for (auto& x : v) x = Rational(num(rng), den(rng));
  return v;
}

}  // namespace

TEST_CASE("validate accepts the shipped catalog") {
  CHECK(abelian_algebra(2).validate().ok);
  CHECK(heisenberg_algebra().validate().ok);
  CHECK(engel_algebra().validate().ok);
}

TEST_CASE("validate rejects a grading violation") {
  // weights (1,1,1) with [X,Y] = Z: d_Z != d_X + d_Y
  GradedLieAlgebra alg({1, 1, 1});
  alg.set_bracket(0, 1, 2, Rational(1));
  auto report = alg.validate();
  CHECK_FALSE(report.ok);
  CHECK(report.message.find("grading") != std::string::npos);
}

TEST_CASE("validate rejects a Jacobi violation") {
  // weights (1,1,2,2): [X,Y]=Z, [X,W]? need bracket failing Jacobi.
  // Use (1,1,1,2,2,2)-style minimal example: so(3)-like constants on equal
  // weights are grading-incompatible, so construct a genuine Jacobi failure
  // on weights (1,1,1,2,2,2) is overkill; instead break Jacobi on engel-like
  // constants: [e1,e2]=e3, [e1,e3]=e4, [e2,e3]=e4 with a sign making Jacobi
  // fail is still satisfied (all double brackets land in weight>3). Use a
  // step-4 algebra: weights (1,1,2,3,4).
  GradedLieAlgebra alg({1, 1, 2, 3, 4});
  alg.set_bracket(0, 1, 2, Rational(1));  // [e1,e2]=e3
  alg.set_bracket(0, 2, 3, Rational(1));  // [e1,e3]=e4
  alg.set_bracket(0, 3, 4, Rational(1));  // [e1,e4]=e5
  alg.set_bracket(1, 2, 4, Rational(0));
  // Jacobi on (e1,e2,e3): [e1,[e2,e3]] + [e2,[e3,e1]] + [e3,[e1,e2]]
  //  = 0 + [e2,-e4] + 0 = 0 since [e2,e4]=0: passes. Now break it:
  alg.set_bracket(1, 3, 4, Rational(1));  // [e2,e4]=e5 ruins Jacobi(e1,e2,e3)
  auto report = alg.validate();
  CHECK_FALSE(report.ok);
  CHECK(report.message.find("Jacobi") != std::string::npos);
}

TEST_CASE("dilate uses the grading weights") {
  auto heis = heisenberg_algebra();
  std::vector<double> xi{1, 1, 1};
  auto out = dilate(heis, 2.0, xi);
  CHECK(out == std::vector<double>{2, 2, 4});
  CHECK(dilate(heis, 1.0, xi) == xi);
  CHECK(dilate(heis, 0.5, std::vector<double>{2, 2, 4}) ==
        std::vector<double>{1, 1, 1});
  CHECK_THROWS_AS(dilate(heis, -1.0, xi), DomainError);
}

TEST_CASE("dilation is a one-parameter group, exactly") {
  auto engel = engel_algebra();
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto xi = random_coords(engel, rng);
    Rational lam(3, 2), mu(5, 7);
    CHECK(dilate(engel, lam, dilate(engel, mu, xi)) ==
          dilate(engel, lam * mu, xi));
  }
}

TEST_CASE("bch on heisenberg matches the step-2 closed form") {
  auto heis = heisenberg_algebra();
  RationalVec x{1, 0, 0}, y{0, 1, 0};
  auto p = bch_multiply(heis, x, y);
  CHECK(p == RationalVec{1, 1, Rational(1, 2)});
  // inverse
  RationalVec xm{-1, 0, 0};
  CHECK(bch_multiply(heis, x, xm) == RationalVec{0, 0, 0});
}

TEST_CASE("bch on abelian is addition") {
  auto ab = abelian_algebra(3);
  RationalVec x{1, 2, 3}, y{Rational(1, 2), -1, 4};
  CHECK(bch_multiply(ab, x, y) ==
        RationalVec{Rational(3, 2), 1, 7});
}

TEST_CASE("bch matches the degree-3 closed form on engel pairs") {
  // For step-3 elements (x4 = 0), BCH is
  //   x + y + [x,y]/2 + [x,[x,y]]/12 + [y,[y,x]]/12 ... plus weight-4 part.
  // Check the first three graded components only.
  auto engel = engel_algebra();
  std::mt19937 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = random_coords(engel, rng);
    auto y = random_coords(engel, rng);
    auto p = bch_multiply(engel, x, y);
    auto xy = engel.bracket(x, y);
    auto xxy = engel.bracket(x, xy);
    auto yyx = engel.bracket(y, engel.bracket(y, x));
    for (int k = 0; k < 3; ++k) {
      Rational expect = x[k] + y[k] + xy[k] / 2 + xxy[k] / 12 + yyx[k] / 12;
      CHECK(p[k] == expect);
    }
  }
}

TEST_CASE("bch is associative, exact in rationals") {
  std::mt19937 rng(42);
  for (const auto& alg :
       {abelian_algebra(3), heisenberg_algebra(), engel_algebra()}) {
    for (int trial = 0; trial < 200; ++trial) {
      auto x = random_coords(alg, rng);
      auto y = random_coords(alg, rng);
      auto z = random_coords(alg, rng);
      CHECK(bch_multiply(alg, bch_multiply(alg, x, y), z) ==
            bch_multiply(alg, x, bch_multiply(alg, y, z)));
    }
  }
}

TEST_CASE("bch stays associative at step 4") {
  // filiform algebra, weights (1,1,2,3,4)
  GradedLieAlgebra alg({1, 1, 2, 3, 4});
  alg.set_bracket(0, 1, 2, Rational(1));
  alg.set_bracket(0, 2, 3, Rational(1));
  alg.set_bracket(0, 3, 4, Rational(1));
  REQUIRE(alg.validate().ok);
  std::mt19937 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = random_coords(alg, rng);
    auto y = random_coords(alg, rng);
    auto z = random_coords(alg, rng);
    CHECK(bch_multiply(alg, bch_multiply(alg, x, y), z) ==
          bch_multiply(alg, x, bch_multiply(alg, y, z)));
  }
}

TEST_CASE("dilation is a group automorphism for bch") {
  std::mt19937 rng(5);
  auto engel = engel_algebra();
  Rational lam(7, 3);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = random_coords(engel, rng);
    auto y = random_coords(engel, rng);
    CHECK(bch_multiply(engel, dilate(engel, lam, x), dilate(engel, lam, y)) ==
          dilate(engel, lam, bch_multiply(engel, x, y)));
  }
}

TEST_CASE("homogeneous norm: values and scaling") {
  auto heis = heisenberg_algebra();
  CHECK(homogeneous_norm(heis, {0, 0, 4}) == doctest::Approx(2.0));
  CHECK(homogeneous_norm(heis, {0, 0, 0}) == 0.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2, 2), ul(0.1, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xi{u(rng), u(rng), u(rng)};
    double lam = ul(rng);
    double lhs = homogeneous_norm(heis, dilate(heis, lam, xi));
    double rhs = lam * homogeneous_norm(heis, xi);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}
