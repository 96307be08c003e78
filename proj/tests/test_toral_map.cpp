#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "core/grid.hpp"
#include "core/toral_map.hpp"

using namespace folia;

namespace {

const IntMat kCat{{2, 1}, {1, 1}};

TorusPoint rand_point(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec v(dim);
  for (double& c : v) c = u(rng);
  return wrap(v);
}

}  // namespace

TEST_SUITE_BEGIN("toral_map");

TEST_CASE("linear automorphism evaluation") {
  ToralMap f(kCat);
  TorusPoint y = f.apply(wrap({0.5, 0.5}));
  CHECK(y.coords[0] == doctest::Approx(0.5));
  CHECK(y.coords[1] == doctest::Approx(0.0));
  CHECK(f.is_linear());
  CHECK(f.inverse_matrix() == IntMat{{1, -1}, {-1, 2}});
  CHECK(torus_dist(f.apply_inverse(y), wrap({0.5, 0.5})) < 1e-12);
}

TEST_CASE("nonlinear inverse round-trips by contraction") {
  std::vector<TrigTerm> terms{{{1, 0}, {0.02, 0.01}, true},
                              {{0, 2}, {0.0, 0.015}, false}};
  ToralMap f(kCat, terms);
  std::mt19937_64 rng(41);
  for (int t = 0; t < 300; ++t) {
    TorusPoint x = rand_point(rng, 2);
    CHECK(torus_dist(f.apply_inverse(f.apply(x)), x) < 1e-9);
    CHECK(torus_dist(f.apply(f.apply_inverse(x)), x) < 1e-9);
  }
  // iterate composes with its inverse
  TorusPoint x = rand_point(rng, 2);
  CHECK(torus_dist(f.iterate(f.iterate(x, 7), -7), x) < 1e-8);
}

TEST_CASE("Lipschitz margin rejects non-invertible displacements") {
  // 2 pi * 0.2 > 1 swallows the whole inverse margin of the identity part
  std::vector<TrigTerm> big{{{1, 0}, {0.0, 0.2}, true}};
  CHECK_THROWS_AS(ToralMap(IntMat{{1, 0}, {0, 1}}, big), Error);
  // 0.1 stays below the margin
  std::vector<TrigTerm> ok{{{1, 0}, {0.0, 0.1}, true}};
  CHECK_NOTHROW(ToralMap(IntMat{{1, 0}, {0, 1}}, ok));
}

TEST_CASE("constant translation as a frequency-zero term") {
  std::vector<TrigTerm> shift{{{0, 0}, {0.377, 0.0}, false}};
  ToralMap f(IntMat{{1, 0}, {0, 1}}, shift);
  TorusPoint y = f.apply(wrap({0.9, 0.25}));
  CHECK(y.coords[0] == doctest::Approx(0.277));
  CHECK(y.coords[1] == doctest::Approx(0.25));
}

TEST_CASE("spectral splitting of the hyperbolic automorphism") {
  SpectralSplitting s = spectral_splitting(ToralMap(kCat));
  CHECK(s.classification == SplittingClass::Anosov);
  CHECK(s.stable_dim == 1);
  CHECK(s.center_dim == 0);
  CHECK(s.unstable_dim == 1);
  CHECK(s.lambda == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(s.mu == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(s.real_diagonalizable);
  CHECK(s.c_constant == doctest::Approx(1.0));
  // eigenvector directions: Av = mu v for the unstable column
  Eigen::VectorXd v = s.unstable_basis.col(0);
  CHECK((to_eigen(kCat) * v - s.mu * v).norm() < 1e-9);
}

TEST_CASE("spectral splitting of a product with a circle factor") {
  SpectralSplitting s =
      spectral_splitting(ToralMap(IntMat{{2, 1, 0}, {1, 1, 0}, {0, 0, 1}}));
  CHECK(s.classification == SplittingClass::PartiallyHyperbolic);
  CHECK(s.center_dim == 1);
  CHECK(s.gamma_hat == doctest::Approx(1.0));
  CHECK(s.gamma == doctest::Approx(1.0));
  // the center direction is the circle factor
  CHECK(std::abs(s.center_basis.col(0)[2]) == doctest::Approx(1.0));
}

TEST_CASE("c0 distance bounds bracket a known displacement") {
  ToralMap f(kCat);
  ToralMap g(kCat, {{{0, 1}, {0.002, 0.0}, true}});
  Grid grid(2, 64);
  C0DistanceBounds b = c0_distance(f, g, grid);
  CHECK(b.lower <= 0.002 + 1e-12);
  CHECK(b.upper >= 0.002 - 1e-12);
  CHECK(b.lower <= b.upper);
  CHECK(b.lower > 0.0015);  // sup of |0.002 sin| is very nearly attained
  CHECK(b.upper < 0.003);
  CHECK_THROWS_AS(c0_distance(f, ToralMap(IntMat{{1, 0}, {0, 1}}), grid), Error);
}

TEST_CASE("bump perturbations hit their targets exactly") {
  ToralMap f(kCat);
  DisplacementRequest req;
  TorusPoint site = wrap({0.2, 0.7});
  TorusPoint target = wrap(add(f.apply(site).coords, {0.004, -0.003}));
  req.pairs.push_back({site, target});
  PerturbationResult r = build_perturbation(f, req, 0.05);
  CHECK(torus_dist(r.map.apply(site), target) < 1e-12);
  CHECK(r.reported_c0 == doctest::Approx(0.005).epsilon(1e-9));
  // far from the bump support g == f
  TorusPoint far = wrap({0.7, 0.2});
  CHECK(torus_dist(r.map.apply(far), f.apply(far)) < 1e-12);

  // overlapping supports are refused
  DisplacementRequest overlap;
  overlap.pairs.push_back({site, target});
  TorusPoint site2 = wrap(add(site.coords, {0.01, 0.0}));
  overlap.pairs.push_back({site2, f.apply(site2)});
  CHECK_THROWS_AS(build_perturbation(f, overlap, 0.05), Error);
}

TEST_CASE("foliation preservation and the induced quotient") {
  std::mt19937_64 rng(53);
  ToralMap prod(IntMat{{2, 1, 0}, {1, 1, 0}, {0, 0, 1}});
  LinearFoliation center(3, {{0, 0, 1}});
  CHECK(preserves_foliation(prod, center, rng, 200, 1e-9));

  ToralMap q = induced_quotient_map(prod, center);
  CHECK(q.dim() == 2);
  // conjugate to the hyperbolic block: same trace and determinant
  CHECK(q.matrix()[0][0] + q.matrix()[1][1] == 3);
  CHECK(int_det(q.matrix()) == 1);
  // commuting diagram at a sample point
  TorusPoint x = rand_point(rng, 3);
  Vec down = center.quotient_project(x);
  Vec down_fx = center.quotient_project(prod.apply(x));
  CHECK(torus_dist(q.apply(wrap(down)), wrap(down_fx)) < 1e-9);

  // the hyperbolic automorphism does not preserve vertical circles
  LinearFoliation vert(2, {{0, 1}});
  ToralMap cat(kCat);
  CHECK(!preserves_foliation(cat, vert, rng, 200, 1e-9));
  CHECK_THROWS_AS(induced_quotient_map(cat, vert), Error);
}

TEST_CASE("skew rotation descends to a circle rotation") {
  std::vector<TrigTerm> terms{{{0, 0}, {0.377, 0.0}, false},
                              {{1, 0}, {0.0, 0.1}, true}};
  ToralMap skew(IntMat{{1, 0}, {0, 1}}, terms);
  LinearFoliation vert(2, {{0, 1}});
  ToralMap q = induced_quotient_map(skew, vert);
  CHECK(q.dim() == 1);
  TorusPoint z = wrap({0.4});
  CHECK(circle_dist(q.apply(z).coords[0], 0.777) < 1e-9);
}

TEST_SUITE_END();
