#include <doctest.h>

#include <cmath>
#include <random>

#include "core/quotient.hpp"

using namespace folia;

namespace {

TorusPoint rand_point(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec v(dim);
  for (double& c : v) c = u(rng);
  return wrap(v);
}

}  // namespace

TEST_SUITE_BEGIN("quotient");

TEST_CASE("circle-factor product descends to the hyperbolic block") {
  ToralMap prod(IntMat{{2, 1, 0}, {1, 1, 0}, {0, 0, 1}});
  LinearFoliation center(3, {{0, 0, 1}});
  QuotientSystem qs = build_quotient_system(prod, center);
  CHECK(qs.commute_defect <= 1e-9);
  CHECK(qs.quotient_map.dim() == 2);
  // conjugate to the block, whatever basis ordering came out
  CHECK(qs.quotient_map.matrix()[0][0] + qs.quotient_map.matrix()[1][1] == 3);
  CHECK(int_det(qs.quotient_map.matrix()) == 1);

  // the diagram commutes at random points too
  std::mt19937_64 rng(137);
  for (int t = 0; t < 200; ++t) {
    TorusPoint x = rand_point(rng, 3);
    TorusPoint down_fx = quotient_point(qs, prod.apply(x));
    TorusPoint q_down = qs.quotient_map.apply(quotient_point(qs, x));
    CHECK(torus_dist(down_fx, q_down) < 1e-9);
  }
}

TEST_CASE("projection distance matches the leaf distance") {
  ToralMap prod(IntMat{{2, 1, 0}, {1, 1, 0}, {0, 0, 1}});
  LinearFoliation center(3, {{0, 0, 1}});
  QuotientSystem qs = build_quotient_system(prod, center);
  std::mt19937_64 rng(139);
  for (int t = 0; t < 200; ++t) {
    TorusPoint x = rand_point(rng, 3), y = rand_point(rng, 3);
    double down = torus_dist(quotient_point(qs, x), quotient_point(qs, y));
    // same leaf <=> same quotient point
    CHECK((center.transverse_dist(x, y) < 1e-12) == (down < 1e-9));
    // the projection never stretches beyond the transverse-basis distortion
    CHECK(down <= operator_norm(to_eigen(center.transverse_basis())) *
                      torus_dist(x, y) + 1e-9);
  }
  // leaves of the vertical foliation: the quotient metric is the base metric
  TorusPoint a = wrap({0.1, 0.4, 0.9}), b = wrap({0.1, 0.4, 0.2});
  CHECK(torus_dist(quotient_point(qs, a), quotient_point(qs, b)) < 1e-12);
}

TEST_CASE("projected leaves recover the hausdorff distance between leaves") {
  // vertical circles in T^2: D(L_x, L_y) is the horizontal circle distance
  std::vector<TrigTerm> terms{{{0, 0}, {0.377, 0.0}, false},
                              {{1, 0}, {0.0, 0.1}, true}};
  ToralMap skew(IntMat{{1, 0}, {0, 1}}, terms);
  LinearFoliation vert(2, {{0, 1}});
  QuotientSystem qs = build_quotient_system(skew, vert);
  CHECK(qs.quotient_map.dim() == 1);
  CHECK(qs.commute_defect <= 1e-9);

  std::mt19937_64 rng(149);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    double x = u(rng), y = u(rng);
    PointSet lx, ly;
    for (int i = 0; i < 64; ++i) {
      lx.elems.push_back(wrap({x, i / 64.0}));
      ly.elems.push_back(wrap({y, i / 64.0}));
    }
    double upstairs = hausdorff_dist(lx, ly);
    double downstairs = torus_dist(quotient_point(qs, lx.elems[0]),
                                   quotient_point(qs, ly.elems[0]));
    CHECK(upstairs == doctest::Approx(downstairs).epsilon(1e-9));
  }
}

TEST_CASE("point foliation: the quotient is the map itself") {
  ToralMap cat(IntMat{{2, 1}, {1, 1}});
  LinearFoliation pts(FoliationKind::Points, 2);
  QuotientSystem qs = build_quotient_system(cat, pts);
  CHECK(qs.quotient_map.dim() == 2);
  CHECK(qs.commute_defect <= 1e-9);
  TorusPoint x = wrap({0.3, 0.8});
  CHECK(torus_dist(quotient_point(qs, x), x) < 1e-9);
}

TEST_CASE("unsupported and non-invariant inputs are refused") {
  LinearFoliation whole(FoliationKind::WholeManifold, 2);
  ToralMap id(IntMat{{1, 0}, {0, 1}});
  CHECK_THROWS_AS(build_quotient_system(id, whole), Error);
  LinearFoliation vert(2, {{0, 1}});
  ToralMap cat(IntMat{{2, 1}, {1, 1}});
  CHECK_THROWS_AS(build_quotient_system(cat, vert), Error);
}

TEST_CASE("shadowing transfers to the quotient") {
  ToralMap prod(IntMat{{2, 1, 0}, {1, 1, 0}, {0, 0, 1}});
  LinearFoliation center(3, {{0, 0, 1}});
  QuotientSystem qs = build_quotient_system(prod, center);
  Grid grid(3, 24);
  TransferReport rep = transfer_shadowing_check(qs, prod, 0.005, 0.08, grid, 10, 12, 7);
  CHECK(rep.pass);
  CHECK(rep.shadow_failures == 0);
  CHECK(rep.trials.size() == 10);
  double distortion = operator_norm(to_eigen(center.transverse_basis()));
  CHECK(rep.worst_offset <= distortion * 0.08 + 1e-9);
  CHECK(rep.worst_step_defect <= distortion * 0.08 + 1e-9);
}

TEST_SUITE_END();
