#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "core/foliation.hpp"

using namespace folia;

namespace {

TorusPoint rand_point(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec v(dim);
  for (double& c : v) c = u(rng);
  return wrap(v);
}

// Independent plaque-distance oracle: densely sample the plaque arc
// center + t * dir / |dir| for |t| <= radius and take the closest sample.
// Only for one-dimensional leaves.
double dist_to_plaque_sampled(const PlaqueDescriptor& p, const TorusPoint& y,
                              int samples = 20000) {
  const LinearFoliation& fol = *p.foliation;
  REQUIRE(fol.leaf_dim() == 1);
  Vec dir(fol.directions()[0].begin(), fol.directions()[0].end());
  double len = norm(dir);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) {
    double t = -p.radius + 2.0 * p.radius * i / samples;
    Vec pt = add(p.center.coords, scale(dir, t / len));
    best = std::min(best, torus_dist(wrap(pt), y));
  }
  return best;
}

}  // namespace

TEST_SUITE_BEGIN("foliation");

TEST_CASE("degenerate kinds") {
  LinearFoliation pts(FoliationKind::Points, 2);
  CHECK(pts.leaf_dim() == 0);
  CHECK(pts.transverse_dim() == 2);
  TorusPoint a = wrap({0.2, 0.3}), b = wrap({0.2, 0.31});
  CHECK(pts.same_leaf(a, a, 1e-9));
  CHECK(!pts.same_leaf(a, b, 1e-9));
  // for the point foliation the transverse distance is the torus metric
  CHECK(pts.transverse_dist(a, b) == doctest::Approx(torus_dist(a, b)));
  CHECK(pts.intrinsic_leaf_dist(a, a) == 0.0);
  CHECK(pts.intrinsic_leaf_dist(a, b) == std::numeric_limits<double>::infinity());

  LinearFoliation whole(FoliationKind::WholeManifold, 2);
  CHECK(whole.leaf_dim() == 2);
  CHECK(whole.transverse_dim() == 0);
  CHECK(whole.same_leaf(a, b, 0.0));
  CHECK(whole.transverse_dist(a, b) == 0.0);
  CHECK(whole.intrinsic_leaf_dist(a, b) == doctest::Approx(torus_dist(a, b)));
}

TEST_CASE("linear constructor rejects bad direction data") {
  CHECK_THROWS_AS(LinearFoliation(2, {}), Error);
  CHECK_THROWS_AS(LinearFoliation(2, {{0, 0}}), Error);
  CHECK_THROWS_AS(LinearFoliation(2, {{1, 0}, {0, 1}}), Error);   // c == d
  CHECK_THROWS_AS(LinearFoliation(2, {{1, 1}, {2, 2}}), Error);   // dependent
  CHECK_THROWS_AS(LinearFoliation(3, {{1, 0}}), Error);           // dim mismatch
}

TEST_CASE("diagonal foliation of T^2") {
  LinearFoliation fol(2, {{1, 1}});
  CHECK(fol.leaf_dim() == 1);
  REQUIRE(fol.transverse_basis().size() == 1);
  // annihilator of (1,1) is the line through (1,-1)
  CHECK(fol.transverse_basis()[0] == IntVec{1, -1});

  TorusPoint o = wrap({0.0, 0.0});
  TorusPoint h = wrap({0.5, 0.5});
  CHECK(fol.same_leaf(o, h, 1e-9));
  CHECK(fol.intrinsic_leaf_dist(o, h) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  // quarter way along the diagonal: wrap-around does not help yet
  CHECK(fol.intrinsic_leaf_dist(o, wrap({0.25, 0.25})) ==
        doctest::Approx(0.25 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(!fol.same_leaf(o, wrap({0.5, 0.0}), 1e-9));
  CHECK(fol.transverse_dist(o, wrap({0.5, 0.0})) == doctest::Approx(0.5));
}

TEST_CASE("vertical circles: closed-form plaque distance") {
  LinearFoliation fol(2, {{0, 1}});
  PlaqueDescriptor p{wrap({0.0, 0.0}), &fol, 0.25};
  // on the leaf, beyond the radius: pure in-leaf approach to the arc ends
  CHECK(dist_to_plaque(p, wrap({0.0, 0.5})) == doctest::Approx(0.25).epsilon(1e-12));
  // on the leaf, inside the plaque
  CHECK(dist_to_plaque(p, wrap({0.0, 0.9})) == doctest::Approx(0.0));
  // off the leaf, level with the center
  CHECK(dist_to_plaque(p, wrap({0.3, 0.0})) == doctest::Approx(0.3).epsilon(1e-12));
  // off the leaf and beyond the arc: right-angle combination
  CHECK(dist_to_plaque(p, wrap({0.3, 0.5})) ==
        doctest::Approx(std::sqrt(0.09 + 0.0625)).epsilon(1e-12));

  CHECK(membership_in_plaque(p, wrap({0.0, 0.2}), 1e-9));
  CHECK(!membership_in_plaque(p, wrap({0.0, 0.3}), 1e-9));
  CHECK(!membership_in_plaque(p, wrap({0.1, 0.0}), 1e-9));
}

TEST_CASE("plaque distance agrees with the dense-sampling oracle") {
  std::mt19937_64 rng(17);
  std::vector<LinearFoliation> fols;
  fols.emplace_back(2, std::vector<IntVec>{{0, 1}});  // axis-aligned path
  fols.emplace_back(2, std::vector<IntVec>{{1, 1}});  // general path
  fols.emplace_back(2, std::vector<IntVec>{{2, 1}});
  for (const LinearFoliation& fol : fols) {
    for (int t = 0; t < 40; ++t) {
      PlaqueDescriptor p{rand_point(rng, 2), &fol, 0.05 + 0.4 * (t % 5) / 5.0};
      TorusPoint y = rand_point(rng, 2);
      double fast = dist_to_plaque(p, y);
      double slow = dist_to_plaque_sampled(p, y);
      CHECK(fast == doctest::Approx(slow).epsilon(1e-3));
      CHECK(fast <= slow + 1e-6);  // the oracle is an over-estimate
    }
  }
}

TEST_CASE("plaque membership defect splits by leaf membership") {
  LinearFoliation fol(2, {{0, 1}});
  PlaqueDescriptor p{wrap({0.0, 0.0}), &fol, 0.1};
  // on the leaf: defect is the in-leaf excess over the radius
  CHECK(plaque_membership_defect(p, wrap({0.0, 0.3}), 1e-9) ==
        doctest::Approx(0.2).epsilon(1e-9));
  // off the leaf: defect is the ambient distance to the plaque
  TorusPoint off = wrap({0.2, 0.05});
  CHECK(plaque_membership_defect(p, off, 1e-9) ==
        doctest::Approx(dist_to_plaque(p, off)).epsilon(1e-9));
  // inside: zero defect and membership agree
  CHECK(plaque_membership_defect(p, wrap({0.0, 0.05}), 1e-9) == 0.0);
  CHECK(membership_in_plaque(p, wrap({0.0, 0.05}), 1e-9));
}

TEST_CASE("plaque distance is monotone in the radius") {
  std::mt19937_64 rng(23);
  LinearFoliation fol(3, {{0, 0, 1}});
  for (int t = 0; t < 200; ++t) {
    TorusPoint c = rand_point(rng, 3), y = rand_point(rng, 3);
    double d1 = dist_to_plaque({c, &fol, 0.05}, y);
    double d2 = dist_to_plaque({c, &fol, 0.15}, y);
    double d3 = dist_to_plaque({c, &fol, 0.45}, y);
    CHECK(d2 <= d1 + 1e-12);
    CHECK(d3 <= d2 + 1e-12);
    CHECK(d3 >= fol.transverse_dist(c, y) - 1e-9);
  }
}

TEST_CASE("plaque membership implies leaf membership") {
  std::mt19937_64 rng(29);
  LinearFoliation fol(2, {{1, 2}});
  for (int t = 0; t < 200; ++t) {
    TorusPoint c = rand_point(rng, 2);
    // move along the leaf by a random in-leaf offset
    double s = std::uniform_real_distribution<double>(-0.2, 0.2)(rng);
    Vec dir{1.0 / std::sqrt(5.0), 2.0 / std::sqrt(5.0)};
    TorusPoint y = wrap(add(c.coords, scale(dir, s)));
    PlaqueDescriptor p{c, &fol, 0.25};
    if (membership_in_plaque(p, y, 1e-9)) CHECK(fol.same_leaf(c, y, 1e-7));
  }
}

TEST_CASE("transverse coordinates are constant on leaves") {
  LinearFoliation fol(3, {{0, 0, 1}});
  TorusPoint a = wrap({0.3, 0.7, 0.1});
  TorusPoint b = wrap({0.3, 0.7, 0.8});
  Vec ca = fol.transverse_coords(a), cb = fol.transverse_coords(b);
  REQUIRE(ca.size() == 2);
  for (size_t i = 0; i < ca.size(); ++i)
    CHECK(circle_dist(ca[i], cb[i]) < 1e-12);
  CHECK(fol.same_leaf(a, b, 1e-9));
  CHECK(fol.transverse_dist(a, b) < 1e-12);
}

TEST_SUITE_END();
