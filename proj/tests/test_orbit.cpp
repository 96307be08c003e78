#include <doctest.h>

#include <algorithm>
#include <random>

#include "core/orbit.hpp"

using namespace folia;

namespace {

const IntMat kCat{{2, 1}, {1, 1}};

TorusPoint rand_point(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec v(dim);
  for (double& c : v) c = u(rng);
  return wrap(v);
}

Trajectory noisy_orbit(const ToralMap& f, std::mt19937_64& rng, int len,
                       double delta) {
  std::uniform_real_distribution<double> u(-delta / 2.0, delta / 2.0);
  Trajectory t;
  t.points.push_back(rand_point(rng, f.dim()));
  for (int k = 1; k < len; ++k) {
    Vec next = f.apply(t.points.back()).coords;
    for (double& c : next) c += u(rng);
    t.points.push_back(wrap(next));
  }
  return t;
}

}  // namespace

TEST_SUITE_BEGIN("orbit");

TEST_CASE("orbit segments are exact pseudo-orbits") {
  ToralMap f(kCat, {{{1, 1}, {0.01, 0.02}, true}});
  std::mt19937_64 rng(61);
  Trajectory seg = orbit_segment(f, rand_point(rng, 2), 10);
  CHECK(seg.length() == 21);
  CHECK(seg.index_offset == 10);
  CHECK(torus_dist(seg.at_index(0), seg.points[10]) == 0.0);
  CHECK(torus_dist(f.apply(seg.at_index(3)), seg.at_index(4)) < 1e-12);
  CHECK(torus_dist(f.apply_inverse(seg.at_index(-3)), seg.at_index(-4)) < 1e-12);

  ChainReport r = is_pseudo_orbit(f, seg, 1e-9);
  CHECK(r.valid);
  CHECK(r.worst_defect < 1e-12);
}

TEST_CASE("pseudo-orbit verifier reports the worst step") {
  ToralMap f(kCat);
  Trajectory t;
  t.points = {wrap({0.1, 0.1}), wrap({0.32, 0.2}), wrap({0.84, 0.52})};
  // step 0 defect: f(0.1,0.1) = (0.3,0.2), distance 0.02
  ChainReport r = is_pseudo_orbit(f, t, 0.05);
  CHECK(r.valid);
  CHECK(r.worst_defect == doctest::Approx(0.02).epsilon(1e-9));
  r = is_pseudo_orbit(f, t, 0.01);
  CHECK(!r.valid);
  CHECK(r.worst_index == 0);
}

TEST_CASE("implication lattice on random trajectories") {
  ToralMap f(kCat, {{{0, 1}, {0.01, 0.0}, false}});
  LinearFoliation fol(2, {{1, 1}});
  std::mt19937_64 rng(67);
  const double eps = 0.05;
  for (int t = 0; t < 200; ++t) {
    bool exact = (t % 2 == 0);
    Trajectory traj = exact ? orbit_segment(f, rand_point(rng, 2), 6)
                            : noisy_orbit(f, rng, 12, 0.02);
    ChainReport orb = is_foliated_orbit(f, fol, traj, eps, 1e-9);
    ChainReport chain = is_foliated_chain(f, fol, traj, eps, 1e-9);
    ChainReport pseudo = is_pseudo_orbit(f, traj, eps);
    if (exact) {
      // exact orbits satisfy every condition at every radius
      CHECK(orb.valid);
      CHECK(is_foliated_orbit(f, fol, traj, 1e-6, 1e-9).valid);
    }
    // orbit condition implies chain condition at the same radius
    if (orb.valid) CHECK(chain.valid);
    // delta-pseudo-orbits are (F, delta)-chains
    if (pseudo.valid) CHECK(is_foliated_chain(f, fol, traj, eps, 1e-9).valid);
    CHECK(chain.worst_defect <= orb.worst_defect + 1e-12);
  }
}

TEST_CASE("point foliation collapses to the classical notions") {
  ToralMap f(kCat, {{{1, 0}, {0.0, 0.015}, true}});
  LinearFoliation pts(FoliationKind::Points, 2);
  std::mt19937_64 rng(71);
  for (int t = 0; t < 100; ++t) {
    Trajectory traj = noisy_orbit(f, rng, 10, 0.03);
    for (double delta : {0.005, 0.02, 0.05}) {
      ChainReport classical = is_pseudo_orbit(f, traj, delta);
      ChainReport chain = is_foliated_chain(f, pts, traj, delta, 1e-9);
      CHECK(classical.valid == chain.valid);
      CHECK(classical.worst_defect == doctest::Approx(chain.worst_defect).epsilon(1e-9));
    }
  }
}

TEST_CASE("one-leaf foliation collapses orbit condition to pseudo-orbit") {
  ToralMap f(IntMat{{1, 0}, {0, 1}}, {{{0, 0}, {0.3, 0.0}, false}});
  LinearFoliation whole(FoliationKind::WholeManifold, 2);
  std::mt19937_64 rng(73);
  for (int t = 0; t < 100; ++t) {
    Trajectory traj = noisy_orbit(f, rng, 10, 0.08);
    for (double eps : {0.01, 0.05, 0.2}) {
      ChainReport a = is_foliated_orbit(f, whole, traj, eps, 1e-9);
      ChainReport b = is_pseudo_orbit(f, traj, eps);
      CHECK(a.valid == b.valid);
      // one leaf: the membership defect is the distance excess over eps
      double excess = std::max(0.0, b.worst_defect - eps);
      CHECK(a.worst_defect == doctest::Approx(excess).epsilon(1e-9));
    }
  }
}

TEST_CASE("length-one trajectories are rejected by the verifiers") {
  ToralMap f(kCat);
  Trajectory t;
  t.points = {wrap({0.5, 0.5})};
  CHECK_THROWS_AS(is_pseudo_orbit(f, t, 0.1), Error);
}

TEST_SUITE_END();
