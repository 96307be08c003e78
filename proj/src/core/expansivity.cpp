#include "expansivity.hpp"

#include <algorithm>
#include <cmath>

namespace folia {

namespace {

// Follows both orbits forward and backward, bailing out as soon as the pair
// separates beyond e. Fills the trajectories only on success.
bool stays_close(const ToralMap& f, const TorusPoint& x0, const TorusPoint& y0,
                 double e, long long n, Trajectory* tx, Trajectory* ty,
                 double* max_dist) {
  TorusPoint xf = x0, yf = y0, xb = x0, yb = y0;
  std::vector<TorusPoint> fx{x0}, fy{y0}, bx, by;
  double worst = torus_dist(x0, y0);
  for (long long k = 1; k <= n; ++k) {
    xf = f.apply(xf);
    yf = f.apply(yf);
    double d = torus_dist(xf, yf);
    if (d > e) return false;
    worst = std::max(worst, d);
    fx.push_back(xf);
    fy.push_back(yf);
    xb = f.apply_inverse(xb);
    yb = f.apply_inverse(yb);
    d = torus_dist(xb, yb);
    if (d > e) return false;
    worst = std::max(worst, d);
    bx.push_back(xb);
    by.push_back(yb);
  }
  tx->points.assign(bx.rbegin(), bx.rend());
  tx->points.insert(tx->points.end(), fx.begin(), fx.end());
  ty->points.assign(by.rbegin(), by.rend());
  ty->points.insert(ty->points.end(), fy.begin(), fy.end());
  tx->index_offset = ty->index_offset = n;
  *max_dist = worst;
  return true;
}

}  // namespace

ExpansivitySearchResult expansivity_violation_search(
    const ToralMap& f, const LinearFoliation& fol, double e, double eps0,
    double rho, long long horizon, const Grid& grid, size_t pair_budget) {
  if (e <= 0 || eps0 <= 0 || rho <= 0)
    fail(ErrorCode::InvalidInput, "expansivity_violation_search: e, eps0, rho must be positive");
  if (horizon < 1)
    fail(ErrorCode::InvalidInput, "expansivity_violation_search: horizon < 1");

  ExpansivitySearchResult res;
  res.resolution = grid.resolution();
  res.horizon = horizon;

  for (size_t a = 0; a < grid.cell_count(); ++a) {
    TorusPoint x0 = grid.cell_center(a);
    PlaqueDescriptor plaque{x0, &fol, eps0};
    for (size_t b : grid.cells_within(x0, e)) {
      if (b <= a) continue;  // unordered pairs
      TorusPoint y0 = grid.cell_center(b);
      if (dist_to_plaque(plaque, y0) <= rho) continue;
      ++res.candidate_pairs;
      if (res.explored_pairs >= pair_budget) {
        res.timed_out = true;
        return res;
      }
      ++res.explored_pairs;
      ExpansivityWitness w;
      if (!stays_close(f, x0, y0, e, horizon, &w.x_orbit, &w.y_orbit,
                       &w.max_pair_dist))
        continue;
      w.plaque_defect = dist_to_plaque(plaque, y0);
      res.witness = std::move(w);
      return res;
    }
  }
  return res;
}

std::optional<ExpansivityCertificate> uniform_expansivity_estimate(
    const ToralMap& f, const LinearFoliation& fol, double eps0, double rho,
    long long horizon_max, const Grid& grid, double e_init, size_t pair_budget) {
  if (rho <= 0) fail(ErrorCode::InvalidInput, "uniform_expansivity_estimate: rho <= 0");
  double e = e_init > 0 ? e_init : 2.0 * eps0;
  const double floor = std::max(2.0 * rho, 2.0 * grid.cell_diameter());
  size_t budget_left = pair_budget;
  while (e > floor) {
    long long horizon = 4;
    while (horizon <= horizon_max) {
      ExpansivitySearchResult r = expansivity_violation_search(
          f, fol, e, eps0, rho, horizon, grid, budget_left);
      if (budget_left != SIZE_MAX)
        budget_left -= std::min(budget_left, r.explored_pairs);
      if (r.timed_out) return std::nullopt;
      if (!r.witness) {
        ExpansivityCertificate cert;
        cert.e = e;
        cert.horizon = horizon;
        cert.explored_pairs = r.explored_pairs;
        return cert;
      }
      horizon *= 2;
    }
    e *= 0.5;
  }
  return std::nullopt;
}

}  // namespace folia
