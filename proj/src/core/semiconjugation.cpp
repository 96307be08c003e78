#include "semiconjugation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace folia {

SetValuedMap construct_semiconjugation(const ToralMap& f, const LinearFoliation& fol,
                                       const ToralMap& g, double eps_prime,
                                       long long horizon, const Grid& grid,
                                       const std::vector<TorusPoint>& sample_points) {
  if (eps_prime <= 0) fail(ErrorCode::InvalidInput, "construct_semiconjugation: eps' <= 0");
  if (horizon < 1) fail(ErrorCode::InvalidInput, "construct_semiconjugation: horizon < 1");
  if (sample_points.empty())
    fail(ErrorCode::InvalidInput, "construct_semiconjugation: no sample points");

  SetValuedMap h;
  h.eps_prime = eps_prime;
  h.horizon = horizon;
  h.dedup_radius = grid.cell_diameter();

  for (const TorusPoint& x : sample_points) {
    ShadowProblem p;
    p.map = &f;
    p.foliation = &fol;
    p.target = orbit_segment(g, x, horizon);
    p.eps = eps_prime;
    p.grid = &grid;
    std::vector<ShadowSolution> sols = finite_shadow_all_anchors(p);
    SemiSample s;
    s.x = x;
    for (ShadowSolution& sol : sols) {
      TorusPoint y0 = sol.trajectory.at_index(0);
      bool dup = false;
      for (const ImagePoint& ip : s.image)
        if (torus_dist(ip.y0, y0) <= h.dedup_radius) {
          dup = true;
          break;
        }
      if (!dup) s.image.push_back({y0, std::move(sol.trajectory)});
    }
    if (s.image.empty())
      fail(ErrorCode::EmptyImage,
           "construct_semiconjugation: no shadow anchor found for a sample "
           "(grid too coarse for eps')");
    h.samples.push_back(std::move(s));
  }

  // Successor links: the sample holding g(x), matched exactly up to geometry
  // tolerance, so the step-inclusion clause is checkable without resampling.
  for (auto& s : h.samples) {
    TorusPoint gx = g.apply(s.x);
    for (size_t j = 0; j < h.samples.size(); ++j)
      if (torus_dist(h.samples[j].x, gx) <= 1e-7) {
        s.next_index = (long long)j;
        break;
      }
  }
  return h;
}

StabilityReport verify_stability_contract(const SetValuedMap& h, const ToralMap& f,
                                          const LinearFoliation& fol, double eps,
                                          double tol) {
  if (eps <= 0) fail(ErrorCode::InvalidInput, "verify_stability_contract: eps <= 0");
  StabilityReport r;
  bool any_step = false;
  for (const SemiSample& s : h.samples) {
    for (const ImagePoint& ip : s.image)
      r.c0_bound = std::max(r.c0_bound, torus_dist(ip.y0, s.x));
    if (s.next_index < 0) continue;
    any_step = true;
    const SemiSample& next = h.samples[(size_t)s.next_index];
    for (const ImagePoint& ip : s.image) {
      TorusPoint fy = f.apply(ip.y0);
      double best = std::numeric_limits<double>::infinity();
      for (const ImagePoint& jp : next.image) {
        PlaqueDescriptor plaque{jp.y0, &fol, eps};
        best = std::min(best, dist_to_plaque(plaque, fy));
        if (best <= kGeomTol) break;
      }
      r.step_inclusion_defect = std::max(r.step_inclusion_defect, best);
      ++r.step_pairs_checked;
    }
  }
  if (!any_step)
    fail(ErrorCode::MissingSample,
         "verify_stability_contract: no sample has its g-image sampled; "
         "build H on a forward-closed sample set");
  r.samples_checked = h.samples.size();
  r.valuation_defect = verify_valuation(h, fol, eps);
  r.pass = r.c0_bound <= eps + tol && r.step_inclusion_defect <= tol &&
           r.valuation_defect <= tol;
  return r;
}

double verify_valuation(const SetValuedMap& h, const LinearFoliation& fol,
                        double eps0, double leaf_tol) {
  double worst = 0.0;
  for (const SemiSample& s : h.samples)
    for (const ImagePoint& a : s.image)
      for (const ImagePoint& b : s.image) {
        if (&a == &b) continue;
        PlaqueDescriptor plaque{a.y0, &fol, eps0};
        worst = std::max(worst, plaque_membership_defect(plaque, b.y0, leaf_tol));
      }
  return worst;
}

std::vector<ContinuityRow> verify_foliated_continuity(
    const SetValuedMap& h, const LinearFoliation& fol, double eps0, double rho,
    const std::vector<double>& delta_sweep, double contract_delta, double tol) {
  std::vector<ContinuityRow> table;
  for (double delta : delta_sweep) {
    ContinuityRow row;
    row.delta = delta;
    row.in_contract = delta <= contract_delta;
    for (size_t i = 0; i < h.samples.size(); ++i)
      for (size_t j = i + 1; j < h.samples.size(); ++j) {
        if (torus_dist(h.samples[i].x, h.samples[j].x) > delta) continue;
        ++row.pair_count;
        for (const ImagePoint& a : h.samples[i].image)
          for (const ImagePoint& b : h.samples[j].image) {
            PlaqueDescriptor pb{b.y0, &fol, eps0};
            PlaqueDescriptor pa{a.y0, &fol, eps0};
            row.observed_rho = std::max(row.observed_rho, dist_to_plaque(pb, a.y0));
            row.observed_rho = std::max(row.observed_rho, dist_to_plaque(pa, b.y0));
          }
      }
    row.pass = !row.in_contract || row.observed_rho <= rho + tol;
    table.push_back(row);
  }
  return table;
}

}  // namespace folia
