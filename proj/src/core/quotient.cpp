#include "quotient.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "shadowing.hpp"

namespace folia {

namespace {

TorusPoint project(const LinearFoliation& fol, const TorusPoint& x) {
  return wrap(fol.quotient_project(x));
}

// Transverse distortion bound: |pi(x) - pi(y)| <= ||W|| d(x, y).
double projection_norm(const LinearFoliation& fol) {
  const IntMat& w = fol.transverse_basis();
  if (w.empty()) return 1.0;
  return operator_norm(to_eigen(w));
}

}  // namespace

QuotientSystem build_quotient_system(const ToralMap& f, const LinearFoliation& fol,
                                     int samples_per_axis) {
  if (fol.kind() == FoliationKind::WholeManifold)
    fail(ErrorCode::Unsupported, "build_quotient_system: one-leaf quotient is a point");
  QuotientSystem qs{fol, induced_quotient_map(f, fol), 0.0};
  int n = std::max(2, samples_per_axis);
  Grid probe(f.dim(), n);
  for (size_t c = 0; c < probe.cell_count(); ++c) {
    TorusPoint x = probe.cell_center(c);
    TorusPoint lhs = qs.quotient_map.apply(project(fol, x));
    TorusPoint rhs = project(fol, f.apply(x));
    qs.commute_defect = std::max(qs.commute_defect, torus_dist(lhs, rhs));
  }
  return qs;
}

TorusPoint quotient_point(const QuotientSystem& qs, const TorusPoint& x) {
  return project(qs.base_foliation, x);
}

TransferReport transfer_shadowing_check(const QuotientSystem& qs, const ToralMap& f,
                                        double delta, double eps, const Grid& grid,
                                        int trials, int length, uint64_t seed) {
  if (delta <= 0 || eps <= 0)
    fail(ErrorCode::InvalidInput, "transfer_shadowing_check: delta, eps must be positive");
  if (trials < 1 || length < 2)
    fail(ErrorCode::InvalidInput, "transfer_shadowing_check: trials >= 1, length >= 2");
  const LinearFoliation& fol = qs.base_foliation;
  const double distortion = projection_norm(fol);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> noise(-delta, delta);

  TransferReport report;
  for (int t = 0; t < trials; ++t) {
    Trajectory target;
    Vec x0(f.dim());
    for (double& c : x0) c = unit(rng);
    target.points.push_back(wrap(x0));
    for (int k = 1; k < length; ++k) {
      Vec nx = f.apply(target.points.back()).coords;
      // rejection-sample the noise ball so the step defect stays <= delta
      Vec off(f.dim());
      while (true) {
        for (double& c : off) c = noise(rng);
        if (norm(off) <= delta) break;
      }
      target.points.push_back(wrap(add(nx, off)));
    }

    ShadowProblem p;
    p.map = &f;
    p.foliation = &fol;
    p.target = target;
    p.eps = eps;
    p.grid = &grid;
    TransferTrial trial;
    auto sol = finite_shadow(p);
    if (!sol) {
      ++report.shadow_failures;
      report.trials.push_back(trial);
      continue;
    }
    trial.shadow_found = true;

    Trajectory proj_shadow, proj_target;
    for (const auto& pt : sol->trajectory.points)
      proj_shadow.points.push_back(quotient_point(qs, pt));
    for (const auto& pt : target.points)
      proj_target.points.push_back(quotient_point(qs, pt));
    ChainReport down = is_pseudo_orbit(qs.quotient_map, proj_shadow,
                                       distortion * eps);
    trial.downstairs_step_defect = down.worst_defect;
    for (size_t k = 0; k < proj_shadow.points.size(); ++k)
      trial.downstairs_offset = std::max(
          trial.downstairs_offset,
          torus_dist(proj_shadow.points[k], proj_target.points[k]));
    report.worst_step_defect = std::max(report.worst_step_defect,
                                        trial.downstairs_step_defect);
    report.worst_offset = std::max(report.worst_offset, trial.downstairs_offset);
    report.trials.push_back(trial);
  }
  report.pass = report.worst_offset <= distortion * eps + kGeomTol &&
                report.worst_step_defect <= distortion * eps + kGeomTol &&
                report.shadow_failures < report.trials.size();
  return report;
}

}  // namespace folia
