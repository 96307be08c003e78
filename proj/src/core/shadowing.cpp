#include "shadowing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace folia {

namespace {

struct LayeredGraph {
  std::vector<std::vector<size_t>> layers;            // cell indices per layer
  std::vector<std::vector<TorusPoint>> centers;       // matching centers
  std::vector<std::vector<double>> offsets;           // d(center, x_k)
  std::vector<std::vector<std::vector<int>>> edges;   // edges[k][i] -> next-layer slots
};

LayeredGraph build_layers(const ShadowProblem& p, ShadowSearchStats* stats) {
  const Trajectory& t = p.target;
  const Grid& grid = *p.grid;
  LayeredGraph g;
  size_t n = t.points.size();
  g.layers.resize(n);
  g.centers.resize(n);
  g.offsets.resize(n);
  for (size_t k = 0; k < n; ++k) {
    auto cells = grid.cells_within(t.points[k], p.eps);
    size_t snap = grid.snap(t.points[k]);
    if (std::find(cells.begin(), cells.end(), snap) == cells.end())
      cells.push_back(snap);
    std::sort(cells.begin(), cells.end());
    g.layers[k] = std::move(cells);
    for (size_t c : g.layers[k]) {
      TorusPoint center = grid.cell_center(c);
      g.offsets[k].push_back(torus_dist(center, t.points[k]));
      g.centers[k].push_back(center);
    }
  }

  double matrix_stretch = operator_norm(to_eigen(p.map->matrix()));
  double slack = grid.cell_diameter() * (1.0 + matrix_stretch + p.map->perturbation_lipschitz());

  g.edges.resize(n > 0 ? n - 1 : 0);
  for (size_t k = 0; k + 1 < n; ++k) {
    g.edges[k].resize(g.layers[k].size());
    std::vector<TorusPoint> images(g.layers[k].size());
    for (size_t i = 0; i < g.layers[k].size(); ++i)
      images[i] = p.map->apply(g.centers[k][i]);
    for (size_t i = 0; i < g.layers[k].size(); ++i) {
      for (size_t j = 0; j < g.layers[k + 1].size(); ++j) {
        PlaqueDescriptor plaque{g.centers[k + 1][j], p.foliation, p.eps};
        if (dist_to_plaque(plaque, images[i]) <= p.eps + slack)
          g.edges[k][i].push_back((int)j);
      }
      if (stats) stats->edges += g.edges[k][i].size();
    }
  }
  if (stats) {
    stats->layers = n;
    for (const auto& l : g.layers) stats->states += l.size();
  }
  return g;
}

// Minimax-offset DP from layer 0 forward. value[k][i] = best achievable
// maximum offset over a path from layer 0 to slot i of layer k.
std::vector<std::vector<double>> forward_dp(const LayeredGraph& g,
                                            std::vector<std::vector<int>>* pred) {
  size_t n = g.layers.size();
  std::vector<std::vector<double>> value(n);
  pred->assign(n, {});
  constexpr double kInf = std::numeric_limits<double>::infinity();
  value[0] = g.offsets[0];
  (*pred)[0].assign(g.layers[0].size(), -1);
  for (size_t k = 1; k < n; ++k) {
    value[k].assign(g.layers[k].size(), kInf);
    (*pred)[k].assign(g.layers[k].size(), -1);
    for (size_t i = 0; i < g.layers[k - 1].size(); ++i) {
      if (!std::isfinite(value[k - 1][i])) continue;
      for (int j : g.edges[k - 1][i]) {
        double v = std::max(value[k - 1][i], g.offsets[k][(size_t)j]);
        if (v < value[k][(size_t)j] - 1e-15 ||
            (v <= value[k][(size_t)j] + 1e-15 &&
             ((*pred)[k][(size_t)j] < 0 || (int)i < (*pred)[k][(size_t)j]))) {
          if (v <= value[k][(size_t)j] + 1e-15 && (*pred)[k][(size_t)j] >= 0 &&
              v >= value[k][(size_t)j] - 1e-15) {
            // tie: keep the lexicographically smaller predecessor
            (*pred)[k][(size_t)j] = std::min((*pred)[k][(size_t)j], (int)i);
          } else {
            value[k][(size_t)j] = v;
            (*pred)[k][(size_t)j] = (int)i;
          }
        }
      }
    }
  }
  return value;
}

std::vector<std::vector<double>> backward_dp(const LayeredGraph& g,
                                             std::vector<std::vector<int>>* succ) {
  size_t n = g.layers.size();
  std::vector<std::vector<double>> value(n);
  succ->assign(n, {});
  constexpr double kInf = std::numeric_limits<double>::infinity();
  value[n - 1] = g.offsets[n - 1];
  (*succ)[n - 1].assign(g.layers[n - 1].size(), -1);
  for (size_t k = n - 1; k-- > 0;) {
    value[k].assign(g.layers[k].size(), kInf);
    (*succ)[k].assign(g.layers[k].size(), -1);
    for (size_t i = 0; i < g.layers[k].size(); ++i) {
      for (int j : g.edges[k][i]) {
        if (!std::isfinite(value[k + 1][(size_t)j])) continue;
        double v = std::max(value[k + 1][(size_t)j], g.offsets[k][i]);
        if (v < value[k][i] - 1e-15 ||
            (v <= value[k][i] + 1e-15 && ((*succ)[k][i] < 0 || j < (*succ)[k][i]))) {
          if (v <= value[k][i] + 1e-15 && (*succ)[k][i] >= 0 && v >= value[k][i] - 1e-15)
            (*succ)[k][i] = std::min((*succ)[k][i], j);
          else {
            value[k][i] = v;
            (*succ)[k][i] = j;
          }
        }
      }
    }
  }
  return value;
}

Vec project_to_ball(const Vec& candidate, const TorusPoint& center, double radius) {
  TorusPoint c = wrap(candidate);
  Vec disp = torus_displacement(center, c);
  double dn = norm(disp);
  if (dn <= radius) return c.coords;
  return wrap(add(center.coords, scale(disp, radius / dn))).coords;
}

// Orbit-form residual of the step y_prev -> y: how far f(y_prev) is from the
// eps-plaque of y (membership defect, so 0 when inside).
double step_residual(const ShadowProblem& p, const TorusPoint& y_prev, const TorusPoint& y) {
  PlaqueDescriptor plaque{y, p.foliation, p.eps};
  return plaque_membership_defect(plaque, p.map->apply(y_prev), p.leaf_tol);
}

// Gauss-Newton sweeps over the trajectory, each point constrained to the
// eps-ball around its target point.
void refine_path(const ShadowProblem& p, std::vector<TorusPoint>& y) {
  const size_t n = y.size();
  const int d = p.map->dim();
  const double h = 1e-7;
  auto local_residuals = [&](size_t k, const TorusPoint& cand) {
    std::vector<double> r;
    if (k > 0) r.push_back(step_residual(p, y[k - 1], cand));
    if (k + 1 < n) r.push_back(step_residual(p, cand, y[k + 1]));
    return r;
  };
  double prev_total = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < p.refine_sweeps; ++sweep) {
    for (size_t k = 0; k < n; ++k) {
      std::vector<double> r0 = local_residuals(k, y[k]);
      double f0 = 0.0;
      for (double r : r0) f0 += r * r;
      if (f0 <= 1e-28) continue;
      // numerical Jacobian
      Eigen::MatrixXd jac((int)r0.size(), d);
      for (int c = 0; c < d; ++c) {
        Vec bumped = y[k].coords;
        bumped[c] += h;
        std::vector<double> rb = local_residuals(k, wrap(bumped));
        for (size_t ri = 0; ri < r0.size(); ++ri)
          jac((int)ri, c) = (rb[ri] - r0[ri]) / h;
      }
      Eigen::VectorXd rv((int)r0.size());
      for (size_t ri = 0; ri < r0.size(); ++ri) rv((int)ri) = r0[ri];
      Eigen::MatrixXd jtj = jac.transpose() * jac + 1e-12 * Eigen::MatrixXd::Identity(d, d);
      Eigen::VectorXd step = jtj.ldlt().solve(jac.transpose() * rv);
      double scale_factor = 1.0;
      for (int tries = 0; tries < 8; ++tries, scale_factor *= 0.5) {
        Vec cand = y[k].coords;
        for (int c = 0; c < d; ++c) cand[c] -= scale_factor * step(c);
        cand = project_to_ball(cand, p.target.points[k], p.eps);
        TorusPoint cp = wrap(cand);
        std::vector<double> rn = local_residuals(k, cp);
        double fn = 0.0;
        for (double r : rn) fn += r * r;
        if (fn < f0) {
          y[k] = cp;
          break;
        }
      }
    }
    double total = 0.0;
    for (size_t k = 1; k < n; ++k) {
      double r = step_residual(p, y[k - 1], y[k]);
      total += r * r;
    }
    if (total <= 1e-26 || prev_total - total <= 1e-18) break;
    prev_total = total;
  }
}

ShadowSolution assemble_solution(const ShadowProblem& p, std::vector<TorusPoint> path) {
  refine_path(p, path);
  ShadowSolution sol;
  sol.trajectory.points = std::move(path);
  sol.trajectory.index_offset = p.target.index_offset;
  sol.resolution_limited = p.eps <= p.grid->cell_diameter();
  for (size_t k = 0; k + 1 < sol.trajectory.points.size(); ++k) {
    PlaqueDescriptor plaque{sol.trajectory.points[k + 1], p.foliation, p.eps};
    sol.step_defects.push_back(dist_to_plaque(plaque, p.map->apply(sol.trajectory.points[k])));
  }
  for (size_t k = 0; k < sol.trajectory.points.size(); ++k)
    sol.max_offset = std::max(sol.max_offset,
                              torus_dist(sol.trajectory.points[k], p.target.points[k]));
  return sol;
}

void validate_problem(const ShadowProblem& p) {
  if (!p.map || !p.foliation || !p.grid)
    fail(ErrorCode::InvalidInput, "ShadowProblem: missing map/foliation/grid");
  if (p.target.points.size() < 2)
    fail(ErrorCode::InvalidInput, "ShadowProblem: target needs >= 2 points");
  if (p.eps <= 0) fail(ErrorCode::InvalidInput, "ShadowProblem: eps must be positive");
}

}  // namespace

std::optional<ShadowSolution> finite_shadow(const ShadowProblem& p,
                                            ShadowSearchStats* stats) {
  validate_problem(p);

  // Fast path: a target that already satisfies the step condition (an exact
  // orbit, or any chain under the one-leaf foliation) is its own shadow.
  {
    bool self_valid = true;
    ShadowSolution sol;
    for (size_t k = 0; k + 1 < p.target.points.size() && self_valid; ++k) {
      PlaqueDescriptor plaque{p.target.points[k + 1], p.foliation, p.eps};
      TorusPoint image = p.map->apply(p.target.points[k]);
      if (!membership_in_plaque(plaque, image, p.leaf_tol)) self_valid = false;
      sol.step_defects.push_back(dist_to_plaque(plaque, image));
    }
    if (self_valid) {
      sol.trajectory = p.target;
      sol.max_offset = 0.0;
      sol.resolution_limited = p.eps <= p.grid->cell_diameter();
      return sol;
    }
  }

  LayeredGraph g = build_layers(p, stats);
  std::vector<std::vector<int>> pred;
  auto value = forward_dp(g, &pred);
  size_t last = g.layers.size() - 1;
  int best = -1;
  for (size_t i = 0; i < g.layers[last].size(); ++i) {
    if (!std::isfinite(value[last][i])) continue;
    if (best < 0 || value[last][i] < value[last][(size_t)best] - 1e-15) best = (int)i;
  }
  if (best < 0) return std::nullopt;
  std::vector<TorusPoint> path(g.layers.size());
  int slot = best;
  for (size_t k = last + 1; k-- > 0;) {
    path[k] = g.centers[k][(size_t)slot];
    slot = pred[k][(size_t)slot];
  }
  return assemble_solution(p, std::move(path));
}

std::vector<ShadowSolution> finite_shadow_all_anchors(const ShadowProblem& p) {
  validate_problem(p);
  LayeredGraph g = build_layers(p, nullptr);
  std::vector<std::vector<int>> pred, succ;
  auto fwd = forward_dp(g, &pred);
  auto bwd = backward_dp(g, &succ);
  size_t anchor = (size_t)p.target.index_offset;
  std::vector<ShadowSolution> out;
  for (size_t i = 0; i < g.layers[anchor].size(); ++i) {
    if (!std::isfinite(fwd[anchor][i]) || !std::isfinite(bwd[anchor][i])) continue;
    std::vector<TorusPoint> path(g.layers.size());
    int slot = (int)i;
    for (size_t k = anchor + 1; k-- > 0;) {
      path[k] = g.centers[k][(size_t)slot];
      slot = pred[k][(size_t)slot];
    }
    slot = (int)i;
    for (size_t k = anchor; k + 1 < g.layers.size(); ++k) {
      slot = succ[k][(size_t)slot];
      path[k + 1] = g.centers[k + 1][(size_t)slot];
    }
    out.push_back(assemble_solution(p, std::move(path)));
  }
  return out;
}

Trajectory refine_loop(const ToralMap& f, const LinearFoliation& fol,
                       const Trajectory& loop, double plaque_radius,
                       int sweeps, double leaf_tol) {
  Trajectory out = loop;
  std::vector<TorusPoint>& y = out.points;
  const size_t n = y.size();
  if (n < 3) return out;
  const int d = f.dim();
  const double h = 1e-7;
  auto step_res = [&](const TorusPoint& a, const TorusPoint& b) {
    PlaqueDescriptor plaque{b, &fol, plaque_radius};
    return plaque_membership_defect(plaque, f.apply(a), leaf_tol);
  };
  auto local = [&](size_t k, const TorusPoint& cand) {
    return std::array<double, 2>{step_res(y[k - 1], cand), step_res(cand, y[k + 1])};
  };
  double prev_total = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (size_t k = 1; k + 1 < n; ++k) {
      auto r0 = local(k, y[k]);
      double f0 = r0[0] * r0[0] + r0[1] * r0[1];
      if (f0 <= 1e-28) continue;
      Eigen::MatrixXd jac(2, d);
      for (int c = 0; c < d; ++c) {
        Vec bumped = y[k].coords;
        bumped[c] += h;
        auto rb = local(k, wrap(bumped));
        jac(0, c) = (rb[0] - r0[0]) / h;
        jac(1, c) = (rb[1] - r0[1]) / h;
      }
      Eigen::Vector2d rv(r0[0], r0[1]);
      Eigen::MatrixXd jtj = jac.transpose() * jac + 1e-12 * Eigen::MatrixXd::Identity(d, d);
      Eigen::VectorXd step = jtj.ldlt().solve(jac.transpose() * rv);
      double scale_factor = 1.0;
      for (int tries = 0; tries < 8; ++tries, scale_factor *= 0.5) {
        Vec cand = y[k].coords;
        for (int c = 0; c < d; ++c) cand[c] -= scale_factor * step(c);
        TorusPoint cp = wrap(cand);
        auto rn = local(k, cp);
        if (rn[0] * rn[0] + rn[1] * rn[1] < f0) {
          y[k] = cp;
          break;
        }
      }
    }
    double total = 0.0;
    for (size_t k = 0; k + 1 < n; ++k) {
      double r = step_res(y[k], y[k + 1]);
      total += r * r;
    }
    if (total <= 1e-24 || prev_total - total <= 1e-16) break;
    prev_total = total;
  }
  return out;
}

std::optional<ShadowSolution> shadow_periodized(const ToralMap& f,
                                                const LinearFoliation& fol,
                                                const Trajectory& loop, double eps,
                                                long long n, const Grid& grid,
                                                double leaf_tol) {
  if (loop.points.size() < 2)
    fail(ErrorCode::InvalidInput, "shadow_periodized: loop needs >= 2 points");
  if (torus_dist(loop.points.front(), loop.points.back()) > kGeomTol)
    fail(ErrorCode::InvalidInput, "shadow_periodized: loop must return to its start");
  long long r = (long long)loop.points.size() - 1;
  if (n < r || n % r != 0)
    fail(ErrorCode::InvalidInput, "shadow_periodized: horizon must be a positive multiple of the loop length");
  ShadowProblem p;
  p.map = &f;
  p.foliation = &fol;
  p.eps = eps;
  p.grid = &grid;
  p.leaf_tol = leaf_tol;
  p.target.index_offset = n;
  p.target.points.resize((size_t)(2 * n + 1));
  for (long long k = -n; k <= n; ++k) {
    long long l = ((k % r) + r) % r;
    p.target.points[(size_t)(k + n)] = loop.points[(size_t)l];
  }
  return finite_shadow(p);
}

Trajectory exact_shadow_hyperbolic(const IntMat& matrix, const Trajectory& pseudo) {
  if (pseudo.points.size() < 2)
    fail(ErrorCode::InvalidInput, "exact_shadow_hyperbolic: need >= 2 points");
  const int d = (int)matrix.size();
  Eigen::MatrixXd m = to_eigen(matrix);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXcd eig = es.eigenvalues();
  for (int i = 0; i < d; ++i)
    if (std::fabs(std::abs(eig(i)) - 1.0) < 1e-9)
      fail(ErrorCode::Unsupported, "exact_shadow_hyperbolic: matrix has a modulus-one eigenvalue");
  Eigen::MatrixXcd p = es.eigenvectors();
  Eigen::MatrixXcd p_inv = p.inverse();

  const size_t n = pseudo.points.size();
  // Per-step errors in eigencoordinates.
  std::vector<Eigen::VectorXcd> err(n - 1);
  for (size_t k = 0; k + 1 < n; ++k) {
    TorusPoint image = wrap(apply_int_mat(matrix, pseudo.points[k].coords));
    Vec e = torus_displacement(image, pseudo.points[k + 1]);
    Eigen::VectorXd ev(d);
    for (int i = 0; i < d; ++i) ev(i) = e[i];
    err[k] = p_inv * ev.cast<std::complex<double>>();
  }

  std::vector<Eigen::VectorXcd> u(n, Eigen::VectorXcd::Zero(d));
  for (int i = 0; i < d; ++i) {
    std::complex<double> lam = eig(i);
    if (std::abs(lam) < 1.0) {
      // forward: u_{k+1} = lam u_k - e_k, u_0 = 0
      for (size_t k = 0; k + 1 < n; ++k) u[k + 1](i) = lam * u[k](i) - err[k](i);
    } else {
      // backward: u_k = (u_{k+1} + e_k) / lam, u_{n-1} = 0
      for (size_t k = n - 1; k-- > 0;) u[k](i) = (u[k + 1](i) + err[k](i)) / lam;
    }
  }

  Trajectory out;
  out.index_offset = pseudo.index_offset;
  out.points.resize(n);
  for (size_t k = 0; k < n; ++k) {
    Eigen::VectorXcd corr = p * u[k];
    Vec y = pseudo.points[k].coords;
    for (int i = 0; i < d; ++i) y[i] += corr(i).real();
    out.points[k] = wrap(y);
  }
  return out;
}

}  // namespace folia
