#include "chain_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace folia {

ChainGraph::ChainGraph(const ToralMap& f, const LinearFoliation& fol, double delta,
                       const Grid& grid)
    : map_(&f), foliation_(&fol), delta_(delta), grid_(&grid) {
  if (delta <= 0) fail(ErrorCode::InvalidInput, "ChainGraph: delta must be positive");
  if (f.dim() != fol.dim() || f.dim() != grid.dim())
    fail(ErrorCode::DimMismatch, "ChainGraph: map/foliation/grid dimensions differ");
  eta_ = grid.cell_diameter();
  const double r = delta_ + eta_;
  adj_.resize(grid.cell_count());
  // A plaque point is within r (ambient) of its center, so any admissible
  // target center is within 2r of the image point.
  const double candidate_radius = 2.0 * r + kGeomTol;
  for (size_t c = 0; c < grid.cell_count(); ++c) {
    TorusPoint image = f.apply(grid.cell_center(c));
    std::vector<size_t> cand = grid.cells_within(image, candidate_radius);
    size_t snap = grid.snap(image);
    if (std::find(cand.begin(), cand.end(), snap) == cand.end()) cand.push_back(snap);
    for (size_t t : cand) {
      PlaqueDescriptor plaque{grid.cell_center(t), foliation_, r};
      if (dist_to_plaque(plaque, image) <= r + kGeomTol) adj_[c].push_back(t);
    }
    std::sort(adj_[c].begin(), adj_[c].end());
    adj_[c].erase(std::unique(adj_[c].begin(), adj_[c].end()), adj_[c].end());
  }
}

bool ChainGraph::has_edge(size_t from, size_t to) const {
  return std::binary_search(adj_[from].begin(), adj_[from].end(), to);
}

namespace {

// Iterative Tarjan; returns component id per node (ids in reverse topological
// discovery order) and the component count.
size_t tarjan_scc(const std::vector<std::vector<size_t>>& adj,
                  std::vector<size_t>* comp) {
  const size_t n = adj.size();
  const size_t kNone = (size_t)-1;
  std::vector<size_t> index(n, kNone), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<size_t> stack;
  comp->assign(n, kNone);
  size_t next_index = 0, comp_count = 0;

  struct Frame {
    size_t v;
    size_t edge = 0;
  };
  std::vector<Frame> call;
  for (size_t root = 0; root < n; ++root) {
    if (index[root] != kNone) continue;
    call.push_back({root});
    while (!call.empty()) {
      Frame& f = call.back();
      size_t v = f.v;
      if (f.edge == 0) {
        index[v] = lowlink[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      bool descended = false;
      while (f.edge < adj[v].size()) {
        size_t w = adj[v][f.edge++];
        if (index[w] == kNone) {
          call.push_back({w});
          descended = true;
          break;
        }
        if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
      }
      if (descended) continue;
      if (lowlink[v] == index[v]) {
        while (true) {
          size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          (*comp)[w] = comp_count;
          if (w == v) break;
        }
        ++comp_count;
      }
      call.pop_back();
      if (!call.empty()) {
        size_t parent = call.back().v;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }
  return comp_count;
}

std::vector<bool> reachable_from(const std::vector<std::vector<size_t>>& adj,
                                 size_t start) {
  std::vector<bool> seen(adj.size(), false);
  std::deque<size_t> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    size_t v = queue.front();
    queue.pop_front();
    for (size_t w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
  }
  return seen;
}

std::vector<std::vector<size_t>> reverse_adjacency(
    const std::vector<std::vector<size_t>>& adj) {
  std::vector<std::vector<size_t>> rev(adj.size());
  for (size_t v = 0; v < adj.size(); ++v)
    for (size_t w : adj[v]) rev[w].push_back(v);
  return rev;
}

}  // namespace

RecurrenceResult chain_recurrent_cells(const ChainGraph& g) {
  const auto& adj = g.adjacency();
  std::vector<size_t> comp;
  size_t count = tarjan_scc(adj, &comp);
  std::vector<size_t> comp_size(count, 0);
  for (size_t c : comp) ++comp_size[c];
  RecurrenceResult res;
  res.scc_count = count;
  res.delta = g.delta();
  res.resolution = g.grid().resolution();
  res.resolution_limited = g.delta() <= g.eta();
  for (size_t v = 0; v < adj.size(); ++v) {
    bool self_loop = g.has_edge(v, v);
    if (comp_size[comp[v]] >= 2 || self_loop) res.recurrent_cells.push_back(v);
  }
  return res;
}

bool chain_related(const ChainGraph& g, const TorusPoint& x, const TorusPoint& y) {
  size_t cx = g.grid().snap(x), cy = g.grid().snap(y);
  const auto& adj = g.adjacency();
  std::vector<bool> fwd = reachable_from(adj, cx);
  if (!fwd[cy]) return false;
  std::vector<bool> bwd = reachable_from(reverse_adjacency(adj), cx);
  return bwd[cy];
}

std::optional<long long> detect_leaf_periodic(const ToralMap& f,
                                              const LinearFoliation& fol,
                                              const TorusPoint& x, long long kmax,
                                              double tol) {
  if (kmax < 1) fail(ErrorCode::InvalidInput, "detect_leaf_periodic: kmax < 1");
  TorusPoint z = x;
  for (long long k = 1; k <= kmax; ++k) {
    z = f.apply(z);
    if (fol.same_leaf(z, x, tol)) return k;
  }
  return std::nullopt;
}

std::optional<Trajectory> loop_through_cell(const ChainGraph& g, size_t cell) {
  const auto& adj = g.adjacency();
  if (cell >= adj.size()) fail(ErrorCode::InvalidInput, "loop_through_cell: bad cell");
  const size_t kNone = (size_t)-1;
  std::vector<size_t> parent(adj.size(), kNone);
  std::deque<size_t> queue;
  for (size_t w : adj[cell]) {
    if (w == cell) {
      Trajectory t;
      t.points = {g.grid().cell_center(cell), g.grid().cell_center(cell)};
      return t;
    }
    if (parent[w] == kNone) {
      parent[w] = cell;
      queue.push_back(w);
    }
  }
  while (!queue.empty()) {
    size_t v = queue.front();
    queue.pop_front();
    for (size_t w : adj[v]) {
      if (w == cell) {
        std::vector<size_t> cells{cell};
        for (size_t u = v; u != cell; u = parent[u]) cells.push_back(u);
        cells.push_back(cell);
        std::reverse(cells.begin() + 1, cells.end() - 1);
        Trajectory t;
        for (size_t c : cells) t.points.push_back(g.grid().cell_center(c));
        return t;
      }
      if (parent[w] == kNone) {
        parent[w] = v;
        queue.push_back(w);
      }
    }
  }
  return std::nullopt;
}

HubLoopFinder::HubLoopFinder(const ChainGraph& g, size_t hub) : g_(&g), hub_(hub) {
  const auto& adj = g.adjacency();
  const size_t kNone = (size_t)-1;
  if (hub >= adj.size()) fail(ErrorCode::InvalidInput, "HubLoopFinder: bad hub cell");
  next_to_hub_.assign(adj.size(), kNone);
  prev_from_hub_.assign(adj.size(), kNone);

  // Reverse BFS from the hub: for each visited cell, the successor that
  // starts a shortest path into the hub.
  auto rev = reverse_adjacency(adj);
  std::deque<size_t> queue{hub};
  std::vector<bool> seen(adj.size(), false);
  seen[hub] = true;
  while (!queue.empty()) {
    size_t v = queue.front();
    queue.pop_front();
    for (size_t w : rev[v])
      if (!seen[w]) {
        seen[w] = true;
        next_to_hub_[w] = v;
        queue.push_back(w);
      }
  }

  // Forward BFS from the hub.
  std::fill(seen.begin(), seen.end(), false);
  seen[hub] = true;
  queue.push_back(hub);
  while (!queue.empty()) {
    size_t v = queue.front();
    queue.pop_front();
    for (size_t w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        prev_from_hub_[w] = v;
        queue.push_back(w);
      }
  }
}

std::optional<Trajectory> HubLoopFinder::loop(size_t cell) const {
  const size_t kNone = (size_t)-1;
  if (cell == hub_) return loop_through_cell(*g_, cell);
  if (next_to_hub_[cell] == kNone || prev_from_hub_[cell] == kNone)
    return std::nullopt;
  std::vector<size_t> cells{cell};
  for (size_t v = next_to_hub_[cell]; v != hub_; v = next_to_hub_[v]) cells.push_back(v);
  cells.push_back(hub_);
  std::vector<size_t> back{cell};
  for (size_t v = prev_from_hub_[cell]; v != hub_; v = prev_from_hub_[v])
    back.push_back(v);
  cells.insert(cells.end(), back.rbegin(), back.rend());
  Trajectory t;
  for (size_t c : cells) t.points.push_back(g_->grid().cell_center(c));
  return t;
}

namespace {

Eigen::MatrixXd real_matrix_power(const Eigen::MatrixXd& m, long long r) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  for (long long i = 0; i < r; ++i) out = m * out;
  return out;
}

// Pairwise (Lagrange-style) reduction of the columns of basis; exact for two
// columns, a good greedy reduction for three.
void reduce_basis(Eigen::MatrixXd& basis) {
  const int m = (int)basis.cols();
  bool changed = true;
  for (int round = 0; round < 64 && changed; ++round) {
    changed = false;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        double denom = basis.col(j).squaredNorm();
        if (denom <= 0) continue;
        double mu = std::round(basis.col(i).dot(basis.col(j)) / denom);
        if (mu != 0.0) {
          basis.col(i) -= mu * basis.col(j);
          changed = true;
        }
      }
  }
}

// Nearest exact periodic point (period r) of the integer matrix aq near u0 on
// the transverse torus. The periodic points are (aq^r - I)^-1 Z^m mod 1, so
// this is a closest-vector problem in that lattice (together with the Z^m
// wrap shifts, which it already contains since aq^r - I is integer): reduce
// the basis, Babai-round, then sweep a small coefficient neighborhood.
// Returns the correction u* - u0, or nullopt when aq^r - I is singular.
std::optional<Vec> periodic_point_correction(const IntMat& aq, long long r,
                                             const Vec& u0) {
  int m = (int)aq.size();
  Eigen::MatrixXd b = real_matrix_power(to_eigen(aq), r) - Eigen::MatrixXd::Identity(m, m);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
  if (!lu.isInvertible()) return std::nullopt;
  Eigen::MatrixXd basis = lu.solve(Eigen::MatrixXd::Identity(m, m));
  reduce_basis(basis);
  Eigen::VectorXd u(m);
  for (int i = 0; i < m; ++i) u(i) = u0[i];
  Eigen::VectorXd coeff = basis.fullPivLu().solve(u);
  Vec best;
  double best_norm = std::numeric_limits<double>::infinity();
  std::vector<long long> offs(m, -2);
  while (true) {
    Eigen::VectorXd c(m);
    for (int i = 0; i < m; ++i) c(i) = std::round(coeff(i)) + (double)offs[i];
    Eigen::VectorXd diff = basis * c - u;
    double nrm = diff.norm();
    if (nrm < best_norm) {
      best_norm = nrm;
      best.assign(diff.data(), diff.data() + m);
    }
    int i = 0;
    while (i < m && ++offs[i] > 2) offs[i++] = -2;
    if (i == m) break;
  }
  if (!std::isfinite(best_norm)) return std::nullopt;

  // Polish against the defining equation B u* = m with one round of
  // iterative refinement; B is badly conditioned, and the leaf-return test
  // amplifies any error in u* by the expansion rate over r steps.
  Eigen::VectorXd ustar = u;
  for (int i = 0; i < m; ++i) ustar(i) += best[i];
  Eigen::VectorXd target = (b * ustar).array().round();
  ustar = lu.solve(target);
  for (int pass = 0; pass < 3; ++pass) ustar -= lu.solve(b * ustar - target);
  for (int i = 0; i < m; ++i) best[i] = ustar(i) - u(i);
  return best;
}

}  // namespace

PeriodicLeafCertificate periodic_leaf_from_chain(const ToralMap& f,
                                                 const LinearFoliation& fol,
                                                 const Trajectory& loop, double eps,
                                                 const Grid& grid,
                                                 long long horizon_multiple,
                                                 double leaf_tol) {
  if (loop.points.size() < 2)
    fail(ErrorCode::InvalidInput, "periodic_leaf_from_chain: loop needs >= 2 points");
  long long r = (long long)loop.points.size() - 1;
  // The full horizon n is also the period used for the exact-point snap; the
  // period-n lattice of the quotient is denser, so the snap correction stays
  // small even for short loops.
  long long n = r * std::max<long long>(1, horizon_multiple);
  // Coarse cell-center loops carry the grid's quantization error in every
  // step; pulling the interior toward orbit form (start pinned) first keeps
  // the exact shadow near the loop start.
  Trajectory refined_loop = refine_loop(f, fol, loop, eps);
  auto sol = shadow_periodized(f, fol, refined_loop, eps, n, grid);
  if (!sol)
    fail(ErrorCode::ShadowNotFound,
         "periodic_leaf_from_chain: no shadow path at this resolution");

  TorusPoint y0 = sol->trajectory.at_index(0);

  // Refine the transverse coordinate to an exact periodic point of the
  // induced linear quotient, when one is available.
  if (fol.kind() != FoliationKind::WholeManifold) {
    const IntMat* aq = nullptr;
    IntMat quotient_matrix;
    if (fol.kind() == FoliationKind::Points) {
      if (f.is_linear()) aq = &f.matrix();
    } else {
      try {
        ToralMap q = induced_quotient_map(f, fol);
        if (q.is_linear()) {
          quotient_matrix = q.matrix();
          aq = &quotient_matrix;
        }
      } catch (const Error&) {
        // no linear quotient: keep the unrefined point
      }
    }
    if (aq) {
      Vec u0 = fol.transverse_coords(y0);
      if (auto corr = periodic_point_correction(*aq, n, u0)) {
        // Lift the transverse correction to ambient coordinates:
        // delta = W^T (W W^T)^-1 du, so W delta = du and delta _|_ V.
        const IntMat& wrows = fol.transverse_basis();
        int m = (int)wrows.size(), d = fol.dim();
        Eigen::MatrixXd w(m, d);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < d; ++j) w(i, j) = (double)wrows[i][j];
        Eigen::VectorXd du(m);
        for (int i = 0; i < m; ++i) du(i) = (*corr)[i];
        Eigen::VectorXd delta = w.transpose() * (w * w.transpose()).ldlt().solve(du);
        Vec shifted = y0.coords;
        for (int j = 0; j < d; ++j) shifted[j] += delta(j);
        y0 = wrap(shifted);
      }
    }
  }

  PeriodicLeafCertificate cert;
  cert.y0 = y0;
  cert.period = n;
  cert.shadow = orbit_segment(f, y0, n);
  cert.offset_from_start = torus_dist(loop.points.front(), y0);
  TorusPoint fr = f.iterate(y0, n);
  cert.leaf_return_defect =
      (fol.kind() == FoliationKind::WholeManifold) ? 0.0 : fol.transverse_dist(fr, y0);
  if (cert.leaf_return_defect > std::max(leaf_tol, 1e-6))
    fail(ErrorCode::LeafReturnFailed,
         "periodic_leaf_from_chain: leaf-return defect " +
             std::to_string(cert.leaf_return_defect));
  return cert;
}

}  // namespace folia
