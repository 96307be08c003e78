#pragma once

// Grid discretization of the plaque-relative chain relation as a directed
// graph over cells, with SCC-based recurrence, mutual-reachability queries,
// leaf-periodicity detection and the chain-loop-to-periodic-leaf pipeline.

#include <optional>

#include "grid.hpp"
#include "shadowing.hpp"

namespace folia {

class ChainGraph {
 public:
  // Edge c -> c' present iff dist(f(center_c), plaque(center_c', delta+eta))
  // <= delta + eta, with eta = cell_diameter. The slack makes the graph an
  // outer approximation: every true chain between grid points induces a path.
  ChainGraph(const ToralMap& f, const LinearFoliation& fol, double delta,
             const Grid& grid);

  const Grid& grid() const { return *grid_; }
  const LinearFoliation& foliation() const { return *foliation_; }
  const ToralMap& map() const { return *map_; }
  double delta() const { return delta_; }
  double eta() const { return eta_; }
  const std::vector<std::vector<size_t>>& adjacency() const { return adj_; }
  const std::vector<size_t>& successors(size_t cell) const { return adj_[cell]; }
  bool has_edge(size_t from, size_t to) const;

 private:
  const ToralMap* map_;
  const LinearFoliation* foliation_;
  const Grid* grid_;
  double delta_, eta_;
  std::vector<std::vector<size_t>> adj_;
};

struct RecurrenceResult {
  std::vector<size_t> recurrent_cells;  // sorted
  size_t scc_count = 0;
  double delta = 0.0;
  int resolution = 0;
  bool resolution_limited = false;  // delta <= eta
};

// Cells whose SCC has size >= 2 or carries a self-loop.
RecurrenceResult chain_recurrent_cells(const ChainGraph& g);

// Mutual reachability of the cells of x and y.
bool chain_related(const ChainGraph& g, const TorusPoint& x, const TorusPoint& y);

// Smallest k <= kmax with same_leaf(f^k(x), x, tol), if any.
std::optional<long long> detect_leaf_periodic(const ToralMap& f,
                                              const LinearFoliation& fol,
                                              const TorusPoint& x, long long kmax,
                                              double tol);

// Shortest graph cycle through the given recurrent cell, returned as the
// sequence of cell centers c, ..., c (length r+1, r >= 1).
std::optional<Trajectory> loop_through_cell(const ChainGraph& g, size_t cell);

// Loops for many cells at once: two BFS trees through a hub cell give, for
// every cell mutually reachable with the hub, the loop cell -> hub -> cell.
class HubLoopFinder {
 public:
  HubLoopFinder(const ChainGraph& g, size_t hub);
  std::optional<Trajectory> loop(size_t cell) const;

 private:
  const ChainGraph* g_;
  size_t hub_;
  std::vector<size_t> next_to_hub_;    // successor on a shortest path to hub
  std::vector<size_t> prev_from_hub_;  // predecessor on a shortest path from hub
};

struct PeriodicLeafCertificate {
  TorusPoint y0;
  long long period = 0;
  Trajectory shadow;          // the shadow segment over [-N, N]
  double leaf_return_defect = 0.0;
  double offset_from_start = 0.0;  // torus_dist(loop start, y0)
};

// Shadow the periodized chain loop, then refine the transverse coordinate to
// an exact periodic point of the induced linear quotient so that f^r(y0) and
// y0 share a leaf to high accuracy. Throws ShadowNotFound / LeafReturnFailed.
PeriodicLeafCertificate periodic_leaf_from_chain(const ToralMap& f,
                                                 const LinearFoliation& fol,
                                                 const Trajectory& loop, double eps,
                                                 const Grid& grid,
                                                 long long horizon_multiple = 1,
                                                 double leaf_tol = 1e-9);

}  // namespace folia
