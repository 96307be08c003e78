#include "grid.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace folia {

Grid::Grid(int dim, int resolution) : dim_(dim), n_(resolution) {
  if (dim < 1 || dim > 3) fail(ErrorCode::InvalidInput, "Grid: dim must be 1..3");
  if (resolution < 2) fail(ErrorCode::InvalidInput, "Grid: resolution must be >= 2");
  count_ = 1;
  for (int i = 0; i < dim; ++i) count_ *= (size_t)n_;
  diameter_ = std::sqrt((double)dim) / n_;
}

TorusPoint Grid::cell_center(size_t index) const {
  Vec c(dim_);
  for (int i = 0; i < dim_; ++i) {
    c[i] = ((double)(index % n_) + 0.5) / n_;
    index /= n_;
  }
  return wrap(c);
}

size_t Grid::snap(const TorusPoint& x) const {
  size_t idx = 0;
  for (int i = dim_ - 1; i >= 0; --i) {
    int cell = (int)std::floor(x.coords[i] * n_);
    if (cell >= n_) cell = n_ - 1;
    if (cell < 0) cell = 0;
    idx = idx * n_ + (size_t)cell;
  }
  return idx;
}

std::vector<int> Grid::cell_tuple(size_t index) const {
  std::vector<int> t(dim_);
  for (int i = 0; i < dim_; ++i) {
    t[i] = (int)(index % n_);
    index /= n_;
  }
  return t;
}

size_t Grid::cell_index(const std::vector<int>& tuple) const {
  size_t idx = 0;
  for (int i = dim_ - 1; i >= 0; --i) {
    int c = ((tuple[i] % n_) + n_) % n_;
    idx = idx * n_ + (size_t)c;
  }
  return idx;
}

std::vector<size_t> Grid::cells_within(const TorusPoint& x, double radius) const {
  std::vector<size_t> out;
  int reach = (int)std::ceil(radius * n_ + 0.5);
  reach = std::min(reach, n_ / 2 + 1);
  std::vector<int> base = cell_tuple(snap(x));
  std::vector<int> off(dim_, -reach);
  std::vector<int> tuple(dim_);
  while (true) {
    for (int i = 0; i < dim_; ++i) tuple[i] = base[i] + off[i];
    size_t idx = cell_index(tuple);
    if (torus_dist(cell_center(idx), x) <= radius) out.push_back(idx);
    int i = 0;
    while (i < dim_ && ++off[i] > reach) off[i++] = -reach;
    if (i == dim_) break;
  }
  // Wide reaches can visit a wrapped cell twice.
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace folia
