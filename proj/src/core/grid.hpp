#pragma once

// Uniform box covering of T^d used by every grid-scale search.

#include <cstdint>
#include <vector>

#include "torus.hpp"

namespace folia {

class Grid {
 public:
  Grid(int dim, int resolution);

  int dim() const { return dim_; }
  int resolution() const { return n_; }
  size_t cell_count() const { return count_; }
  double cell_diameter() const { return diameter_; }

  TorusPoint cell_center(size_t index) const;
  size_t snap(const TorusPoint& x) const;
  std::vector<int> cell_tuple(size_t index) const;
  size_t cell_index(const std::vector<int>& tuple) const;

  // Indices of all cells whose center lies within `radius` of x.
  std::vector<size_t> cells_within(const TorusPoint& x, double radius) const;

 private:
  int dim_;
  int n_;
  size_t count_;
  double diameter_;
};

}  // namespace folia
