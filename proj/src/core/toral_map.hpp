#pragma once

// Homeomorphisms of T^d: integer-matrix automorphisms composed with a
// trigonometric-polynomial displacement and, optionally, post-composed
// smooth bump translations. Invertibility is enforced through explicit
// Lipschitz margins; inverses are evaluated by contraction iteration.

#include <memory>
#include <random>
#include <vector>

#include "foliation.hpp"
#include "linalg.hpp"
#include "torus.hpp"

namespace folia {

struct TrigTerm {
  IntVec freq;        // integer frequency vector k
  Vec coeff;          // displacement coefficient vector (length d)
  bool is_sin = true; // sin(2 pi k.x) or cos(2 pi k.x)
};

struct BumpTerm {
  TorusPoint center;
  Vec displacement;  // translation applied at the center
  double radius;
};

class ToralMap {
 public:
  ToralMap(IntMat matrix, std::vector<TrigTerm> perturbation = {},
           double tau_inv = 1e-12);

  int dim() const { return dim_; }
  const IntMat& matrix() const { return matrix_; }
  const IntMat& inverse_matrix() const { return inverse_matrix_; }
  const std::vector<TrigTerm>& perturbation() const { return terms_; }
  const std::vector<BumpTerm>& bumps() const { return bumps_; }
  bool is_linear() const { return terms_.empty() && bumps_.empty(); }
  double perturbation_lipschitz() const { return trig_lipschitz_ + bump_lipschitz_; }
  double tau_inv() const { return tau_inv_; }

  TorusPoint apply(const TorusPoint& x) const;
  TorusPoint apply_inverse(const TorusPoint& y) const;
  TorusPoint iterate(const TorusPoint& x, long long k) const;  // f^k, k may be negative

  // Displacement p(x) of the trigonometric part.
  Vec trig_displacement(const TorusPoint& x) const;

  void append_bumps(const std::vector<BumpTerm>& bumps);

 private:
  int dim_;
  IntMat matrix_, inverse_matrix_;
  std::vector<TrigTerm> terms_;
  std::vector<BumpTerm> bumps_;
  double tau_inv_;
  double trig_lipschitz_ = 0.0;
  double bump_lipschitz_ = 0.0;
  double inv_matrix_norm_ = 0.0;  // ||M^-1||_op

  Vec bump_displacement(const TorusPoint& z) const;
};

enum class SplittingClass { Anosov, PartiallyHyperbolic, NotPartiallyHyperbolic };

struct SpectralSplitting {
  int stable_dim = 0, center_dim = 0, unstable_dim = 0;
  Eigen::MatrixXd stable_basis, center_basis, unstable_basis;  // d x dim each
  double lambda = 0.0;     // max stable modulus
  double gamma_hat = 1.0;  // min center modulus
  double gamma = 1.0;      // max center modulus
  double mu = 0.0;         // min unstable modulus
  bool real_diagonalizable = false;
  double c_constant = 1.0;  // 1 for real-diagonalizable, else empirical over n<=20
  SplittingClass classification = SplittingClass::NotPartiallyHyperbolic;
};

// Eigenstructure of the integer matrix, grouped by modulus. Linear maps only.
SpectralSplitting spectral_splitting(const ToralMap& f);

struct C0DistanceBounds {
  double lower = 0.0;
  double upper = 0.0;
};

class Grid;  // grid.hpp

// Grid bracketing of d_C0(f,g); requires equal integer matrices.
C0DistanceBounds c0_distance(const ToralMap& f, const ToralMap& g, const Grid& grid);

struct DisplacementRequest {
  std::vector<std::pair<TorusPoint, TorusPoint>> pairs;  // (site, target)
};

struct PerturbationResult {
  ToralMap map;
  double reported_c0;  // d_C0(f, g) bound: max displacement (bump peak is 1)
};

// g = h o f where h is a finite union of smooth bump translations that move
// each f(site) exactly onto its target and are the identity outside the
// radius-balls around the f-image sites.
PerturbationResult build_perturbation(const ToralMap& f, const DisplacementRequest& req,
                                      double radius);

// Map induced on the transverse coordinates of a preserved foliation.
ToralMap induced_quotient_map(const ToralMap& f, const LinearFoliation& fol);

// Randomized leaf-permutation check: same_leaf(x,y) => same_leaf(f(x),f(y)).
bool preserves_foliation(const ToralMap& f, const LinearFoliation& fol,
                         std::mt19937_64& rng, int samples, double tol);

}  // namespace folia
