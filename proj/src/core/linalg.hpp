#pragma once

// Small integer linear algebra for d <= 3 ambient dimensions: determinants,
// unimodular inverses, primitive integer nullspaces (annihilator lattices)
// and orthonormalization of rational subspace bases.

#include <vector>

#include <Eigen/Dense>

#include "torus.hpp"

namespace folia {

using IntVec = std::vector<long long>;
using IntMat = std::vector<IntVec>;  // row-major

long long int_det(const IntMat& m);

// Inverse of a matrix with |det| = 1; entries stay integer.
IntMat unimodular_inverse(const IntMat& m);

IntMat int_transpose(const IntMat& m);
IntVec int_mat_vec(const IntMat& m, const IntVec& v);
IntMat int_mat_mul(const IntMat& a, const IntMat& b);

// Basis of the lattice { w in Z^d : w . r = 0 for every row r of m }.
// Rows of the result are primitive and form a basis of the full (saturated)
// annihilator lattice, so integer vectors in the kernel are integer
// combinations of them.
IntMat integer_nullspace(const IntMat& m, int dim);

// Divide out the gcd, fixing the sign of the first nonzero entry positive.
IntVec primitive(const IntVec& v);

Eigen::MatrixXd to_eigen(const IntMat& m);
Vec apply_int_mat(const IntMat& m, const Vec& v);

// Orthonormal basis (columns) of the span of the given integer vectors.
Eigen::MatrixXd orthonormal_basis(const std::vector<IntVec>& vecs, int dim);

double operator_norm(const Eigen::MatrixXd& m);

}  // namespace folia
