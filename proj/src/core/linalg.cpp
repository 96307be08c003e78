#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace folia {

namespace {

long long cofactor_det(const IntMat& m, int skip_row, int skip_col) {
  IntMat sub;
  for (int i = 0; i < (int)m.size(); ++i) {
    if (i == skip_row) continue;
    IntVec row;
    for (int j = 0; j < (int)m.size(); ++j) {
      if (j == skip_col) continue;
      row.push_back(m[i][j]);
    }
    sub.push_back(row);
  }
  return int_det(sub);
}

bool annihilates(const IntMat& rows, const IntVec& w) {
  for (const auto& r : rows) {
    long long s = 0;
    for (size_t i = 0; i < w.size(); ++i) s += r[i] * w[i];
    if (s != 0) return false;
  }
  return true;
}

}  // namespace

long long int_det(const IntMat& m) {
  int n = (int)m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  long long det = 0;
  long long sign = 1;
  for (int j = 0; j < n; ++j) {
    det += sign * m[0][j] * cofactor_det(m, 0, j);
    sign = -sign;
  }
  return det;
}

IntMat unimodular_inverse(const IntMat& m) {
  int n = (int)m.size();
  long long det = int_det(m);
  if (det != 1 && det != -1)
    fail(ErrorCode::InvalidInput, "unimodular_inverse: |det| != 1");
  IntMat inv(n, IntVec(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      long long c = cofactor_det(m, j, i);
      if ((i + j) % 2 == 1) c = -c;
      inv[i][j] = c * det;  // det is +-1 so division equals multiplication
    }
  }
  return inv;
}

IntMat int_transpose(const IntMat& m) {
  if (m.empty()) return {};
  IntMat t(m[0].size(), IntVec(m.size()));
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

IntVec int_mat_vec(const IntMat& m, const IntVec& v) {
  IntVec r(m.size(), 0);
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) r[i] += m[i][j] * v[j];
  return r;
}

IntMat int_mat_mul(const IntMat& a, const IntMat& b) {
  IntMat r(a.size(), IntVec(b[0].size(), 0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < b.size(); ++k)
      for (size_t j = 0; j < b[0].size(); ++j) r[i][j] += a[i][k] * b[k][j];
  return r;
}

IntVec primitive(const IntVec& v) {
  long long g = 0;
  for (long long c : v) g = std::gcd(g, std::llabs(c));
  if (g == 0) fail(ErrorCode::InvalidInput, "primitive: zero vector");
  IntVec r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = v[i] / g;
  for (long long c : r) {
    if (c > 0) break;
    if (c < 0) {
      for (auto& x : r) x = -x;
      break;
    }
  }
  return r;
}

// The ambient dimension is at most 3, so the annihilator lattice has rank at
// most 2 and a Minkowski-reduced pair (shortest independent vectors) is a
// lattice basis. Enumeration over a bounded box finds them.
IntMat integer_nullspace(const IntMat& m, int dim) {
  int rank_m = 0;
  {
    Eigen::MatrixXd em(m.size(), dim);
    for (size_t i = 0; i < m.size(); ++i)
      for (int j = 0; j < dim; ++j) em(i, j) = (double)m[i][j];
    if (m.empty()) rank_m = 0;
    else rank_m = (int)Eigen::FullPivLU<Eigen::MatrixXd>(em).rank();
  }
  int target_rank = dim - rank_m;
  if (target_rank == 0) return {};
  if (target_rank == dim) {
    IntMat id(dim, IntVec(dim, 0));
    for (int i = 0; i < dim; ++i) id[i][i] = 1;
    return id;
  }

  long long max_entry = 1;
  for (const auto& r : m)
    for (long long c : r) max_entry = std::max(max_entry, std::llabs(c));
  long long bound = 4 * max_entry + 4;

  std::vector<IntVec> candidates;
  IntVec w(dim, -bound);
  while (true) {
    bool nonzero = std::any_of(w.begin(), w.end(), [](long long c) { return c != 0; });
    if (nonzero && annihilates(m, w)) candidates.push_back(w);
    int i = 0;
    while (i < dim && ++w[i] > bound) w[i++] = -bound;
    if (i == dim) break;
  }
  std::sort(candidates.begin(), candidates.end(), [](const IntVec& a, const IntVec& b) {
    long long na = 0, nb = 0;
    for (long long c : a) na += c * c;
    for (long long c : b) nb += c * c;
    return na < nb;
  });

  IntMat basis;
  Eigen::MatrixXd picked(0, dim);
  for (const auto& cand : candidates) {
    Eigen::MatrixXd trial(picked.rows() + 1, dim);
    trial.topRows(picked.rows()) = picked;
    for (int j = 0; j < dim; ++j) trial(picked.rows(), j) = (double)cand[j];
    if ((int)Eigen::FullPivLU<Eigen::MatrixXd>(trial).rank() == (int)trial.rows()) {
      basis.push_back(primitive(cand));
      picked = trial;
      if ((int)basis.size() == target_rank) return basis;
    }
  }
  fail(ErrorCode::InvalidInput, "integer_nullspace: basis not found in bound");
}

Eigen::MatrixXd to_eigen(const IntMat& m) {
  Eigen::MatrixXd e(m.size(), m.empty() ? 0 : m[0].size());
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m[i].size(); ++j) e(i, j) = (double)m[i][j];
  return e;
}

Vec apply_int_mat(const IntMat& m, const Vec& v) {
  Vec r(m.size(), 0.0);
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) r[i] += (double)m[i][j] * v[j];
  return r;
}

Eigen::MatrixXd orthonormal_basis(const std::vector<IntVec>& vecs, int dim) {
  Eigen::MatrixXd b(dim, vecs.size());
  for (size_t j = 0; j < vecs.size(); ++j)
    for (int i = 0; i < dim; ++i) b(i, j) = (double)vecs[j][i];
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, (int)vecs.size());
  return q;
}

double operator_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace folia
