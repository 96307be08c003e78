#include "toral_map.hpp"

#include <cmath>
#include <numbers>

#include "grid.hpp"

namespace folia {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// C-infinity bump: phi(0)=1, phi(t)=0 for |t|>=1.
double bump_profile(double t) {
  double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

double bump_profile_max_slope() {
  // sup |phi'| over [0,1); evaluated once on a fine sample.
  static const double slope = [] {
    double best = 0.0;
    for (int i = 1; i < 100000; ++i) {
      double t = i / 100000.0;
      double d = (bump_profile(t) - bump_profile(t - 1e-5)) / 1e-5;
      best = std::max(best, std::fabs(d));
    }
    return best;
  }();
  return slope;
}

double trig_lipschitz_bound(const std::vector<TrigTerm>& terms) {
  double lip = 0.0;
  for (const auto& t : terms) {
    double fn = 0.0;
    for (long long k : t.freq) fn += (double)(k * k);
    lip += kTwoPi * std::sqrt(fn) * norm(t.coeff);
  }
  return lip;
}

}  // namespace

ToralMap::ToralMap(IntMat matrix, std::vector<TrigTerm> perturbation, double tau_inv)
    : dim_((int)matrix.size()),
      matrix_(std::move(matrix)),
      terms_(std::move(perturbation)),
      tau_inv_(tau_inv) {
  if (dim_ < 1 || dim_ > 3) fail(ErrorCode::InvalidInput, "ToralMap: dim must be 1..3");
  for (const auto& row : matrix_)
    if ((int)row.size() != dim_) fail(ErrorCode::InvalidInput, "ToralMap: matrix not square");
  long long det = int_det(matrix_);
  if (det != 1 && det != -1) fail(ErrorCode::InvalidInput, "ToralMap: |det| != 1");
  inverse_matrix_ = unimodular_inverse(matrix_);
  inv_matrix_norm_ = operator_norm(to_eigen(inverse_matrix_));
  for (const auto& t : terms_)
    if ((int)t.coeff.size() != dim_ || (int)t.freq.size() != dim_)
      fail(ErrorCode::InvalidInput, "ToralMap: perturbation term has wrong dimension");
  trig_lipschitz_ = trig_lipschitz_bound(terms_);
  if (!terms_.empty() && trig_lipschitz_ >= 1.0 / inv_matrix_norm_)
    fail(ErrorCode::NotInvertible,
         "ToralMap: perturbation Lipschitz bound >= 1/||M^-1||, homeomorphism not guaranteed");
}

Vec ToralMap::trig_displacement(const TorusPoint& x) const {
  Vec p(dim_, 0.0);
  for (const auto& t : terms_) {
    double phase = 0.0;
    for (int i = 0; i < dim_; ++i) phase += (double)t.freq[i] * x.coords[i];
    double v = t.is_sin ? std::sin(kTwoPi * phase) : std::cos(kTwoPi * phase);
    for (int i = 0; i < dim_; ++i) p[i] += t.coeff[i] * v;
  }
  return p;
}

Vec ToralMap::bump_displacement(const TorusPoint& z) const {
  Vec u(dim_, 0.0);
  for (const auto& b : bumps_) {
    double t = torus_dist(z, b.center) / b.radius;
    double w = bump_profile(t);
    if (w == 0.0) continue;
    for (int i = 0; i < dim_; ++i) u[i] += b.displacement[i] * w;
  }
  return u;
}

TorusPoint ToralMap::apply(const TorusPoint& x) const {
  if (x.dim() != dim_) fail(ErrorCode::DimMismatch, "ToralMap::apply");
  Vec y = apply_int_mat(matrix_, x.coords);
  if (!terms_.empty()) y = add(y, trig_displacement(x));
  TorusPoint out = wrap(y);
  if (!bumps_.empty()) out = wrap(add(out.coords, bump_displacement(out)));
  return out;
}

TorusPoint ToralMap::apply_inverse(const TorusPoint& y) const {
  if (y.dim() != dim_) fail(ErrorCode::DimMismatch, "ToralMap::apply_inverse");
  TorusPoint target = y;
  if (!bumps_.empty()) {
    // z = y - B(z), contraction since the bump field has Lipschitz < 1.
    TorusPoint z = y;
    int it = 0;
    for (; it < 200; ++it) {
      TorusPoint next = wrap(sub(y.coords, bump_displacement(z)));
      double step = torus_dist(next, z);
      z = next;
      if (step <= tau_inv_) break;
    }
    if (it == 200) fail(ErrorCode::InversionFailure, "ToralMap: bump inversion stalled");
    target = z;
  }
  if (terms_.empty()) return wrap(apply_int_mat(inverse_matrix_, target.coords));
  // x = M^-1 (target - p(x)), contraction factor ||M^-1|| Lip(p) < 1.
  TorusPoint x = wrap(apply_int_mat(inverse_matrix_, target.coords));
  for (int it = 0; it < 200; ++it) {
    Vec rhs = sub(target.coords, trig_displacement(x));
    TorusPoint next = wrap(apply_int_mat(inverse_matrix_, rhs));
    double step = torus_dist(next, x);
    x = next;
    if (step <= tau_inv_) return x;
  }
  fail(ErrorCode::InversionFailure, "ToralMap: fixed-point inversion did not converge");
}

TorusPoint ToralMap::iterate(const TorusPoint& x, long long k) const {
  TorusPoint p = x;
  for (long long i = 0; i < std::llabs(k); ++i)
    p = (k > 0) ? apply(p) : apply_inverse(p);
  return p;
}

void ToralMap::append_bumps(const std::vector<BumpTerm>& bumps) {
  double lip = bump_lipschitz_;
  for (const auto& b : bumps) {
    if (b.radius <= 0) fail(ErrorCode::InvalidInput, "bump radius must be positive");
    lip += norm(b.displacement) * bump_profile_max_slope() / b.radius;
  }
  if (lip >= 1.0)
    fail(ErrorCode::NotInvertible, "bump displacement field Lipschitz >= 1");
  bumps_.insert(bumps_.end(), bumps.begin(), bumps.end());
  bump_lipschitz_ = lip;
}

SpectralSplitting spectral_splitting(const ToralMap& f) {
  if (!f.is_linear())
    fail(ErrorCode::Unsupported, "spectral_splitting: linear maps only");
  const int d = f.dim();
  Eigen::MatrixXd m = to_eigen(f.matrix());
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::InvalidInput, "spectral_splitting: eigensolver failed");

  const double mod_tol = 1e-9;
  SpectralSplitting s;
  std::vector<Eigen::VectorXd> sb, cb, ub;
  auto push_real_parts = [d](std::vector<Eigen::VectorXd>& dst,
                             const Eigen::VectorXcd& v) {
    Eigen::VectorXd re = v.real(), im = v.imag();
    if (re.norm() > 1e-12) dst.push_back(re / re.norm());
    if (im.norm() > 1e-12) dst.push_back(im / im.norm());
  };
  for (int i = 0; i < d; ++i) {
    double mod = std::abs(es.eigenvalues()(i));
    Eigen::VectorXcd v = es.eigenvectors().col(i);
    if (mod < 1.0 - mod_tol) {
      s.lambda = std::max(s.lambda, mod);
      push_real_parts(sb, v);
    } else if (mod > 1.0 + mod_tol) {
      s.mu = (s.mu == 0.0) ? mod : std::min(s.mu, mod);
      push_real_parts(ub, v);
    } else {
      s.gamma_hat = std::min(s.gamma_hat, mod);
      s.gamma = std::max(s.gamma, mod);
      push_real_parts(cb, v);
    }
  }

  auto orthonormal_trim = [d](std::vector<Eigen::VectorXd>& cols) {
    if (cols.empty()) return Eigen::MatrixXd(d, 0);
    Eigen::MatrixXd raw(d, (int)cols.size());
    for (size_t j = 0; j < cols.size(); ++j) raw.col((int)j) = cols[j];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(raw);
    int r = (int)qr.rank();
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, r);
    return q;
  };
  s.stable_basis = orthonormal_trim(sb);
  s.center_basis = orthonormal_trim(cb);
  s.unstable_basis = orthonormal_trim(ub);
  s.stable_dim = (int)s.stable_basis.cols();
  s.center_dim = (int)s.center_basis.cols();
  s.unstable_dim = (int)s.unstable_basis.cols();
  if (s.stable_dim + s.center_dim + s.unstable_dim != d)
    fail(ErrorCode::InvalidInput, "spectral_splitting: subspace dims do not sum to d");

  // Real-diagonalizable check: d independent real eigenvector directions with
  // real eigenvalues.
  bool all_real = true;
  for (int i = 0; i < d; ++i)
    if (std::fabs(es.eigenvalues()(i).imag()) > 1e-12) all_real = false;
  if (all_real) {
    Eigen::MatrixXd vecs = es.eigenvectors().real();
    s.real_diagonalizable =
        (int)Eigen::FullPivLU<Eigen::MatrixXd>(vecs).rank() == d;
  }
  if (s.real_diagonalizable) {
    s.c_constant = 1.0;
  } else {
    // Empirical C over n <= 20 applied to the grouped unit basis vectors.
    double c = 1.0;
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
    for (int n = 1; n <= 20; ++n) {
      power = m * power;
      for (int j = 0; j < s.stable_dim; ++j)
        c = std::max(c, (power * s.stable_basis.col(j)).norm() / std::pow(s.lambda, n));
      for (int j = 0; j < s.unstable_dim; ++j)
        c = std::max(c, std::pow(s.mu, n) / std::max((power * s.unstable_basis.col(j)).norm(), 1e-300));
      for (int j = 0; j < s.center_dim; ++j) {
        double g = (power * s.center_basis.col(j)).norm();
        c = std::max(c, g / std::pow(s.gamma, n));
        c = std::max(c, std::pow(s.gamma_hat, n) / std::max(g, 1e-300));
      }
    }
    s.c_constant = c;
  }

  if (s.center_dim == 0 && s.stable_dim > 0 && s.unstable_dim > 0)
    s.classification = SplittingClass::Anosov;
  else if (s.center_dim > 0 && (s.stable_dim > 0 || s.unstable_dim > 0))
    s.classification = SplittingClass::PartiallyHyperbolic;
  else
    s.classification = SplittingClass::NotPartiallyHyperbolic;
  return s;
}

C0DistanceBounds c0_distance(const ToralMap& f, const ToralMap& g, const Grid& grid) {
  if (f.dim() != g.dim()) fail(ErrorCode::DimMismatch, "c0_distance");
  if (f.matrix() != g.matrix())
    fail(ErrorCode::Unsupported, "c0_distance: maps must share the integer matrix");
  double lower = 0.0;
  for (size_t c = 0; c < grid.cell_count(); ++c) {
    TorusPoint x = grid.cell_center(c);
    lower = std::max(lower, torus_dist(f.apply(x), g.apply(x)));
  }
  double upper = lower +
      (f.perturbation_lipschitz() + g.perturbation_lipschitz()) * grid.cell_diameter();
  return {lower, upper};
}

PerturbationResult build_perturbation(const ToralMap& f, const DisplacementRequest& req,
                                      double radius) {
  if (req.pairs.empty()) return {f, 0.0};
  double separation = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < req.pairs.size(); ++i)
    for (size_t j = i + 1; j < req.pairs.size(); ++j)
      separation = std::min(separation,
                            torus_dist(req.pairs[i].first, req.pairs[j].first));
  if (req.pairs.size() > 1 && radius >= separation / 2)
    fail(ErrorCode::InvalidInput, "build_perturbation: radius >= separation/2");

  std::vector<BumpTerm> bumps;
  double max_disp = 0.0;
  for (const auto& [site, target] : req.pairs) {
    TorusPoint image = f.apply(site);
    Vec disp = torus_displacement(image, target);
    double dn = norm(disp);
    if (dn >= radius / 2)
      fail(ErrorCode::InvalidInput, "build_perturbation: displacement too large for radius");
    max_disp = std::max(max_disp, dn);
    bumps.push_back({image, disp, radius});
  }
  for (size_t i = 0; i < bumps.size(); ++i)
    for (size_t j = i + 1; j < bumps.size(); ++j)
      if (torus_dist(bumps[i].center, bumps[j].center) <= 2 * radius)
        fail(ErrorCode::SupportOverlap, "build_perturbation: bump supports overlap");

  ToralMap g = f;
  g.append_bumps(bumps);  // throws NotInvertible if the field is too steep
  return {std::move(g), max_disp};
}

ToralMap induced_quotient_map(const ToralMap& f, const LinearFoliation& fol) {
  if (fol.kind() == FoliationKind::WholeManifold)
    fail(ErrorCode::Unsupported, "induced_quotient_map: quotient is a point");
  if (fol.kind() == FoliationKind::Points) return f;
  if (!f.bumps().empty())
    fail(ErrorCode::Unsupported, "induced_quotient_map: bump perturbations not supported");

  const IntMat& w = fol.transverse_basis();
  const int t = (int)w.size();
  const int d = f.dim();
  // M must map V into V.
  for (const auto& v : fol.directions()) {
    IntVec mv = int_mat_vec(f.matrix(), v);
    for (const auto& row : w) {
      long long s = 0;
      for (int i = 0; i < d; ++i) s += row[i] * mv[i];
      if (s != 0)
        fail(ErrorCode::NotInvariant,
             "induced_quotient_map: matrix does not preserve the leaf direction");
    }
  }
  // Solve W M = A W over the integers.
  IntMat wm = int_mat_mul(w, f.matrix());
  Eigen::MatrixXd we = to_eigen(w), wme = to_eigen(wm);
  Eigen::MatrixXd a_real =
      we.transpose().jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
          .solve(wme.transpose()).transpose();
  IntMat a(t, IntVec(t));
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j) a[i][j] = std::llround(a_real(i, j));
  if (int_mat_mul(a, w) != wm)
    fail(ErrorCode::NotInvariant, "induced_quotient_map: no integer quotient matrix");

  std::vector<TrigTerm> qterms;
  for (const auto& term : f.perturbation()) {
    Vec tc(t, 0.0);
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < d; ++j) tc[i] += (double)w[i][j] * term.coeff[j];
    if (norm(tc) <= 1e-15) continue;  // purely in-leaf displacement
    // freq must lie in the row lattice of W for leaf-constancy.
    Eigen::VectorXd fr(d);
    for (int j = 0; j < d; ++j) fr(j) = (double)term.freq[j];
    Eigen::VectorXd m_real =
        we.transpose().jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(fr);
    IntVec m(t);
    for (int i = 0; i < t; ++i) m[i] = std::llround(m_real(i));
    IntVec back(d, 0);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < t; ++i) back[j] += w[i][j] * m[i];
    bool matches = true;
    for (int j = 0; j < d; ++j)
      if (back[j] != term.freq[j]) matches = false;
    if (!matches)
      fail(ErrorCode::NotInvariant,
           "induced_quotient_map: transverse displacement is not leaf-constant");
    qterms.push_back({m, tc, term.is_sin});
  }
  return ToralMap(a, std::move(qterms), f.tau_inv());
}

bool preserves_foliation(const ToralMap& f, const LinearFoliation& fol,
                         std::mt19937_64& rng, int samples, double tol) {
  if (fol.kind() == FoliationKind::WholeManifold) return true;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int d = f.dim();
  for (int s = 0; s < samples; ++s) {
    Vec xv(d);
    for (int i = 0; i < d; ++i) xv[i] = unit(rng);
    TorusPoint x = wrap(xv);
    Vec yv = xv;
    if (fol.kind() == FoliationKind::Linear) {
      for (const auto& dir : fol.directions()) {
        double c = unit(rng) - 0.5;
        for (int i = 0; i < d; ++i) yv[i] += c * (double)dir[i];
      }
    }
    TorusPoint y = wrap(yv);
    if (!fol.same_leaf(x, y, tol)) continue;
    if (!fol.same_leaf(f.apply(x), f.apply(y), tol)) return false;
  }
  return true;
}

}  // namespace folia
