#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "ncspace/matcore.hpp"
#include "ncspace/mixednorm/factorization.hpp"
#include "ncspace/mixednorm/prox.hpp"
#include "ncspace/mixednorm/vector_element.hpp"
#include "ncspace/random.hpp"

namespace ncspace {

enum class CertStatus { converged, gap_not_closed };

inline const char* to_string(CertStatus s) {
  return s == CertStatus::converged ? "converged" : "gap_not_closed";
}

/// A norm as a bracket [lower, upper] with the certificates behind each end.
///
/// `primal` factors the input in unnormalized trace units; its objective times
/// `scale` is the upper bound. `dual` lies in the unit ball of the dual space
/// for the transpose pairing under the input's trace weight, and
/// `dual_certificate` factors conj(dual)/dual_scale (unnormalized) with value
/// at most 1.
struct CertifiedValue {
  double lower = 0.0;
  double upper = 0.0;
  double gap = 0.0;
  Factorization primal;
  VectorElement dual;
  Factorization dual_certificate;
  Coupling coupling = Coupling::shared;
  Exponent left_exponent;
  Exponent right_exponent;
  double scale = 1.0;
  double dual_scale = 1.0;
  std::vector<std::vector<CMat>> decomposition;  ///< sum-mode pieces, if any
  int iterations = 0;
  CertStatus status = CertStatus::converged;
  double tolerance = 1e-6;

  bool converged() const { return status == CertStatus::converged; }
  double midpoint() const { return 0.5 * (lower + upper); }
};

namespace detail {

inline void finalize(CertifiedValue& cv, double tol) {
  cv.tolerance = tol;
  if (cv.lower > cv.upper) cv.lower = cv.upper;  // rounding only; both ends are certified
  cv.gap = relative_gap(cv.lower, cv.upper);
  if (cv.upper == 0.0) cv.gap = 0.0;
  cv.status = cv.gap <= tol ? CertStatus::converged : CertStatus::gap_not_closed;
}

inline CertifiedValue zero_value(const VectorElement& x, double tol) {
  CertifiedValue cv;
  cv.dual = x;
  for (auto& c : cv.dual.components) c.setZero();
  cv.primal.value = 0.0;
  cv.dual_certificate.value = 0.0;
  finalize(cv, tol);
  return cv;
}

/// Packages an unnormalized primal factorization and dual family.
inline CertifiedValue package(const VectorElement& x, Coupling coupling, const Exponent& pl,
                              const Exponent& pr, Factorization primal, const DualWitness& dual,
                              double scale, int iterations, double tol) {
  CertifiedValue cv;
  cv.coupling = coupling;
  cv.left_exponent = pl;
  cv.right_exponent = pr;
  cv.scale = scale;
  cv.upper = scale * primal.value;
  cv.primal = std::move(primal);
  cv.iterations = iterations;
  const double m = static_cast<double>(x.dimension());
  cv.dual_scale = x.weight == TraceWeight::Kind::normalized ? m * scale : 1.0;
  cv.dual.weight = x.weight;
  if (dual.norm_bound > 0.0 && !dual.z.empty()) {
    const double nb = dual.norm_bound;
    cv.lower = scale * dual.pairing / nb;
    for (const auto& z : dual.z) cv.dual.components.push_back(cv.dual_scale * z.conjugate() / nb);
    cv.dual_certificate = dual.norm_certificate;
    for (auto& l : cv.dual_certificate.left) l /= nb;
    for (auto& r : cv.dual_certificate.right) r /= nb;
    cv.dual_certificate.value /= nb;
    cv.dual_certificate.residual /= nb;
  } else {
    for (const auto& c : x.components) cv.dual.components.push_back(CMat::Zero(c.rows(), c.cols()));
  }
  finalize(cv, tol);
  return cv;
}

inline CMat top_singular_pair(const CMat& x, CVec& u, CVec& v) {
  Eigen::JacobiSVD<CMat> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  u = svd.matrixU().col(0);
  v = svd.matrixV().col(0);
  return u * v.adjoint();
}

}  // namespace detail

/// Substitutes the primal certificate: returns max_k ‖L^{1/2} y_k R^{1/2} − x_k‖_F.
inline double primal_residual(const CertifiedValue& cv, const VectorElement& x) {
  if (cv.primal.middle.empty()) return x.is_zero() ? 0.0 : std::numeric_limits<double>::infinity();
  double r = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const CMat& l = detail::shape_for(cv.primal.left, k);
    const CMat& rr = detail::shape_for(cv.primal.right, k);
    r = std::max(r, (psd_power(l, 0.5) * cv.primal.middle[k] * psd_power(rr, 0.5) - x[k]).norm());
  }
  return r;
}

/// Objective of the primal certificate recomputed from its factors.
inline double primal_objective(const CertifiedValue& cv) {
  if (cv.primal.middle.empty()) return 0.0;
  return cv.scale *
         factorization_objective(cv.primal, cv.coupling, cv.left_exponent, cv.right_exponent);
}

/// Substitutes the dual certificate: max_k ‖L^{1/2} y_k R^{1/2} − conj(w_k)/dual_scale‖_F.
inline double dual_residual(const CertifiedValue& cv) {
  if (cv.dual_certificate.middle.empty()) return 0.0;
  double r = 0.0;
  for (std::size_t k = 0; k < cv.dual.size(); ++k) {
    const CMat& l = detail::shape_for(cv.dual_certificate.left, k);
    const CMat& rr = detail::shape_for(cv.dual_certificate.right, k);
    const CMat target = cv.dual[k].conjugate() / cv.dual_scale;
    r = std::max(r, (psd_power(l, 0.5) * cv.dual_certificate.middle[k] * psd_power(rr, 0.5) - target).norm());
  }
  return r;
}

/// Norm bound certified by the dual certificate (≤ 1 up to rounding).
inline double dual_objective(const CertifiedValue& cv) {
  if (cv.dual_certificate.middle.empty()) return 0.0;
  return factorization_objective(cv.dual_certificate, dual_coupling(cv.coupling),
                                 cv.left_exponent.conjugate(), cv.right_exponent.conjugate());
}

// Block PSD residual of a factorization: min over k of λ_min([[L, x_k], [x_k*, R]]).
inline double block_psd_residual(const Factorization& f, const std::vector<CMat>& x) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    const CMat& l = detail::shape_for(f.left, k);
    const CMat& r = detail::shape_for(f.right, k);
    const Eigen::Index m = l.rows(), c = r.rows();
    CMat w(m + c, m + c);
    w << l, x[k], x[k].adjoint(), r;
    worst = std::min(worst, min_eigenvalue(w));
  }
  return worst;
}

namespace detail {

inline CertifiedValue solve_vector_norm(const VectorElement& x, Coupling coupling, const Exponent& p,
                                        const SolverOptions& opt) {
  const double scale = x.trace_weight().norm_scale(p);
  const FactorizationSolution s = solve_factorization(x.components, coupling, p, p, opt);
  return package(x, coupling, p, p, s.primal, s.dual, scale, s.iterations, opt.tolerance);
}

}  // namespace detail

/// ‖x‖_{L_p(w; ℓ_∞^n)}.
inline CertifiedValue norm_linf_valued(const VectorElement& x, const Exponent& p,
                                       const SolverOptions& opt = {}) {
  x.validate();
  p.require_at_least_one("norm_linf_valued");
  if (x.is_zero()) return detail::zero_value(x, opt.tolerance);
  if (p.is_infinite()) {
    // max_k ‖x_k‖_∞, certified by A = B = t·I and a rank-one dual.
    std::size_t top = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double v = operator_norm(x[k]);
      if (v > best) {
        best = v;
        top = k;
      }
    }
    const Eigen::Index m = x.dimension();
    Factorization primal =
        certify_factorization(x.components, Coupling::shared, p, p, {identity(m)}, {identity(m)});
    CVec u, v;
    std::vector<CMat> z(x.size(), CMat::Zero(m, m));
    z[top] = detail::top_singular_pair(x[top], u, v);
    std::vector<CMat> dl(x.size(), identity(m)), dr(x.size(), identity(m));
    dl[top] = u * u.adjoint();
    dr[top] = v * v.adjoint();
    const DualWitness dual = certify_dual(x.components, Coupling::shared, p, p, z, dl, dr);
    return detail::package(x, Coupling::shared, p, p, std::move(primal), dual, 1.0, 0, opt.tolerance);
  }
  return detail::solve_vector_norm(x, Coupling::shared, p, opt);
}

/// ‖x‖_{L_p(w; ℓ_1^n)}, p < ∞.
inline CertifiedValue norm_l1_valued(const VectorElement& x, const Exponent& p,
                                     const SolverOptions& opt = {}) {
  x.validate();
  p.require_at_least_one("norm_l1_valued");
  if (p.is_infinite()) throw DomainError("norm_l1_valued: p must be finite");
  if (x.is_zero()) return detail::zero_value(x, opt.tolerance);
  if (p.reciprocal() == 1.0) {
    // Direct sum: polar decompositions give both certificates.
    const Eigen::Index m = x.dimension();
    std::vector<CMat> ls, rs, z;
    for (const auto& c : x.components) {
      Eigen::JacobiSVD<CMat> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const CMat& u = svd.matrixU();
      const CMat& v = svd.matrixV();
      const RVec& sv = svd.singularValues();
      ls.push_back(u * sv.asDiagonal() * u.adjoint());
      rs.push_back(v * sv.asDiagonal() * v.adjoint());
      z.push_back(u * v.adjoint());
    }
    Factorization primal = certify_factorization(x.components, Coupling::per_component, p, p, ls, rs);
    const DualWitness dual =
        certify_dual(x.components, Coupling::per_component, p, p, z, {identity(m)}, {identity(m)});
    const double scale = x.trace_weight().norm_scale(p);
    return detail::package(x, Coupling::per_component, p, p, std::move(primal), dual, scale, 0,
                           opt.tolerance);
  }
  return detail::solve_vector_norm(x, Coupling::per_component, p, opt);
}

/// (Σ_k ‖x_k‖_{L_p(w)}^p)^{1/p}: the ℓ_p^n-valued norm, which splits.
inline double block_lp_norm(const VectorElement& x, const Exponent& p) {
  RVec parts(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) parts[k] = lp_trace_norm(x[k], p, x.trace_weight());
  return lp_norm(parts, p);
}

/// ‖x‖_{L_p(w; ℓ_q^n)}. Exact for q ∈ {1, p, ∞}; otherwise a bracket from the
/// endpoint norms.
inline CertifiedValue norm_lq_valued(const VectorElement& x, const Exponent& p, const Exponent& q,
                                     const SolverOptions& opt = {}) {
  q.require_at_least_one("norm_lq_valued");
  if (q.is_infinite()) return norm_linf_valued(x, p, opt);
  if (q.reciprocal() == 1.0) return norm_l1_valued(x, p, opt);
  x.validate();
  p.require_at_least_one("norm_lq_valued");
  if (q == p) {
    CertifiedValue cv;
    cv.lower = cv.upper = block_lp_norm(x, p);
    detail::finalize(cv, opt.tolerance);
    return cv;
  }
  const CertifiedValue inf_side = norm_linf_valued(x, p, opt);
  CertifiedValue cv = inf_side;
  const double block = block_lp_norm(x, p);
  double upper = std::numeric_limits<double>::infinity();
  if (!p.is_infinite()) {
    const CertifiedValue one_side = norm_l1_valued(x, p, opt);
    const double t = q.reciprocal();
    upper = std::min(one_side.upper, std::pow(inf_side.upper, 1.0 - t) * std::pow(one_side.upper, t));
    cv.iterations += one_side.iterations;
  } else {
    upper = std::pow(static_cast<double>(x.size()), q.reciprocal()) * inf_side.upper;
  }
  if (p <= q) upper = std::min(upper, block);
  double lower = inf_side.lower;
  if (q <= p) lower = std::max(lower, block);
  cv.lower = lower;
  cv.upper = upper;
  detail::finalize(cv, opt.tolerance);
  cv.status = CertStatus::gap_not_closed;
  return cv;
}

/// ‖x‖_{L_(r,s)}: inf ‖α‖_r ‖y‖_∞ ‖β‖_s over x = α y β, 2 ≤ r, s ≤ ∞.
inline CertifiedValue norm_asym_scalar(const CMat& x, const Exponent& r, const Exponent& s,
                                       TraceWeight::Kind weight = TraceWeight::Kind::unnormalized,
                                       const SolverOptions& opt = {}) {
  (void)SpaceDescriptor::asymmetric(r, s);
  require_square(x, "norm_asym_scalar");
  const VectorElement v({x}, weight);
  if (v.is_zero()) return detail::zero_value(v, opt.tolerance);
  const Exponent pl = r.scaled(1, 2), pr = s.scaled(1, 2);
  const Exponent gamma = Exponent::harmonic_sum(r, s);
  const double scale = v.trace_weight().norm_scale(gamma);
  const FactorizationSolution sol = solve_factorization(v.components, Coupling::shared, pl, pr, opt);
  return detail::package(v, Coupling::shared, pl, pr, sol.primal, sol.dual, scale, sol.iterations,
                         opt.tolerance);
}

/// (Σ_j w_j (Σ_k |v_kj|^q)^{p/q})^{1/p}; rows index k, columns index j.
inline double commutative_mixed_norm(const Eigen::MatrixXd& values, const RVec& weights,
                                     const Exponent& p, const Exponent& q) {
  p.require_at_least_one("commutative_mixed_norm");
  q.require_at_least_one("commutative_mixed_norm");
  if (weights.size() != values.cols()) throw DimensionError("commutative_mixed_norm: weight length");
  if ((weights.array() < 0.0).any()) throw DomainError("commutative_mixed_norm: negative weight");
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw DomainError("commutative_mixed_norm: weights must sum to 1");
  }
  RVec inner(values.cols());
  for (Eigen::Index j = 0; j < values.cols(); ++j) inner[j] = lp_norm(values.col(j), q);
  if (p.is_infinite()) {
    double m = 0.0;
    for (Eigen::Index j = 0; j < inner.size(); ++j) {
      if (weights[j] > 0.0) m = std::max(m, inner[j]);
    }
    return m;
  }
  const double top = inner.maxCoeff();
  if (top == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < inner.size(); ++j) acc += weights[j] * std::pow(inner[j] / top, p.value());
  return top * std::pow(acc, p.reciprocal());
}

namespace detail {

/// ξ in the unit sphere of ℓ_{q'} with Σ ξ_k c_k = ‖c‖_q.
inline CVec holder_dual(const CVec& c, const Exponent& q) {
  const Eigen::Index n = c.size();
  CVec xi = CVec::Zero(n);
  const RVec a = c.cwiseAbs();
  if (a.maxCoeff() == 0.0) {
    xi[0] = 1.0;
    return xi;
  }
  auto phase = [&](Eigen::Index k) { return a[k] > 0.0 ? std::conj(c[k]) / a[k] : cplx(1.0); };
  if (q.is_infinite()) {
    Eigen::Index k = 0;
    a.maxCoeff(&k);
    xi[k] = phase(k);
  } else if (q.reciprocal() == 1.0) {
    for (Eigen::Index k = 0; k < n; ++k) xi[k] = phase(k);
  } else {
    const double qv = q.value();
    const double nrm = lp_norm(a, q);
    for (Eigen::Index k = 0; k < n; ++k) xi[k] = phase(k) * std::pow(a[k] / nrm, qv - 1.0);
  }
  return xi;
}

}  // namespace detail

/// Estimate of the L_∞(min ℓ_q^n) norm sup_{‖ξ‖_{q'} ≤ 1} ‖Σ ξ_k y_k‖_∞ by
/// multistart alternating ascent. Always a lower bound of the true value.
inline double min_structure_diagnostic(const VectorElement& y, const Exponent& q, int restarts = 16,
                                       const RngSeed& seed = {0, "min-structure"}) {
  y.validate();
  q.require_at_least_one("min_structure_diagnostic");
  const std::size_t n = y.size();
  const Eigen::Index m = y.dimension();
  auto combine = [&](const CVec& xi) {
    CMat s = CMat::Zero(m, m);
    for (std::size_t k = 0; k < n; ++k) s += xi[static_cast<Eigen::Index>(k)] * y[k];
    return s;
  };
  auto coefficients = [&](const CVec& u, const CVec& v) {
    CVec c(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) c[static_cast<Eigen::Index>(k)] = u.dot(y[k] * v);
    return c;
  };
  auto ascend = [&](CVec xi) {
    double best = operator_norm(combine(xi));
    for (int it = 0; it < 500; ++it) {
      CVec u, v;
      detail::top_singular_pair(combine(xi), u, v);
      xi = detail::holder_dual(coefficients(u, v), q);
      const double val = operator_norm(combine(xi));
      if (val <= best * (1.0 + 1e-15)) {
        best = std::max(best, val);
        break;
      }
      best = val;
    }
    return best;
  };
  double best = 0.0;
  const Eigen::Index nn = static_cast<Eigen::Index>(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    CVec c(nn);
    for (std::size_t k = 0; k < n; ++k) c[static_cast<Eigen::Index>(k)] = y[k](i, i);
    best = std::max(best, ascend(detail::holder_dual(c, q)));
  }
  for (Eigen::Index k = 0; k < nn; ++k) {
    CVec e = CVec::Zero(nn);
    e[k] = 1.0;
    best = std::max(best, ascend(e));
  }
  Engine eng = make_engine(seed);
  const Exponent qc = q.conjugate();
  for (int r = 0; r < restarts; ++r) {
    CVec xi = ginibre(nn, 1, eng).col(0);
    xi /= lp_norm(xi.cwiseAbs(), qc);
    best = std::max(best, ascend(xi));
  }
  return best;
}

struct LemmaDResult {
  double lhs = 0.0;
  double rhs = 0.0;
  CertifiedValue source;
};

/// x[k] is the n×n matrix (x_ij^k)_ij, so the input is Σ_ij e_ij ⊗ x_ij in
/// S_1^n(ℓ_∞^n). lhs = Σ_k |x_kk^k|, rhs = certified upper bound of the source norm.
inline LemmaDResult lemma_d_check(const std::vector<CMat>& x, const SolverOptions& opt = {}) {
  if (x.empty()) throw DimensionError("lemma_d_check: empty input");
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  for (const auto& c : x) {
    if (c.rows() != n || c.cols() != n) throw DimensionError("lemma_d_check: expected n matrices of size n x n");
  }
  LemmaDResult r;
  for (Eigen::Index k = 0; k < n; ++k) r.lhs += std::abs(x[k](k, k));
  r.source = norm_linf_valued(VectorElement(x), Exponent(1.0), opt);
  r.rhs = r.source.upper;
  return r;
}

}  // namespace ncspace
