#pragma once

// Intersection and sum norms on families x = (x_1, ..., x_n) of M_l blocks
// with normalized trace. At scalar level each inner asymmetric norm is
// l^{-1/γ} ‖x_k‖_{S_γ}, so the (r, s) term is l^{-1/γ} ‖⊕_k x_k‖_{S_γ}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ncspace/mixednorm/norms.hpp"

namespace ncspace {

namespace detail {

inline RVec stacked_singular_values(const std::vector<CMat>& xs) {
  std::vector<double> all;
  for (const auto& x : xs) {
    const RVec s = singular_values(x);
    all.insert(all.end(), s.data(), s.data() + s.size());
  }
  return Eigen::Map<RVec>(all.data(), static_cast<Eigen::Index>(all.size()));
}

inline double block_schatten(const std::vector<CMat>& xs, const Exponent& g) {
  return lp_norm(stacked_singular_values(xs), g);
}

/// Distinct γ over the (r, s) pairs, with the weight l^{-1/γ}.
struct JKTerm {
  Exponent gamma;
  double weight = 1.0;
};

inline std::vector<JKTerm> jk_terms(const JKNormSpec& spec) {
  std::vector<JKTerm> out;
  for (const auto& [r, s] : spec.pairs()) {
    const Exponent g = Exponent::harmonic_sum(r, s);
    const bool seen = std::any_of(out.begin(), out.end(), [&](const JKTerm& t) { return t.gamma == g; });
    if (!seen) out.push_back({g, std::pow(static_cast<double>(spec.l), -g.reciprocal())});
  }
  return out;
}

inline std::vector<CMat> combine(const std::vector<CMat>& a, double ca, const std::vector<CMat>& b,
                                 double cb) {
  std::vector<CMat> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = ca * a[k] + cb * b[k];
  return out;
}

inline double family_inner(const std::vector<CMat>& w, const std::vector<CMat>& x) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (w[k].conjugate().array() * x[k].array()).sum();
  return std::abs(s);
}

}  // namespace detail

/// Term-by-term values l^{-1/γ}(Σ_k ‖x_k‖_{S_γ}^γ)^{1/γ} over the four (r, s) pairs.
inline std::vector<double> jk_intersection_terms(const VectorElement& x, const JKNormSpec& spec) {
  std::vector<double> out;
  for (const auto& [r, s] : spec.pairs()) {
    const Exponent g = Exponent::harmonic_sum(r, s);
    out.push_back(std::pow(static_cast<double>(spec.l), -g.reciprocal()) *
                  detail::block_schatten(x.components, g));
  }
  return out;
}

inline CertifiedValue jk_norm(const VectorElement& x, const JKNormSpec& spec,
                              const SolverOptions& opt = {}) {
  spec.validate();
  x.validate();
  if (x.size() != spec.n || x.dimension() != spec.l) {
    throw DimensionError("jk_norm: family shape does not match spec");
  }
  CertifiedValue cv;
  if (x.is_zero()) return detail::zero_value(x, opt.tolerance);

  if (spec.mode == JKMode::intersection) {
    const auto terms = jk_intersection_terms(x, spec);
    cv.lower = cv.upper = *std::max_element(terms.begin(), terms.end());
    detail::finalize(cv, opt.tolerance);
    return cv;
  }

  // Sum mode: min Σ_j c_j ‖⊕ Y_j‖_{γ_j} subject to Σ_j Y_j = x. The (2p, 2q) and
  // (2q, 2p) pieces have the same norm and are merged.
  const auto terms = detail::jk_terms(spec);
  const std::size_t J = terms.size();
  const std::size_t n = x.size();
  double scale = 0.0;
  for (const auto& c : x.components) scale = std::max(scale, operator_norm(c));
  std::vector<CMat> X(n);
  for (std::size_t k = 0; k < n; ++k) X[k] = x[k] / scale;

  auto objective = [&](const std::vector<std::vector<CMat>>& ys) {
    double v = 0.0;
    for (std::size_t j = 0; j < J; ++j) v += terms[j].weight * detail::block_schatten(ys[j], terms[j].gamma);
    return v;
  };
  auto dual_norm = [&](const std::vector<CMat>& w) {
    double d = 0.0;
    for (const auto& t : terms) d = std::max(d, detail::block_schatten(w, t.gamma.conjugate()) / t.weight);
    return d;
  };

  std::vector<std::vector<CMat>> Y(J, X);
  for (auto& y : Y) {
    for (auto& c : y) c /= static_cast<double>(J);
  }
  std::vector<CMat> U(n, CMat::Zero(spec.l, spec.l));
  double best_upper = std::numeric_limits<double>::infinity();
  double best_lower = 0.0;
  std::vector<std::vector<CMat>> best_pieces;
  std::vector<CMat> best_w;
  double rho = 1.0;

  auto consider_upper = [&]() {
    std::vector<CMat> resid = X;
    for (const auto& y : Y) resid = detail::combine(resid, 1.0, y, -1.0);
    for (std::size_t j = 0; j < J; ++j) {
      auto cand = Y;
      cand[j] = detail::combine(cand[j], 1.0, resid, 1.0);
      const double v = objective(cand);
      if (v < best_upper) {
        best_upper = v;
        best_pieces = std::move(cand);
      }
    }
  };
  auto consider_lower = [&](const std::vector<CMat>& w) {
    const double d = dual_norm(w);
    if (d <= 0.0) return;
    const double v = detail::family_inner(w, X) / d;
    if (v > best_lower) {
      best_lower = v;
      best_w = w;
      for (auto& c : best_w) c /= d;
    }
  };

  int it = 0;
  if (J == 1) {
    best_pieces = {X};
    best_upper = objective(best_pieces);
    // Hölder equality witness for a single Schatten term.
    const Exponent g = terms[0].gamma;
    std::vector<CMat> w;
    for (const auto& c : X) {
      Eigen::JacobiSVD<CMat> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
      RVec sv = svd.singularValues();
      RVec d(sv.size());
      if (g.is_infinite()) {
        d.setZero();
      } else if (g.reciprocal() == 1.0) {
        d.setOnes();
      } else {
        for (Eigen::Index i = 0; i < sv.size(); ++i) d[i] = std::pow(sv[i], g.value() - 1.0);
      }
      w.push_back(svd.matrixU() * d.asDiagonal() * svd.matrixV().adjoint());
    }
    if (g.is_infinite()) {
      // rank one on the top singular pair of the largest block
      std::size_t top = 0;
      double bv = -1.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double v = operator_norm(X[k]);
        if (v > bv) {
          bv = v;
          top = k;
        }
      }
      CVec u, v;
      for (auto& c : w) c.setZero();
      w[top] = detail::top_singular_pair(X[top], u, v);
    }
    consider_lower(w);
  } else {
    const double Jd = static_cast<double>(J);
    for (; it < opt.max_iterations; ++it) {
      std::vector<CMat> ybar(n, CMat::Zero(spec.l, spec.l));
      for (const auto& y : Y) ybar = detail::combine(ybar, 1.0, y, 1.0 / Jd);
      std::vector<std::vector<CMat>> V(J);
      double rd = 0.0;
      for (std::size_t j = 0; j < J; ++j) {
        V[j].resize(n);
        for (std::size_t k = 0; k < n; ++k) V[j][k] = Y[j][k] - ybar[k] + X[k] / Jd - U[k];
        auto next = prox::block_schatten_prox(V[j], terms[j].gamma, terms[j].weight / rho);
        for (std::size_t k = 0; k < n; ++k) rd += (next[k] - Y[j][k]).squaredNorm();
        Y[j] = std::move(next);
      }
      std::vector<CMat> ynew(n, CMat::Zero(spec.l, spec.l));
      for (const auto& y : Y) ynew = detail::combine(ynew, 1.0, y, 1.0 / Jd);
      double rp = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const CMat d = ynew[k] - X[k] / Jd;
        U[k] += d;
        rp += d.squaredNorm();
      }
      if ((it + 1) % opt.check_every == 0) {
        consider_upper();
        std::vector<CMat> w(n);
        for (std::size_t k = 0; k < n; ++k) w[k] = -rho * U[k];
        consider_lower(w);
        for (std::size_t j = 0; j < J; ++j) consider_lower(detail::combine(V[j], rho, Y[j], -rho));
        if (relative_gap(best_lower, best_upper) <= opt.tolerance) {
          ++it;
          break;
        }
        const double rpn = std::sqrt(rp) * Jd;
        const double rdn = rho * std::sqrt(rd);
        if (rpn > 10.0 * rdn) {
          rho *= 2.0;
          for (auto& u : U) u /= 2.0;
        } else if (rdn > 10.0 * rpn) {
          rho /= 2.0;
          for (auto& u : U) u *= 2.0;
        }
      }
    }
    consider_upper();
  }

  cv.upper = scale * best_upper;
  cv.lower = scale * best_lower;
  cv.iterations = it;
  for (auto& piece : best_pieces) {
    for (auto& c : piece) c *= scale;
  }
  cv.decomposition = std::move(best_pieces);
  // Dual witness in the transpose pairing under τ_l: w̃ = l·conj(W).
  cv.dual.weight = TraceWeight::Kind::normalized;
  for (const auto& w : best_w) cv.dual.components.push_back(static_cast<double>(spec.l) * w.conjugate());
  cv.dual_scale = static_cast<double>(spec.l);
  detail::finalize(cv, opt.tolerance);
  return cv;
}

}  // namespace ncspace
