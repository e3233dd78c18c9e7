#pragma once

// Proximal maps of ℓ_p norms on real vectors and their spectral lifts to
// Hermitian matrices and to block families of general matrices.

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ncspace/matcore.hpp"

namespace ncspace::prox {

/// Euclidean projection of a nonnegative vector onto {w >= 0 : Σ w = radius}
/// when it lies outside the ℓ_1 ball.
inline RVec project_l1_ball_abs(const RVec& a, double radius) {
  if (a.sum() <= radius) return a;
  std::vector<double> s(a.data(), a.data() + a.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cum += s[i];
    const double t = (cum - radius) / static_cast<double>(i + 1);
    if (i + 1 == s.size() || s[i + 1] <= t) {
      theta = t;
      break;
    }
  }
  return (a.array() - theta).max(0.0).matrix();
}

/// Projection of a nonnegative vector onto the ℓ_q ball of the given radius,
/// 1 < q < ∞. Solves w_i + μ q w_i^{q-1} = a_i with Σ w_i^q = radius^q.
inline RVec project_lq_ball_abs(const RVec& a_in, double q, double radius) {
  const double nrm = lp_norm(a_in, Exponent(q));
  if (nrm <= radius) return a_in;
  const RVec a = a_in / radius;  // project onto the unit ball, rescale at the end
  using boost::math::tools::eps_tolerance;
  using boost::math::tools::toms748_solve;

  auto coordinate = [q](double ai, double mu) {
    if (ai <= 0.0) return 0.0;
    auto h = [&](double w) { return w + mu * q * std::pow(w, q - 1.0) - ai; };
    std::uintmax_t it = 100;
    auto r = toms748_solve(h, 0.0, ai, -ai, mu * q * std::pow(ai, q - 1.0), eps_tolerance<double>(52),
                           it);
    return 0.5 * (r.first + r.second);
  };
  auto excess = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += std::pow(coordinate(a[i], mu), q);
    return s - 1.0;
  };
  double hi = 1.0;
  double f_hi = excess(hi);
  while (f_hi > 0.0) {
    hi *= 4.0;
    f_hi = excess(hi);
  }
  double lo = 0.0;
  double f_lo = excess(0.0);
  if (f_hi == 0.0) lo = hi;
  double mu = hi;
  if (lo != hi) {
    std::uintmax_t it = 200;
    auto r = toms748_solve(excess, lo, hi, f_lo, f_hi, eps_tolerance<double>(50), it);
    mu = 0.5 * (r.first + r.second);
  }
  RVec w(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) w[i] = coordinate(a[i], mu);
  // Renormalize away the residual root-finding error.
  const double wn = lp_norm(w, Exponent(q));
  if (wn > 0.0) w /= wn;
  return radius * w;
}

/// Projection of an arbitrary real vector onto the ℓ_q ball (q ∈ [1, ∞]).
inline RVec project_lq_ball(const RVec& v, const Exponent& q, double radius) {
  const RVec a = v.cwiseAbs();
  RVec w;
  if (q.is_infinite()) {
    w = a.cwiseMin(radius);
  } else if (q.reciprocal() == 1.0) {
    w = project_l1_ball_abs(a, radius);
  } else if (q.reciprocal() == 0.5) {
    const double n = a.norm();
    w = n <= radius ? a : RVec(a * (radius / n));
  } else {
    w = project_lq_ball_abs(a, q.value(), radius);
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) w[i] = -w[i];
  }
  return w;
}

/// prox of λ‖·‖_p: argmin_w λ‖w‖_p + ½‖w − v‖², via Moreau decomposition.
inline RVec lp_norm_prox(const RVec& v, const Exponent& p, double lambda) {
  if (lambda <= 0.0) return v;
  if (p.reciprocal() == 1.0) {
    RVec w(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double m = std::max(std::abs(v[i]) - lambda, 0.0);
      w[i] = v[i] < 0.0 ? -m : m;
    }
    return w;
  }
  return v - project_lq_ball(v, p.conjugate(), lambda);
}

/// prox of λ‖·‖_{S_p} restricted to Hermitian matrices.
inline CMat hermitian_schatten_prox(const CMat& h, const Exponent& p, double lambda) {
  const HermitianEigen e = hermitian_eigen(hermitian_part(h));
  const RVec w = lp_norm_prox(e.values, p, lambda);
  return e.vectors * w.asDiagonal() * e.vectors.adjoint();
}

/// prox of λ‖⊕_k y_k‖_{S_p} on a family of matrices: all singular values are
/// shrunk jointly.
inline std::vector<CMat> block_schatten_prox(const std::vector<CMat>& blocks, const Exponent& p,
                                             double lambda) {
  std::vector<Eigen::JacobiSVD<CMat>> svds;
  svds.reserve(blocks.size());
  Eigen::Index total = 0;
  for (const auto& b : blocks) {
    svds.emplace_back(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    total += svds.back().singularValues().size();
  }
  RVec all(total);
  Eigen::Index off = 0;
  for (const auto& s : svds) {
    all.segment(off, s.singularValues().size()) = s.singularValues();
    off += s.singularValues().size();
  }
  const RVec shrunk = lp_norm_prox(all, p, lambda);
  std::vector<CMat> out;
  out.reserve(blocks.size());
  off = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& s = svds[k];
    const Eigen::Index r = s.singularValues().size();
    const RVec d = shrunk.segment(off, r);
    off += r;
    out.push_back(s.matrixU().leftCols(r) * d.asDiagonal() * s.matrixV().leftCols(r).adjoint());
  }
  return out;
}

}  // namespace ncspace::prox
