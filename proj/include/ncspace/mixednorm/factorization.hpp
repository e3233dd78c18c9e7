#pragma once

// Two-sided factorization programs behind the vector-valued and asymmetric
// norms:
//
//   shared:        inf ‖A‖_{pl}^{1/2} ‖B‖_{pr}^{1/2}   s.t. [[A, x_k], [x_k*, B]] ⪰ 0 for all k
//   per-component: inf ‖Σ P_k‖_{pl}^{1/2} ‖Σ Q_k‖_{pr}^{1/2}   s.t. [[P_k, x_k], [x_k*, Q_k]] ⪰ 0
//
// The shared program is the L_p(ℓ_∞^n) norm (and, for n = 1 with pl = r/2,
// pr = s/2, the asymmetric L_(r,s) norm); the per-component program is the
// L_p(ℓ_1^n) norm. The two are dual to each other with conjugate exponents.
//
// Certificates never depend on solver accuracy: any pair of positive shapes
// yields an upper bound after exact rescaling, and any dual family z yields a
// lower bound |Σ tr(z_k* x_k)| / (certified dual norm of z).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ncspace/matcore.hpp"
#include "ncspace/mixednorm/prox.hpp"

namespace ncspace {

enum class Coupling { shared, per_component };

inline Coupling dual_coupling(Coupling c) {
  return c == Coupling::shared ? Coupling::per_component : Coupling::shared;
}

/// x_k = L_k^{1/2} y_k R_k^{1/2} with ‖y_k‖_∞ <= 1. For shared coupling the
/// left/right vectors hold a single matrix.
struct Factorization {
  std::vector<CMat> left;
  std::vector<CMat> right;
  std::vector<CMat> middle;
  double value = std::numeric_limits<double>::infinity();
  double residual = 0.0;  ///< max_k ‖L^{1/2} y_k R^{1/2} − x_k‖_F
  double max_middle_norm = 0.0;
};

namespace detail {

inline const CMat& shape_for(const std::vector<CMat>& shapes, std::size_t k) {
  return shapes.size() == 1 ? shapes.front() : shapes[k];
}

struct RegularizedShape {
  CMat sqrt;
  CMat inv_sqrt;
  CMat matrix;  ///< the regularized positive definite shape itself
};

inline RegularizedShape regularize_shape(const HermitianEigen& e, double rel_floor) {
  const double top = std::max(e.values.maxCoeff(), 0.0);
  const double floor = top > 0.0 ? rel_floor * top : 1.0;
  RVec v = e.values.cwiseMax(floor);
  RegularizedShape s;
  s.matrix = e.vectors * v.asDiagonal() * e.vectors.adjoint();
  s.sqrt = e.vectors * v.cwiseSqrt().asDiagonal() * e.vectors.adjoint();
  s.inv_sqrt = e.vectors * v.cwiseSqrt().cwiseInverse().asDiagonal() * e.vectors.adjoint();
  return s;
}

inline CMat sum_of(const std::vector<CMat>& v) {
  CMat s = v.front();
  for (std::size_t i = 1; i < v.size(); ++i) s += v[i];
  return s;
}

}  // namespace detail

/// Turns candidate shapes into a feasible factorization of x by exact
/// rescaling and returns the best one over a grid of eigenvalue floors.
inline Factorization certify_factorization(const std::vector<CMat>& x, Coupling coupling,
                                           const Exponent& pl, const Exponent& pr,
                                           const std::vector<CMat>& left_shapes,
                                           const std::vector<CMat>& right_shapes) {
  const std::size_t n = x.size();
  const std::size_t shapes = coupling == Coupling::shared ? 1 : n;
  if (left_shapes.size() != shapes || right_shapes.size() != shapes) {
    throw DimensionError("certify_factorization: shape count mismatch");
  }
  std::vector<HermitianEigen> le, re;
  for (std::size_t i = 0; i < shapes; ++i) {
    le.push_back(hermitian_eigen(hermitian_part(left_shapes[i])));
    re.push_back(hermitian_eigen(hermitian_part(right_shapes[i])));
  }
  Factorization best;
  static constexpr std::array<double, 7> kFloors = {1e-15, 1e-13, 1e-11, 1e-9, 1e-7, 1e-5, 1e-3};
  for (double fl : kFloors) {
    std::vector<detail::RegularizedShape> ls, rs;
    for (std::size_t i = 0; i < shapes; ++i) {
      ls.push_back(detail::regularize_shape(le[i], fl));
      rs.push_back(detail::regularize_shape(re[i], fl));
    }
    std::vector<CMat> mids(n);
    std::vector<double> scale(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t s = shapes == 1 ? 0 : k;
      mids[k] = ls[s].inv_sqrt * x[k] * rs[s].inv_sqrt;
      scale[k] = operator_norm(mids[k]);
    }
    Factorization f;
    if (coupling == Coupling::shared) {
      const double t = *std::max_element(scale.begin(), scale.end());
      if (t == 0.0) {
        f.left = {CMat::Zero(x[0].rows(), x[0].rows())};
        f.right = {CMat::Zero(x[0].cols(), x[0].cols())};
        f.middle.assign(n, CMat::Zero(x[0].rows(), x[0].cols()));
        f.value = 0.0;
        return f;
      }
      f.left = {t * ls[0].matrix};
      f.right = {t * rs[0].matrix};
      for (std::size_t k = 0; k < n; ++k) f.middle.push_back(mids[k] / t);
      f.value = std::sqrt(schatten_norm(f.left[0], pl) * schatten_norm(f.right[0], pr));
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        const double t = scale[k];
        if (t == 0.0) {
          f.left.push_back(CMat::Zero(x[k].rows(), x[k].rows()));
          f.right.push_back(CMat::Zero(x[k].cols(), x[k].cols()));
          f.middle.push_back(CMat::Zero(x[k].rows(), x[k].cols()));
        } else {
          f.left.push_back(t * ls[k].matrix);
          f.right.push_back(t * rs[k].matrix);
          f.middle.push_back(mids[k] / t);
        }
      }
      f.value = std::sqrt(schatten_norm(detail::sum_of(f.left), pl) *
                          schatten_norm(detail::sum_of(f.right), pr));
    }
    if (f.value < best.value) best = std::move(f);
  }
  // Re-verify by substitution.
  best.residual = 0.0;
  best.max_middle_norm = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const CMat& l = detail::shape_for(best.left, k);
    const CMat& r = detail::shape_for(best.right, k);
    const CMat rebuilt = psd_power(l, 0.5) * best.middle[k] * psd_power(r, 0.5);
    best.residual = std::max(best.residual, (rebuilt - x[k]).norm());
    best.max_middle_norm = std::max(best.max_middle_norm, operator_norm(best.middle[k]));
  }
  return best;
}

/// Convenience: value of a factorization certificate recomputed from scratch.
inline double factorization_objective(const Factorization& f, Coupling coupling, const Exponent& pl,
                                      const Exponent& pr) {
  const CMat l = coupling == Coupling::shared ? f.left.front() : detail::sum_of(f.left);
  const CMat r = coupling == Coupling::shared ? f.right.front() : detail::sum_of(f.right);
  return std::sqrt(schatten_norm(l, pl) * schatten_norm(r, pr)) * f.max_middle_norm;
}

/// A dual family z together with a certificate that its dual-program norm is
/// at most `norm_bound`. The pairing is sesquilinear: Σ_k tr(z_k* x_k).
struct DualWitness {
  std::vector<CMat> z;
  Factorization norm_certificate;
  double norm_bound = 0.0;
  double pairing = 0.0;  ///< |Σ tr(z_k* x_k)|
  double lower() const { return norm_bound > 0.0 ? pairing / norm_bound : 0.0; }
};

inline double sesquilinear_pairing_abs(const std::vector<CMat>& z, const std::vector<CMat>& x) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (z[k].conjugate().array() * x[k].array()).sum();
  return std::abs(s);
}

inline DualWitness certify_dual(const std::vector<CMat>& x, Coupling primal_coupling,
                                const Exponent& pl, const Exponent& pr, std::vector<CMat> z,
                                const std::vector<CMat>& left_shapes,
                                const std::vector<CMat>& right_shapes) {
  DualWitness w;
  w.norm_certificate = certify_factorization(z, dual_coupling(primal_coupling), pl.conjugate(),
                                             pr.conjugate(), left_shapes, right_shapes);
  w.norm_bound = w.norm_certificate.value;
  w.pairing = sesquilinear_pairing_abs(z, x);
  w.z = std::move(z);
  return w;
}

struct SolverOptions {
  double tolerance = 1e-6;
  int max_iterations = 50000;
  int check_every = 25;
  double initial_rho = 1.0;
};

struct FactorizationSolution {
  Factorization primal;
  DualWitness dual;
  double upper = 0.0;
  double lower = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline double relative_gap(double lower, double upper) {
  return (upper - lower) / std::max(upper, 1e-300);
}

/// ADMM on the block-PSD formulation
///   min ½(‖ΣP‖_{pl} + ‖ΣQ‖_{pr})  s.t.  W_k = [[P_k, x_k], [x_k*, Q_k]] = Z_k ⪰ 0,
/// with P_k ≡ A for shared coupling. The W-step is a spectral prox, the
/// Z-step a PSD projection. Multipliers of W = Z give the dual family.
inline FactorizationSolution solve_factorization(const std::vector<CMat>& x_in, Coupling coupling,
                                                 const Exponent& pl, const Exponent& pr,
                                                 const SolverOptions& opt = {}) {
  const std::size_t n = x_in.size();
  const Eigen::Index m = x_in.front().rows();
  const Eigen::Index mc = x_in.front().cols();
  double scale = 0.0;
  for (const auto& xk : x_in) scale = std::max(scale, operator_norm(xk));
  FactorizationSolution sol;
  if (scale == 0.0) {
    sol.converged = true;
    return sol;
  }
  std::vector<CMat> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = x_in[k] / scale;

  const std::size_t shapes = coupling == Coupling::shared ? 1 : n;
  const double nd = static_cast<double>(n);

  // Cold start from (Σ x x* + εI)^{1/2}.
  std::vector<CMat> P(n), Q(n), Z(n), U(n);
  {
    CMat xx = 1e-3 * identity(m), xsx = 1e-3 * identity(mc);
    for (const auto& xk : x) {
      xx += xk * xk.adjoint();
      xsx += xk.adjoint() * xk;
    }
    const CMat a0 = psd_power(xx, 0.5), b0 = psd_power(xsx, 0.5);
    for (std::size_t k = 0; k < n; ++k) {
      if (coupling == Coupling::shared) {
        P[k] = a0;
        Q[k] = b0;
      } else {
        P[k] = psd_power(x[k] * x[k].adjoint() + 1e-3 * identity(m), 0.5);
        Q[k] = psd_power(x[k].adjoint() * x[k] + 1e-3 * identity(mc), 0.5);
      }
    }
  }
  auto assemble = [&](std::size_t k) {
    CMat w(m + mc, m + mc);
    w.topLeftCorner(m, m) = P[k];
    w.topRightCorner(m, mc) = x[k];
    w.bottomLeftCorner(mc, m) = x[k].adjoint();
    w.bottomRightCorner(mc, mc) = Q[k];
    return w;
  };
  for (std::size_t k = 0; k < n; ++k) {
    Z[k] = psd_projection(assemble(k));
    U[k] = CMat::Zero(m + mc, m + mc);
  }

  double rho = opt.initial_rho;
  double best_upper = std::numeric_limits<double>::infinity();
  double best_lower = 0.0;
  Factorization best_primal;
  DualWitness best_dual;

  auto certify = [&]() {
    // Primal candidates: W-side diagonal blocks and Z-side diagonal blocks.
    for (int side = 0; side < 2; ++side) {
      std::vector<CMat> ls(shapes), rs(shapes);
      for (std::size_t s = 0; s < shapes; ++s) {
        if (side == 0) {
          ls[s] = P[s];
          rs[s] = Q[s];
        } else if (coupling == Coupling::shared) {
          ls[s] = CMat::Zero(m, m);
          rs[s] = CMat::Zero(mc, mc);
          for (std::size_t k = 0; k < n; ++k) {
            ls[s] += Z[k].topLeftCorner(m, m) / nd;
            rs[s] += Z[k].bottomRightCorner(mc, mc) / nd;
          }
        } else {
          ls[s] = Z[s].topLeftCorner(m, m);
          rs[s] = Z[s].bottomRightCorner(mc, mc);
        }
      }
      Factorization f = certify_factorization(x, coupling, pl, pr, ls, rs);
      if (f.value < best_upper) {
        best_upper = f.value;
        best_primal = std::move(f);
      }
    }
    // Dual candidate from the multipliers Y_k = −ρ U_k ⪰ 0.
    std::vector<CMat> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = 2.0 * rho * U[k].topRightCorner(m, mc);
    const std::size_t dshapes = coupling == Coupling::shared ? n : 1;
    std::vector<CMat> dl(dshapes, CMat::Zero(m, m)), dr(dshapes, CMat::Zero(mc, mc));
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t s = dshapes == 1 ? 0 : k;
      const double w = dshapes == 1 ? 1.0 / nd : 1.0;
      dl[s] += -2.0 * rho * w * U[k].topLeftCorner(m, m);
      dr[s] += -2.0 * rho * w * U[k].bottomRightCorner(mc, mc);
    }
    DualWitness d = certify_dual(x, coupling, pl, pr, std::move(z), dl, dr);
    if (d.lower() > best_lower) {
      best_lower = d.lower();
      best_dual = std::move(d);
    }
  };

  int it = 0;
  std::vector<CMat> Zold(n);
  for (; it < opt.max_iterations; ++it) {
    // W-step.
    std::vector<CMat> C(n), D(n);
    for (std::size_t k = 0; k < n; ++k) {
      const CMat v = Z[k] - U[k];
      C[k] = v.topLeftCorner(m, m);
      D[k] = v.bottomRightCorner(mc, mc);
    }
    if (coupling == Coupling::shared) {
      CMat cbar = detail::sum_of(C) / nd, dbar = detail::sum_of(D) / nd;
      const CMat a = prox::hermitian_schatten_prox(cbar, pl, 1.0 / (2.0 * nd * rho));
      const CMat b = prox::hermitian_schatten_prox(dbar, pr, 1.0 / (2.0 * nd * rho));
      for (std::size_t k = 0; k < n; ++k) {
        P[k] = a;
        Q[k] = b;
      }
    } else {
      const CMat csum = detail::sum_of(C), dsum = detail::sum_of(D);
      const CMat s = prox::hermitian_schatten_prox(csum, pl, nd / (2.0 * rho));
      const CMat t = prox::hermitian_schatten_prox(dsum, pr, nd / (2.0 * rho));
      for (std::size_t k = 0; k < n; ++k) {
        P[k] = C[k] + (s - csum) / nd;
        Q[k] = D[k] + (t - dsum) / nd;
      }
    }
    // Z-step and multiplier update.
    double r_primal = 0.0, r_dual = 0.0, wnorm = 0.0, unorm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const CMat w = assemble(k);
      Zold[k] = Z[k];
      Z[k] = psd_projection(w + U[k]);
      const CMat diff = w - Z[k];
      U[k] += diff;
      r_primal += diff.squaredNorm();
      r_dual += (Z[k] - Zold[k]).squaredNorm();
      wnorm += w.squaredNorm();
      unorm += U[k].squaredNorm();
    }
    r_primal = std::sqrt(r_primal);
    r_dual = rho * std::sqrt(r_dual);

    if ((it + 1) % opt.check_every == 0) {
      certify();
      if (relative_gap(best_lower, best_upper) <= opt.tolerance) {
        ++it;
        sol.converged = true;
        break;
      }
      // Residual balancing.
      const double rp = r_primal / std::max(1.0, std::sqrt(wnorm));
      const double rd = r_dual / std::max(1.0, rho * std::sqrt(unorm));
      if (rp > 10.0 * rd) {
        rho *= 2.0;
        for (auto& u : U) u /= 2.0;
      } else if (rd > 10.0 * rp) {
        rho /= 2.0;
        for (auto& u : U) u *= 2.0;
      }
    }
  }
  if (!sol.converged) certify();

  // Undo the input scaling: the norm is 1-homogeneous in x, the dual family
  // is scale free.
  for (auto& l : best_primal.left) l *= scale;
  for (auto& r : best_primal.right) r *= scale;
  best_primal.value *= scale;
  best_primal.residual *= scale;
  best_dual.pairing *= scale;
  sol.primal = std::move(best_primal);
  sol.dual = std::move(best_dual);
  sol.upper = best_upper * scale;
  sol.lower = best_lower * scale;
  sol.iterations = it;
  sol.converged = relative_gap(sol.lower, sol.upper) <= opt.tolerance;
  return sol;
}

}  // namespace ncspace
