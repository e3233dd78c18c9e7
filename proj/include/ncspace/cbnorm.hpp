#pragma once

// cb norms of maps between column (or row) p-spaces:
//   ‖α‖_{CB(C_r, C_s)} = ‖α‖_{S_{2t}},  1/s = 1/r + 1/t,
// with lower bounds from the composition estimate ‖αβ‖_{2s} ≤ ‖α‖_cb ‖β‖_{2r}.

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncspace/matcore.hpp"
#include "ncspace/random.hpp"

namespace ncspace {

enum class Orientation { column, row };

struct ColumnMapSpec {
  CMat alpha;
  Exponent r;
  Exponent s;
  Orientation orientation = Orientation::column;

  void validate() const {
    require_square(alpha, "ColumnMapSpec");
    require_finite(alpha, "ColumnMapSpec");
    r.require_at_least_one("ColumnMapSpec");
    s.require_at_least_one("ColumnMapSpec");
    if (r < s) throw DomainError("ColumnMapSpec: need s <= r");
  }
  Exponent t() const { return Exponent::harmonic_difference(s, r); }
  /// α as it acts on columns; row maps are handled through the transpose.
  CMat column_alpha() const { return orientation == Orientation::column ? alpha : CMat(alpha.transpose()); }
};

inline double cb_norm_closed_form(const ColumnMapSpec& spec) {
  spec.validate();
  return schatten_norm(spec.alpha, spec.t().scaled(2));
}

/// Equality case of Hölder: β = V diag(σ^{t/r}) V* with α = U Σ V*, scaled to
/// ‖β‖_{2r} = 1. r = ∞ gives a unitary, t = ∞ the top right singular projection.
inline CMat holder_witness(const CMat& alpha, const Exponent& r, const Exponent& s) {
  const ColumnMapSpec spec{alpha, r, s, Orientation::column};
  spec.validate();
  if (alpha.isZero(0.0)) throw DomainError("holder_witness: alpha must be nonzero");
  const Exponent t = spec.t();
  Eigen::JacobiSVD<CMat> svd(alpha, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec& sv = svd.singularValues();
  const CMat& v = svd.matrixV();
  RVec d = RVec::Zero(sv.size());
  if (r.is_infinite()) {
    d.setOnes();
  } else if (t.is_infinite()) {
    d[0] = 1.0;
  } else {
    const double e = r.reciprocal() / t.reciprocal();  // t / r
    for (Eigen::Index i = 0; i < sv.size(); ++i) d[i] = sv[i] > 0.0 ? std::pow(sv[i], e) : 0.0;
  }
  d /= lp_norm(d, r.scaled(2));
  return v * d.asDiagonal() * v.adjoint();
}

struct CBLowerBound {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

/// Gradient of ‖m‖_a (a ≥ 2) with respect to m, as a matrix G with
/// d‖m‖ = Re tr(G* dm).
inline CMat schatten_gradient(const CMat& m, const Exponent& a) {
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec& sv = svd.singularValues();
  const Eigen::Index k = sv.size();
  RVec g = RVec::Zero(k);
  const double nrm = lp_norm(sv, a);
  if (nrm == 0.0) return CMat::Zero(m.rows(), m.cols());
  if (a.is_infinite()) {
    g[0] = 1.0;
  } else {
    const double av = a.value();
    for (Eigen::Index i = 0; i < k; ++i) g[i] = std::pow(sv[i] / nrm, av - 1.0);
  }
  return svd.matrixU().leftCols(k) * g.asDiagonal() * svd.matrixV().leftCols(k).adjoint();
}

}  // namespace detail

/// max over restarts of ‖αβ‖_{2s}/‖β‖_{2r}, by gradient ascent on the unit
/// sphere of S_{2r}. Restart 0 starts at the Hölder witness.
inline CBLowerBound cb_lower_bound(const ColumnMapSpec& spec, int iterations = 200, int restarts = 8,
                                   const RngSeed& seed = {0, "cb-lower"}) {
  spec.validate();
  if (iterations < 1) throw DomainError("cb_lower_bound: iterations must be >= 1");
  CBLowerBound out;
  const CMat a = spec.column_alpha();
  if (a.isZero(0.0)) {
    out.converged = true;
    return out;
  }
  const Exponent num_e = spec.s.scaled(2), den_e = spec.r.scaled(2);
  auto ratio = [&](const CMat& b) { return schatten_norm(a * b, num_e) / schatten_norm(b, den_e); };
  Engine eng = make_engine(seed);
  const Eigen::Index n = a.rows();
  for (int rs = 0; rs < std::max(restarts, 1); ++rs) {
    CMat b = rs == 0 ? holder_witness(a, spec.r, spec.s) : ginibre(n, n, eng);
    b /= schatten_norm(b, den_e);
    double f = ratio(b);
    double step = 0.5;
    bool settled = false;
    int it = 0;
    for (; it < iterations; ++it) {
      const double nb = schatten_norm(b, den_e);
      const double nn = schatten_norm(a * b, num_e);
      const CMat grad = (a.adjoint() * detail::schatten_gradient(a * b, num_e)) / nb -
                        (nn / (nb * nb)) * detail::schatten_gradient(b, den_e);
      const double gn = grad.norm();
      if (gn < 1e-14) {
        settled = true;
        break;
      }
      CMat cand = b + (step / gn) * grad;
      cand /= schatten_norm(cand, den_e);
      const double fc = ratio(cand);
      if (fc > f) {
        b = std::move(cand);
        f = fc;
      } else {
        step *= 0.8;
        if (step < 1e-12) {
          settled = true;
          break;
        }
      }
    }
    out.iterations += it;
    if (f > out.value) {
      out.value = f;
      out.converged = settled;
    } else if (f == out.value) {
      out.converged = out.converged || settled;
    }
  }
  return out;
}

}  // namespace ncspace
