#pragma once

// Dense complex linear algebra shared by every other module: Schatten and
// trace-weighted L_p norms, tensor-slot embeddings, partial traces and a few
// spectral helpers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ncspace/errors.hpp"
#include "ncspace/exponent.hpp"

namespace ncspace {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Upper bound on the side length of any matrix this library constructs.
inline constexpr Eigen::Index kDimensionCap = 4096;

inline void require_finite(const CMat& x, const char* what) {
  if (!x.allFinite()) throw DomainError(std::string(what) + ": matrix has non-finite entries");
}

inline void require_square(const CMat& x, const char* what) {
  if (x.rows() != x.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

inline void require_capacity(long double dim, const char* what) {
  if (dim > static_cast<long double>(kDimensionCap)) {
    throw CapacityError(std::string(what) + ": output dimension " +
                        std::to_string(static_cast<double>(dim)) + " exceeds cap " +
                        std::to_string(kDimensionCap));
  }
}

/// ℓ_p norm of a real vector (absolute values taken); scaled to avoid overflow.
inline double lp_norm(const Eigen::Ref<const RVec>& v, const Exponent& p) {
  if (v.size() == 0) return 0.0;
  const double top = v.cwiseAbs().maxCoeff();
  if (top == 0.0 || p.is_infinite()) return top;
  const double pv = p.value();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]) / top, pv);
  return top * std::pow(acc, 1.0 / pv);
}

inline RVec singular_values(const CMat& x) {
  if (x.size() == 0) return RVec();
  Eigen::JacobiSVD<CMat> svd(x);
  return svd.singularValues();
}

/// Schatten p-norm, p ∈ [1, ∞].
inline double schatten_norm(const CMat& x, const Exponent& p) {
  p.require_at_least_one("schatten_norm");
  require_finite(x, "schatten_norm");
  return lp_norm(singular_values(x), p);
}
inline double schatten_norm(const CMat& x, double p) { return schatten_norm(x, Exponent(p)); }

inline double operator_norm(const CMat& x) { return schatten_norm(x, Exponent::infinity()); }

/// Trace normalization on M_n: the usual trace tr_n or τ_n = tr_n / n.
struct TraceWeight {
  enum class Kind { unnormalized, normalized };
  Kind kind = Kind::unnormalized;
  Eigen::Index dimension = 1;

  static TraceWeight trace(Eigen::Index n) { return {Kind::unnormalized, n}; }
  static TraceWeight tau(Eigen::Index n) { return {Kind::normalized, n}; }
  bool normalized() const { return kind == Kind::normalized; }

  /// Value of the weight on the identity: n for tr, 1 for τ.
  double of_identity() const { return normalized() ? 1.0 : static_cast<double>(dimension); }

  /// Factor c with ‖x‖_{L_p(weight)} = c · ‖x‖_{S_p}.
  double norm_scale(const Exponent& p) const {
    if (!normalized()) return 1.0;
    return std::pow(static_cast<double>(dimension), -p.reciprocal());
  }
  /// Factor w with weight(x) = w · tr(x).
  double trace_scale() const { return normalized() ? 1.0 / static_cast<double>(dimension) : 1.0; }
};

/// ‖x‖_{L_p(w)}; equal to schatten_norm for tr and rescaled by m^{-1/p} for τ_m.
inline double lp_trace_norm(const CMat& x, const Exponent& p, const TraceWeight& w) {
  require_square(x, "lp_trace_norm");
  if (x.rows() != w.dimension) {
    throw DimensionError("lp_trace_norm: matrix dimension " + std::to_string(x.rows()) +
                         " does not match trace weight dimension " + std::to_string(w.dimension));
  }
  return w.norm_scale(p) * schatten_norm(x, p);
}

/// Bilinear pairing tr(a^t b) = Σ_ij a_ij b_ij.
inline cplx transpose_pairing(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("transpose_pairing: shape mismatch");
  }
  return (a.array() * b.array()).sum();
}

inline CMat identity(Eigen::Index n) { return CMat::Identity(n, n); }

/// Matrix unit e_ij (0-based indices) in M_{rows×cols}.
inline CMat matrix_unit(Eigen::Index rows, Eigen::Index cols, Eigen::Index i, Eigen::Index j) {
  CMat e = CMat::Zero(rows, cols);
  e(i, j) = 1.0;
  return e;
}

inline CMat kron(const CMat& a, const CMat& b) {
  require_capacity(static_cast<long double>(a.rows()) * b.rows(), "kron");
  require_capacity(static_cast<long double>(a.cols()) * b.cols(), "kron");
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Block-diagonal matrix with the given blocks.
inline CMat direct_sum(const std::vector<CMat>& blocks) {
  long double rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  require_capacity(rows, "direct_sum");
  require_capacity(cols, "direct_sum");
  CMat out = CMat::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

/// Position k (1-based) among n tensor factors of M_l.
struct TensorSlot {
  int slot_count = 1;
  Eigen::Index slot_dim = 1;
  int index = 1;

  Eigen::Index output_dim() const {
    long double d = 1;
    for (int i = 0; i < slot_count; ++i) d *= slot_dim;
    require_capacity(d, "TensorSlot");
    return static_cast<Eigen::Index>(d);
  }
};

/// π_k(x) = 1 ⊗ ... ⊗ x ⊗ ... ⊗ 1 with x in the k-th factor.
inline CMat slot_embed(const CMat& x, const TensorSlot& slot) {
  if (slot.slot_count < 1 || slot.index < 1 || slot.index > slot.slot_count) {
    throw DimensionError("slot_embed: index " + std::to_string(slot.index) + " outside 1.." +
                         std::to_string(slot.slot_count));
  }
  if (x.rows() != slot.slot_dim || x.cols() != slot.slot_dim) {
    throw DimensionError("slot_embed: x must be slot_dim x slot_dim");
  }
  const Eigen::Index total = slot.output_dim();
  Eigen::Index before = 1;
  for (int i = 1; i < slot.index; ++i) before *= slot.slot_dim;
  const Eigen::Index after = total / (before * slot.slot_dim);
  return kron(identity(before), kron(x, identity(after)));
}

/// Mixed-radix bookkeeping for a tensor product of matrix algebras, first
/// factor outermost (row-major Kronecker convention).
class TensorLayout {
 public:
  explicit TensorLayout(std::vector<Eigen::Index> dims) : dims_(std::move(dims)) {
    long double t = 1;
    for (auto d : dims_) {
      if (d < 1) throw DimensionError("TensorLayout: factor dimension must be positive");
      t *= d;
    }
    require_capacity(t, "TensorLayout");
    total_ = static_cast<Eigen::Index>(t);
    strides_.assign(dims_.size(), 1);
    for (int f = static_cast<int>(dims_.size()) - 2; f >= 0; --f) {
      strides_[f] = strides_[f + 1] * dims_[f + 1];
    }
  }
  Eigen::Index total() const { return total_; }
  std::size_t factors() const { return dims_.size(); }
  Eigen::Index dim(std::size_t f) const { return dims_[f]; }
  Eigen::Index stride(std::size_t f) const { return strides_[f]; }
  Eigen::Index digit(Eigen::Index index, std::size_t f) const {
    return (index / strides_[f]) % dims_[f];
  }

 private:
  std::vector<Eigen::Index> dims_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index total_ = 1;
};

/// Places `a` on the listed tensor factors (in the listed order) of the
/// product described by `dims`, with identities elsewhere.
inline CMat embed_on_factors(const CMat& a, const std::vector<Eigen::Index>& dims,
                             const std::vector<std::size_t>& positions) {
  const TensorLayout layout(dims);
  Eigen::Index sub = 1;
  for (auto f : positions) {
    if (f >= dims.size()) throw DimensionError("embed_on_factors: factor index out of range");
    sub *= dims[f];
  }
  if (a.rows() != sub || a.cols() != sub) {
    throw DimensionError("embed_on_factors: operator dimension does not match listed factors");
  }
  const Eigen::Index total = layout.total();
  CMat out = CMat::Zero(total, total);
  for (Eigen::Index row = 0; row < total; ++row) {
    // Local row index of `a` and the part of `row` outside the listed factors.
    Eigen::Index local = 0;
    Eigen::Index rest = row;
    for (auto f : positions) {
      const Eigen::Index d = layout.digit(row, f);
      local = local * dims[f] + d;
      rest -= d * layout.stride(f);
    }
    for (Eigen::Index c = 0; c < sub; ++c) {
      const cplx v = a(local, c);
      if (v == cplx(0.0)) continue;
      Eigen::Index col = rest;
      Eigen::Index rem = c;
      for (auto it = positions.rbegin(); it != positions.rend(); ++it) {
        col += (rem % dims[*it]) * layout.stride(*it);
        rem /= dims[*it];
      }
      out(row, col) = v;
    }
  }
  return out;
}

/// Partial trace keeping the listed factors (in increasing order). With
/// `normalized`, each traced factor contributes τ instead of tr.
inline CMat partial_trace(const CMat& a, const std::vector<Eigen::Index>& dims,
                          const std::vector<std::size_t>& keep, bool normalized = false) {
  const TensorLayout layout(dims);
  require_square(a, "partial_trace");
  if (a.rows() != layout.total()) throw DimensionError("partial_trace: dimension mismatch");
  std::vector<bool> kept(dims.size(), false);
  for (auto f : keep) {
    if (f >= dims.size()) throw DimensionError("partial_trace: factor index out of range");
    kept[f] = true;
  }
  std::vector<Eigen::Index> keep_dims;
  double scale = 1.0;
  for (std::size_t f = 0; f < dims.size(); ++f) {
    if (kept[f]) {
      keep_dims.push_back(dims[f]);
    } else if (normalized) {
      scale /= static_cast<double>(dims[f]);
    }
  }
  const TensorLayout out_layout(keep_dims.empty() ? std::vector<Eigen::Index>{1} : keep_dims);
  CMat out = CMat::Zero(out_layout.total(), out_layout.total());
  const Eigen::Index total = layout.total();
  auto reduced = [&](Eigen::Index idx) {
    Eigen::Index r = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) {
      if (kept[f]) r = r * dims[f] + layout.digit(idx, f);
    }
    return r;
  };
  auto traced_part = [&](Eigen::Index idx) {
    Eigen::Index t = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) {
      if (!kept[f]) t += layout.digit(idx, f) * layout.stride(f);
    }
    return t;
  };
  for (Eigen::Index i = 0; i < total; ++i) {
    const Eigen::Index ti = traced_part(i);
    const Eigen::Index ri = reduced(i);
    for (Eigen::Index j = 0; j < total; ++j) {
      if (traced_part(j) != ti) continue;
      out(ri, reduced(j)) += a(i, j);
    }
  }
  return scale * out;
}

/// Eigen-decomposition of a Hermitian matrix (the upper triangle is ignored).
struct HermitianEigen {
  RVec values;
  CMat vectors;
};

inline HermitianEigen hermitian_eigen(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success) throw DomainError("hermitian_eigen: decomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

/// f applied to the spectrum of a Hermitian matrix.
inline CMat spectral_apply(const HermitianEigen& e, const std::function<double(double)>& f) {
  RVec mapped(e.values.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped[i] = f(e.values[i]);
  return e.vectors * mapped.asDiagonal() * e.vectors.adjoint();
}

inline CMat hermitian_part(const CMat& x) { return 0.5 * (x + x.adjoint()); }

/// Positive part of a Hermitian matrix (projection onto the PSD cone).
inline CMat psd_projection(const CMat& h) {
  return spectral_apply(hermitian_eigen(hermitian_part(h)),
                        [](double v) { return std::max(v, 0.0); });
}

/// (h)^power for PSD h; eigenvalues below `floor` are clipped to it first.
inline CMat psd_power(const CMat& h, double power, double floor = 0.0) {
  return spectral_apply(hermitian_eigen(hermitian_part(h)), [&](double v) {
    const double c = std::max(v, floor);
    return c > 0.0 ? std::pow(c, power) : 0.0;
  });
}

inline double min_eigenvalue(const CMat& h) {
  return hermitian_eigen(hermitian_part(h)).values.minCoeff();
}

}  // namespace ncspace
