#pragma once

// Reproducible random matrices. Every stream is a value derived from a
// (seed, label) pair, so parallel samplers never share mutable state.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "ncspace/matcore.hpp"

namespace ncspace {

/// 64-bit seed plus a stream label. Identical pairs reproduce identical draws.
struct RngSeed {
  std::uint64_t seed = 0;
  std::string label;

  /// Child stream "<label>/<suffix>".
  RngSeed child(std::string_view suffix) const {
    return {seed, label + "/" + std::string(suffix)};
  }
  RngSeed child(std::uint64_t index) const { return child(std::to_string(index)); }
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

using Engine = std::mt19937_64;

inline Engine make_engine(const RngSeed& s) {
  const std::uint64_t h = detail::fnv1a(s.label);
  std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Engine(seq);
}

/// Standard complex Gaussian entries: real and imaginary parts N(0, 1/2).
inline CMat ginibre(Eigen::Index rows, Eigen::Index cols, Engine& eng) {
  if (rows < 1 || cols < 1) throw DimensionError("ginibre: dimensions must be positive");
  require_capacity(rows, "ginibre");
  require_capacity(cols, "ginibre");
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CMat out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = g(eng);
      const double im = g(eng);
      out(i, j) = cplx(re, im);
    }
  }
  return out;
}
inline CMat ginibre(Eigen::Index rows, Eigen::Index cols, const RngSeed& seed) {
  Engine eng = make_engine(seed);
  return ginibre(rows, cols, eng);
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved into Q.
inline CMat haar_unitary(Eigen::Index d, Engine& eng) {
  if (d < 1) throw DimensionError("haar_unitary: dimension must be >= 1");
  const CMat g = ginibre(d, d, eng);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ() * identity(d);
  const CMat& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < d; ++i) {
    const cplx rii = r(i, i);
    const double m = std::abs(rii);
    q.col(i) *= (m > 0.0 ? rii / m : cplx(1.0));
  }
  return q;
}
inline CMat haar_unitary(Eigen::Index d, const RngSeed& seed) {
  Engine eng = make_engine(seed);
  return haar_unitary(d, eng);
}

/// ‖U*U − I‖_∞.
inline double unitarity_residual(const CMat& u) {
  return operator_norm(u.adjoint() * u - identity(u.cols()));
}

/// GUE-style self-adjoint matrix (G + G*)/√2.
inline CMat random_hermitian(Eigen::Index d, Engine& eng) {
  const CMat g = ginibre(d, d, eng);
  return (g + g.adjoint()) / std::sqrt(2.0);
}

/// Wishart-style positive matrix G G* / d.
inline CMat random_psd(Eigen::Index d, Engine& eng) {
  const CMat g = ginibre(d, d, eng);
  return g * g.adjoint() / static_cast<double>(d);
}

/// The input mix used by surveys: 50% Ginibre, 25% self-adjoint, 25% PSD.
inline CMat random_mixed_input(Eigen::Index d, Engine& eng) {
  std::uniform_int_distribution<int> pick(0, 3);
  switch (pick(eng)) {
    case 0:
    case 1:
      return ginibre(d, d, eng);
    case 2:
      return random_hermitian(d, eng);
    default:
      return random_psd(d, eng);
  }
}

}  // namespace ncspace
