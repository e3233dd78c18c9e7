#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "ncspace/matcore.hpp"
#include "ncspace/ncmat_io.hpp"

namespace ncspace {

/// Σ_k δ_k ⊗ x_k with square components of a common dimension m.
struct VectorElement {
  std::vector<CMat> components;
  TraceWeight::Kind weight = TraceWeight::Kind::unnormalized;

  VectorElement() = default;
  explicit VectorElement(std::vector<CMat> xs,
                         TraceWeight::Kind w = TraceWeight::Kind::unnormalized)
      : components(std::move(xs)), weight(w) {
    validate();
  }

  std::size_t size() const { return components.size(); }
  Eigen::Index dimension() const { return components.empty() ? 0 : components.front().rows(); }
  TraceWeight trace_weight() const { return {weight, dimension()}; }
  const CMat& operator[](std::size_t k) const { return components[k]; }

  void validate() const {
    if (components.empty()) throw DimensionError("VectorElement: needs at least one component");
    const Eigen::Index m = components.front().rows();
    for (const auto& x : components) {
      require_square(x, "VectorElement");
      if (x.rows() != m) throw DimensionError("VectorElement: components differ in dimension");
      require_finite(x, "VectorElement");
    }
  }

  bool is_zero() const {
    for (const auto& x : components) {
      if (!x.isZero(0.0)) return false;
    }
    return true;
  }

  VectorElement adjoint() const {
    VectorElement out = *this;
    for (auto& x : out.components) x = x.adjoint().eval();
    return out;
  }
};

/// Σ_k weight(a_k^t b_k).
inline cplx pairing(const VectorElement& a, const VectorElement& b) {
  if (a.size() != b.size() || a.dimension() != b.dimension()) {
    throw DimensionError("pairing: shape mismatch");
  }
  cplx s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += transpose_pairing(a[k], b[k]);
  return s * a.trace_weight().trace_scale();
}

/// Which normed space a computation refers to.
struct SchattenFamily {
  Exponent p;
};
struct VectorFamily {
  Exponent p;
  Exponent q;
  std::size_t n = 1;
  bool min_structure = false;  ///< diagnostic only
};
struct AsymmetricFamily {
  Exponent r;
  Exponent s;
};

struct SpaceDescriptor {
  std::variant<SchattenFamily, VectorFamily, AsymmetricFamily> family;
  TraceWeight::Kind weight = TraceWeight::Kind::unnormalized;
  std::optional<Exponent> gamma;  ///< 1/γ = 1/r + 1/s, asymmetric only

  static SpaceDescriptor schatten(Exponent p, TraceWeight::Kind w = TraceWeight::Kind::unnormalized) {
    p.require_at_least_one("SpaceDescriptor");
    return {SchattenFamily{p}, w, std::nullopt};
  }
  static SpaceDescriptor vector(Exponent p, Exponent q, std::size_t n,
                                TraceWeight::Kind w = TraceWeight::Kind::unnormalized) {
    p.require_at_least_one("SpaceDescriptor");
    q.require_at_least_one("SpaceDescriptor");
    if (n < 1) throw DimensionError("SpaceDescriptor: n must be >= 1");
    return {VectorFamily{p, q, n, false}, w, std::nullopt};
  }
  static SpaceDescriptor asymmetric(Exponent r, Exponent s,
                                    TraceWeight::Kind w = TraceWeight::Kind::unnormalized) {
    if (r.reciprocal() > 0.5 + 1e-15 || s.reciprocal() > 0.5 + 1e-15) {
      throw DomainError("asymmetric space needs 2 <= r, s <= inf");
    }
    return {AsymmetricFamily{r, s}, w, Exponent::harmonic_sum(r, s)};
  }
};

enum class JKMode { intersection, sum };

struct JKNormSpec {
  Exponent p;
  Exponent q;
  Eigen::Index l = 1;
  std::size_t n = 1;
  JKMode mode = JKMode::intersection;

  void validate() const {
    p.require_at_least_one("JKNormSpec");
    q.require_at_least_one("JKNormSpec");
    if (l < 1 || n < 1) throw DimensionError("JKNormSpec: l and n must be positive");
  }
  /// The four (r, s) pairs in {2p, 2q}².
  std::vector<std::pair<Exponent, Exponent>> pairs() const {
    const Exponent a = p.scaled(2), b = q.scaled(2);
    return {{a, a}, {a, b}, {b, a}, {b, b}};
  }
  double lambda() const { return std::pow(static_cast<double>(l), -p.reciprocal()); }
  JKNormSpec dual() const {
    return {p.conjugate(), q.conjugate(), l, n, mode == JKMode::sum ? JKMode::intersection : JKMode::sum};
  }
};

// NCVEC 1 n m weight, followed by n NCMAT blocks.

inline void write_ncvec(std::ostream& out, const VectorElement& x) {
  x.validate();
  out << "NCVEC 1 " << x.size() << ' ' << x.dimension() << ' '
      << (x.weight == TraceWeight::Kind::normalized ? "tau" : "tr") << '\n';
  for (const auto& c : x.components) write_ncmat(out, c);
}

inline VectorElement read_ncvec(std::istream& in) {
  std::string magic, weight;
  int version = 0;
  long long n = 0, m = 0;
  if (!(in >> magic >> version) || magic != "NCVEC") throw ParseError("read_ncvec: missing NCVEC header");
  if (version != 1) throw ParseError("read_ncvec: unsupported version " + std::to_string(version));
  if (!(in >> n >> m >> weight) || n < 1 || m < 1) throw ParseError("read_ncvec: bad manifest line");
  if (weight != "tr" && weight != "tau") throw ParseError("read_ncvec: weight must be tr or tau");
  require_capacity(m, "read_ncvec");
  if (n > 1 << 20) throw CapacityError("read_ncvec: too many components");
  std::vector<CMat> xs;
  for (long long k = 0; k < n; ++k) {
    CMat c = read_ncmat(in);
    if (c.rows() != m || c.cols() != m) throw ParseError("read_ncvec: block " + std::to_string(k) + " is not m x m");
    xs.push_back(std::move(c));
  }
  return VectorElement(std::move(xs),
                       weight == "tau" ? TraceWeight::Kind::normalized : TraceWeight::Kind::unnormalized);
}

inline VectorElement load_ncvec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_ncvec(in);
}

inline void save_ncvec(const std::string& path, const VectorElement& x) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  write_ncvec(out, x);
}

}  // namespace ncspace
