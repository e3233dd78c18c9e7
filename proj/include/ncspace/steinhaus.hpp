#pragma once

// Quantized Steinhaus systems: independent Haar unitaries ζ^σ of degree d_σ,
// random Fourier series f = Σ_σ d_σ tr(A^σ ζ^σ), their Monte Carlo moments,
// and the explicit type/cotype witnesses.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ncspace/matcore.hpp"
#include "ncspace/random.hpp"

namespace ncspace {

struct ParameterSet {
  std::vector<int> degrees;

  void validate() const {
    if (degrees.empty()) throw DimensionError("ParameterSet: empty");
    for (int d : degrees) {
      if (d < 1) throw DimensionError("ParameterSet: degrees must be positive");
    }
  }
  bool commutative() const {
    return std::all_of(degrees.begin(), degrees.end(), [](int d) { return d == 1; });
  }
  static ParameterSet uniform(std::size_t count, int d) { return {std::vector<int>(count, d)}; }
};

struct SteinhausSample {
  std::vector<CMat> unitaries;
  RngSeed provenance;
};

inline SteinhausSample sample_system(const ParameterSet& ps, const RngSeed& seed) {
  ps.validate();
  long double load = 0;
  for (int d : ps.degrees) load += static_cast<long double>(d) * d;
  if (load > 1e6L) throw CapacityError("sample_system: Σ d^2 exceeds 10^6");
  SteinhausSample s;
  s.provenance = seed;
  s.unitaries.reserve(ps.degrees.size());
  for (std::size_t i = 0; i < ps.degrees.size(); ++i) {
    s.unitaries.push_back(haar_unitary(ps.degrees[i], seed.child(static_cast<std::uint64_t>(i))));
  }
  return s;
}

/// Target space E: scalars, ℓ_p^N, or S_p^D (stored row-major as a D² vector).
struct TargetSpace {
  enum class Kind { scalar, lp, schatten };
  Kind kind = Kind::scalar;
  Exponent p{1.0};
  Eigen::Index dim = 1;

  static TargetSpace scalar() { return {}; }
  static TargetSpace lp(Exponent p, Eigen::Index n) { return {Kind::lp, p, n}; }
  static TargetSpace schatten(Exponent p, Eigen::Index d) { return {Kind::schatten, p, d}; }

  Eigen::Index storage() const { return kind == Kind::schatten ? dim * dim : (kind == Kind::lp ? dim : 1); }

  CMat as_matrix(const CVec& v) const {
    CMat m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = v[i * dim + j];
    }
    return m;
  }
  CVec from_matrix(const CMat& m) const {
    CVec v(dim * dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) v[i * dim + j] = m(i, j);
    }
    return v;
  }

  double norm(const CVec& v) const {
    switch (kind) {
      case Kind::scalar:
        return std::abs(v[0]);
      case Kind::lp:
        return lp_norm(v.cwiseAbs(), p);
      case Kind::schatten:
        return schatten_norm(as_matrix(v), p);
    }
    return 0.0;
  }
};

/// A^σ(i, j) ∈ E for every σ; entries stored row-major per σ.
struct FourierCoefficients {
  TargetSpace target;
  std::vector<int> degrees;
  std::vector<std::vector<CVec>> entries;

  static FourierCoefficients zeros(const ParameterSet& ps, const TargetSpace& t) {
    FourierCoefficients c{t, ps.degrees, {}};
    for (int d : ps.degrees) {
      c.entries.emplace_back(static_cast<std::size_t>(d) * d, CVec::Zero(t.storage()));
    }
    return c;
  }
  CVec& at(std::size_t sigma, int i, int j) {
    return entries[sigma][static_cast<std::size_t>(i) * degrees[sigma] + j];
  }
  const CVec& at(std::size_t sigma, int i, int j) const {
    return entries[sigma][static_cast<std::size_t>(i) * degrees[sigma] + j];
  }
};

/// f = Σ_σ d_σ Σ_{i,j} A^σ(i, j) ζ^σ(j, i).
inline CVec synthesize(const FourierCoefficients& c, const SteinhausSample& s) {
  if (c.degrees.size() != s.unitaries.size()) throw DimensionError("synthesize: parameter count mismatch");
  CVec f = CVec::Zero(c.target.storage());
  for (std::size_t sg = 0; sg < c.degrees.size(); ++sg) {
    const int d = c.degrees[sg];
    const CMat& z = s.unitaries[sg];
    if (z.rows() != d) throw DimensionError("synthesize: degree mismatch");
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const CVec& a = c.at(sg, i, j);
        if (a.size() != f.size()) throw DimensionError("synthesize: coefficient size mismatch");
        f += static_cast<double>(d) * z(j, i) * a;
      }
    }
  }
  return f;
}

/// Tree summation; the result does not depend on how the range is split.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
  bool deterministic = false;
  double ci_radius() const { return 3.0 * std_error; }
  double ci_low() const { return mean - ci_radius(); }
  double ci_high() const { return mean + ci_radius(); }
};

/// Mean and standard error of raw draws.
inline MCEstimate summarize(const std::vector<double>& xs) {
  MCEstimate e;
  e.count = xs.size();
  if (xs.empty()) return e;
  e.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    std::vector<double> dev(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - e.mean) * (xs[i] - e.mean);
    const double var = pairwise_sum(dev) / static_cast<double>(xs.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return e;
}

/// (E‖f‖^u)^{1/u}, with the standard error carried through the u-th root.
/// If the first 32 draws of ‖f‖ agree to 1e-10, the norm is taken as
/// deterministic and returned exactly.
inline MCEstimate mc_moment(const FourierCoefficients& c, const ParameterSet& ps, const Exponent& u,
                            std::size_t samples, const RngSeed& seed) {
  u.require_at_least_one("mc_moment");
  if (u.is_infinite()) throw DomainError("mc_moment: moment exponent must be finite");
  if (samples < 100) throw DomainError("mc_moment: need at least 100 samples");
  constexpr std::size_t kProbe = 32;
  std::vector<double> norms;
  norms.reserve(samples);
  auto draw = [&](std::size_t i) {
    return c.target.norm(synthesize(c, sample_system(ps, seed.child(static_cast<std::uint64_t>(i)))));
  };
  for (std::size_t i = 0; i < kProbe; ++i) norms.push_back(draw(i));
  const auto [lo, hi] = std::minmax_element(norms.begin(), norms.end());
  if (*hi - *lo <= 1e-10 * std::max(1.0, *hi)) {
    MCEstimate e;
    e.mean = norms.front();
    e.count = kProbe;
    e.deterministic = true;
    return e;
  }
  for (std::size_t i = kProbe; i < samples; ++i) norms.push_back(draw(i));
  const double uv = u.value();
  std::vector<double> powered(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) powered[i] = std::pow(norms[i], uv);
  const MCEstimate raw = summarize(powered);
  MCEstimate e;
  e.count = raw.count;
  e.mean = std::pow(raw.mean, 1.0 / uv);
  e.std_error = raw.mean > 0.0 ? e.mean / (uv * raw.mean) * raw.std_error : 0.0;
  return e;
}

struct WitnessReport {
  int d = 1;
  Exponent p{1.0};
  Exponent q{1.0};  ///< q for type witnesses, q' for cotype witnesses
  double lhs = 0.0;
  double rhs = 0.0;
  double measured = 0.0;
  double implied_bound = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t samples = 0;
};

/// Coefficients A(i, j) = e_ij in S_p^d for a single σ of degree d; then f = d·ζ^t.
inline FourierCoefficients type_witness_coefficients(int d, const Exponent& p) {
  const ParameterSet ps{{d}};
  FourierCoefficients c = FourierCoefficients::zeros(ps, TargetSpace::schatten(p, d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) c.at(0, i, j) = c.target.from_matrix(matrix_unit(d, d, i, j));
  }
  return c;
}

/// ‖f‖_{S_p} = d^{1+1/p} against the coefficient norm d^{1/q}·d^{2/r},
/// 1/r = (1 − 1/p + 1/q)/2, giving K ≥ d^{2(1/p − 1/q)}.
inline WitnessReport sigma_type_witness(int d, const Exponent& p, const Exponent& q,
                                        const RngSeed& seed = {0, "type-witness"}) {
  if (d < 1) throw DimensionError("sigma_type_witness: d must be >= 1");
  p.require_at_least_one("sigma_type_witness");
  if (!(p < q) || q.reciprocal() < 0.5) throw DomainError("sigma_type_witness: need 1 <= p < q <= 2");
  WitnessReport w;
  w.d = d;
  w.p = p;
  w.q = q;
  const double dd = static_cast<double>(d);
  const double inv_r = (1.0 - p.reciprocal() + q.reciprocal()) / 2.0;
  w.lhs = std::pow(dd, 1.0 + p.reciprocal());
  w.rhs = std::pow(dd, q.reciprocal()) * std::pow(dd, 2.0 * inv_r);
  const FourierCoefficients c = type_witness_coefficients(d, p);
  w.measured = c.target.norm(synthesize(c, sample_system(ParameterSet{{d}}, seed)));
  w.implied_bound = w.lhs / w.rhs;
  w.ci_low = w.ci_high = w.implied_bound;
  w.samples = 1;
  return w;
}

/// Cotype witness: coefficient side d^{1/2 + 1/(2p) + 1/(2q')}, function side
/// d^{1/q + 1/(2q') + 1/(2p')}, measured as d^{1/q}‖ζ^t‖_{S_s}, 1/s = 1/(2q') + 1/(2p').
inline WitnessReport cotype_witness(int d, const Exponent& p, const Exponent& qprime,
                                    const RngSeed& seed = {0, "cotype-witness"}) {
  if (d < 1) throw DimensionError("cotype_witness: d must be >= 1");
  p.require_at_least_one("cotype_witness");
  if (p.reciprocal() < 0.5) throw DomainError("cotype_witness: need 1 <= p <= 2");
  const Exponent pc = p.conjugate();
  if (qprime.reciprocal() > 0.5 || !(qprime < pc)) throw DomainError("cotype_witness: need 2 <= q' < p'");
  const Exponent q = qprime.conjugate();
  WitnessReport w;
  w.d = d;
  w.p = p;
  w.q = qprime;
  const double dd = static_cast<double>(d);
  w.lhs = std::pow(dd, 0.5 + p.reciprocal() / 2.0 + qprime.reciprocal() / 2.0);
  w.rhs = std::pow(dd, q.reciprocal() + qprime.reciprocal() / 2.0 + pc.reciprocal() / 2.0);
  const Exponent s = Exponent::from_reciprocal(qprime.reciprocal() / 2.0 + pc.reciprocal() / 2.0);
  const SteinhausSample z = sample_system(ParameterSet{{d}}, seed);
  w.measured = std::pow(dd, q.reciprocal()) * schatten_norm(z.unitaries[0].transpose(), s);
  w.implied_bound = w.lhs / w.rhs;
  w.ci_low = w.ci_high = w.implied_bound;
  w.samples = 1;
  return w;
}

/// Commutative parameters (d_σ ≡ 1), A_σ = e_σ in ℓ_p(Γ): the implied constant
/// (E‖f‖_{ℓ_p}^{q'})^{1/q'} / |Γ|^{1/q}, divided by the upper bound |Γ|^{1/p − 1/q}.
inline WitnessReport commutative_type_bound(std::size_t gamma_size, const Exponent& p, const Exponent& q,
                                            std::size_t samples, const RngSeed& seed) {
  if (gamma_size < 1) throw DimensionError("commutative_type_bound: |Γ| must be >= 1");
  p.require_at_least_one("commutative_type_bound");
  if (!(p < q) || q.reciprocal() < 0.5) throw DomainError("commutative_type_bound: need 1 <= p < q <= 2");
  const ParameterSet ps = ParameterSet::uniform(gamma_size, 1);
  const Eigen::Index g = static_cast<Eigen::Index>(gamma_size);
  FourierCoefficients c = FourierCoefficients::zeros(ps, TargetSpace::lp(p, g));
  for (Eigen::Index s = 0; s < g; ++s) c.at(static_cast<std::size_t>(s), 0, 0)[s] = 1.0;
  const MCEstimate e = mc_moment(c, ps, q.conjugate(), samples, seed);
  const double gd = static_cast<double>(gamma_size);
  const double coeff = std::pow(gd, q.reciprocal());
  WitnessReport w;
  w.d = 1;
  w.p = p;
  w.q = q;
  w.lhs = e.mean;
  w.rhs = coeff;
  w.measured = e.mean;
  const double denom = std::pow(gd, p.reciprocal());  // coeff · cap
  w.implied_bound = e.mean / denom;
  w.ci_low = e.ci_low() / denom;
  w.ci_high = e.ci_high() / denom;
  w.samples = e.count;
  return w;
}

enum class Distribution { exponential, bernoulli, uniform, constant };

inline std::string to_string(Distribution d) {
  switch (d) {
    case Distribution::exponential:
      return "exponential";
    case Distribution::bernoulli:
      return "bernoulli";
    case Distribution::uniform:
      return "uniform";
    case Distribution::constant:
      return "constant";
  }
  return "?";
}

/// E|f|^r for the supported families (θ is the Bernoulli parameter).
inline double absolute_moment(Distribution d, double r, double theta = 0.5) {
  switch (d) {
    case Distribution::exponential:
      return std::exp(std::lgamma(r + 1.0));
    case Distribution::bernoulli:
      return theta;
    case Distribution::uniform:
      return 1.0 / (r + 1.0);
    case Distribution::constant:
      return 1.0;
  }
  return 0.0;
}

struct ClassicalRosenthalResult {
  MCEstimate lhs;
  double rhs = 0.0;
  double ratio = 0.0;
  double ratio_ci_low = 0.0;
  double ratio_ci_high = 0.0;
};

/// (E(Σ_k |f_k|)^p)^{1/p} against max_{r ∈ {1, p}} (Σ_k E|f_k|^r)^{1/r}.
inline ClassicalRosenthalResult classical_rosenthal_check(Distribution dist, int n, const Exponent& p,
                                                          std::size_t samples, const RngSeed& seed,
                                                          double theta = 0.5) {
  p.require_at_least_one("classical_rosenthal_check");
  if (p.is_infinite()) throw DomainError("classical_rosenthal_check: p must be finite");
  if (n < 1) throw DimensionError("classical_rosenthal_check: n must be >= 1");
  if (samples < 1000) throw DomainError("classical_rosenthal_check: need at least 10^3 samples");
  if (dist == Distribution::bernoulli && (theta < 0.0 || theta > 1.0)) {
    throw DomainError("classical_rosenthal_check: θ must lie in [0, 1]");
  }
  const double pv = p.value();
  ClassicalRosenthalResult r;
  const double nd = static_cast<double>(n);
  r.rhs = std::max(nd * absolute_moment(dist, 1.0, theta),
                   std::pow(nd * absolute_moment(dist, pv, theta), 1.0 / pv));
  Engine eng = make_engine(seed);
  std::exponential_distribution<double> ex(1.0);
  std::bernoulli_distribution be(theta);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  std::vector<double> powered(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      switch (dist) {
        case Distribution::exponential:
          sum += ex(eng);
          break;
        case Distribution::bernoulli:
          sum += be(eng) ? 1.0 : 0.0;
          break;
        case Distribution::uniform:
          sum += un(eng);
          break;
        case Distribution::constant:
          sum += 1.0;
          break;
      }
    }
    powered[s] = std::pow(sum, pv);
  }
  const MCEstimate raw = summarize(powered);
  r.lhs.count = raw.count;
  r.lhs.mean = std::pow(raw.mean, 1.0 / pv);
  r.lhs.std_error = raw.mean > 0.0 ? r.lhs.mean / (pv * raw.mean) * raw.std_error : 0.0;
  r.lhs.deterministic = raw.std_error == 0.0;
  r.ratio = r.lhs.mean / r.rhs;
  r.ratio_ci_low = r.lhs.ci_low() / r.rhs;
  r.ratio_ci_high = r.lhs.ci_high() / r.rhs;
  return r;
}

}  // namespace ncspace
