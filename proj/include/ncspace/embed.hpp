#pragma once

// The embedding Φ_pq : S_q^n → L_p(τ_{n^m}; ℓ_q^m), the sums Σ δ_k ⊗ π_k(x_k)
// behind Λ_{p1} and Λ_{p'∞}, and the level-1 checks built on them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ncspace/matcore.hpp"
#include "ncspace/mixednorm.hpp"
#include "ncspace/random.hpp"

namespace ncspace {

struct EmbeddingSpec {
  int n = 2;
  int m = 4;
  Exponent p{2.0};
  Exponent q{1.0};

  static EmbeddingSpec standard(int n, Exponent p, Exponent q) { return {n, n * n, p, q}; }

  void validate() const {
    if (n < 1) throw DimensionError("EmbeddingSpec: n must be >= 1");
    if (m < n * n) throw DomainError("EmbeddingSpec: m must be >= n^2");
    p.require_at_least_one("EmbeddingSpec");
    q.require_at_least_one("EmbeddingSpec");
    require_capacity(std::pow(static_cast<long double>(n), m), "EmbeddingSpec");
  }
  Eigen::Index ambient_dim() const { return TensorSlot{m, n, 1}.output_dim(); }
};

/// Φ(x) = n^{-1/q} Σ_k δ_k ⊗ π_k(x), k = 1..m, under τ_{n^m}.
inline VectorElement phi(const CMat& x, const EmbeddingSpec& spec) {
  spec.validate();
  if (x.rows() != spec.n || x.cols() != spec.n) throw DimensionError("phi: x must be n x n");
  const double c = std::pow(static_cast<double>(spec.n), -spec.q.reciprocal());
  std::vector<CMat> comps;
  comps.reserve(spec.m);
  for (int k = 1; k <= spec.m; ++k) comps.push_back(c * slot_embed(x, {spec.m, spec.n, k}));
  return VectorElement(std::move(comps), TraceWeight::Kind::normalized);
}

struct IndependentFamily {
  Eigen::Index l = 2;
  std::vector<CMat> blocks;
  Eigen::Index ambient = 1;  ///< m for Rosenthal inputs in M_m ⊗ M_l

  std::size_t count() const { return blocks.size(); }
  void validate() const {
    if (blocks.empty()) throw DimensionError("IndependentFamily: empty");
    const Eigen::Index d = ambient * l;
    for (const auto& b : blocks) {
      if (b.rows() != d || b.cols() != d) throw DimensionError("IndependentFamily: block shape mismatch");
      require_finite(b, "IndependentFamily");
    }
  }
};

/// Σ_k δ_k ⊗ π_k(x_k) in L_p(τ_{l^n}; ℓ^n). Both Λ maps produce this element.
inline VectorElement lambda_p1(const IndependentFamily& fam) {
  fam.validate();
  if (fam.ambient != 1) throw DimensionError("lambda_p1: family must live in M_l");
  const int n = static_cast<int>(fam.count());
  std::vector<CMat> comps;
  for (int k = 1; k <= n; ++k) comps.push_back(slot_embed(fam.blocks[k - 1], {n, fam.l, k}));
  return VectorElement(std::move(comps), TraceWeight::Kind::normalized);
}
inline VectorElement lambda_dual(const IndependentFamily& fam) { return lambda_p1(fam); }

inline VectorElement as_vector_element(const IndependentFamily& fam) {
  fam.validate();
  return VectorElement(fam.blocks, TraceWeight::Kind::normalized);
}

struct PairingResult {
  cplx lhs;
  cplx rhs;
};

/// lhs = Σ_k τ_{l^n}(π_k(a_k)^t π_k(b_k)), rhs = Σ_k τ_l(a_k^t b_k).
inline PairingResult pairing_check(const IndependentFamily& a, const IndependentFamily& b) {
  if (a.l != b.l || a.count() != b.count()) throw DimensionError("pairing_check: shape mismatch");
  PairingResult r{pairing(lambda_p1(a), lambda_p1(b)), 0.0};
  for (std::size_t k = 0; k < a.count(); ++k) {
    r.rhs += transpose_pairing(a.blocks[k], b.blocks[k]) / static_cast<double>(a.l);
  }
  return r;
}

/// Zeroes the off-diagonal blocks of an n×n array of square blocks.
inline CMat diagonal_projection(const CMat& x, Eigen::Index n) {
  require_square(x, "diagonal_projection");
  if (n < 1 || x.rows() % n != 0) throw DimensionError("diagonal_projection: size not divisible by n");
  const Eigen::Index b = x.rows() / n;
  CMat out = CMat::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < n; ++i) out.block(i * b, i * b, b, b) = x.block(i * b, i * b, b, b);
  return out;
}

/// The same projection as the average of (ε_i x_ij ε_j) over all sign patterns.
inline CMat diagonal_projection_by_signs(const CMat& x, Eigen::Index n) {
  require_square(x, "diagonal_projection_by_signs");
  if (n < 1 || n > 20 || x.rows() % n != 0) throw DimensionError("diagonal_projection_by_signs: bad n");
  const Eigen::Index b = x.rows() / n;
  CMat acc = CMat::Zero(x.rows(), x.cols());
  const std::uint64_t patterns = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    RVec eps(x.rows());
    for (Eigen::Index i = 0; i < n; ++i) eps.segment(i * b, b).setConstant(((mask >> i) & 1) ? -1.0 : 1.0);
    acc += eps.asDiagonal() * x * eps.asDiagonal();
  }
  return acc / static_cast<double>(patterns);
}

struct MainTheoremResult {
  CertifiedValue lhs;
  double cap = 0.0;
  double ratio_low = 0.0;
  double ratio_high = 0.0;
};

/// ‖x‖^∩_{p,1} ≤ ‖Σ δ_k ⊗ π_k(x_k)‖_{L_p(ℓ_1^n)} ≤ cp ‖x‖^∩_{p,1}.
inline MainTheoremResult theorem_main_check(const IndependentFamily& fam, const Exponent& p,
                                            const SolverOptions& opt = {}) {
  if (p.is_infinite()) throw DomainError("theorem_main_check: p must be finite");
  MainTheoremResult r;
  r.lhs = norm_l1_valued(lambda_p1(fam), p, opt);
  const JKNormSpec spec{p, Exponent(1.0), fam.l, fam.count(), JKMode::intersection};
  r.cap = jk_norm(as_vector_element(fam), spec, opt).upper;
  if (r.cap > 0.0) {
    r.ratio_low = r.lhs.lower / r.cap;
    r.ratio_high = r.lhs.upper / (p.value() * r.cap);
  } else {
    r.ratio_low = r.ratio_high = r.lhs.upper == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return r;
}

struct MainTheoremDualResult {
  CertifiedValue lhs;
  CertifiedValue sum;
  double ratio_high = 0.0;  ///< lhs.upper / sum.lower, asserted ≤ 1 + 1e-3
  double ratio_low = 0.0;   ///< lhs.lower · cp / sum.upper, reported
};

/// (1/cp) ‖x‖^Σ_{p',∞} ≤ ‖Σ δ_k ⊗ π_k(x_k)‖_{L_{p'}(ℓ_∞^n)} ≤ ‖x‖^Σ_{p',∞}; p is the
/// exponent of the primal check, so p' = conjugate(p).
inline MainTheoremDualResult theorem_main_dual_check(const IndependentFamily& fam, const Exponent& p,
                                                     const SolverOptions& opt = {}) {
  if (p.is_infinite()) throw DomainError("theorem_main_dual_check: p must be finite");
  const Exponent pc = p.conjugate();
  MainTheoremDualResult r;
  r.lhs = norm_linf_valued(lambda_dual(fam), pc, opt);
  const JKNormSpec spec{pc, Exponent::infinity(), fam.l, fam.count(), JKMode::sum};
  r.sum = jk_norm(as_vector_element(fam), spec, opt);
  if (r.sum.lower > 0.0) {
    r.ratio_high = r.lhs.upper / r.sum.lower;
    r.ratio_low = r.lhs.lower * p.value() / r.sum.upper;
  } else {
    r.ratio_high = r.lhs.upper == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return r;
}

struct RosenthalResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio_over_p = 0.0;
};

/// ‖Σ π_k(a^k)‖_{L_p(τ_{ml^n})} against
/// max{‖(1/l)Σ_{k,i} a^k_ii‖_{L_p(τ_m)}, (Σ_k ‖a^k‖_{L_p(τ_{ml})}^p)^{1/p}},
/// with a^k ∈ M_m ⊗ M_l (the M_m factor outermost).
inline RosenthalResult rosenthal_nc_check(const IndependentFamily& fam, const Exponent& p) {
  fam.validate();
  p.require_at_least_one("rosenthal_nc_check");
  if (p.is_infinite()) throw DomainError("rosenthal_nc_check: p must be finite");
  const std::size_t n = fam.count();
  const Eigen::Index m = fam.ambient, l = fam.l;
  std::vector<Eigen::Index> dims{m};
  for (std::size_t k = 0; k < n; ++k) dims.push_back(l);
  const TensorLayout layout(dims);
  const Eigen::Index total = layout.total();

  std::vector<CMat> pos;
  for (const auto& a : fam.blocks) {
    const CMat h = hermitian_part(a);
    if (min_eigenvalue(h) < -1e-12) throw DomainError("rosenthal_nc_check: input is not positive");
    pos.push_back(psd_projection(h));
  }
  CMat sum = CMat::Zero(total, total);
  CMat cond = CMat::Zero(m, m);
  RVec parts(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    sum += embed_on_factors(pos[k], dims, {0, k + 1});
    cond += partial_trace(pos[k], {m, l}, {0}, true);
    parts[static_cast<Eigen::Index>(k)] = lp_trace_norm(pos[k], p, TraceWeight::tau(m * l));
  }
  RosenthalResult r;
  r.lhs = lp_trace_norm(sum, p, TraceWeight::tau(total));
  r.rhs = std::max(lp_trace_norm(cond, p, TraceWeight::tau(m)), lp_norm(parts, p));
  r.ratio_over_p = r.rhs > 0.0 ? r.lhs / (p.value() * r.rhs) : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Distortion of Φ at level 1.

struct DistortionRow {
  std::string input;   ///< stream label or adversarial tag
  std::string kind;    ///< ginibre / hermitian / psd / adversarial
  double x_norm = 0.0;
  double phi_lower = 0.0;
  double phi_upper = 0.0;
  double ratio_low = 0.0;
  double ratio_high = 0.0;
  std::string status;
};

struct DistortionReport {
  int samples = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  double adversarial_min = std::numeric_limits<double>::infinity();
  double adversarial_max = 0.0;
  std::vector<DistortionRow> rows;
};

struct PhiNorm {
  double lower = 0.0;
  double upper = 0.0;
  CertStatus status = CertStatus::converged;
};

/// ‖Φ(x)‖ in L_p(τ; ℓ_q^m): block formula for q = p, certified program for q = 1.
inline PhiNorm phi_norm(const CMat& x, const EmbeddingSpec& spec, const SolverOptions& opt = {}) {
  const VectorElement v = phi(x, spec);
  if (spec.q == spec.p) {
    const double b = block_lp_norm(v, spec.p);
    return {b, b, CertStatus::converged};
  }
  const CertifiedValue cv = norm_lq_valued(v, spec.p, spec.q, opt);
  return {cv.lower, cv.upper, cv.status};
}

namespace detail {

inline CMat sample_input(Eigen::Index n, Engine& eng, std::string& kind) {
  std::uniform_int_distribution<int> pick(0, 3);
  switch (pick(eng)) {
    case 0:
    case 1:
      kind = "ginibre";
      return ginibre(n, n, eng);
    case 2:
      kind = "hermitian";
      return random_hermitian(n, eng);
    default:
      kind = "psd";
      return random_psd(n, eng);
  }
}

inline DistortionRow distortion_row(const CMat& x, const EmbeddingSpec& spec, const SolverOptions& opt,
                                    std::string label, std::string kind) {
  DistortionRow row;
  row.input = std::move(label);
  row.kind = std::move(kind);
  row.x_norm = schatten_norm(x, spec.q);
  const PhiNorm pn = phi_norm(x, spec, opt);
  row.phi_lower = pn.lower;
  row.phi_upper = pn.upper;
  row.ratio_low = pn.lower / row.x_norm;
  row.ratio_high = pn.upper / row.x_norm;
  row.status = to_string(pn.status);
  return row;
}

}  // namespace detail

/// Random inputs (half Ginibre, a quarter self-adjoint, a quarter PSD) plus a
/// coordinate-ascent search in each direction starting from the extreme samples.
inline DistortionReport distortion_survey(const EmbeddingSpec& spec, int samples, int adversarial_steps,
                                          const RngSeed& seed, const SolverOptions& opt = {}) {
  spec.validate();
  if (!(spec.q == spec.p) && spec.q.reciprocal() != 1.0) {
    throw DomainError("distortion_survey: q must be 1 or p");
  }
  DistortionReport rep;
  rep.samples = samples;
  const Eigen::Index n = spec.n;
  CMat argmin, argmax;
  for (int s = 0; s < samples; ++s) {
    const RngSeed sd = seed.child(static_cast<std::uint64_t>(s));
    Engine eng = make_engine(sd);
    std::string kind;
    const CMat x = detail::sample_input(n, eng, kind);
    DistortionRow row = detail::distortion_row(x, spec, opt, sd.label, kind);
    if (row.ratio_low < rep.min_ratio) {
      rep.min_ratio = row.ratio_low;
      argmin = x;
    }
    if (row.ratio_high > rep.max_ratio) {
      rep.max_ratio = row.ratio_high;
      argmax = x;
    }
    rep.rows.push_back(std::move(row));
  }
  if (adversarial_steps > 0 && samples > 0) {
    Engine eng = make_engine(seed.child("adversarial"));
    std::uniform_int_distribution<Eigen::Index> coord(0, n - 1);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int dir = 0; dir < 2; ++dir) {
      const bool up = dir == 0;
      CMat x = up ? argmax : argmin;
      double best = up ? rep.max_ratio : rep.min_ratio;
      double step = 0.25 * x.norm() / static_cast<double>(n);
      for (int st = 0; st < adversarial_steps; ++st) {
        CMat cand = x;
        cand(coord(eng), coord(eng)) += step * cplx(g(eng), g(eng));
        if (cand.isZero(0.0)) continue;
        DistortionRow row = detail::distortion_row(cand, spec, opt, "adversarial/" + std::to_string(dir) + "/" + std::to_string(st),
                                                   "adversarial");
        const double val = up ? row.ratio_high : row.ratio_low;
        const bool better = up ? val > best : val < best;
        rep.min_ratio = std::min(rep.min_ratio, row.ratio_low);
        rep.max_ratio = std::max(rep.max_ratio, row.ratio_high);
        if (better) {
          best = val;
          x = std::move(cand);
        } else {
          step *= 0.9;
        }
        rep.rows.push_back(std::move(row));
      }
      if (up) {
        rep.adversarial_max = best;
      } else {
        rep.adversarial_min = best;
      }
    }
  }
  return rep;
}

inline void write_distortion_csv(std::ostream& out, const DistortionReport& rep) {
  out << "input,kind,x_norm,phi_lower,phi_upper,ratio_low,ratio_high,status\n";
  char buf[256];
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g", r.x_norm, r.phi_lower, r.phi_upper,
                  r.ratio_low, r.ratio_high);
    out << r.input << ',' << r.kind << ',' << buf << ',' << r.status << '\n';
  }
}

// ---------------------------------------------------------------------------
// Min-structure check.

struct MinStructureResult {
  double snorm = 0.0;
  double estimate = 0.0;
  double factor = 0.0;
  bool self_adjoint = false;
};

/// L_p(τ_{n^m}; min ℓ_q^m) norm of Φ(h) for self-adjoint h: the components
/// commute, so it is the commutative L_p(uniform; ℓ_q^m) norm over the n^m joint
/// eigenvalue tuples, times n^{-1/q}.
inline double min_structure_selfadjoint_norm(const CMat& h, const EmbeddingSpec& spec) {
  spec.validate();
  const RVec lam = hermitian_eigen(hermitian_part(h)).values;
  const Eigen::Index n = spec.n;
  const int m = spec.m;
  const Eigen::Index tuples = spec.ambient_dim();
  Eigen::MatrixXd table(m, tuples);
  for (Eigen::Index t = 0; t < tuples; ++t) {
    Eigen::Index rest = t;
    for (int k = m - 1; k >= 0; --k) {
      table(k, t) = lam[rest % n];
      rest /= n;
    }
  }
  const RVec w = RVec::Constant(tuples, 1.0 / static_cast<double>(tuples));
  return std::pow(static_cast<double>(n), -spec.q.reciprocal()) *
         commutative_mixed_norm(table, w, spec.p, spec.q);
}

inline bool is_self_adjoint(const CMat& x, double tol = 1e-12) {
  return (x - x.adjoint()).norm() <= tol * std::max(1.0, x.norm());
}

/// factor = ‖x‖_{S_q} / estimate. For general x the estimate is
/// max(est(a), est(b)) with a = (x + x*)/2, b = (x − x*)/2i, each a lower bound
/// for the min-structure norm of Φ(x).
inline MinStructureResult min_structure_check(const CMat& x, const EmbeddingSpec& spec) {
  spec.validate();
  if (x.rows() != spec.n || x.cols() != spec.n) throw DimensionError("min_structure_check: x must be n x n");
  MinStructureResult r;
  r.snorm = schatten_norm(x, spec.q);
  r.self_adjoint = is_self_adjoint(x);
  if (r.self_adjoint) {
    r.estimate = min_structure_selfadjoint_norm(x, spec);
  } else {
    const CMat a = 0.5 * (x + x.adjoint());
    const CMat b = (x - x.adjoint()) / cplx(0.0, 2.0);
    r.estimate = std::max(min_structure_selfadjoint_norm(a, spec), min_structure_selfadjoint_norm(b, spec));
  }
  r.factor = r.estimate > 0.0 ? r.snorm / r.estimate : (r.snorm == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  return r;
}

}  // namespace ncspace
