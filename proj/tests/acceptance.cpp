// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Measured extremes are written to acceptance_report.csv in the working directory
// (or $NCSPACE_OUT if set).

#include <chrono>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "ncspace/ncspace.hpp"

using namespace ncspace;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::ofstream& report() {
  static std::ofstream out = [] {
    const char* env = std::getenv("NCSPACE_OUT");
    const std::filesystem::path dir = env ? env : ".";
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / "acceptance_report.csv");
    f << "criterion,key,value\n";
    return f;
  }();
  return out;
}

void record(int c, const std::string& key, double v) { report() << c << ',' << key << ',' << fmt("%.17g", v) << '\n'; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// S_p norm from the eigenvalues of x*x, kept separate from the library's SVD path
double schatten_oracle(const CMat& x, double p) {
  Eigen::SelfAdjointEigenSolver<CMat> es(x.adjoint() * x);
  if (std::isinf(p)) return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    s += std::pow(std::max(es.eigenvalues()[i], 0.0), p / 2.0);
  }
  return std::pow(s, 1.0 / p);
}

IndependentFamily random_family(Eigen::Index l, int n, Engine& eng) {
  IndependentFamily f;
  f.l = l;
  for (int k = 0; k < n; ++k) f.blocks.push_back(random_mixed_input(l, eng));
  return f;
}

Outcome c1_asymmetric() {
  Outcome o;
  Engine eng = make_engine({101, "acc/asym"});
  const std::vector<std::pair<double, double>> rs{{2, 2}, {4, 4}, {4, 2}, {6, 4}, {kInf, 2}};
  double worst = 0.0, slowest = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int d = 1 + i % 4;
    const auto [r, s] = rs[(i / 4) % rs.size()];
    const CMat x = ginibre(d, d, eng);
    const auto t0 = Clock::now();
    const CertifiedValue cv = norm_asym_scalar(x, Exponent(r), Exponent(s));
    slowest = std::max(slowest, seconds_since(t0));
    const double ref = schatten_oracle(x, 1.0 / (1.0 / r + 1.0 / s));
    worst = std::max(worst, std::abs(cv.midpoint() - ref) / ref);
  }
  record(1, "max_rel_error", worst);
  record(1, "slowest_instance_s", slowest);
  o.pass = worst <= 1e-4 && slowest < 5.0;
  o.detail = "max rel err " + fmt("%.2e", worst) + ", slowest " + fmt("%.3f", slowest) + " s";
  return o;
}

Outcome c2_duality() {
  Outcome o;
  Engine eng = make_engine({102, "acc/duality"});
  double worst_sat = 0.0, worst_gap = 0.0, worst_viol = 0.0;
  for (double p : {1.5, 2.0, 3.0}) {
    for (int i = 0; i < 4; ++i) {
      const VectorElement x = lambda_p1(random_family(2, 3, eng));
      const Exponent pe(p), pc = Exponent(p).conjugate();
      const CertifiedValue a = norm_l1_valued(x, pe);
      const CertifiedValue b = norm_linf_valued(x, pe);
      for (const CertifiedValue* cv : {&a, &b}) {
        worst_gap = std::max(worst_gap, (cv->upper - cv->lower) / cv->upper);
      }
      // a's witness lives in L_{p'}(ℓ_∞), b's in L_{p'}(ℓ_1)
      const CertifiedValue wa = norm_linf_valued(a.dual, pc);
      const CertifiedValue wb = norm_l1_valued(b.dual, pc);
      for (auto [cv, w] : {std::pair{&a, &wa}, std::pair{&b, &wb}}) {
        const double pr = std::abs(pairing(cv->dual, x));
        const double prod = cv->upper * w->upper;
        worst_viol = std::max(worst_viol, pr / prod - 1.0);
        worst_sat = std::max(worst_sat, 1.0 - pr / prod);
      }
    }
  }
  record(2, "max_relative_gap", worst_gap);
  record(2, "max_saturation_defect", worst_sat);
  record(2, "max_pairing_excess", worst_viol);
  o.pass = worst_viol <= 1e-12 && worst_sat <= 1e-3 && worst_gap <= 1e-4;
  o.detail = "gap " + fmt("%.2e", worst_gap) + ", saturation defect " + fmt("%.2e", worst_sat) +
             ", pairing excess " + fmt("%.2e", worst_viol);
  return o;
}

Outcome c3_isometry() {
  Outcome o;
  Engine eng = make_engine({103, "acc/iso"});
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const EmbeddingSpec spec = EmbeddingSpec::standard(2, Exponent(p), Exponent(p));
    for (int i = 0; i < 100; ++i) {
      const CMat x = random_mixed_input(2, eng);
      const PhiNorm pn = phi_norm(x, spec);
      worst = std::max(worst, std::abs(pn.upper / schatten_oracle(x, p) - 1.0));
    }
  }
  const double dt = seconds_since(t0);
  record(3, "max_abs_ratio_minus_one", worst);
  record(3, "runtime_s", dt);
  o.pass = worst <= 1e-8 && dt < 10.0;
  o.detail = "max |ratio-1| " + fmt("%.2e", worst) + ", runtime " + fmt("%.2f", dt) + " s";
  return o;
}

Outcome c4_sandwich() {
  Outcome o;
  SolverOptions opt;
  opt.tolerance = 1e-5;
  o.detail = "";
  for (double p : {1.5, 2.0, 3.0}) {
    const EmbeddingSpec spec = EmbeddingSpec::standard(2, Exponent(p), Exponent(1.0));
    const DistortionReport rep = distortion_survey(spec, 200, 20, {104, "acc/sandwich/" + fmt("%g", p)}, opt);
    record(4, "p=" + fmt("%g", p) + "/min_ratio", rep.min_ratio);
    record(4, "p=" + fmt("%g", p) + "/max_ratio", rep.max_ratio);
    record(4, "p=" + fmt("%g", p) + "/adversarial_min", rep.adversarial_min);
    record(4, "p=" + fmt("%g", p) + "/adversarial_max", rep.adversarial_max);
    const bool ok = rep.min_ratio >= 1.0 - 1e-3 && rep.max_ratio <= 8.0 * p;
    o.pass = o.pass && ok;
    o.detail += "p=" + fmt("%g", p) + " [" + fmt("%.4f", rep.min_ratio) + ", " + fmt("%.4f", rep.max_ratio) + "] ";
  }
  return o;
}

Outcome c5_main() {
  Outcome o;
  Engine eng = make_engine({105, "acc/main"});
  double low = kInf, p1 = 0.0, dual_hi = 0.0, high = 0.0;
  for (int n : {2, 3}) {
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      for (int i = 0; i < 3; ++i) {
        const IndependentFamily f = random_family(2, n, eng);
        const MainTheoremResult r = theorem_main_check(f, Exponent(p));
        low = std::min(low, r.ratio_low);
        high = std::max(high, r.ratio_high);
        if (p == 1.0) p1 = std::max({p1, std::abs(r.lhs.lower - r.cap) / r.cap, std::abs(r.lhs.upper - r.cap) / r.cap});
        const MainTheoremDualResult d = theorem_main_dual_check(f, Exponent(p));
        dual_hi = std::max(dual_hi, d.ratio_high);
      }
    }
  }
  record(5, "min_ratio_low", low);
  record(5, "max_ratio_high", high);
  record(5, "p1_max_rel_deviation", p1);
  record(5, "max_dual_ratio", dual_hi);
  o.pass = low >= 1.0 - 1e-3 && p1 <= 1e-6 && dual_hi <= 1.0 + 1e-3;
  o.detail = "min lhs/cap " + fmt("%.6f", low) + ", p=1 deviation " + fmt("%.2e", p1) + ", max dual lhs/sum " +
             fmt("%.6f", dual_hi) + ", max lhs/(p cap) " + fmt("%.4f", high);
  return o;
}

Outcome c6_rosenthal() {
  Outcome o;
  Engine eng = make_engine({106, "acc/rosenthal"});
  double worst = 0.0, drift = 0.0;
  for (int i = 0; i < 500; ++i) {
    IndependentFamily f{2, {}, 2};
    for (int k = 0; k < 4; ++k) f.blocks.push_back(random_psd(4, eng));
    IndependentFamily g = f;
    for (auto& b : g.blocks) b *= 0.37;
    for (double p : {1.0, 2.0, 3.0}) {
      const RosenthalResult r = rosenthal_nc_check(f, Exponent(p));
      const RosenthalResult s = rosenthal_nc_check(g, Exponent(p));
      worst = std::max(worst, r.ratio_over_p);
      drift = std::max(drift, std::abs(r.ratio_over_p - s.ratio_over_p));
    }
  }
  record(6, "max_ratio_over_p", worst);
  record(6, "max_scaling_drift", drift);
  o.pass = worst <= 8.0 && drift <= 1e-12;
  o.detail = "max ratio/p " + fmt("%.4f", worst) + ", scaling drift " + fmt("%.2e", drift);
  return o;
}

Outcome c7_cb() {
  Outcome o;
  Engine eng = make_engine({107, "acc/cb"});
  const std::vector<std::pair<double, double>> rs{{kInf, 2}, {4, 2}, {6, 3}, {4, 4}};
  double lo = kInf, hi = 0.0;
  for (int i = 0; i < 25; ++i) {
    const CMat a = ginibre(3, 3, eng);
    for (auto [r, s] : rs) {
      const double t2 = 2.0 / (1.0 / s - 1.0 / r);
      const double cf = schatten_oracle(a, t2);
      const CBLowerBound lb = cb_lower_bound({a, Exponent(r), Exponent(s)}, 200, 8,
                                             {static_cast<std::uint64_t>(i), "acc/cb"});
      lo = std::min(lo, lb.value / cf);
      hi = std::max(hi, lb.value / cf);
    }
  }
  record(7, "min_lower_over_closed", lo);
  record(7, "max_lower_over_closed", hi);
  o.pass = lo >= 1.0 - 1e-3 && hi <= 1.0 + 1e-9;
  o.detail = "lower/closed in [" + fmt("%.8f", lo) + ", " + fmt("%.12f", hi) + "]";
  return o;
}

Outcome c8_witnesses() {
  Outcome o;
  double meas = 0.0, bound = 0.0, cot = 0.0, cot_meas = 0.0;
  for (int d : {2, 3, 4, 6}) {
    for (double p : {1.0, 1.5}) {
      for (double q : {p + 0.25 * (2.0 - p), p + 0.5 * (2.0 - p), 2.0}) {
        for (std::uint64_t s = 0; s < 20; ++s) {
          const WitnessReport w = sigma_type_witness(d, Exponent(p), Exponent(q), {s, "acc/type"});
          meas = std::max(meas, std::abs(w.measured - std::pow(d, 1.0 + 1.0 / p)) / w.lhs);
          bound = std::max(bound, std::abs(w.implied_bound - std::pow(d, 2.0 * (1.0 / p - 1.0 / q))));
        }
      }
      const double pc = p == 1.0 ? kInf : p / (p - 1.0);
      std::vector<double> qps{2.0};
      if (std::isinf(pc)) {
        qps.push_back(4.0);
      } else {
        qps.push_back(0.5 * (2.0 + pc));
      }
      for (double qp : qps) {
        const double q = qp / (qp - 1.0);
        const double coef = 0.5 + 0.5 / p + 0.5 / qp;
        const double func = 1.0 / q + 0.5 / qp + (std::isinf(pc) ? 0.0 : 0.5 / pc);
        for (std::uint64_t s = 0; s < 20; ++s) {
          const WitnessReport w = cotype_witness(d, Exponent(p), Exponent(qp), {s, "acc/cotype"});
          cot = std::max(cot, std::abs(w.implied_bound - std::pow(d, coef - func)));
          cot_meas = std::max(cot_meas, std::abs(w.measured - std::pow(d, func)) / w.rhs);
        }
      }
    }
  }
  record(8, "type_measured_rel_error", meas);
  record(8, "type_bound_abs_error", bound);
  record(8, "cotype_ratio_abs_error", cot);
  record(8, "cotype_measured_rel_error", cot_meas);
  o.pass = meas <= 1e-10 && bound <= 1e-12 && cot <= 1e-12 && cot_meas <= 1e-10;
  o.detail = "type measured " + fmt("%.1e", meas) + ", bound " + fmt("%.1e", bound) + ", cotype ratio " +
             fmt("%.1e", cot) + ", cotype measured " + fmt("%.1e", cot_meas);
  return o;
}

Outcome c9_commutative() {
  Outcome o;
  double lo = kInf, hi = 0.0, ci = kInf;
  bool p1_exact = true;
  for (std::size_t g : {4u, 16u, 64u}) {
    for (double p : {1.0, 1.5}) {
      const WitnessReport w = commutative_type_bound(g, Exponent(p), Exponent(2.0), 10000, {109, "acc/ctb"});
      lo = std::min(lo, w.implied_bound);
      hi = std::max(hi, w.implied_bound);
      ci = std::min(ci, w.ci_low);
      if (p == 1.0 && std::abs(w.implied_bound - 1.0) > 1e-14) p1_exact = false;  // exact up to rounding of |ζ|
      record(9, "G=" + std::to_string(g) + "/p=" + fmt("%g", p), w.implied_bound);
    }
  }
  o.pass = lo >= 0.3 && hi <= 1.0 + 1e-14 && ci > 0.0 && p1_exact;
  o.detail = "implied c in [" + fmt("%.6f", lo) + ", " + fmt("%.6f", hi) + "], min CI low " + fmt("%.4f", ci) +
             (p1_exact ? ", p=1 exact" : ", p=1 NOT exact");
  return o;
}

Outcome c10_classical() {
  Outcome o;
  bool bounded = true, no_drift = true;
  std::string detail;
  for (double p : {1.5, 2.0, 3.0}) {
    std::vector<ClassicalRosenthalResult> rows;
    for (int n : {4, 16, 64}) {
      rows.push_back(classical_rosenthal_check(Distribution::exponential, n, Exponent(p), 100000,
                                               {110, "acc/classical/" + std::to_string(n)}));
      const auto& r = rows.back();
      bounded = bounded && r.ratio_ci_low >= 0.25 && r.ratio_ci_high <= 4.0;
      record(10, "p=" + fmt("%g", p) + "/n=" + std::to_string(n), r.ratio);
    }
    // the exact ratio decreases toward 1 as n grows; a later n may not exceed an earlier one beyond the CIs
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double slack = (rows[i].ratio_ci_high - rows[i].ratio) + (rows[i + 1].ratio_ci_high - rows[i + 1].ratio);
      if (rows[i + 1].ratio > rows[i].ratio + slack) no_drift = false;
    }
    detail += "p=" + fmt("%g", p) + " {" + fmt("%.3f", rows[0].ratio) + "," + fmt("%.3f", rows[1].ratio) + "," +
              fmt("%.3f", rows[2].ratio) + "} ";
  }
  o.pass = bounded && no_drift;
  o.detail = detail + (no_drift ? "no upward drift" : "upward drift");
  return o;
}

Outcome c11_min() {
  Outcome o;
  std::string detail;
  for (double q : {1.0, 2.0}) {
    for (double p : {1.5, 2.0, 3.0}) {
      const EmbeddingSpec spec = EmbeddingSpec::standard(2, Exponent(p), Exponent(q));
      Engine eng = make_engine({111, "acc/min/" + fmt("%g", q) + "/" + fmt("%g", p)});
      double sa = 0.0, gen = 0.0;
      for (int i = 0; i < 100; ++i) {
        sa = std::max(sa, min_structure_check(random_hermitian(2, eng), spec).factor);
        gen = std::max(gen, min_structure_check(ginibre(2, 2, eng), spec).factor);
      }
      record(11, "q=" + fmt("%g", q) + "/p=" + fmt("%g", p) + "/selfadjoint", sa);
      record(11, "q=" + fmt("%g", q) + "/p=" + fmt("%g", p) + "/general", gen);
      const bool ok = sa <= 1.0 + 1e-6 && gen <= 2.0 + 1e-6;
      o.pass = o.pass && ok;
      if (!ok) detail += "q=" + fmt("%g", q) + ",p=" + fmt("%g", p) + " (" + fmt("%.4f", sa) + ", " + fmt("%.4f", gen) + ") ";
    }
  }
  o.detail = o.pass ? "all factors within bounds" : "exceeded at " + detail;
  return o;
}

Outcome c12_lemma_d() {
  Outcome o;
  Engine eng = make_engine({112, "acc/lemma-d"});
  double excess = -kInf;
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + i % 3;
    std::vector<CMat> x;
    for (int k = 0; k < n; ++k) x.push_back(ginibre(n, n, eng));
    const LemmaDResult r = lemma_d_check(x);
    excess = std::max(excess, r.lhs - r.rhs);
  }
  double tight = 0.0;
  for (int n : {1, 2, 3}) {
    std::vector<CMat> e;
    for (int c = 0; c < n; ++c) e.push_back(matrix_unit(n, n, c, c));
    const LemmaDResult r = lemma_d_check(e);
    tight = std::max(tight, std::abs(r.lhs - r.rhs));
  }
  record(12, "max_lhs_minus_rhs", excess);
  record(12, "ecc_gap", tight);
  o.pass = excess <= 1e-6 && tight <= 1e-6;
  o.detail = "max lhs-rhs " + fmt("%.2e", excess) + ", e_cc gap " + fmt("%.2e", tight);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Scalar asymmetric closed form", c1_asymmetric},
      {"Duality consistency", c2_duality},
      {"Phi isometry at q=p", c3_isometry},
      {"Phi sandwich at q=1", c4_sandwich},
      {"Theorem-Main sandwich", c5_main},
      {"Lemma-Rosenthal", c6_rosenthal},
      {"Lemma-CB", c7_cb},
      {"Type and cotype witnesses", c8_witnesses},
      {"Commutative type bound", c9_commutative},
      {"Classical Rosenthal", c10_classical},
      {"Proposition-Min", c11_min},
      {"Lemma-D", c12_lemma_d},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
