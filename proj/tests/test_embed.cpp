#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ncspace/embed.hpp"

using namespace ncspace;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

IndependentFamily random_family(Eigen::Index l, int n, Engine& eng) {
  IndependentFamily f;
  f.l = l;
  for (int k = 0; k < n; ++k) f.blocks.push_back(ginibre(l, l, eng));
  return f;
}

// τ(a^t b) summed over k, written out entrywise
cplx direct_pairing(const IndependentFamily& a, const IndependentFamily& b) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < a.count(); ++k) {
    for (Eigen::Index i = 0; i < a.l; ++i) {
      for (Eigen::Index j = 0; j < a.l; ++j) s += a.blocks[k](i, j) * b.blocks[k](i, j);
    }
  }
  return s / static_cast<double>(a.l);
}

double mixed_norm_oracle(const Eigen::MatrixXd& table, double p, double q) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < table.cols(); ++j) {
    double inner = 0.0;
    for (Eigen::Index k = 0; k < table.rows(); ++k) inner += std::pow(std::abs(table(k, j)), q);
    acc += std::pow(inner, p / q);
  }
  return std::pow(acc / static_cast<double>(table.cols()), 1.0 / p);
}

}  // namespace

TEST(Phi, IdentityComponents) {
  for (double q : {1.0, 1.5, 2.0}) {
    const VectorElement v = phi(identity(2), EmbeddingSpec::standard(2, Exponent(2.0), Exponent(q)));
    ASSERT_EQ(v.size(), 4u);
    for (const auto& c : v.components) {
      EXPECT_LE((c - std::pow(2.0, -1.0 / q) * identity(16)).norm(), 1e-15);
    }
  }
  EXPECT_THROW(phi(identity(3), EmbeddingSpec::standard(2, Exponent(2.0), Exponent(1.0))), DimensionError);
  EXPECT_THROW(EmbeddingSpec::standard(3, Exponent(2.0), Exponent(1.0)).validate(), CapacityError);
}

TEST(Phi, IsometryAtQEqualsP) {
  Engine eng = make_engine({1, "phi-iso"});
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const EmbeddingSpec spec = EmbeddingSpec::standard(2, Exponent(p), Exponent(p));
    for (int i = 0; i < 10; ++i) {
      const CMat x = ginibre(2, 2, eng);
      const VectorElement v = phi(x, spec);
      double acc = 0.0;
      for (const auto& c : v.components) acc += std::pow(lp_trace_norm(c, Exponent(p), v.trace_weight()), p);
      EXPECT_NEAR(std::pow(acc, 1.0 / p), schatten_norm(x, Exponent(p)), 1e-10 * schatten_norm(x, Exponent(p)));
    }
  }
}

TEST(Phi, IdentityRatioOneForQEqualsOne) {
  for (double p : {1.5, 2.0, 3.0}) {
    const PhiNorm pn = phi_norm(identity(2), EmbeddingSpec::standard(2, Exponent(p), Exponent(1.0)));
    EXPECT_NEAR(pn.lower / 2.0, 1.0, 1e-5);
    EXPECT_NEAR(pn.upper / 2.0, 1.0, 1e-5);
  }
}

TEST(Phi, NormalInputsReduceToCommutative) {
  // Φ(u d u*) = U Φ(d) U* with U = u ⊗ ... ⊗ u, and the components of Φ(d) commute
  Engine eng = make_engine({2, "phi-diag"});
  std::normal_distribution<double> g;
  for (double p : {1.5, 2.0, 3.0}) {
    const EmbeddingSpec spec = EmbeddingSpec::standard(2, Exponent(p), Exponent(1.0));
    CVec lam(2);
    lam << cplx(g(eng), g(eng)), cplx(g(eng), g(eng));
    const CMat u = haar_unitary(2, eng);
    const CMat x = u * lam.asDiagonal() * u.adjoint();
    const VectorElement v = phi(CMat(lam.asDiagonal()), spec);
    Eigen::MatrixXd table(4, 16);
    for (int k = 0; k < 4; ++k) table.row(k) = v[k].diagonal().cwiseAbs().transpose();
    const double ref = mixed_norm_oracle(table, p, 1.0);
    const PhiNorm pn = phi_norm(x, spec);
    EXPECT_LE(pn.lower, ref * (1.0 + 1e-9));
    EXPECT_GE(pn.upper, ref * (1.0 - 1e-9));
    EXPECT_LE(pn.upper - pn.lower, 1e-5 * ref);
  }
}

TEST(Lambda, BasicsAndPairing) {
  Engine eng = make_engine({3, "lambda"});
  IndependentFamily one = random_family(3, 1, eng);
  EXPECT_EQ(lambda_p1(one)[0], one.blocks[0]);

  const IndependentFamily f = random_family(2, 3, eng);
  const VectorElement v = lambda_p1(f);
  ASSERT_EQ(v.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(std::abs(v[k].trace() / 8.0 - f.blocks[k].trace() / 2.0), 0.0, 1e-14);
  }
  EXPECT_EQ(lambda_dual(f)[1], v[1]);

  IndependentFamily e{2, {matrix_unit(2, 2, 0, 0)}};
  PairingResult r = pairing_check(e, e);
  EXPECT_NEAR(std::abs(r.lhs - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r.rhs - 0.5), 0.0, 1e-15);

  for (int i = 0; i < 10; ++i) {
    const IndependentFamily a = random_family(2, 3, eng), b = random_family(2, 3, eng);
    r = pairing_check(a, b);
    EXPECT_LE(std::abs(r.lhs - r.rhs), 1e-13 * (1.0 + std::abs(r.rhs)));
    EXPECT_LE(std::abs(r.rhs - direct_pairing(a, b)), 1e-13 * (1.0 + std::abs(r.rhs)));
  }
  // transpose pairing: tr(e12^t e21)/2 = 1/2, tr(e12^t e12)/2 = 0
  const IndependentFamily a{2, {matrix_unit(2, 2, 0, 1)}}, b{2, {matrix_unit(2, 2, 1, 0)}};
  EXPECT_NEAR(std::abs(pairing_check(a, b).rhs), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(pairing_check(a, a).rhs - 0.5), 0.0, 1e-15);
  EXPECT_THROW(pairing_check(a, random_family(2, 2, eng)), DimensionError);
}

TEST(DiagonalProjection, Properties) {
  Engine eng = make_engine({4, "proj"});
  const CMat d = diagonal_projection(ginibre(6, 6, eng), 3);
  EXPECT_EQ(diagonal_projection(d, 3), d);
  for (int n : {1, 2, 3, 4}) {
    const CMat x = ginibre(2 * n, 2 * n, eng);
    const CMat a = diagonal_projection(x, n), b = diagonal_projection_by_signs(x, n);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(diagonal_projection(a, n), a);
    for (double p : {1.0, 2.0, 3.0, kInf}) {
      EXPECT_LE(schatten_norm(a, Exponent(p)), schatten_norm(x, Exponent(p)) + 1e-10);
    }
  }
  EXPECT_THROW(diagonal_projection(ginibre(5, 5, eng), 2), DimensionError);
}

TEST(TheoremMain, Examples) {
  Engine eng = make_engine({5, "main"});
  const IndependentFamily f = random_family(2, 3, eng);
  const MainTheoremResult one = theorem_main_check(f, Exponent(1.0));
  double ref = 0.0;
  for (const auto& b : f.blocks) ref += lp_trace_norm(b, Exponent(1.0), TraceWeight::tau(2));
  EXPECT_NEAR(one.cap, ref, 1e-12 * ref);
  EXPECT_NEAR(one.ratio_low, 1.0, 1e-6);
  EXPECT_NEAR(one.ratio_high, 1.0, 1e-6);

  const IndependentFamily single = random_family(2, 1, eng);
  const MainTheoremResult s = theorem_main_check(single, Exponent(2.0));
  EXPECT_NEAR(s.ratio_low, 1.0, 1e-5);

  const MainTheoremResult two = theorem_main_check(f, Exponent(2.0));
  EXPECT_GE(two.ratio_low, 0.999);
  EXPECT_LE(two.ratio_high, 4.0);

  const MainTheoremDualResult dual = theorem_main_dual_check(f, Exponent(2.0));
  EXPECT_LE(dual.ratio_high, 1.0 + 1e-3);
}

TEST(RosenthalNc, Examples) {
  Engine eng = make_engine({6, "ros"});
  for (double p : {1.0, 2.0, 3.0}) {
    IndependentFamily one{2, {random_psd(4, eng)}, 2};
    const RosenthalResult r = rosenthal_nc_check(one, Exponent(p));
    EXPECT_LE(r.lhs, r.rhs * (1.0 + 1e-12));
    EXPECT_LE(r.ratio_over_p, 1.0);

    IndependentFamily ids{2, std::vector<CMat>(4, identity(4)), 2};
    const RosenthalResult c = rosenthal_nc_check(ids, Exponent(p));
    EXPECT_NEAR(c.lhs, 4.0, 1e-12);
    EXPECT_NEAR(c.rhs, 4.0, 1e-12);
    EXPECT_NEAR(c.ratio_over_p, 1.0 / p, 1e-12);

    IndependentFamily f{2, {}, 2};
    for (int k = 0; k < 4; ++k) f.blocks.push_back(random_psd(4, eng));
    const RosenthalResult base = rosenthal_nc_check(f, Exponent(p));
    IndependentFamily g = f;
    for (auto& b : g.blocks) b *= 3.7;
    const RosenthalResult scaled = rosenthal_nc_check(g, Exponent(p));
    EXPECT_NEAR(scaled.ratio_over_p, base.ratio_over_p, 1e-12);
    EXPECT_NEAR(scaled.lhs, 3.7 * base.lhs, 1e-12 * scaled.lhs);
  }
  IndependentFamily bad{2, {-1.0 * identity(4)}, 2};
  EXPECT_THROW(rosenthal_nc_check(bad, Exponent(2.0)), DomainError);
}

TEST(RosenthalNc, LhsAgainstDirectKron) {
  // one family built by hand with explicit Kronecker products, m = 1
  Engine eng = make_engine({7, "ros-kron"});
  IndependentFamily f{2, {random_psd(2, eng), random_psd(2, eng)}, 1};
  const CMat sum = kron(f.blocks[0], identity(2)) + kron(identity(2), f.blocks[1]);
  const double ref = std::pow(schatten_norm(sum, Exponent(3.0)), 1.0) * std::pow(4.0, -1.0 / 3.0);
  EXPECT_NEAR(rosenthal_nc_check(f, Exponent(3.0)).lhs, ref, 1e-12 * ref);
}

TEST(Distortion, QEqualsPIsometric) {
  const EmbeddingSpec spec = EmbeddingSpec::standard(2, Exponent(2.0), Exponent(2.0));
  const DistortionReport rep = distortion_survey(spec, 20, 5, {8, "survey"});
  EXPECT_NEAR(rep.min_ratio, 1.0, 1e-8);
  EXPECT_NEAR(rep.max_ratio, 1.0, 1e-8);
  EXPECT_EQ(rep.rows.size(), 30u);
  std::ostringstream csv;
  write_distortion_csv(csv, rep);
  EXPECT_EQ(csv.str().rfind("input,kind,", 0), 0u);
}

TEST(Distortion, QOneSmallSurvey) {
  const EmbeddingSpec spec = EmbeddingSpec::standard(2, Exponent(2.0), Exponent(1.0));
  SolverOptions opt;
  opt.tolerance = 1e-5;
  const DistortionReport rep = distortion_survey(spec, 6, 2, {9, "survey"}, opt);
  EXPECT_GE(rep.min_ratio, 1.0 - 1e-3);
  EXPECT_LE(rep.max_ratio, 4.0);
}

TEST(MinStructure, Examples) {
  for (double q : {1.0, 2.0}) {
    const EmbeddingSpec spec = EmbeddingSpec::standard(2, Exponent(2.0), Exponent(q));
    const MinStructureResult r = min_structure_check(identity(2), spec);
    EXPECT_NEAR(r.estimate, std::pow(2.0, 1.0 / q), 1e-14);
    EXPECT_NEAR(r.factor, 1.0, 1e-14);
  }
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  const MinStructureResult r = min_structure_check(d, EmbeddingSpec::standard(2, Exponent(2.0), Exponent(2.0)));
  EXPECT_GE(r.estimate, std::sqrt(2.0) - 1e-14);
  EXPECT_LE(r.factor, 1.0 + 1e-14);
}

TEST(MinStructure, SelfAdjointAgainstExplicitPhi) {
  Engine eng = make_engine({10, "min-phi"});
  for (double q : {1.0, 2.0}) {
    for (double p : {1.5, 3.0}) {
      const EmbeddingSpec spec = EmbeddingSpec::standard(2, Exponent(p), Exponent(q));
      const HermitianEigen he = hermitian_eigen(random_hermitian(2, eng));
      const CMat h = he.vectors * he.values.cast<cplx>().asDiagonal() * he.vectors.adjoint();
      // Φ(diag λ) is diagonal; its entries form the table
      const VectorElement v = phi(CMat(he.values.cast<cplx>().asDiagonal()), spec);
      Eigen::MatrixXd table(4, 16);
      for (int k = 0; k < 4; ++k) table.row(k) = v[k].diagonal().real().transpose();
      EXPECT_NEAR(min_structure_selfadjoint_norm(h, spec), mixed_norm_oracle(table, p, q), 1e-12);
    }
  }
}

TEST(MinStructure, GeneralInputsFactorAtMostTwo) {
  Engine eng = make_engine({11, "min-general"});
  const EmbeddingSpec spec = EmbeddingSpec::standard(2, Exponent(2.0), Exponent(1.0));
  for (int i = 0; i < 100; ++i) {
    const MinStructureResult r = min_structure_check(ginibre(2, 2, eng), spec);
    EXPECT_FALSE(r.self_adjoint);
    EXPECT_LE(r.factor, 2.000001);
  }
}
