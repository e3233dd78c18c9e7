#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ncspace/cbnorm.hpp"

using namespace ncspace;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CMat diag2(double a, double b) {
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = a;
  d(1, 1) = b;
  return d;
}

double schatten_by_eigen(const CMat& x, double p) {
  Eigen::SelfAdjointEigenSolver<CMat> es(x.adjoint() * x);
  if (std::isinf(p)) return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    s += std::pow(std::max(es.eigenvalues()[i], 0.0), p / 2.0);
  }
  return std::pow(s, 1.0 / p);
}

}  // namespace

TEST(CbClosedForm, Examples) {
  for (int n : {1, 2, 3, 4}) {
    const ColumnMapSpec s{identity(n), Exponent::infinity(), Exponent(2.0)};
    EXPECT_NEAR(cb_norm_closed_form(s), std::pow(n, 0.25), 1e-14);
  }
  EXPECT_NEAR(cb_norm_closed_form({identity(2), Exponent::infinity(), Exponent(2.0)}), 1.18920711500272, 1e-12);
  Engine eng = make_engine({1, "cb"});
  const CMat a = ginibre(3, 3, eng);
  EXPECT_NEAR(cb_norm_closed_form({a, Exponent(3.0), Exponent(3.0)}), schatten_by_eigen(a, kInf), 1e-12);
  const CMat e11 = matrix_unit(3, 3, 0, 0);
  for (auto [r, s] : std::vector<std::pair<double, double>>{{kInf, 1}, {4, 2}, {2, 2}, {6, 3}}) {
    EXPECT_NEAR(cb_norm_closed_form({e11, Exponent(r), Exponent(s)}), 1.0, 1e-14);
  }
  EXPECT_THROW(cb_norm_closed_form({a, Exponent(2.0), Exponent(4.0)}), DomainError);
  // row orientation gives the same value
  EXPECT_DOUBLE_EQ(cb_norm_closed_form({a, Exponent(4.0), Exponent(2.0), Orientation::row}),
                   cb_norm_closed_form({a, Exponent(4.0), Exponent(2.0), Orientation::column}));
}

TEST(CbClosedForm, DiagonalCompositionExponents) {
  // ‖αβ‖_{2t} ≤ ‖α‖_{2t1}‖β‖_{2t2} with 1/t = 1/t1 + 1/t2, on diagonals
  const CMat a = diag2(3.0, 0.5), b = diag2(0.7, 2.0);
  for (auto [r, m, s] : std::vector<std::array<double, 3>>{{kInf, 4, 2}, {8, 4, 2}, {6, 3, 1.5}}) {
    const double ab = cb_norm_closed_form({a * b, Exponent(r), Exponent(s)});
    const double fa = cb_norm_closed_form({a, Exponent(m), Exponent(s)});
    const double fb = cb_norm_closed_form({b, Exponent(r), Exponent(m)});
    EXPECT_LE(ab, fa * fb * (1.0 + 1e-12));
  }
}

TEST(HolderWitness, Examples) {
  Engine eng = make_engine({2, "holder"});
  const CMat u = haar_unitary(3, eng);
  const CMat b = holder_witness(2.0 * u, Exponent(4.0), Exponent(2.0));
  const CMat bb = b.adjoint() * b;
  const double c = bb(0, 0).real();
  EXPECT_LE((bb - c * identity(3)).norm(), 1e-12);

  // α = diag(2,1), r=4, s=2: t=4, σ(β) ∝ σ(α)^{t/r} = (2,1), ‖β‖_8 = 1
  const CMat w = holder_witness(diag2(2.0, 1.0), Exponent(4.0), Exponent(2.0));
  const double nrm = std::pow(std::pow(2.0, 8) + 1.0, 1.0 / 8.0);
  EXPECT_NEAR(std::abs(w(0, 0)), 2.0 / nrm, 1e-12);
  EXPECT_NEAR(std::abs(w(1, 1)), 1.0 / nrm, 1e-12);
  EXPECT_NEAR(std::abs(w(0, 1)), 0.0, 1e-12);

  for (int i = 0; i < 100; ++i) {
    const CMat a = ginibre(3, 3, eng);
    const CMat h = holder_witness(a, Exponent(4.0), Exponent(2.0));
    const double val = schatten_by_eigen(a * h, 4.0) / schatten_by_eigen(h, 8.0);
    EXPECT_GE(val, (1.0 - 1e-6) * schatten_by_eigen(a, 8.0));
  }
  EXPECT_THROW(holder_witness(CMat::Zero(2, 2), Exponent(4.0), Exponent(2.0)), DomainError);
}

TEST(CbLowerBound, Examples) {
  const CBLowerBound a = cb_lower_bound({identity(2), Exponent::infinity(), Exponent(2.0)});
  EXPECT_NEAR(a.value, std::pow(2.0, 0.25), 1e-4);
  const CBLowerBound d = cb_lower_bound({diag2(2.0, 1.0), Exponent(4.0), Exponent(2.0)});
  EXPECT_NEAR(d.value, std::pow(std::pow(2.0, 8) + 1.0, 1.0 / 8.0), 1e-3);
  const CBLowerBound z = cb_lower_bound({CMat::Zero(3, 3), Exponent(4.0), Exponent(2.0)});
  EXPECT_EQ(z.value, 0.0);
  EXPECT_THROW(cb_lower_bound({identity(2), Exponent(4.0), Exponent(2.0)}, 0), DomainError);
}

TEST(CbLowerBound, SandwichedByClosedForm) {
  Engine eng = make_engine({3, "cb-sweep"});
  const std::vector<std::pair<double, double>> rs{{kInf, 2}, {4, 2}, {6, 3}, {4, 4}, {2, 1}};
  for (int i = 0; i < 10; ++i) {
    const CMat a = ginibre(3, 3, eng);
    for (auto [r, s] : rs) {
      for (auto o : {Orientation::column, Orientation::row}) {
        const ColumnMapSpec spec{a, Exponent(r), Exponent(s), o};
        const double cf = schatten_by_eigen(a, 2.0 / (1.0 / s - 1.0 / r));
        const CBLowerBound lb = cb_lower_bound(spec, 200, 4, {static_cast<std::uint64_t>(i), "cb"});
        EXPECT_LE(lb.value, cf * (1.0 + 1e-9));
        EXPECT_GE(lb.value, cf * (1.0 - 1e-3));
      }
    }
  }
}
