#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dmcalc/tensor.hpp"
#include "test_support.hpp"

using namespace dmcalc;
using dmtest::fro_dist;

namespace {

Eigen::VectorXd vec4(double a, double b, double c, double d) {
  Eigen::VectorXd v(4);
  v << a, b, c, d;
  return v;
}

JointDensity random_joint(Eigen::Index n_a, Eigen::Index n_b,
                          std::uint64_t seed) {
  SpectralMatrix p = random_psd(n_a * n_b, n_a * n_b, seed);
  return JointDensity::from_matrix(
      SpectralMatrix::from_symmetric(p.matrix() / p.trace()), n_a, n_b);
}

}  // namespace

TEST_CASE("kron diagonal blocks and identity") {
  CHECK(fro_dist(kron(SpectralMatrix::diagonal(dmtest::vec2(1, 2)),
                      SpectralMatrix::diagonal(dmtest::vec2(3, 4))),
                 SpectralMatrix::diagonal(vec4(3, 4, 6, 8))) < 1e-14);
  CHECK(fro_dist(kron(SpectralMatrix::identity(2), SpectralMatrix::identity(3)),
                 SpectralMatrix::identity(6)) == 0.0);
}

TEST_CASE("kron spectrum is the pairwise eigenvalue product") {
  SpectralMatrix e = random_spd(2, 51);
  SpectralMatrix f = random_spd(2, 52);
  CHECK(kron(e, f).trace() ==
        doctest::Approx(e.trace() * f.trace()).epsilon(1e-12));

  std::vector<double> expected;
  for (double x : e.spectrum().eigenvalues) {
    for (double y : f.spectrum().eigenvalues) {
      expected.push_back(x * y);
    }
  }
  std::sort(expected.begin(), expected.end(), std::greater<>());
  Eigen::VectorXd actual = kron(e, f).spectrum().eigenvalues;
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(actual(i) == doctest::Approx(expected[i]).epsilon(1e-10));
  }
}

TEST_CASE("mixed-product identity") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SpectralMatrix e = random_spd(2, seed * 4);
    SpectralMatrix f = random_spd(3, seed * 4 + 1);
    SpectralMatrix g = random_spd(2, seed * 4 + 2);
    SpectralMatrix h = random_spd(3, seed * 4 + 3);
    Eigen::MatrixXd lhs =
        Eigen::MatrixXd(kron(e, f).matrix()) * kron(g, h).matrix();
    // EG and FH need not be symmetric; compare against the direct product.
    Eigen::MatrixXd eg = e.matrix() * g.matrix();
    Eigen::MatrixXd fh = f.matrix() * h.matrix();
    Eigen::MatrixXd direct(6, 6);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        direct.block(i * 3, j * 3, 3, 3) = eg(i, j) * fh;
      }
    }
    CHECK((lhs - direct).norm() <= 1e-10);
  }
}

TEST_CASE("partial_trace block forms and trace preservation") {
  SpectralMatrix e = random_spd(2, 61);
  SpectralMatrix f = random_spd(3, 62);
  SpectralMatrix g = kron(e, f);
  CHECK(fro_dist(partial_trace(g, 2, 3, TraceSide::over_a).matrix(),
                 e.trace() * f.matrix()) <= 1e-12);
  CHECK(fro_dist(partial_trace(g, 2, 3, TraceSide::over_b).matrix(),
                 f.trace() * e.matrix()) <= 1e-12);

  CHECK(fro_dist(partial_trace(SpectralMatrix::identity(4), 2, 2,
                               TraceSide::over_b)
                     .matrix(),
                 2.0 * Eigen::MatrixXd::Identity(2, 2)) == 0.0);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SpectralMatrix m = random_spd(4, seed * 71, -1.0, 1.0);
    // Index-summation oracle.
    Eigen::MatrixXd over_a = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd over_b = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
          over_a(i, j) += m.matrix()(k * 2 + i, k * 2 + j);
          over_b(i, j) += m.matrix()(i * 2 + k, j * 2 + k);
        }
      }
    }
    CHECK(fro_dist(partial_trace(m, 2, 2, TraceSide::over_a).matrix(),
                   over_a) <= 1e-12);
    CHECK(fro_dist(partial_trace(m, 2, 2, TraceSide::over_b).matrix(),
                   over_b) <= 1e-12);
    CHECK(partial_trace(m, 2, 2, TraceSide::over_a).trace() ==
          doctest::Approx(m.trace()).epsilon(1e-12));
  }

  CHECK_THROWS_AS(partial_trace(SpectralMatrix::identity(5), 2, 2,
                                TraceSide::over_a),
                  DimensionMismatch);
}

TEST_CASE("joint_prob: product state, table lookup, Bell value") {
  Density da = random_density(2, 81);
  Density db = random_density(3, 82);
  JointDensity prod = JointDensity::product(da, db);
  UnitVector a = random_unit_vector(2, 83);
  UnitVector b = random_unit_vector(3, 84);
  CHECK(joint_prob(prod, a, b) ==
        doctest::Approx(prob(da, a) * prob(db, b)).epsilon(1e-12));

  Eigen::MatrixXd table(2, 2);
  table << 0.1, 0.2, 0.3, 0.4;
  JointDensity diag = JointDensity::from_matrix(
      SpectralMatrix::diagonal(vec4(0.1, 0.2, 0.3, 0.4)), 2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(joint_prob(diag, UnitVector::standard_basis(2, i),
                       UnitVector::standard_basis(2, j)) ==
            doctest::Approx(table(i, j)).epsilon(1e-14));
    }
  }

  CHECK(joint_prob(bell_joint(), UnitVector::standard_basis(2, 0),
                   UnitVector::standard_basis(2, 0)) ==
        doctest::Approx(0.5));
}

TEST_CASE("slices") {
  JointDensity diag = JointDensity::from_matrix(
      SpectralMatrix::diagonal(vec4(0.1, 0.2, 0.3, 0.4)), 2, 2);
  Slice col1 = slice_b(diag, UnitVector::standard_basis(2, 1));
  CHECK(fro_dist(col1.matrix, SpectralMatrix::diagonal(dmtest::vec2(0.2, 0.4))) <
        1e-14);
  CHECK(col1.mass == doctest::Approx(0.6));

  Slice bell_slice = slice_b(bell_joint(), UnitVector::standard_basis(2, 0));
  CHECK(fro_dist(bell_slice.matrix.matrix(),
                 0.5 * UnitVector::standard_basis(2, 0).dyad().matrix()) <=
        1e-12);

  Density da = random_density(2, 91);
  Density db = random_density(2, 92);
  JointDensity prod = JointDensity::product(da, db);
  UnitVector b = random_unit_vector(2, 93);
  Slice s = slice_b(prod, b);
  CHECK(fro_dist(s.matrix.matrix(), prob(db, b) * da.mat().matrix()) <= 1e-12);

  // tr(D(A,b)) = D(b) and tr(D(A,b) a a^T) = D(a,b).
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    JointDensity j = random_joint(2, 3, seed * 101);
    UnitVector bb = random_unit_vector(3, seed * 101 + 1);
    Slice sb = slice_b(j, bb);
    CHECK(sb.mass ==
          doctest::Approx(prob(marginal_b(j), bb)).epsilon(1e-10));
    UnitVector aa = random_unit_vector(2, seed * 101 + 2);
    CHECK(aa.vec().dot(sb.matrix.matrix() * aa.vec()) ==
          doctest::Approx(joint_prob(j, aa, bb)).epsilon(1e-10));
    // The symmetric slice obeys the mirrored identities.
    Slice sa = slice_a(j, aa);
    CHECK(sa.mass ==
          doctest::Approx(prob(marginal_a(j), aa)).epsilon(1e-10));
    CHECK(bb.vec().dot(sa.matrix.matrix() * bb.vec()) ==
          doctest::Approx(joint_prob(j, aa, bb)).epsilon(1e-10));
  }
}

TEST_CASE("marginals") {
  Density da = random_density(2, 111);
  Density db = random_density(3, 112);
  JointDensity prod = JointDensity::product(da, db);
  CHECK(fro_dist(marginal_a(prod).mat(), da.mat()) <= 1e-12);
  CHECK(fro_dist(marginal_b(prod).mat(), db.mat()) <= 1e-12);

  CHECK(fro_dist(marginal_a(bell_joint()).mat().matrix(),
                 0.5 * Eigen::MatrixXd::Identity(2, 2)) <= 1e-12);
  CHECK(fro_dist(marginal_b(bell_joint()).mat().matrix(),
                 0.5 * Eigen::MatrixXd::Identity(2, 2)) <= 1e-12);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    JointDensity j = random_joint(2, 2, seed * 113);
    CHECK(marginal_a(j).mat().trace() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("separable_joint") {
  UnitVector e1 = UnitVector::standard_basis(2, 0);
  UnitVector e2 = UnitVector::standard_basis(2, 1);
  JointDensity cls = separable_joint({0.5, 0.5}, {e1, e2}, {e1, e2});
  CHECK(fro_dist(cls.mat(), SpectralMatrix::diagonal(vec4(0.5, 0, 0, 0.5))) <
        1e-14);
  CHECK(cls.separable_by_construction());

  JointDensity single = separable_joint({1.0}, {e1}, {e2});
  CHECK(fro_dist(single.mat(), kron(e1.dyad(), e2.dyad())) < 1e-14);

  // Marginals agree with the factor mixtures.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::vector<double> w = {0.3, 0.45, 0.25};
    std::vector<UnitVector> adirs, bdirs;
    for (int i = 0; i < 3; ++i) {
      adirs.push_back(random_unit_vector(2, seed * 200 + i));
      bdirs.push_back(random_unit_vector(3, seed * 300 + i));
    }
    JointDensity j = separable_joint(w, adirs, bdirs);
    CHECK(fro_dist(marginal_a(j).mat(), mixture_density(w, adirs).mat()) <=
          1e-12);
    CHECK(fro_dist(marginal_b(j).mat(), mixture_density(w, bdirs).mat()) <=
          1e-12);
  }

  CHECK_THROWS_AS(separable_joint({0.6, 0.6}, {e1, e2}, {e1, e2}), BadWeights);
}

TEST_CASE("independence") {
  JointDensity prod =
      JointDensity::product(random_density(2, 121), random_density(2, 122));
  CHECK(is_independent(prod, 1e-10));

  JointDensity bell = bell_joint();
  CHECK_FALSE(is_independent(bell, 1e-6));
  // Residual of the Bell joint against I/4 is sqrt(3)/2.
  SpectralMatrix product =
      kron(marginal_a(bell).mat(), marginal_b(bell).mat());
  CHECK((bell.mat().matrix() - product.matrix()).norm() ==
        doctest::Approx(std::sqrt(0.75)).epsilon(1e-9));

  UnitVector e1 = UnitVector::standard_basis(2, 0);
  UnitVector e2 = UnitVector::standard_basis(2, 1);
  CHECK_FALSE(
      is_independent(separable_joint({0.5, 0.5}, {e1, e2}, {e1, e2}), 1e-6));
}

TEST_CASE("partial trace laws 3 and 4") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    SpectralMatrix g = random_spd(6, seed * 131, -1.0, 1.5);
    SpectralMatrix f = random_spd(3, seed * 131 + 1);
    Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 0; i < 2; ++i) {
      lift.block(i * 3, i * 3, 3, 3) = f.matrix();
    }
    // tr_A(G (I (x) F)) = tr_A(G) F and the left-multiplied twin.
    Eigen::MatrixXd ga = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd right = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd left = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd gm = g.matrix();
    Eigen::MatrixXd prod_r = gm * lift;
    Eigen::MatrixXd prod_l = lift * gm;
    for (int i = 0; i < 2; ++i) {
      ga += gm.block(i * 3, i * 3, 3, 3);
      right += prod_r.block(i * 3, i * 3, 3, 3);
      left += prod_l.block(i * 3, i * 3, 3, 3);
    }
    CHECK((right - ga * f.matrix()).norm() <= 1e-10);
    CHECK((left - f.matrix() * ga).norm() <= 1e-10);

    // tr(G (E (x) F)) = tr(tr_B(G (I (x) F)) E).
    SpectralMatrix e = random_spd(2, seed * 131 + 2);
    Eigen::MatrixXd ef = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        ef.block(i * 3, j * 3, 3, 3) = e.matrix()(i, j) * f.matrix();
      }
    }
    Eigen::MatrixXd trb(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        trb(i, j) = prod_r.block(i * 3, j * 3, 3, 3).trace();
      }
    }
    CHECK(std::abs((gm * ef).trace() - (trb * e.matrix()).trace()) <= 1e-10);
  }
}

TEST_CASE("entanglement: Bell correlations are non-product") {
  JointDensity bell = bell_joint();
  UnitVector e1 = UnitVector::standard_basis(2, 0);
  const double joint = joint_prob(bell, e1, e1);
  const double product = prob(marginal_a(bell), e1) * prob(marginal_b(bell), e1);
  CHECK(joint == doctest::Approx(0.5));
  CHECK(product == doctest::Approx(0.25));
}

TEST_CASE("swapped relabels factors consistently") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    JointDensity j = random_joint(2, 3, seed * 141);
    JointDensity sw = j.swapped();
    CHECK(sw.dim_a() == 3);
    CHECK(sw.dim_b() == 2);
    UnitVector a = random_unit_vector(2, seed * 141 + 1);
    UnitVector b = random_unit_vector(3, seed * 141 + 2);
    CHECK(joint_prob(sw, b, a) ==
          doctest::Approx(joint_prob(j, a, b)).epsilon(1e-12));
    CHECK(fro_dist(marginal_a(sw).mat(), marginal_b(j).mat()) <= 1e-12);
  }
}
