#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dmcalc/gleason.hpp"
#include "test_support.hpp"

using namespace dmcalc;
using dmtest::fro_dist;

namespace {

const double kSqrt2Inv = 1.0 / std::sqrt(2.0);

std::vector<UnitVector> figure_mixture_dirs() {
  return {UnitVector(dmtest::vec2(1, 0)),
          UnitVector(dmtest::vec2(kSqrt2Inv, kSqrt2Inv)),
          UnitVector(dmtest::vec2(0, 1))};
}

}  // namespace

TEST_CASE("mixture_density reproduces the 2x2 fixture") {
  Density d = mixture_density({0.2, 0.3, 0.5}, figure_mixture_dirs());
  Eigen::MatrixXd expected(2, 2);
  expected << 0.35, 0.15, 0.15, 0.65;
  CHECK(fro_dist(d.mat().matrix(), expected) < 1e-12);
}

TEST_CASE("mixture_density trivia and errors") {
  UnitVector u = random_unit_vector(3, 17);
  Density single = mixture_density({1.0}, {u});
  CHECK(fro_dist(single.mat().matrix(), u.vec() * u.vec().transpose()) <
        1e-12);

  Eigen::MatrixXd q = random_orthogonal(4, 3);
  std::vector<UnitVector> basis;
  std::vector<double> w(4, 0.25);
  for (int i = 0; i < 4; ++i) basis.emplace_back(q.col(i));
  CHECK(fro_dist(mixture_density(w, basis).mat().matrix(),
                 0.25 * Eigen::MatrixXd::Identity(4, 4)) < 1e-12);

  CHECK_THROWS_AS(mixture_density({0.5, 0.6}, figure_mixture_dirs()),
                  DimensionMismatch);
  CHECK_THROWS_AS(
      mixture_density({0.7, 0.4, -0.1}, figure_mixture_dirs()), BadWeights);
  CHECK_THROWS_AS(mixture_density({0.2, 0.3, 0.4}, figure_mixture_dirs()),
                  BadWeights);
}

TEST_CASE("prob basics") {
  Density uniform = Density::uniform(2);
  for (std::uint64_t s = 0; s < 5; ++s) {
    CHECK(prob(uniform, random_unit_vector(2, s)) == doctest::Approx(0.5));
  }

  Density fig = dmtest::fixture_density_2x2();
  CHECK(prob(fig, UnitVector::standard_basis(2, 0)) ==
        doctest::Approx(0.35));

  UnitVector u = random_unit_vector(3, 8);
  CHECK(prob(mixture_density({1.0}, {u}), u) == doctest::Approx(1.0));

  CHECK_THROWS_AS(prob(fig, random_unit_vector(3, 1)), DimensionMismatch);
}

TEST_CASE("event_prob: certain, null, eigen-sum oracle") {
  Density d = random_density(4, 21);
  CHECK(event_prob(d, EventProjector(SpectralMatrix::identity(4))) ==
        doctest::Approx(1.0));
  CHECK(event_prob(d, EventProjector(SpectralMatrix::zero(4))) ==
        doctest::Approx(0.0));

  Eigen::MatrixXd q = random_orthogonal(4, 22);
  std::vector<UnitVector> dirs = {UnitVector(q.col(0)), UnitVector(q.col(1))};
  EventProjector s = EventProjector::from_directions(dirs);
  double eigen_sum = 0.0;
  for (const UnitVector& v : dirs) {
    eigen_sum += prob(d, v);
  }
  CHECK(event_prob(d, s) == doctest::Approx(eigen_sum).epsilon(1e-10));

  CHECK_THROWS_AS(EventProjector(SpectralMatrix::diagonal(dmtest::vec2(1, 0.5))),
                  NotProjector);
}

TEST_CASE("expectation: identity, diagonal, double eigen-sum oracle") {
  Density d = random_density(3, 31);
  CHECK(expectation(d, Observable(SpectralMatrix::identity(3))) ==
        doctest::Approx(1.0));

  Eigen::VectorXd p = dmtest::vec3(0.2, 0.5, 0.3);
  Eigen::VectorXd v = dmtest::vec3(-1.0, 2.0, 7.0);
  CHECK(expectation(Density::diagonal(p),
                    Observable(SpectralMatrix::diagonal(v))) ==
        doctest::Approx(p.dot(v)));

  Observable obs(random_spd(3, 32, -2.0, 2.0));
  const Spectrum& ds = d.mat().spectrum();
  const Spectrum& os = obs.mat().spectrum();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      const double overlap = ds.eigenvectors.col(i).dot(os.eigenvectors.col(j));
      acc += ds.eigenvalues(i) * os.eigenvalues(j) * overlap * overlap;
    }
  }
  CHECK(expectation(d, obs) == doctest::Approx(acc).epsilon(1e-10));
}

TEST_CASE("sphere_average estimates tr(A)/n") {
  SphereAverage iso = sphere_average(Density::uniform(2).mat(), 100, 5);
  CHECK(iso.estimate == doctest::Approx(0.5));
  CHECK(iso.std_error < 1e-14);

  SphereAverage fig =
      sphere_average(dmtest::fixture_density_2x2().mat(), 100000, 6);
  CHECK(std::abs(fig.estimate - 0.5) <= 4 * fig.std_error);

  SphereAverage wide =
      sphere_average(SpectralMatrix::diagonal(dmtest::vec2(2, 0)), 100000, 7);
  CHECK(std::abs(wide.estimate - 1.0) <= 4 * wide.std_error);
}

TEST_CASE("basis completeness: probabilities sum to one") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Eigen::Index n = 2 + seed % 5;
    Density d = random_density(n, seed);
    Eigen::MatrixXd q = random_orthogonal(n, seed ^ 0xbeef);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      sum += prob(d, UnitVector(q.col(i)));
    }
    CHECK(std::abs(sum - 1.0) <= 1e-10);
  }
}

TEST_CASE("representation independence of mixtures") {
  // The figure mixture and its eigendecomposition are different mixtures of
  // the same matrix; they must agree on every direction.
  Density mix = mixture_density({0.2, 0.3, 0.5}, figure_mixture_dirs());
  const Spectrum& s = mix.mat().spectrum();
  Density eig = mixture_density(
      {s.eigenvalues(0), s.eigenvalues(1)},
      {UnitVector(s.eigenvectors.col(0)), UnitVector(s.eigenvectors.col(1))});
  for (std::uint64_t k = 0; k < 100; ++k) {
    UnitVector u = random_unit_vector(2, 1000 + k);
    CHECK(std::abs(prob(mix, u) - prob(eig, u)) <= 1e-12);
  }
}

TEST_CASE("probability range and diagonal reduction") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Eigen::Index n = 2 + seed % 4;
    Density d = random_density(n, seed * 3);
    const double p = prob(d, random_unit_vector(n, seed * 7));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0 + 1e-12);
  }

  Eigen::VectorXd diag = dmtest::vec3(0.1, 0.6, 0.3);
  Density d = Density::diagonal(diag);
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(prob(d, UnitVector::standard_basis(3, i)) == diag(i));
  }
}

TEST_CASE("Density validation clamps small drift, rejects large") {
  Eigen::MatrixXd drift = Eigen::MatrixXd::Identity(2, 2) * (0.5 + 2e-9);
  Density fixed{SpectralMatrix::from_symmetric(drift)};
  CHECK(fixed.mat().trace() == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2) * 0.55;
  CHECK_THROWS_AS(Density{SpectralMatrix::from_symmetric(bad)},
                  BadDistribution);
  CHECK_THROWS_AS(Density{SpectralMatrix::diagonal(dmtest::vec2(1.5, -0.5))},
                  NotPsd);
}
