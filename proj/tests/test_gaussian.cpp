#include <catch2/catch_amalgamated.hpp>

#include "covsel/gaussian.hpp"
#include "covsel/mle.hpp"
#include "covsel/rng.hpp"

using namespace covsel;

namespace {

// random PD matrix with unit-scale diagonal: A A' / p + 0.5 I
Matrix random_spd(int p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
  return Matrix(a * a.transpose() / double(p) +
                0.5 * Matrix::Identity(p, p));
}

}  // namespace

TEST_CASE("empirical covariance matches the direct formula") {
  Matrix x(2, 2);
  x << 1, 0, -1, 0;
  auto cov = empirical_covariance(Dataset::from_matrix(x));
  REQUIRE(cov.s(0, 0) == Catch::Approx(1.0));
  REQUIRE(cov.s(0, 1) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(cov.s(1, 1) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(cov.n_source == 2);
}

TEST_CASE("empirical covariance of constant rows is zero") {
  Matrix x(5, 3);
  for (int i = 0; i < 5; ++i) x.row(i) << 1.5, -2.0, 7.0;
  auto cov = empirical_covariance(Dataset::from_matrix(x));
  REQUIRE(cov.s.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("empirical covariance equals the naive triple loop") {
  Rng rng(42);
  Matrix x(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
  auto cov = empirical_covariance(Dataset::from_matrix(x));

  // oracle: center then accumulate entry by entry
  double mean[3] = {0, 0, 0};
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 5; ++i) mean[j] += x(i, j);
    mean[j] /= 5.0;
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int i = 0; i < 5; ++i) s += (x(i, a) - mean[a]) * (x(i, b) - mean[b]);
      REQUIRE(cov.s(a, b) == Catch::Approx(s / 5.0).margin(1e-12));
    }
  REQUIRE(min_eigenvalue(cov.s) >= -1e-10);
}

TEST_CASE("empirical covariance rejects non-finite input") {
  Matrix x(3, 2);
  x.setZero();
  x(1, 1) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(empirical_covariance(Dataset::from_matrix(x)),
                    std::invalid_argument);
}

TEST_CASE("cross entropy of identity pair is p/2") {
  const int p = 4;
  SpdPair model{Matrix::Identity(p, p), Matrix::Identity(p, p)};
  CovarianceMatrix ref{Matrix::Identity(p, p), 0};
  REQUIRE(cross_entropy(ref, model) == Catch::Approx(p / 2.0));
}

TEST_CASE("cross entropy scalar case") {
  Matrix ref(1, 1), sigma(1, 1);
  ref << 2.0;
  sigma << 1.0;
  REQUIRE(cross_entropy(ref, SpdPair::from_sigma(sigma)) == Catch::Approx(1.0));
}

TEST_CASE("cross entropy rejects a non-PD model") {
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // indefinite
  SpdPair model{bad, bad};
  CovarianceMatrix ref{Matrix::Identity(2, 2), 0};
  REQUIRE_THROWS_AS(cross_entropy(ref, model), std::runtime_error);
}

TEST_CASE("cross entropy matches a Monte-Carlo estimate of -E log q") {
  const int p = 4;
  SpdPair ref_model = SpdPair::from_sigma(random_spd(p, 7));
  SpdPair model = SpdPair::from_sigma(random_spd(p, 8));
  const double formula = cross_entropy(ref_model.sigma, model);

  const int n = 1000000;
  Dataset draws = sample_gaussian(ref_model, n, 99);
  // -log q(x) = (p/2) log(2 pi) - 0.5 logdet kappa + 0.5 x' kappa x;
  // the formula drops the 2 pi constant, so drop it here too
  const double logdet = log_det_spd(model.kappa);
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector x = draws.values.row(i);
    const double v = 0.5 * (x.dot(model.kappa * x)) - 0.5 * logdet;
    sum += v;
    sumsq += v * v;
  }
  const double mc_mean = sum / n;
  const double mc_sd = std::sqrt((sumsq / n - mc_mean * mc_mean) / n);
  REQUIRE(std::abs(formula - mc_mean) <= 3.0 * mc_sd);
}

TEST_CASE("KL of identical models is zero and scalar case is closed-form") {
  SpdPair m = SpdPair::from_sigma(random_spd(3, 5));
  REQUIRE(kl_divergence(m, m) == Catch::Approx(0.0).margin(1e-9));

  Matrix s1(1, 1), s2(1, 1);
  s1 << 1.0;
  s2 << 2.0;
  const double kl = kl_divergence(SpdPair::from_sigma(s1), SpdPair::from_sigma(s2));
  REQUIRE(kl == Catch::Approx(0.5 * (std::log(2.0) - 1.0 + 0.5)).epsilon(1e-9));
  REQUIRE(kl == Catch::Approx(0.09657).margin(5e-6));
}

TEST_CASE("KL matches the direct trace/logdet formula and is nonnegative") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    SpdPair a = SpdPair::from_sigma(random_spd(3, seed));
    SpdPair b = SpdPair::from_sigma(random_spd(3, seed + 100));
    const double kl = kl_divergence(a, b);
    // independent route: 0.5 (tr(S1 K2) - logdet(S1 K2) - p)
    const Matrix prod = a.sigma * b.kappa;
    const double direct =
        0.5 * (prod.trace() - std::log(prod.determinant()) - 3.0);
    REQUIRE(kl == Catch::Approx(direct).margin(1e-9));
    REQUIRE(kl >= -1e-9);
  }
}

TEST_CASE("sampler moments: identity covariance") {
  const int p = 2;
  SpdPair model{Matrix::Identity(p, p), Matrix::Identity(p, p)};
  Dataset d = sample_gaussian(model, 100000, 1234);
  auto cov = empirical_covariance(d);
  REQUIRE((cov.s - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("sampler determinism") {
  SpdPair model = SpdPair::from_sigma(random_spd(3, 21));
  Dataset a = sample_gaussian(model, 50, 777);
  Dataset b = sample_gaussian(model, 50, 777);
  REQUIRE((a.values.array() == b.values.array()).all());
  Dataset c = sample_gaussian(model, 50, 778);
  REQUIRE(!(a.values.array() == c.values.array()).all());
}

TEST_CASE("sampler reproduces strong correlation") {
  Matrix sigma(2, 2);
  sigma << 1.0, 0.9, 0.9, 1.0;
  Dataset d = sample_gaussian(SpdPair::from_sigma(sigma), 100000, 5);
  auto cov = empirical_covariance(d);
  const double corr = cov.s(0, 1) / std::sqrt(cov.s(0, 0) * cov.s(1, 1));
  REQUIRE(corr >= 0.88);
  REQUIRE(corr <= 0.92);
}

TEST_CASE("CE gradient in kappa is 0.5 (ref - sigma)") {
  const int p = 3;
  const Matrix ref = random_spd(p, 31);
  SpdPair model = SpdPair::from_sigma(random_spd(p, 32));
  const double eps = 1e-6;
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j) {
      Matrix bump = Matrix::Zero(p, p);
      bump(i, j) = bump(j, i) = eps;
      const SpdPair up = SpdPair::from_kappa(model.kappa + bump);
      const SpdPair down = SpdPair::from_kappa(model.kappa - bump);
      const double fd =
          (cross_entropy(ref, up) - cross_entropy(ref, down)) / (2.0 * eps);
      const double expected = i == j ? 0.5 * (ref(i, i) - model.sigma(i, i))
                                     : (ref(i, j) - model.sigma(i, j));
      REQUIRE(fd == Catch::Approx(expected).margin(1e-5));
    }
  // at the minimum (sigma = ref) the gradient vanishes
  SpdPair at_min = SpdPair::from_sigma(ref);
  REQUIRE((ref - at_min.sigma).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("CE over PD models is minimized at the reference") {
  const Matrix ref = random_spd(3, 41);
  const SpdPair best = SpdPair::from_sigma(ref);
  const double base = cross_entropy(ref, best);
  Rng rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    Matrix noise(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) noise(i, j) = 0.1 * rng.normal();
    const Matrix sym = symmetrized(noise);
    Matrix kappa = best.kappa + sym;
    if (min_eigenvalue(kappa) <= 1e-6) continue;
    REQUIRE(cross_entropy(ref, SpdPair::from_kappa(kappa)) >= base - 1e-12);
  }
}

TEST_CASE("SpdPair validation catches inconsistency") {
  SpdPair good = SpdPair::from_sigma(random_spd(3, 51));
  REQUIRE_NOTHROW(validate_spd_pair(good));
  SpdPair bad = good;
  bad.kappa(0, 1) += 0.02;
  bad.kappa(1, 0) += 0.02;
  REQUIRE_THROWS_AS(validate_spd_pair(bad), std::invalid_argument);
}
