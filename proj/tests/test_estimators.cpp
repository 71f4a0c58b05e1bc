#include <doctest.h>

#include <cmath>

#include "cgfit/basis.hpp"
#include "cgfit/density.hpp"
#include "cgfit/errors.hpp"
#include "cgfit/estimators.hpp"
#include "cgfit/rng.hpp"
#include "cgfit/twoscale.hpp"

using namespace cgfit;

namespace {

Vec theta_star(Index k) {
  Vec t = Vec::Zero(k);
  t[1] = -1.0;
  return t;
}

// Exact samples from the model's own stationary density at theta.
IidDataset exact_model_samples(const BasisSet& basis, const Vec& theta, std::size_t n,
                               std::uint64_t seed) {
  const DensityGrid grid = cg_invariant_density(basis, theta);
  return sample_density(grid, n, seed);
}

}  // namespace

TEST_CASE("force matching recovers a drift inside the span exactly") {
  // Noiseless forces equal to a fifth-order polynomial drift: the regression
  // must return the planted coefficients to solver precision.
  const BasisSet basis = BasisSet::monomial(5);
  Vec truth(5);
  truth << 0.4, -1.1, 0.02, -0.3, -0.05;
  Rng rng(7);
  IidDataset data;
  data.states.resize(400, 1);
  data.cg_forces.resize(400, 1);
  for (Index i = 0; i < 400; ++i) {
    const double x = 2.4 * (rng.uniform() - 0.5);
    data.states(i, 0) = x;
    data.cg_forces(i, 0) = basis.model(x, truth);
  }
  const ParamEstimate est = fit_fm_iid(data, basis);
  CHECK(est.method == "fm-iid");
  CHECK(est.converged);
  CHECK(est.n_samples == 400);
  CHECK((est.theta - truth).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("path-space fit recovers an in-span drift exactly") {
  // Deterministic Euler recursion: increments are exactly a(x) h, so the
  // weighted least squares problem has a zero-residual solution at truth.
  const BasisSet basis = BasisSet::monomial(3);
  Vec truth(3);
  truth << 0.1, -0.9, -0.2;
  TimeSeriesDataset ts;
  ts.h = 0.02;
  for (int p = 0; p < 3; ++p) {
    Mat path(40, 1);
    path(0, 0) = 0.3 + 0.4 * p;
    for (Index r = 1; r < 40; ++r)
      path(r, 0) = path(r - 1, 0) + basis.model(path(r - 1, 0), truth) * ts.h;
    ts.paths.push_back(path);
  }
  const ParamEstimate est = fit_rer(ts, basis);
  CHECK(est.method == "rer");
  CHECK((est.theta - truth).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(est.n_samples == 3 * 39);
}

TEST_CASE("time-series force matching recovers an in-span force map") {
  const BasisSet basis = BasisSet::monomial(4);
  Vec truth(4);
  truth << -0.2, -1.0, 0.05, -0.1;
  TimeSeriesDataset ts;
  ts.h = 0.01;
  Rng rng(11);
  Mat path(200, 2);
  for (Index r = 0; r < 200; ++r) {
    const double x = 2.0 * (rng.uniform() - 0.5);
    path(r, 0) = x;
    path(r, 1) = -basis.model(x, truth);  // stored fast coordinate is minus the force
  }
  ts.paths.push_back(path);
  const ParamEstimate est = fit_fm_ts(ts, basis);
  CHECK(est.method == "fm-ts");
  CHECK((est.theta - truth).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("force matching on the two-scale benchmark finds the effective drift") {
  TwoScaleParams p;
  const IidDataset data = sample_stationary_iid(p, 2000, 404, 5.0, 100.0);
  const BasisSet basis = BasisSet::monomial(5);
  const ParamEstimate est = fit_fm_iid(data, basis);
  CHECK(est.theta[1] == doctest::Approx(-1.0).epsilon(0.15));
  CHECK(std::abs(est.theta[0]) < 0.2);
  CHECK(std::abs(est.theta[4]) < 0.25);
}

TEST_CASE("path-space fit on the benchmark finds the effective drift") {
  TwoScaleParams p;
  const TimeSeriesDataset ts = generate_paths(p, 1, 50000, 0.01, 909, 100.0);
  const BasisSet basis = BasisSet::monomial(5);
  const ParamEstimate rer = fit_rer(ts, basis);
  CHECK(rer.theta[1] == doctest::Approx(-1.0).epsilon(0.15));
  CHECK(rer.note.empty());  // 500 time units is a long series

  // Same path, force-matching flavor: the two should broadly agree.
  const ParamEstimate fm = fit_fm_ts(ts, basis);
  CHECK((rer.theta - fm.theta).cwiseAbs().maxCoeff() < 0.3);
}

TEST_CASE("short path-space series carry a warning note") {
  TwoScaleParams p;
  const TimeSeriesDataset ts = generate_paths(p, 1, 300, 0.01, 5, 10.0);
  const ParamEstimate est = fit_rer(ts, BasisSet::monomial(5));
  CHECK(!est.note.empty());
}

TEST_CASE("relative entropy fit matches the Gaussian closed form") {
  // With two monomials the stationary family is exactly Gaussian and the
  // maximum likelihood solution is available in closed form from the sample
  // moments: theta_2 = -1 / (2 var), theta_1 = mean / (2 var).
  const BasisSet basis = BasisSet::monomial(2);
  Rng rng(15);
  IidDataset data;
  data.states.resize(5000, 1);
  for (Index i = 0; i < 5000; ++i) data.states(i, 0) = 0.3 + 0.8 * rng.normal();
  const double mean = data.states.col(0).mean();
  const double var = (data.states.col(0).array() - mean).square().mean();

  const ParamEstimate est = fit_re_iid(data, basis);
  CHECK(est.converged);
  CHECK(est.method == "re-iid");
  CHECK(est.theta[1] == doctest::Approx(-1.0 / (2.0 * var)).epsilon(1e-6));
  CHECK(est.theta[0] == doctest::Approx(mean / (2.0 * var)).epsilon(1e-5));
}

TEST_CASE("relative entropy fit matches moments at the optimum") {
  // First-order condition: model moments of g equal the data moments.
  const BasisSet basis = BasisSet::monomial(4);
  const IidDataset data = exact_model_samples(basis, theta_star(4), 4000, 21);
  const ParamEstimate est = fit_re_iid(data, basis);
  REQUIRE(est.converged);

  const DensityGrid grid = cg_invariant_density(basis, est.theta);
  const GibbsMoments mom = gibbs_moments(grid, 4);
  Vec data_mean = Vec::Zero(4);
  for (Index i = 0; i < data.size(); ++i)
    data_mean += gibbs_statistics(data.states(i, 0), 4);
  data_mean /= static_cast<double>(data.size());
  CHECK((mom.mean - data_mean).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("relative entropy fit recovers the benchmark coefficient") {
  const BasisSet basis = BasisSet::monomial(5);
  const IidDataset data = exact_model_samples(basis, theta_star(5), 4000, 33);
  const ParamEstimate est = fit_re_iid(data, basis);
  REQUIRE(est.converged);
  CHECK(est.iterations <= 30);
  CHECK(est.theta[1] == doctest::Approx(-1.0).epsilon(0.12));
  CHECK(std::abs(est.theta[4]) < 0.1);
}

TEST_CASE("relative entropy objective value at the benchmark truth") {
  // l(theta) = 2 theta . mean(g) - log Z.  At theta* the density is N(0, 1/2):
  // l = -E[x^2] - log sqrt(pi) ~ -0.5 - 0.57236.
  const BasisSet basis = BasisSet::monomial(5);
  const Vec t = theta_star(5);
  const IidDataset data = exact_model_samples(basis, t, 20000, 55);
  const double value = re_objective(data, basis, t);
  CHECK(value == doctest::Approx(-0.5 - 0.57236494292470008).epsilon(0.02));
}

TEST_CASE("warm start converges immediately at the optimum") {
  const BasisSet basis = BasisSet::monomial(2);
  Rng rng(71);
  IidDataset data;
  data.states.resize(2000, 1);
  for (Index i = 0; i < 2000; ++i) data.states(i, 0) = 0.7 * rng.normal();
  const ParamEstimate first = fit_re_iid(data, basis);
  REQUIRE(first.converged);

  NewtonOptions warm;
  warm.theta0 = first.theta;
  const ParamEstimate second = fit_re_iid(data, basis, warm);
  CHECK(second.converged);
  CHECK(second.iterations <= 1);
  CHECK((second.theta - first.theta).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("relative entropy fit rejects non-confining starts") {
  const BasisSet basis = BasisSet::monomial(2);
  Rng rng(81);
  IidDataset data;
  data.states.resize(500, 1);
  for (Index i = 0; i < 500; ++i) data.states(i, 0) = rng.normal();
  NewtonOptions opts;
  opts.theta0 = Vec::Zero(2);
  opts.theta0[1] = 1.0;  // density blows up at the domain edge
  CHECK_THROWS_AS(fit_re_iid(data, basis, opts), IntegrabilityError);
}

TEST_CASE("estimator input validation") {
  const BasisSet basis = BasisSet::monomial(3);
  SUBCASE("force matching needs forces") {
    IidDataset data;
    data.states = Mat::Zero(10, 1);
    CHECK_THROWS_AS(fit_fm_iid(data, basis), ArgumentError);
  }
  SUBCASE("relative entropy needs a monomial basis") {
    IidDataset data;
    data.states = Mat::Random(50, 1);
    CHECK_THROWS_AS(fit_re_iid(data, BasisSet::cubic_bspline(6, 0.0, 1.0)), UnsupportedError);
  }
  SUBCASE("path fits need the slow column") {
    TimeSeriesDataset ts;
    ts.h = 0.01;
    ts.paths.push_back(Mat::Random(10, 1));
    CHECK_THROWS_AS(fit_fm_ts(ts, basis), ArgumentError);  // no fast column to read forces from
  }
}
