// Acceptance experiments for the fitting toolkit.  Each numbered check is a
// self-contained experiment; the binary prints one PASS/FAIL line per check
// and exits non-zero when any of them fail.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cgfit/basis.hpp"
#include "cgfit/dataset.hpp"
#include "cgfit/density.hpp"
#include "cgfit/estimators.hpp"
#include "cgfit/linalg.hpp"
#include "cgfit/pairfm.hpp"
#include "cgfit/rng.hpp"
#include "cgfit/twoscale.hpp"
#include "cgfit/types.hpp"
#include "cgfit/uq.hpp"
#include "cgfit/validate.hpp"

#ifndef CGFIT_BIN
#error "CGFIT_BIN must point at the cli binary"
#endif

namespace {

namespace fs = std::filesystem;
using cgfit::BasisSet;
using cgfit::IidDataset;
using cgfit::Index;
using cgfit::Mat;
using cgfit::ParamEstimate;
using cgfit::ParticleConfig;
using cgfit::Rng;
using cgfit::TwoScaleParams;
using cgfit::Vec;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double sup_diff(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

bool between(double x, double lo, double hi) { return lo <= x && x <= hi; }

double ratio(double a, double b) { return std::max(a, b) / std::min(a, b); }

Vec linspace(double lo, double hi, Index n) {
  Vec g(n);
  for (Index i = 0; i < n; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

// ---------------------------------------------------------------------------
// 1. Force matching on the two-scale benchmark, 20 seeded runs
// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion1() {
  const BasisSet basis = BasisSet::monomial(5);
  int good = 0;
  for (int run = 0; run < 20; ++run) {
    const IidDataset data =
        cgfit::sample_stationary_iid(TwoScaleParams{}, 500, cgfit::split_seed(9001, run));
    const ParamEstimate est = cgfit::fit_fm_iid(data, basis);
    const cgfit::FmScoreModel model(basis, est.theta);
    const cgfit::ConfidenceReport ci =
        cgfit::sandwich_ci_iid(est.theta, cgfit::fisher_pair_iid(model, data), 0.05);
    const bool in_range = between(est.theta[1], -1.25, -0.75);
    const bool covered = ci.lower[1] <= -1.0 && -1.0 <= ci.upper[1];
    if (in_range && covered) ++good;
  }
  return {good >= 18,
          std::to_string(good) + "/20 runs had theta2 in [-1.25,-0.75] and a 95% CI covering -1"};
}

// ---------------------------------------------------------------------------
// 2. Path-space fit on one 50,000-record path with a sandwich interval
// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion2() {
  const BasisSet basis = BasisSet::monomial(5);
  const cgfit::TimeSeriesDataset paths =
      cgfit::generate_paths(TwoScaleParams{}, 1, 50000, 0.01, 101);
  const ParamEstimate est = cgfit::fit_rer(paths, basis);
  const Mat i1 = cgfit::fisher_i1_ts(paths, basis);
  const Mat sigma = cgfit::batch_means_sigma(paths, basis, est.theta);
  const cgfit::ConfidenceReport ci =
      cgfit::sandwich_ci_ts(est.theta, i1, sigma, paths.n_transitions(), 0.05);
  const bool ok = between(est.theta[1], -1.15, -0.85) && ci.lower[1] <= -1.0 &&
                  -1.0 <= ci.upper[1];
  return {ok, "theta2 = " + fmt(est.theta[1]) + ", 95% CI [" + fmt(ci.lower[1]) + ", " +
                  fmt(ci.upper[1]) + "]"};
}

// ---------------------------------------------------------------------------
// 3. Interval coverage over 200 repeated experiments
// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion3() {
  cgfit::CoverageSpec wide;
  wide.n = 500;
  wide.alpha = 0.05;
  wide.trials = 200;
  const cgfit::CoverageResult r500 = cgfit::coverage_experiment(wide, 31001);

  cgfit::CoverageSpec narrow;
  narrow.n = 50;
  narrow.alpha = 0.10;
  narrow.trials = 200;
  const cgfit::CoverageResult r50 = cgfit::coverage_experiment(narrow, 31002);

  const double c500 = r500.coverage[1];
  const double c50 = r50.coverage[1];
  const bool ok = between(c500, 0.90, 0.99) && between(c50, 0.82, 0.96);
  return {ok, "theta2 coverage " + fmt(c500) + " (N=500 at 95%, want [0.90,0.99]) and " +
                  fmt(c50) + " (N=50 at 90%, want [0.82,0.96])"};
}

// ---------------------------------------------------------------------------
// 4. Jackknife / bootstrap / asymptotic variances agree at N=200
// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion4() {
  const BasisSet basis = BasisSet::monomial(5);
  const IidDataset data = cgfit::sample_stationary_iid(TwoScaleParams{}, 200, 5150);
  const ParamEstimate est = cgfit::fit_fm_iid(data, basis);
  const std::function<Vec(const IidDataset&)> refit = [&](const IidDataset& d) {
    return cgfit::fit_fm_iid(d, basis).theta;
  };

  const cgfit::JackknifeResult jk = cgfit::jackknife(data, refit);
  const cgfit::BootstrapReplicates reps = cgfit::bootstrap(data, refit, 400, 616);
  const cgfit::ConfidenceReport bs = cgfit::bootstrap_standard_ci(est.theta, reps);
  const cgfit::FmScoreModel model(basis, est.theta);
  const Mat asym = cgfit::sandwich_cov(cgfit::fisher_pair_iid(model, data));

  const double vj = jk.variance[1];
  const double vb = bs.variance[1];
  const double va = asym(1, 1);
  const bool ok = ratio(vj, vb) <= 1.25 && ratio(vj, va) <= 2.0 && ratio(vb, va) <= 2.0;
  return {ok, "theta2 variances: jackknife " + fmt(vj) + ", bootstrap " + fmt(vb) +
                  ", asymptotic " + fmt(va)};
}

// ---------------------------------------------------------------------------
// 5. Path-space fit matches time-series force matching on the same path
// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion5() {
  // Same path as criterion 2.  The gap between the two fits is itself a
  // random variable whose spread is dominated by the quadratic-variation
  // noise of the path-space estimator (about 0.1 in sup-norm at this record
  // length), so the comparison runs on a fixed seed like every other
  // experiment here.
  const BasisSet basis = BasisSet::monomial(5);
  const cgfit::TimeSeriesDataset paths =
      cgfit::generate_paths(TwoScaleParams{}, 1, 50000, 0.01, 101);
  const ParamEstimate rer = cgfit::fit_rer(paths, basis);
  const ParamEstimate fm_ts = cgfit::fit_fm_ts(paths, basis);
  const double gap = sup_diff(rer.theta, fm_ts.theta);
  return {gap < 0.15, "sup-norm gap " + fmt(gap) + " between the path-space and " +
                          "time-series force-matching coefficients (want < 0.15)"};
}

// ---------------------------------------------------------------------------
// 6. Oracle equivalences
// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion6() {
  // (a) jackknife of the sample mean equals s^2 / n exactly.
  Rng rng(4004);
  double worst_jk = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index n = 2 + static_cast<Index>(rng.index(11));
    IidDataset d;
    d.states = Mat(n, 1);
    for (Index i = 0; i < n; ++i) d.states(i, 0) = 3.0 * rng.normal();
    const std::function<Vec(const IidDataset&)> mean_est = [](const IidDataset& dd) {
      Vec m(1);
      m[0] = dd.states.col(0).mean();
      return m;
    };
    const cgfit::JackknifeResult jk = cgfit::jackknife(d, mean_est);
    const double mu = d.states.col(0).mean();
    const double s2 =
        (d.states.col(0).array() - mu).square().sum() / static_cast<double>(n - 1);
    const double want = s2 / static_cast<double>(n);
    worst_jk = std::max(worst_jk, std::abs(jk.variance[0] - want) / want);
  }
  if (worst_jk > 1e-12)
    return {false, "jackknife-of-mean mismatch " + fmt(worst_jk) + " relative"};

  // (b) normal-equation solve matches a dense-inverse oracle.
  Rng rng_ls(4040);
  double worst_ls = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Index k = 6;
    cgfit::LinearSystem sys(k);
    Vec phi(k);
    for (int row = 0; row < 80; ++row) {
      for (Index c = 0; c < k; ++c) phi[c] = rng_ls.normal();
      sys.add_row(phi, rng_ls.normal(), 0.1 + rng_ls.uniform());
    }
    const Vec direct = cgfit::solve_normal_equations(sys);
    const Vec oracle = sys.gram().inverse() * sys.moment();
    worst_ls = std::max(worst_ls, sup_diff(direct, oracle));
  }
  if (worst_ls > 1e-10) return {false, "normal equations vs dense inverse: " + fmt(worst_ls)};

  // (c) neighbor lists match an all-pairs minimum-image sweep.
  std::size_t pairs_checked = 0;
  for (int c = 0; c < 5; ++c) {
    const double box = 6.0;
    const double cutoff = 1.5;
    Rng prng(cgfit::split_seed(4400, c));
    ParticleConfig cfg;
    cfg.box = box;
    cfg.positions = Mat(50, 3);
    cfg.forces = Mat::Zero(50, 3);
    for (Index i = 0; i < 50; ++i)
      for (Index ax = 0; ax < 3; ++ax) cfg.positions(i, ax) = box * prng.uniform() * (1.0 - 1e-12);

    struct Ref { Index i, j; double r; };
    std::vector<Ref> oracle;
    for (Index i = 0; i < 50; ++i)
      for (Index j = i + 1; j < 50; ++j) {
        double r2 = 0.0;
        for (Index ax = 0; ax < 3; ++ax) {
          double d = cfg.positions(i, ax) - cfg.positions(j, ax);
          d -= box * std::nearbyint(d / box);
          r2 += d * d;
        }
        if (std::sqrt(r2) <= cutoff) oracle.push_back({i, j, std::sqrt(r2)});
      }
    const std::vector<cgfit::PairEntry> fast = cgfit::neighbor_pairs(cfg, cutoff);
    if (fast.size() != oracle.size())
      return {false, "neighbor list found " + std::to_string(fast.size()) + " pairs, oracle " +
                         std::to_string(oracle.size())};
    for (std::size_t p = 0; p < fast.size(); ++p)
      if (fast[p].i != oracle[p].i || fast[p].j != oracle[p].j ||
          std::abs(fast[p].r - oracle[p].r) > 1e-12)
        return {false, "neighbor list disagrees with the all-pairs oracle at entry " +
                           std::to_string(p)};
    pairs_checked += fast.size();
  }

  // (d) noiseless span recovery: drift to 1e-10, pair potential to 1e-8.
  const BasisSet drift_basis = BasisSet::monomial(5);
  Vec drift_true(5);
  drift_true << 0.4, -1.2, 0.3, 0.1, -0.2;
  Rng drng(4321);
  IidDataset drift_data;
  drift_data.states = Mat(400, 1);
  drift_data.cg_forces = Mat(400, 1);
  for (Index i = 0; i < 400; ++i) {
    const double x = 1.5 * drng.normal();
    drift_data.states(i, 0) = x;
    drift_data.cg_forces(i, 0) = drift_basis.model(x, drift_true);
  }
  const double drift_err =
      sup_diff(cgfit::fit_fm_iid(drift_data, drift_basis).theta, drift_true);
  if (drift_err > 1e-10) return {false, "noiseless drift recovery error " + fmt(drift_err)};

  const BasisSet pair_basis = BasisSet::cubic_bspline(12, 0.42, 1.30);
  const Vec pair_true = cgfit::reference_potential_coefficients(pair_basis);
  const std::vector<ParticleConfig> configs =
      cgfit::synth_pair_data(pair_basis, pair_true, 40, 4.0, 6, 8181);
  const double pair_err =
      sup_diff(cgfit::fit_pair_potential(configs, pair_basis, 1.30).theta, pair_true);
  if (pair_err > 1e-8) return {false, "noiseless pair recovery error " + fmt(pair_err)};

  return {true, "jackknife-of-mean exact, dense-inverse gap " + fmt(worst_ls) + ", " +
                    std::to_string(pairs_checked) + " neighbor pairs matched, span recovery " +
                    fmt(drift_err) + " (drift) / " + fmt(pair_err) + " (pair)"};
}

// ---------------------------------------------------------------------------
// 7. Numerical-analysis suite
// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion7() {
  // Partition of unity.
  const BasisSet cubic = BasisSet::cubic_bspline(14, 0.3, 1.5);
  const BasisSet linear = BasisSet::linear_bspline(9, 0.2, 1.6);
  double worst_pu = 0.0;
  for (const BasisSet* b : {&cubic, &linear}) {
    const Vec grid = linspace(b->r_min(), b->r_max(), 401);
    for (Index i = 0; i < grid.size(); ++i)
      worst_pu = std::max(worst_pu, std::abs(b->eval(grid[i]).sum() - 1.0));
  }
  if (worst_pu > 1e-12) return {false, "partition-of-unity defect " + fmt(worst_pu)};

  // Basis derivatives against central differences.  The linear kind has a
  // one-sided derivative at its knots, so those points are tested off-knot.
  const double delta = 1e-6;
  double worst_fd = 0.0;
  const Vec cubic_pts = linspace(cubic.r_min() + 1e-3, cubic.r_max() - 1e-3, 97);
  for (Index i = 0; i < cubic_pts.size(); ++i) {
    const Vec fd =
        (cubic.eval(cubic_pts[i] + delta) - cubic.eval(cubic_pts[i] - delta)) / (2.0 * delta);
    worst_fd = std::max(worst_fd, sup_diff(fd, cubic.eval_deriv(cubic_pts[i])));
  }
  const double spacing = (linear.r_max() - linear.r_min()) / (linear.size() - 1);
  for (int j = 0; j + 1 < linear.size(); ++j) {
    const double x = linear.r_min() + (j + 0.37) * spacing;
    const Vec fd = (linear.eval(x + delta) - linear.eval(x - delta)) / (2.0 * delta);
    worst_fd = std::max(worst_fd, sup_diff(fd, linear.eval_deriv(x)));
  }
  const BasisSet mono = BasisSet::monomial(5);
  const Vec mono_pts = linspace(-2.0, 2.0, 41);
  for (Index i = 0; i < mono_pts.size(); ++i) {
    const Vec fd =
        (mono.eval(mono_pts[i] + delta) - mono.eval(mono_pts[i] - delta)) / (2.0 * delta);
    worst_fd = std::max(worst_fd, sup_diff(fd, mono.eval_deriv(mono_pts[i])));
  }
  if (worst_fd > 1e-5) return {false, "basis derivative vs finite differences: " + fmt(worst_fd)};

  // F1 against a finite-difference Hessian of the equilibrium log-likelihood.
  Vec theta_star(5);
  theta_star << 0.0, -1.0, 0.0, 0.0, 0.0;
  const IidDataset gibbs_data =
      cgfit::sample_density(cgfit::cg_invariant_density(mono, theta_star), 400, 606);
  Vec theta_eval(5);
  theta_eval << 0.05, -0.95, 0.03, -0.06, 0.0;
  const cgfit::GibbsScoreModel model(mono, theta_eval);
  const Mat f1 = cgfit::fisher_f1_iid(model, gibbs_data);
  const auto ell = [&](const Vec& th) { return cgfit::re_objective(gibbs_data, mono, th); };
  // The quartic log-partition derivative makes the central-difference
  // truncation error roughly 1e3 * h^2 (largest in the x^4/x^4 entry);
  // h = 1e-4 keeps it near 1e-5 with roundoff still far below.
  const double h = 1e-4;
  Mat hess(5, 5);
  for (Index i = 0; i < 5; ++i)
    for (Index j = i; j < 5; ++j) {
      Vec pp = theta_eval, pm = theta_eval, mp = theta_eval, mm = theta_eval;
      pp[i] += h; pp[j] += h;
      pm[i] += h; pm[j] -= h;
      mp[i] -= h; mp[j] += h;
      mm[i] -= h; mm[j] -= h;
      hess(i, j) = hess(j, i) = (ell(pp) - ell(pm) - ell(mp) + ell(mm)) / (4.0 * h * h);
    }
  const double f1_gap = (f1 + hess).cwiseAbs().maxCoeff();
  if (f1_gap > 1e-4) return {false, "F1 vs finite-difference Hessian: " + fmt(f1_gap)};

  // Batch means against the AR(1) long-run variance 1/(1-rho)^2.
  const double rho = 0.5;
  const Index n = 100000;
  Rng zrng(7070);
  Mat rows(n, 1);
  double z = zrng.normal() / std::sqrt(1.0 - rho * rho);
  for (Index i = 0; i < n; ++i) {
    z = rho * z + zrng.normal();
    rows(i, 0) = z;
  }
  const double bm = cgfit::batch_means_cov(rows)(0, 0);
  const double truth = 1.0 / ((1.0 - rho) * (1.0 - rho));
  const double bm_err = std::abs(bm - truth) / truth;
  if (bm_err > 0.30)
    return {false, "batch means " + fmt(bm) + " vs AR(1) long-run variance " + fmt(truth)};

  return {true, "partition of unity " + fmt(worst_pu) + ", derivative FD gap " + fmt(worst_fd) +
                    ", F1 Hessian gap " + fmt(f1_gap) + ", batch-means relative error " +
                    fmt(bm_err)};
}

// ---------------------------------------------------------------------------
// 8. F1 and F2 agree on well-specified equilibrium data
// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion8() {
  const BasisSet basis = BasisSet::monomial(5);
  Vec theta_star(5);
  theta_star << 0.0, -1.0, 0.0, 0.0, 0.0;
  const IidDataset data =
      cgfit::sample_density(cgfit::cg_invariant_density(basis, theta_star), 100000, 2718);
  const ParamEstimate est = cgfit::fit_re_iid(data, basis);
  const cgfit::GibbsScoreModel model(basis, est.theta);
  const double div = cgfit::f1_f2_divergence(cgfit::fisher_pair_iid(model, data));
  return {div < 0.1, "f1_f2_divergence " + fmt(div) + " at the N=100000 equilibrium fit " +
                         "(want < 0.1)"};
}

// ---------------------------------------------------------------------------
// 9. Qualitative uncertainty patterns for the fitted pair potential
// ---------------------------------------------------------------------------

double window_mean(const cgfit::QoiBand& band, double lo, double hi) {
  double sum = 0.0;
  int count = 0;
  for (Index i = 0; i < band.grid.size(); ++i)
    if (band.grid[i] >= lo && band.grid[i] <= hi) {
      sum += band.std_dev[i];
      ++count;
    }
  return sum / count;
}

std::pair<bool, std::string> criterion9() {
  // The recorded forces are exact pair forces, so the only randomness in a
  // fitted curve is which separations each configuration happens to sample.
  // A dilute box with few particles keeps that sampling noise well above the
  // fixed spline-representation bias of the out-of-span 12-6 generator, which
  // is the regime where a pointwise band can cover the generator curve.  The
  // hard core sits at the left basis edge so every resample populates the
  // first spline column.
  const cgfit::PairLaw law = cgfit::reference_pair_law(0.40, 0.35, 0.40, 1.4);
  const BasisSet basis = BasisSet::cubic_bspline(26, 0.40, 1.4);
  const Index particles = 16;
  const double box = 4.0;
  const Vec grid = linspace(0.40, 1.30, 46);

  const std::vector<ParticleConfig> d30 =
      cgfit::synth_pair_data(law, particles, box, 30, cgfit::split_seed(8800, 0));
  const std::vector<ParticleConfig> d100 =
      cgfit::synth_pair_data(law, particles, box, 100, cgfit::split_seed(8800, 1));
  const std::vector<ParticleConfig> d200 =
      cgfit::synth_pair_data(law, particles, box, 200, cgfit::split_seed(8800, 2));

  const cgfit::QoiBand b30 = cgfit::potential_band(d30, basis, 1.4, grid, 200, 0.05, 9901);
  const cgfit::QoiBand b100 = cgfit::potential_band(d100, basis, 1.4, grid, 200, 0.05, 9902);
  const cgfit::QoiBand b200 = cgfit::potential_band(d200, basis, 1.4, grid, 200, 0.05, 9903);

  // Larger spread at small separations than at large ones.
  const double near = window_mean(b200, 0.40, 0.70);
  const double far = window_mean(b200, 1.00, 1.30);
  if (!(near > far))
    return {false, "STD window means: near " + fmt(near) + " vs far " + fmt(far)};

  // Spread shrinks with the number of configurations, on grid average.
  const double m30 = b30.std_dev.mean();
  const double m100 = b100.std_dev.mean();
  const double m200 = b200.std_dev.mean();
  if (!(m30 > m100 && m100 > m200))
    return {false, "mean STD across dataset sizes: " + fmt(m30) + " (30), " + fmt(m100) +
                       " (100), " + fmt(m200) + " (200)"};

  // The generating potential sits inside the 95% band almost everywhere.
  Index inside = 0;
  for (Index i = 0; i < grid.size(); ++i) {
    const double u = law.u(grid[i]);
    if (b200.lower[i] <= u && u <= b200.upper[i]) ++inside;
  }
  const double frac = static_cast<double>(inside) / static_cast<double>(grid.size());
  if (frac < 0.95)
    return {false, "generator potential inside the N=200 band at only " + fmt(100.0 * frac) +
                       "% of grid points"};

  return {true, "STD windows " + fmt(near) + " > " + fmt(far) + ", mean STD " + fmt(m30) +
                    " > " + fmt(m100) + " > " + fmt(m200) + ", band coverage " +
                    fmt(100.0 * frac) + "% of grid points"};
}

// ---------------------------------------------------------------------------
// 10. Byte-identical reruns of the seeded command-line pipelines
// ---------------------------------------------------------------------------

const fs::path kScratch = "acceptance_scratch";

std::string path_of(const std::string& name) { return (kScratch / name).string(); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CGFIT_BIN) + " " + args + " > " + path_of("stdout.txt") +
                          " 2> " + path_of("stderr.txt");
  return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::pair<bool, std::string> criterion10() {
  fs::remove_all(kScratch);
  fs::create_directories(kScratch);

  struct Step {
    std::string label;
    std::string first;
    std::string second;
    std::string out_a;
    std::string out_b;
  };
  const std::string pair_basis = " --kind cubic-bspline --k 8 --r-min 0.35 --r-max 1.3";
  const std::vector<Step> steps = {
      {"simulate iid rerun",
       "--seed 7 simulate iid --n 200 --out " + path_of("iid_a.csv"),
       "--seed 7 --threads 4 simulate iid --n 200 --out " + path_of("iid_b.csv"),
       "iid_a.csv", "iid_b.csv"},
      {"simulate paths across thread counts",
       "--seed 11 --threads 1 simulate paths --paths 4 --records 400 --out " + path_of("p1.csv"),
       "--seed 11 --threads 4 simulate paths --paths 4 --records 400 --out " + path_of("p4.csv"),
       "p1.csv", "p4.csv"},
      {"simulate pairs rerun",
       "--seed 13 simulate pairs --configs 5 --particles 27 --box 4.2" + pair_basis +
           " --out " + path_of("pairs_a.csv"),
       "--seed 13 --threads 4 simulate pairs --configs 5 --particles 27 --box 4.2" + pair_basis +
           " --out " + path_of("pairs_b.csv"),
       "pairs_a.csv", "pairs_b.csv"},
      {"path-space fit on the two path files",
       "fit --method rer --data " + path_of("p1.csv") + " --out " + path_of("rer_a.json"),
       "fit --method rer --data " + path_of("p4.csv") + " --out " + path_of("rer_b.json"),
       "rer_a.json", "rer_b.json"},
      {"validate coverage across thread counts",
       "--seed 21 --threads 1 validate coverage --trials 25 --n 120 --out " + path_of("cov1.json"),
       "--seed 21 --threads 4 validate coverage --trials 25 --n 120 --out " + path_of("cov4.json"),
       "cov1.json", "cov4.json"}};

  for (const Step& s : steps) {
    if (run_cli(s.first) != 0 || run_cli(s.second) != 0)
      return {false, s.label + ": command failed (" + slurp(path_of("stderr.txt")) + ")"};
    if (slurp(path_of(s.out_a)) != slurp(path_of(s.out_b)))
      return {false, s.label + ": outputs differ"};
  }

  // Bootstrap interval over the fitted model, serial vs threaded.
  if (run_cli("fit --method fm --data " + path_of("iid_a.csv") + " --out " +
              path_of("fm.json")) != 0)
    return {false, "force-matching fit failed"};
  if (run_cli("--seed 3 --threads 1 ci --method bootstrap-standard --bootstrap-b 60 "
              "--estimate " + path_of("fm.json") + " --data " + path_of("iid_a.csv") +
              " --out " + path_of("ci1.csv")) != 0 ||
      run_cli("--seed 3 --threads 4 ci --method bootstrap-standard --bootstrap-b 60 "
              "--estimate " + path_of("fm.json") + " --data " + path_of("iid_a.csv") +
              " --out " + path_of("ci4.csv")) != 0)
    return {false, "bootstrap interval command failed (" + slurp(path_of("stderr.txt")) + ")"};
  if (slurp(path_of("ci1.csv")) != slurp(path_of("ci4.csv")))
    return {false, "bootstrap interval differs between 1 and 4 threads"};

  return {true, "6 seeded pipelines byte-identical across reruns and thread counts"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::pair<bool, std::string>()>>>
      checks = {
          {"two-scale force matching over 20 seeded runs", criterion1},
          {"path-space fit with sandwich interval on one long path", criterion2},
          {"interval coverage over 200 trials", criterion3},
          {"resampling and asymptotic variances agree", criterion4},
          {"path-space fit matches time-series force matching", criterion5},
          {"oracle equivalences", criterion6},
          {"numerical-analysis suite", criterion7},
          {"well-specified information-matrix agreement", criterion8},
          {"pair-potential uncertainty patterns", criterion9},
          {"byte-identical seeded pipelines", criterion10},
      };

  bool all_ok = true;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    bool ok = false;
    std::string detail;
    try {
      const auto result = checks[i].second();
      ok = result.first;
      detail = result.second;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << (i + 1) << " ("
              << checks[i].first << "): " << detail << std::endl;
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
