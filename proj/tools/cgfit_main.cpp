// Command-line driver: simulate benchmark data, fit coarse-grained models,
// attach confidence intervals, run validation experiments, export curves.
//
// Exit codes: 0 success, 1 numeric/data failure, 2 usage or configuration
// error.  Machine outputs carry 17 significant digits and every output file
// gets a .meta.json sidecar with the seed, a hash of the effective options,
// and the version.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cgfit/density.hpp"
#include "cgfit/errors.hpp"
#include "cgfit/estimators.hpp"
#include "cgfit/io.hpp"
#include "cgfit/pairfm.hpp"
#include "cgfit/parallel.hpp"
#include "cgfit/twoscale.hpp"
#include "cgfit/uq.hpp"
#include "cgfit/validate.hpp"

namespace {

using cgfit::BasisSet;
using cgfit::ConfidenceReport;
using cgfit::Index;
using cgfit::Mat;
using cgfit::ParamEstimate;
using cgfit::Vec;

// FNV-1a over the canonical option dump; stable across runs with the same
// effective configuration.
std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

struct RunContext {
  std::uint64_t seed = 12345;
  std::string config_hash;
  std::string command;
};

void write_meta(const RunContext& ctx, const std::string& out_path) {
  nlohmann::json j;
  j["seed"] = ctx.seed;
  j["config_hash"] = ctx.config_hash;
  j["version"] = cgfit::version();
  j["command"] = ctx.command;
  std::ofstream out(out_path + ".meta.json");
  if (!out) throw cgfit::IoError("cannot write '" + out_path + ".meta.json'");
  out << j.dump(2) << '\n';
}

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void print_estimate(const ParamEstimate& est) {
  std::cout << "method: " << est.method << "  n: " << est.n_samples
            << "  converged: " << (est.converged ? "yes" : "no");
  if (est.iterations > 0) std::cout << "  iterations: " << est.iterations;
  std::cout << '\n';
  if (!est.note.empty()) std::cout << "note: " << est.note << '\n';
  std::cout << "theta:";
  for (Index k = 0; k < est.theta.size(); ++k) std::cout << ' ' << fmt4(est.theta[k]);
  std::cout << '\n';
}

void print_report(const ConfidenceReport& rep) {
  std::cout << "param      estimate   variance   lower      upper      (" << rep.method
            << ", alpha=" << fmt4(rep.alpha) << ")\n";
  for (Index k = 0; k < rep.estimate.size(); ++k) {
    std::printf("theta_%-4lld %-10.4f %-10.4f %-10.4f %-10.4f\n", static_cast<long long>(k + 1),
                rep.estimate[k], rep.variance[k], rep.lower[k], rep.upper[k]);
  }
}

Vec linspace(double lo, double hi, Index n) {
  return Vec::LinSpaced(n, lo, hi);
}

// ---------------------------------------------------------------------------
// Option bundles
// ---------------------------------------------------------------------------

struct SdeOpts {
  double eps = 0.005;
  double h_fine = 5e-4;
  double x0 = 0.0;
  double y0 = 0.0;
  double stride = 5.0;
  double burn_in = 100.0;

  cgfit::TwoScaleParams params() const {
    cgfit::TwoScaleParams p;
    p.eps = eps;
    p.h_fine = h_fine;
    p.x0 = x0;
    p.y0 = y0;
    return p;
  }
};

void add_sde_options(CLI::App* cmd, SdeOpts& o) {
  cmd->add_option("--eps", o.eps, "time-scale separation of the fast coordinate");
  cmd->add_option("--h-fine", o.h_fine, "integrator step");
  cmd->add_option("--x0", o.x0, "initial slow coordinate");
  cmd->add_option("--y0", o.y0, "initial fast coordinate");
  cmd->add_option("--burn-in", o.burn_in, "discarded initial time units");
}

struct BasisOpts {
  std::string basis_file;
  std::string kind = "monomial";
  int k = 5;
  double r_min = 0.35;
  double r_max = 1.4;

  BasisSet build() const {
    if (!basis_file.empty()) return cgfit::read_basis_json(basis_file);
    const cgfit::BasisKind bk = cgfit::basis_kind_from_string(kind);
    switch (bk) {
      case cgfit::BasisKind::monomial: return BasisSet::monomial(k);
      case cgfit::BasisKind::linear_bspline: return BasisSet::linear_bspline(k, r_min, r_max);
      case cgfit::BasisKind::cubic_bspline: return BasisSet::cubic_bspline(k, r_min, r_max);
    }
    throw cgfit::ArgumentError("unknown basis kind");
  }
};

void add_basis_options(CLI::App* cmd, BasisOpts& o, const std::string& default_kind, int default_k) {
  o.kind = default_kind;
  o.k = default_k;
  cmd->add_option("--basis", o.basis_file, "basis description JSON (overrides kind/K/domain)");
  cmd->add_option("--kind", o.kind, "basis kind: monomial | linear-bspline | cubic-bspline");
  cmd->add_option("--k", o.k, "number of basis functions");
  cmd->add_option("--r-min", o.r_min, "spline domain inner edge");
  cmd->add_option("--r-max", o.r_max, "spline domain outer edge (pair cutoff)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarse-grained model fitting with uncertainty quantification"};
  app.require_subcommand(1);
  app.set_config("--config", "", "configuration file (TOML/INI; flags override)");
  app.allow_config_extras(false);

  std::uint64_t seed = 12345;
  unsigned threads = 0;
  app.add_option("--seed", seed, "master RNG seed")->capture_default_str();
  app.add_option("--threads", threads, "worker thread cap (0 = hardware)")->capture_default_str();

  // ---- simulate ----
  auto* simulate = app.add_subcommand("simulate", "generate benchmark datasets");
  simulate->require_subcommand(1);

  auto* sim_iid = simulate->add_subcommand("iid", "stationary decimated samples with forces");
  SdeOpts iid_sde;
  std::size_t iid_n = 500;
  std::string iid_out;
  sim_iid->add_option("--n", iid_n, "number of samples")->capture_default_str();
  sim_iid->add_option("--stride", iid_sde.stride, "time units between kept samples");
  add_sde_options(sim_iid, iid_sde);
  sim_iid->add_option("--out", iid_out, "output CSV")->required();

  auto* sim_paths = simulate->add_subcommand("paths", "recorded paths of (x, y)");
  SdeOpts path_sde;
  std::size_t n_paths = 1, n_records = 5000;
  double record_h = 0.01;
  std::string paths_out;
  sim_paths->add_option("--paths", n_paths, "independent paths")->capture_default_str();
  sim_paths->add_option("--records", n_records, "records per path")->capture_default_str();
  sim_paths->add_option("--record-h", record_h, "recording interval")->capture_default_str();
  add_sde_options(sim_paths, path_sde);
  sim_paths->add_option("--out", paths_out, "output CSV")->required();

  auto* sim_pairs = simulate->add_subcommand("pairs", "particle snapshots from a pair potential");
  BasisOpts pair_basis;
  std::size_t n_configs = 100;
  Index n_particles = 125;
  double box = 0.0, density = 0.7, temperature = 1.0, lj_sigma = 0.40, lj_depth = 0.35;
  std::string pairs_out, truth_out;
  sim_pairs->add_option("--configs", n_configs, "number of snapshots")->capture_default_str();
  sim_pairs->add_option("--particles", n_particles, "particles per snapshot")->capture_default_str();
  sim_pairs->add_option("--box", box, "box edge (0: derived from --density)");
  sim_pairs->add_option("--density", density, "number density when --box is 0")->capture_default_str();
  sim_pairs->add_option("--temperature", temperature, "sampling temperature")->capture_default_str();
  sim_pairs->add_option("--sigma", lj_sigma, "reference curve core radius")->capture_default_str();
  sim_pairs->add_option("--well-depth", lj_depth, "reference curve well depth")->capture_default_str();
  add_basis_options(sim_pairs, pair_basis, "cubic-bspline", 30);
  sim_pairs->add_option("--out", pairs_out, "output CSV")->required();
  sim_pairs->add_option("--truth-out", truth_out, "write the generating coefficients (JSON)");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "fit model coefficients");
  std::string fit_method = "fm";
  std::string fit_data, fit_out;
  BasisOpts fit_basis;
  double fit_cutoff = 0.0;
  int newton_max_iter = 50;
  double newton_tol = 1e-8;
  fit->add_option("--method", fit_method, "fm | re | rer | fm-ts | pair")->required();
  fit->add_option("--data", fit_data, "input dataset CSV")->required();
  add_basis_options(fit, fit_basis, "monomial", 5);
  fit->add_option("--cutoff", fit_cutoff, "pair interaction cutoff (default: basis outer edge)");
  fit->add_option("--max-iter", newton_max_iter, "Newton iteration cap");
  fit->add_option("--tol", newton_tol, "Newton score tolerance");
  fit->add_option("--out", fit_out, "output estimate JSON")->required();

  // ---- ci ----
  auto* ci = app.add_subcommand("ci", "confidence intervals and bands");
  std::string ci_method = "asymptotic";
  std::string ci_estimate, ci_data, ci_out, ci_json, ci_qoi = "params", ci_std_out;
  double ci_alpha = 0.05;
  std::size_t ci_b = 200, ci_batch_len = 0;
  double grid_min = 0.0, grid_max = 0.0;
  Index grid_points = 101;
  ci->add_option("--method", ci_method,
                 "asymptotic | jackknife | bootstrap-standard | bootstrap-percentile")
      ->capture_default_str();
  ci->add_option("--estimate", ci_estimate, "fit result JSON")->required();
  ci->add_option("--data", ci_data, "dataset the fit came from")->required();
  ci->add_option("--alpha", ci_alpha, "interval level")->capture_default_str();
  ci->add_option("--bootstrap-b", ci_b, "bootstrap replicates")->capture_default_str();
  ci->add_option("--batch-len", ci_batch_len, "batch length for path intervals (0 = sqrt rule)");
  ci->add_option("--qoi", ci_qoi, "params | drift | potential")->capture_default_str();
  ci->add_option("--grid-min", grid_min, "QoI grid start");
  ci->add_option("--grid-max", grid_max, "QoI grid end");
  ci->add_option("--grid-points", grid_points, "QoI grid size")->capture_default_str();
  ci->add_option("--out", ci_out, "output CSV (report or band)")->required();
  ci->add_option("--json", ci_json, "also write the report as JSON");
  ci->add_option("--std-out", ci_std_out, "also write the replicate std curve CSV");

  // ---- validate ----
  auto* validate = app.add_subcommand("validate", "benchmark experiments");
  validate->require_subcommand(1);

  auto* val_cov = validate->add_subcommand("coverage", "interval coverage over repeated trials");
  std::string cov_fit = "fm", cov_ci = "asymptotic", cov_out;
  std::size_t cov_n = 500, cov_trials = 200, cov_b = 200, cov_batch = 0;
  double cov_alpha = 0.05, cov_record_h = 0.01;
  SdeOpts cov_sde;
  int cov_k = 5;
  val_cov->add_option("--fit", cov_fit, "fm | re | rer")->capture_default_str();
  val_cov->add_option("--ci-method", cov_ci, "interval kind")->capture_default_str();
  val_cov->add_option("--n", cov_n, "samples (iid) or records (rer)")->capture_default_str();
  val_cov->add_option("--alpha", cov_alpha, "interval level")->capture_default_str();
  val_cov->add_option("--trials", cov_trials, "independent trials")->capture_default_str();
  val_cov->add_option("--k", cov_k, "monomial basis size")->capture_default_str();
  val_cov->add_option("--record-h", cov_record_h, "rer recording interval");
  val_cov->add_option("--bootstrap-b", cov_b, "bootstrap replicates per trial");
  val_cov->add_option("--batch-len", cov_batch, "rer batch length (0 = sqrt rule)");
  val_cov->add_option("--stride", cov_sde.stride, "iid decimation stride");
  add_sde_options(val_cov, cov_sde);
  val_cov->add_option("--out", cov_out, "output JSON");

  auto* val_cmp = validate->add_subcommand("compare", "estimators side by side");
  std::size_t cmp_n_iid = 500, cmp_records = 50000;
  int cmp_k = 5;
  double cmp_alpha = 0.05;
  std::string cmp_out;
  val_cmp->add_option("--n-iid", cmp_n_iid, "iid samples")->capture_default_str();
  val_cmp->add_option("--records", cmp_records, "path records")->capture_default_str();
  val_cmp->add_option("--k", cmp_k, "monomial basis size")->capture_default_str();
  val_cmp->add_option("--alpha", cmp_alpha, "interval level")->capture_default_str();
  val_cmp->add_option("--out", cmp_out, "output CSV");

  // ---- export ----
  auto* exp = app.add_subcommand("export", "plot-ready curves from a fit");
  exp->require_subcommand(1);

  auto* exp_density = exp->add_subcommand("density", "stationary density of the fitted model");
  std::string expd_estimate, expd_out;
  double expd_half_width = 8.0;
  Index expd_points = 4001;
  exp_density->add_option("--estimate", expd_estimate, "fit result JSON")->required();
  exp_density->add_option("--half-width", expd_half_width, "quadrature half width")
      ->capture_default_str();
  exp_density->add_option("--points", expd_points, "grid points")->capture_default_str();
  exp_density->add_option("--out", expd_out, "output CSV (x,density)")->required();

  auto* exp_drift = exp->add_subcommand("drift", "fitted drift curve");
  std::string expr_estimate, expr_out;
  double expr_min = -3.0, expr_max = 3.0;
  Index expr_points = 121;
  exp_drift->add_option("--estimate", expr_estimate, "fit result JSON")->required();
  exp_drift->add_option("--grid-min", expr_min, "")->capture_default_str();
  exp_drift->add_option("--grid-max", expr_max, "")->capture_default_str();
  exp_drift->add_option("--grid-points", expr_points, "")->capture_default_str();
  exp_drift->add_option("--out", expr_out, "output CSV (x,drift)")->required();

  auto* exp_pot = exp->add_subcommand("potential", "fitted pair potential curve");
  std::string expp_estimate, expp_out;
  double expp_min = 0.0, expp_max = 0.0;
  Index expp_points = 101;
  exp_pot->add_option("--estimate", expp_estimate, "fit result JSON")->required();
  exp_pot->add_option("--grid-min", expp_min, "default: basis inner edge");
  exp_pot->add_option("--grid-max", expp_max, "default: basis outer edge");
  exp_pot->add_option("--grid-points", expp_points, "")->capture_default_str();
  exp_pot->add_option("--out", expp_out, "output CSV (r,u)")->required();

  // Let the global --seed/--threads flags appear after a subcommand as well.
  {
    const std::function<bool(CLI::App*)> all_subcommands = [](CLI::App*) { return true; };
    std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* node) {
      for (CLI::App* sub : node->get_subcommands(all_subcommands)) {
        sub->fallthrough();
        enable_fallthrough(sub);
      }
    };
    enable_fallthrough(&app);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cgfit::set_max_threads(threads);

  RunContext ctx;
  ctx.seed = seed;
  ctx.config_hash = std::to_string(fnv1a(app.config_to_str(true, false)));
  for (const CLI::App* sub = &app; !sub->get_subcommands().empty();
       sub = sub->get_subcommands().front())
    ctx.command += (ctx.command.empty() ? "" : " ") + sub->get_subcommands().front()->get_name();

  try {
    // ---- simulate ----
    if (sim_iid->parsed()) {
      const cgfit::IidDataset data =
          cgfit::sample_stationary_iid(iid_sde.params(), iid_n, seed, iid_sde.stride,
                                       iid_sde.burn_in);
      cgfit::write_iid_csv(data, iid_out);
      write_meta(ctx, iid_out);
      std::cout << "wrote " << data.size() << " samples to " << iid_out << '\n';
    } else if (sim_paths->parsed()) {
      const cgfit::TimeSeriesDataset data = cgfit::generate_paths(
          path_sde.params(), n_paths, n_records, record_h, seed, path_sde.burn_in);
      cgfit::write_timeseries_csv(data, paths_out);
      write_meta(ctx, paths_out);
      std::cout << "wrote " << n_paths << " paths of " << n_records << " records to " << paths_out
                << '\n';
    } else if (sim_pairs->parsed()) {
      const BasisSet basis = pair_basis.build();
      if (box <= 0.0)
        box = std::cbrt(static_cast<double>(n_particles) / density);
      const Vec theta_true = cgfit::reference_potential_coefficients(basis, lj_sigma, lj_depth);
      cgfit::McOptions mc;
      mc.temperature = temperature;
      const auto configs =
          cgfit::synth_pair_data(basis, theta_true, n_particles, box, n_configs, seed, mc);
      cgfit::write_pair_configs_csv(configs, pairs_out);
      write_meta(ctx, pairs_out);
      if (!truth_out.empty()) {
        ParamEstimate truth;
        truth.theta = theta_true;
        truth.method = "reference-projection";
        truth.n_samples = 0;
        truth.seed = seed;
        cgfit::write_estimate_json(truth, basis, truth_out);
        write_meta(ctx, truth_out);
      }
      std::cout << "wrote " << configs.size() << " configurations of " << n_particles
                << " particles (box " << fmt4(box) << ") to " << pairs_out << '\n';
    }

    // ---- fit ----
    else if (fit->parsed()) {
      ParamEstimate est;
      BasisSet basis = fit_basis.build();
      if (fit_method == "fm") {
        est = cgfit::fit_fm_iid(cgfit::read_iid_csv(fit_data), basis);
      } else if (fit_method == "re") {
        cgfit::NewtonOptions opts;
        opts.max_iter = newton_max_iter;
        opts.grad_tol = newton_tol;
        est = cgfit::fit_re_iid(cgfit::read_iid_csv(fit_data), basis, opts);
      } else if (fit_method == "rer") {
        est = cgfit::fit_rer(cgfit::read_timeseries_csv(fit_data), basis);
      } else if (fit_method == "fm-ts") {
        est = cgfit::fit_fm_ts(cgfit::read_timeseries_csv(fit_data), basis);
      } else if (fit_method == "pair") {
        if (fit_basis.basis_file.empty() && fit_basis.kind == "monomial")
          basis = BasisSet::cubic_bspline(30, fit_basis.r_min, fit_basis.r_max);
        const double cutoff = fit_cutoff > 0.0 ? fit_cutoff : basis.r_max();
        est = cgfit::fit_pair_potential(cgfit::read_pair_configs_csv(fit_data), basis, cutoff);
      } else {
        throw cgfit::ArgumentError("unknown fit method '" + fit_method + "'");
      }
      est.seed = seed;
      cgfit::write_estimate_json(est, basis, fit_out);
      write_meta(ctx, fit_out);
      print_estimate(est);
    }

    // ---- ci ----
    else if (ci->parsed()) {
      const auto [est, basis] = cgfit::read_estimate_json(ci_estimate);

      if (ci_qoi == "potential") {
        if (est.method != "pair-fm")
          throw cgfit::ArgumentError("potential bands need a pair-fm estimate");
        const auto configs = cgfit::read_pair_configs_csv(ci_data);
        const double lo = grid_min > 0.0 ? grid_min : basis.r_min();
        const double hi = grid_max > 0.0 ? grid_max : basis.r_max();
        const Vec grid = linspace(lo, hi, grid_points);
        cgfit::QoiBand band;
        if (ci_method == "jackknife")
          band = cgfit::jackknife_potential_band(configs, basis, basis.r_max(), grid, ci_alpha);
        else
          band = cgfit::potential_band(configs, basis, basis.r_max(), grid, ci_b, ci_alpha, seed);
        cgfit::write_potential_csv(band, ci_out);
        write_meta(ctx, ci_out);
        if (!ci_std_out.empty()) {
          cgfit::write_curve_csv("r", "std", band.grid, band.std_dev, ci_std_out);
          write_meta(ctx, ci_std_out);
        }
        std::cout << "wrote potential band (" << (ci_method == "jackknife" ? "jackknife" : "bootstrap")
                  << ") to " << ci_out << '\n';
        return 0;
      }

      if (ci_qoi == "drift") {
        if (est.method != "fm-iid" && est.method != "re-iid")
          throw cgfit::ArgumentError("drift bands are built from iid fits");
        const cgfit::IidDataset data = cgfit::read_iid_csv(ci_data);
        const Vec grid = linspace(grid_min, grid_max, grid_points);
        const std::function<Vec(const cgfit::IidDataset&)> refit =
            [&](const cgfit::IidDataset& d) {
              if (est.method == "fm-iid") return cgfit::fit_fm_iid(d, basis).theta;
              cgfit::NewtonOptions warm;
              warm.theta0 = est.theta;
              return cgfit::fit_re_iid(d, basis, warm).theta;
            };
        const auto reps = cgfit::bootstrap<cgfit::IidDataset>(data, refit, ci_b, seed);
        auto curve = [&](const Vec& theta) {
          Vec a(grid.size());
          for (Index i = 0; i < grid.size(); ++i) a[i] = basis.model(grid[i], theta);
          return a;
        };
        const cgfit::QoiBand band = cgfit::qoi_bootstrap_band(grid, est.theta, reps, curve, ci_alpha);
        cgfit::write_band_csv(band, ci_out);
        write_meta(ctx, ci_out);
        if (!ci_std_out.empty()) {
          cgfit::write_curve_csv("x", "std", band.grid, band.std_dev, ci_std_out);
          write_meta(ctx, ci_std_out);
        }
        std::cout << "wrote drift band to " << ci_out << '\n';
        return 0;
      }

      if (ci_qoi != "params")
        throw cgfit::ArgumentError("unknown qoi '" + ci_qoi + "'");

      ConfidenceReport rep;
      if (est.method == "fm-iid" || est.method == "re-iid") {
        const cgfit::IidDataset data = cgfit::read_iid_csv(ci_data);
        const std::function<Vec(const cgfit::IidDataset&)> refit =
            [&](const cgfit::IidDataset& d) {
              if (est.method == "fm-iid") return cgfit::fit_fm_iid(d, basis).theta;
              cgfit::NewtonOptions warm;
              warm.theta0 = est.theta;
              return cgfit::fit_re_iid(d, basis, warm).theta;
            };
        if (ci_method == "asymptotic") {
          if (est.method == "fm-iid") {
            const cgfit::FmScoreModel model(basis, est.theta);
            rep = cgfit::sandwich_ci_iid(est.theta, cgfit::fisher_pair_iid(model, data), ci_alpha);
          } else {
            const cgfit::GibbsScoreModel model(basis, est.theta);
            rep = cgfit::sandwich_ci_iid(est.theta, cgfit::fisher_pair_iid(model, data), ci_alpha);
          }
        } else if (ci_method == "jackknife") {
          rep = cgfit::jackknife<cgfit::IidDataset>(data, refit, ci_alpha).report;
        } else if (ci_method == "bootstrap-standard") {
          rep = cgfit::bootstrap_standard_ci(
              est.theta, cgfit::bootstrap<cgfit::IidDataset>(data, refit, ci_b, seed), ci_alpha);
        } else if (ci_method == "bootstrap-percentile") {
          rep = cgfit::bootstrap_percentile_ci(
              est.theta, cgfit::bootstrap<cgfit::IidDataset>(data, refit, ci_b, seed), ci_alpha);
        } else {
          throw cgfit::ArgumentError("unknown interval method '" + ci_method + "'");
        }
      } else if (est.method == "rer" || est.method == "fm-ts") {
        const cgfit::TimeSeriesDataset data = cgfit::read_timeseries_csv(ci_data);
        const std::function<Vec(const cgfit::TimeSeriesDataset&)> refit =
            [&](const cgfit::TimeSeriesDataset& d) {
              return est.method == "rer" ? cgfit::fit_rer(d, basis).theta
                                         : cgfit::fit_fm_ts(d, basis).theta;
            };
        if (ci_method == "asymptotic") {
          if (est.method != "rer")
            throw cgfit::ArgumentError("asymptotic intervals are defined for rer fits");
          const Mat i1 = cgfit::fisher_i1_ts(data, basis);
          const Mat sigma = cgfit::batch_means_sigma(data, basis, est.theta, ci_batch_len);
          rep = cgfit::sandwich_ci_ts(est.theta, i1, sigma, data.n_transitions(), ci_alpha);
        } else if (ci_method == "jackknife") {
          rep = cgfit::jackknife<cgfit::TimeSeriesDataset>(data, refit, ci_alpha).report;
        } else if (ci_method == "bootstrap-standard") {
          rep = cgfit::bootstrap_standard_ci(
              est.theta, cgfit::bootstrap<cgfit::TimeSeriesDataset>(data, refit, ci_b, seed),
              ci_alpha);
        } else if (ci_method == "bootstrap-percentile") {
          rep = cgfit::bootstrap_percentile_ci(
              est.theta, cgfit::bootstrap<cgfit::TimeSeriesDataset>(data, refit, ci_b, seed),
              ci_alpha);
        } else {
          throw cgfit::ArgumentError("unknown interval method '" + ci_method + "'");
        }
      } else if (est.method == "pair-fm") {
        const auto configs = cgfit::read_pair_configs_csv(ci_data);
        const std::function<Vec(const std::vector<cgfit::ParticleConfig>&)> refit =
            [&](const std::vector<cgfit::ParticleConfig>& c) {
              return cgfit::fit_pair_potential(c, basis, basis.r_max()).theta;
            };
        if (ci_method == "jackknife") {
          rep = cgfit::jackknife<std::vector<cgfit::ParticleConfig>>(configs, refit, ci_alpha)
                    .report;
        } else if (ci_method == "bootstrap-standard") {
          rep = cgfit::bootstrap_standard_ci(
              est.theta,
              cgfit::bootstrap<std::vector<cgfit::ParticleConfig>>(configs, refit, ci_b, seed),
              ci_alpha);
        } else if (ci_method == "bootstrap-percentile") {
          rep = cgfit::bootstrap_percentile_ci(
              est.theta,
              cgfit::bootstrap<std::vector<cgfit::ParticleConfig>>(configs, refit, ci_b, seed),
              ci_alpha);
        } else {
          throw cgfit::ArgumentError("pair-fm intervals come from jackknife or bootstrap");
        }
      } else {
        throw cgfit::ArgumentError("no interval recipe for method '" + est.method + "'");
      }
      cgfit::write_report_csv(rep, ci_out);
      write_meta(ctx, ci_out);
      if (!ci_json.empty()) {
        cgfit::write_report_json(rep, ci_json);
        write_meta(ctx, ci_json);
      }
      print_report(rep);
    }

    // ---- validate ----
    else if (val_cov->parsed()) {
      cgfit::CoverageSpec spec;
      spec.fit = cgfit::fit_kind_from_string(cov_fit);
      spec.ci = cgfit::ci_kind_from_string(cov_ci);
      spec.n = cov_n;
      spec.alpha = cov_alpha;
      spec.trials = cov_trials;
      spec.basis_size = cov_k;
      spec.sde = cov_sde.params();
      spec.record_h = cov_record_h;
      spec.stride_time = cov_sde.stride;
      spec.burn_in = cov_sde.burn_in;
      spec.bootstrap_b = cov_b;
      spec.batch_len = cov_batch;
      const cgfit::CoverageResult result = cgfit::coverage_experiment(spec, seed);
      std::cout << "coverage (" << cov_fit << ", " << cov_ci << ", n=" << cov_n
                << ", alpha=" << fmt4(cov_alpha) << ", trials=" << result.trials << "):";
      for (Index k = 0; k < result.coverage.size(); ++k)
        std::cout << ' ' << fmt4(result.coverage[k]);
      std::cout << "  mean=" << fmt4(result.mean_coverage)
                << "  failures=" << result.failures << '\n';
      if (!cov_out.empty()) {
        nlohmann::json j;
        j["fit"] = cov_fit;
        j["ci_method"] = cov_ci;
        j["n"] = cov_n;
        j["alpha"] = cov_alpha;
        j["trials"] = result.trials;
        j["failures"] = result.failures;
        j["coverage"] = std::vector<double>(result.coverage.data(),
                                            result.coverage.data() + result.coverage.size());
        j["mean_coverage"] = result.mean_coverage;
        j["version"] = cgfit::version();
        std::ofstream out(cov_out);
        if (!out) throw cgfit::IoError("cannot write '" + cov_out + "'");
        out << j.dump(2) << '\n';
        write_meta(ctx, cov_out);
      }
    } else if (val_cmp->parsed()) {
      const auto rows = cgfit::method_comparison(seed, cmp_n_iid, cmp_records, cmp_k, cmp_alpha);
      std::cout << "method   n        wall_s     theta (4 digits)\n";
      for (const auto& row : rows) {
        std::printf("%-8s %-8zu %-10.4f", row.method.c_str(), row.n_samples, row.wall_seconds);
        for (Index k = 0; k < row.theta.size(); ++k) std::printf(" %8.4f", row.theta[k]);
        std::printf("\n");
      }
      if (!cmp_out.empty()) {
        std::ofstream out(cmp_out);
        if (!out) throw cgfit::IoError("cannot write '" + cmp_out + "'");
        out << "method,param,estimate,variance,lower,upper,wall_seconds,n_samples\n";
        char buf[256];
        for (const auto& row : rows)
          for (Index k = 0; k < row.theta.size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%s,theta_%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%zu\n",
                          row.method.c_str(), static_cast<long long>(k + 1), row.theta[k],
                          row.variance[k], row.lower[k], row.upper[k], row.wall_seconds,
                          row.n_samples);
            out << buf;
          }
        write_meta(ctx, cmp_out);
      }
    }

    // ---- export ----
    else if (exp_density->parsed()) {
      const auto [est, basis] = cgfit::read_estimate_json(expd_estimate);
      const cgfit::DensityGrid grid =
          cgfit::cg_invariant_density(basis, est.theta, expd_half_width, expd_points);
      cgfit::write_curve_csv("x", "density", grid.x, grid.pdf, expd_out);
      write_meta(ctx, expd_out);
      std::cout << "wrote density (log Z = " << fmt4(grid.log_z) << ") to " << expd_out << '\n';
    } else if (exp_drift->parsed()) {
      const auto [est, basis] = cgfit::read_estimate_json(expr_estimate);
      const Vec grid = linspace(expr_min, expr_max, expr_points);
      Vec drift(grid.size());
      for (Index i = 0; i < grid.size(); ++i) drift[i] = basis.model(grid[i], est.theta);
      cgfit::write_curve_csv("x", "drift", grid, drift, expr_out);
      write_meta(ctx, expr_out);
      std::cout << "wrote drift curve to " << expr_out << '\n';
    } else if (exp_pot->parsed()) {
      const auto [est, basis] = cgfit::read_estimate_json(expp_estimate);
      const double lo = expp_min > 0.0 ? expp_min : basis.r_min();
      const double hi = expp_max > 0.0 ? expp_max : basis.r_max();
      const Vec grid = linspace(lo, hi, expp_points);
      Vec u(grid.size());
      for (Index i = 0; i < grid.size(); ++i) u[i] = basis.model(grid[i], est.theta);
      cgfit::write_potential_csv(grid, u, expp_out);
      write_meta(ctx, expp_out);
      std::cout << "wrote potential curve to " << expp_out << '\n';
    }
  } catch (const cgfit::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const cgfit::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const cgfit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
