#include "cgfit/pairfm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cgfit/errors.hpp"
#include "cgfit/parallel.hpp"
#include "cgfit/rng.hpp"

namespace cgfit {

void ParticleConfig::validate() const {
  if (positions.rows() < 2 || positions.cols() != 3)
    throw ArgumentError("configuration needs at least two particles with 3 coordinates");
  if (forces.rows() != positions.rows() || forces.cols() != 3)
    throw ArgumentError("forces do not match particle count");
  if (!(box > 0.0)) throw ArgumentError("box edge must be positive");
  if (!positions.allFinite() || !forces.allFinite())
    throw ArgumentError("configuration contains non-finite entries");
}

namespace {

inline double min_image(double d, double box) { return d - box * std::round(d / box); }

inline double wrap(double x, double box) {
  x = std::fmod(x, box);
  return x < 0.0 ? x + box : x;
}

void check_cutoff(double cutoff, double box) {
  if (!(cutoff > 0.0)) throw ConfigError("cutoff must be positive");
  if (cutoff > 0.5 * box)
    throw ConfigError("cutoff " + std::to_string(cutoff) + " exceeds half the box " +
                      std::to_string(0.5 * box) + "; minimum image is ambiguous");
}

void push_pair(std::vector<PairEntry>& out, const Mat& pos, Index i, Index j, double box,
               double cutoff2) {
  double d[3];
  for (int ax = 0; ax < 3; ++ax) d[ax] = min_image(pos(i, ax) - pos(j, ax), box);
  const double r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
  if (r2 > cutoff2) return;
  if (!(r2 > 0.0)) throw ArgumentError("coincident particles " + std::to_string(i) + " and " +
                                       std::to_string(j));
  PairEntry e;
  e.i = i;
  e.j = j;
  e.r = std::sqrt(r2);
  e.unit = Eigen::Vector3d(d[0], d[1], d[2]) / e.r;
  out.push_back(e);
}

std::vector<PairEntry> pairs_all(const ParticleConfig& c, double cutoff) {
  std::vector<PairEntry> out;
  const double cutoff2 = cutoff * cutoff;
  for (Index i = 0; i < c.n_particles(); ++i)
    for (Index j = i + 1; j < c.n_particles(); ++j)
      push_pair(out, c.positions, i, j, c.box, cutoff2);
  return out;
}

std::vector<PairEntry> pairs_cell_list(const ParticleConfig& c, double cutoff, int n_cells) {
  const double cutoff2 = cutoff * cutoff;
  const double cell_edge = c.box / n_cells;
  const Index m = c.n_particles();
  const int total_cells = n_cells * n_cells * n_cells;

  auto cell_of = [&](Index p) {
    int ix = static_cast<int>(wrap(c.positions(p, 0), c.box) / cell_edge);
    int iy = static_cast<int>(wrap(c.positions(p, 1), c.box) / cell_edge);
    int iz = static_cast<int>(wrap(c.positions(p, 2), c.box) / cell_edge);
    ix = std::min(ix, n_cells - 1);  // guard the x == box edge after wrap
    iy = std::min(iy, n_cells - 1);
    iz = std::min(iz, n_cells - 1);
    return (iz * n_cells + iy) * n_cells + ix;
  };

  // Bucket particles by cell.
  std::vector<std::vector<Index>> cells(static_cast<std::size_t>(total_cells));
  for (Index p = 0; p < m; ++p) cells[static_cast<std::size_t>(cell_of(p))].push_back(p);

  // Half stencil: the 13 lexicographically positive neighbor offsets, so each
  // cell pair is visited once.
  static const int stencil[13][3] = {{1, 0, 0},  {-1, 1, 0}, {0, 1, 0},  {1, 1, 0}, {-1, -1, 1},
                                     {0, -1, 1}, {1, -1, 1}, {-1, 0, 1}, {0, 0, 1}, {1, 0, 1},
                                     {-1, 1, 1}, {0, 1, 1},  {1, 1, 1}};

  std::vector<PairEntry> out;
  for (int cz = 0; cz < n_cells; ++cz)
    for (int cy = 0; cy < n_cells; ++cy)
      for (int cx = 0; cx < n_cells; ++cx) {
        const auto& home = cells[static_cast<std::size_t>((cz * n_cells + cy) * n_cells + cx)];
        for (std::size_t a = 0; a < home.size(); ++a)
          for (std::size_t b = a + 1; b < home.size(); ++b)
            push_pair(out, c.positions, std::min(home[a], home[b]),
                      std::max(home[a], home[b]), c.box, cutoff2);
        for (const auto& off : stencil) {
          const int nx = (cx + off[0] + n_cells) % n_cells;
          const int ny = (cy + off[1] + n_cells) % n_cells;
          const int nz = (cz + off[2] + n_cells) % n_cells;
          const auto& other = cells[static_cast<std::size_t>((nz * n_cells + ny) * n_cells + nx)];
          for (Index pa : home)
            for (Index pb : other)
              push_pair(out, c.positions, std::min(pa, pb), std::max(pa, pb), c.box, cutoff2);
        }
      }
  return out;
}

}  // namespace

std::vector<PairEntry> neighbor_pairs(const ParticleConfig& config, double cutoff) {
  config.validate();
  check_cutoff(cutoff, config.box);
  const int n_cells = static_cast<int>(std::floor(config.box / cutoff));
  std::vector<PairEntry> out =
      n_cells >= 3 ? pairs_cell_list(config, cutoff, n_cells) : pairs_all(config, cutoff);
  std::sort(out.begin(), out.end(), [](const PairEntry& a, const PairEntry& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  return out;
}

namespace {

// phi'(r) with zero extension outside the basis domain.
bool deriv_in_domain(const BasisSet& basis, double r, Vec& dphi) {
  if (r < basis.r_min() || r > basis.r_max()) return false;
  basis.eval_deriv(r, dphi);
  return true;
}

LinearSystem assemble_one(const ParticleConfig& config, const BasisSet& basis, double cutoff) {
  const Index m = config.n_particles();
  const Index k = basis.size();
  // Design block for this configuration: model force on particle i, axis ax is
  // sum over its pairs of -phi'_k(r) unit[ax].
  Mat design = Mat::Zero(3 * m, k);
  Vec dphi(k);
  for (const PairEntry& e : neighbor_pairs(config, cutoff)) {
    if (!deriv_in_domain(basis, e.r, dphi)) continue;
    for (int ax = 0; ax < 3; ++ax) {
      design.row(3 * e.i + ax) -= dphi.transpose() * e.unit[ax];
      design.row(3 * e.j + ax) += dphi.transpose() * e.unit[ax];
    }
  }
  LinearSystem sys(k);
  for (Index i = 0; i < m; ++i)
    for (int ax = 0; ax < 3; ++ax)
      sys.add_row(design.row(3 * i + ax).transpose(), config.forces(i, ax));
  return sys;
}

std::vector<LinearSystem> per_config_systems(const std::vector<ParticleConfig>& configs,
                                             const BasisSet& basis, double cutoff) {
  if (configs.empty()) throw ArgumentError("no configurations");
  std::vector<LinearSystem> systems(configs.size(), LinearSystem(basis.size()));
  parallel_for(configs.size(), [&](std::size_t c) {
    systems[c] = assemble_one(configs[c], basis, cutoff);
  });
  return systems;
}

LinearSystem combine(const std::vector<LinearSystem>& systems,
                     const std::vector<std::size_t>& idx, Index k) {
  LinearSystem total(k);
  for (std::size_t c : idx) total.add(systems[c]);
  return total;
}

Vec solve_pair_system(const LinearSystem& sys) {
  // Forces see only u', so the potential is determined up to an additive
  // constant: the all-ones coefficient vector is an exact null direction of
  // the Gram matrix (the spline partition of unity differentiates to zero).
  // We report the u(r_max) = 0 representative, which for a clamped basis
  // means the last coefficient is pinned to zero and the leading block is
  // solved on its own.
  const Mat gram = sys.gram();
  const Vec moment = sys.moment();
  const Index k = gram.rows();
  if (k < 2) throw ArgumentError("pair basis needs at least two functions");

  // Columns never touched by a pair stay exactly zero; report them by index
  // instead of failing with a bare conditioning message.
  std::string empty_cols;
  for (Index c = 0; c + 1 < k; ++c)
    if (gram(c, c) == 0.0) empty_cols += (empty_cols.empty() ? "" : ", ") + std::to_string(c);
  if (!empty_cols.empty())
    throw ConditioningError(
        "basis columns with no pair support (knots outside the observed separations): " +
        empty_cols);

  Vec theta = Vec::Zero(k);
  theta.head(k - 1) =
      solve_normal_equations(Mat(gram.topLeftCorner(k - 1, k - 1)), Vec(moment.head(k - 1)));
  return theta;
}

}  // namespace

LinearSystem assemble_pair_fm(const std::vector<ParticleConfig>& configs, const BasisSet& basis,
                              double cutoff) {
  const auto systems = per_config_systems(configs, basis, cutoff);
  std::vector<std::size_t> all(systems.size());
  for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
  return combine(systems, all, basis.size());
}

ParamEstimate fit_pair_potential(const std::vector<ParticleConfig>& configs,
                                 const BasisSet& basis, double cutoff) {
  const LinearSystem sys = assemble_pair_fm(configs, basis, cutoff);
  ParamEstimate est;
  est.theta = solve_pair_system(sys);
  est.method = "pair-fm";
  est.n_samples = sys.n_rows();
  return est;
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

namespace {

struct McState {
  Mat positions;
  double box;
  const PairLaw* law;
  double temperature;

  // Interaction energy of particle p placed at (x, y, z); +inf inside the
  // hard core.
  double particle_energy(Index p, double x, double y, double z) const {
    double energy = 0.0;
    const double cutoff2 = law->r_max * law->r_max;
    for (Index j = 0; j < positions.rows(); ++j) {
      if (j == p) continue;
      const double dx = min_image(x - positions(j, 0), box);
      const double dy = min_image(y - positions(j, 1), box);
      const double dz = min_image(z - positions(j, 2), box);
      const double r2 = dx * dx + dy * dy + dz * dz;
      if (r2 >= cutoff2) continue;
      const double r = std::sqrt(r2);
      if (r < law->r_min) return std::numeric_limits<double>::infinity();
      energy += law->u(r);
    }
    return energy;
  }

  // One sweep of single-particle moves; returns the acceptance fraction.
  double sweep(Rng& rng, double step) {
    Index accepted = 0;
    const Index m = positions.rows();
    for (Index p = 0; p < m; ++p) {
      const double x = positions(p, 0), y = positions(p, 1), z = positions(p, 2);
      const double nx = wrap(x + step * (2.0 * rng.uniform() - 1.0), box);
      const double ny = wrap(y + step * (2.0 * rng.uniform() - 1.0), box);
      const double nz = wrap(z + step * (2.0 * rng.uniform() - 1.0), box);
      const double delta = particle_energy(p, nx, ny, nz) - particle_energy(p, x, y, z);
      bool accept;
      if (std::isinf(delta))
        accept = delta < 0.0;
      else
        accept = delta <= 0.0 || rng.uniform() < std::exp(-delta / temperature);
      if (accept) {
        positions(p, 0) = nx;
        positions(p, 1) = ny;
        positions(p, 2) = nz;
        ++accepted;
      }
    }
    return static_cast<double>(accepted) / static_cast<double>(m);
  }
};

}  // namespace

PairLaw reference_pair_law(double sigma, double well_depth, double r_min, double r_max) {
  if (!(sigma > 0.0) || !(well_depth >= 0.0)) throw ArgumentError("bad reference parameters");
  if (!(r_min > 0.0) || !(r_max > r_min)) throw ArgumentError("bad reference domain");
  auto lj = [sigma, well_depth](double r) {
    const double s6 = std::pow(sigma / r, 6);
    return 4.0 * well_depth * (s6 * s6 - s6);
  };
  const double shift = lj(r_max);
  PairLaw law;
  law.u = [lj, shift](double r) { return lj(r) - shift; };
  law.du = [sigma, well_depth](double r) {
    const double s6 = std::pow(sigma / r, 6);
    return 4.0 * well_depth * (-12.0 * s6 * s6 + 6.0 * s6) / r;
  };
  law.r_min = r_min;
  law.r_max = r_max;
  return law;
}

std::vector<ParticleConfig> synth_pair_data(const PairLaw& law, Index n_particles, double box,
                                            std::size_t n_configs, std::uint64_t seed,
                                            const McOptions& options) {
  if (!law.u || !law.du) throw ArgumentError("pair law must define u and u'");
  if (!(law.r_min > 0.0) || !(law.r_max > law.r_min))
    throw ArgumentError("pair law domain must satisfy 0 < r_min < r_max");
  if (n_particles < 2) throw ArgumentError("need at least two particles");
  if (n_configs == 0) throw ArgumentError("need at least one configuration");
  if (!(options.temperature > 0.0)) throw ConfigError("temperature must be positive");
  check_cutoff(law.r_max, box);

  // Simple cubic start; the lattice spacing must clear the hard core.
  const Index per_side = static_cast<Index>(std::ceil(std::cbrt(static_cast<double>(n_particles))));
  const double spacing = box / static_cast<double>(per_side);
  if (spacing <= law.r_min)
    throw ConfigError("box too dense: lattice spacing " + std::to_string(spacing) +
                      " inside the hard core " + std::to_string(law.r_min));

  McState mc;
  mc.positions.resize(n_particles, 3);
  for (Index p = 0; p < n_particles; ++p) {
    const Index ix = p % per_side, iy = (p / per_side) % per_side, iz = p / (per_side * per_side);
    mc.positions(p, 0) = (static_cast<double>(ix) + 0.5) * spacing;
    mc.positions(p, 1) = (static_cast<double>(iy) + 0.5) * spacing;
    mc.positions(p, 2) = (static_cast<double>(iz) + 0.5) * spacing;
  }
  mc.box = box;
  mc.law = &law;
  mc.temperature = options.temperature;

  Rng rng(split_seed(seed, 0));
  const double step_cap = 0.45 * box;
  const double step_floor = 1e-5 * box;
  double step = box / 20.0;

  // Burn-in with multiplicative step tuning toward the target acceptance.
  for (std::size_t s = 0; s < options.burn_in_sweeps; ++s) {
    const double acc = mc.sweep(rng, step);
    step = std::clamp(step * (acc > options.target_acceptance ? 1.05 : 0.95), step_floor, step_cap);
  }

  std::vector<ParticleConfig> configs;
  configs.reserve(n_configs);
  double acceptance_sum = 0.0;
  std::size_t sweep_count = 0;
  for (std::size_t c = 0; c < n_configs; ++c) {
    for (std::size_t s = 0; s < options.sweeps_per_sample; ++s) {
      acceptance_sum += mc.sweep(rng, step);
      ++sweep_count;
    }
    ParticleConfig cfg;
    cfg.positions = mc.positions;
    cfg.box = box;
    cfg.forces = Mat::Zero(n_particles, 3);
    for (const PairEntry& e : neighbor_pairs(cfg, law.r_max)) {
      const double f = -law.du(e.r);  // -u'(r)
      cfg.forces.row(e.i) += f * e.unit.transpose();
      cfg.forces.row(e.j) -= f * e.unit.transpose();
    }
    configs.push_back(std::move(cfg));
  }

  const double acceptance = acceptance_sum / static_cast<double>(sweep_count);
  // A collapsed step (acceptance still tiny after tuning) means the chain is
  // stuck.  High acceptance at the step cap is the free-diffusion regime
  // (weak potential) and is fine.
  if (acceptance < 0.1)
    throw TuningError("proposal tuning failed: acceptance " + std::to_string(acceptance) +
                      " below 0.1 after burn-in");
  if (acceptance > 0.9 && step < step_cap)
    throw TuningError("proposal tuning failed: acceptance " + std::to_string(acceptance) +
                      " above 0.9 with an untuned step");
  return configs;
}

std::vector<ParticleConfig> synth_pair_data(const BasisSet& basis, const Vec& theta_true,
                                            Index n_particles, double box,
                                            std::size_t n_configs, std::uint64_t seed,
                                            const McOptions& options) {
  if (theta_true.size() != basis.size()) throw ArgumentError("theta size does not match basis");
  PairLaw law;
  law.u = [&basis, &theta_true](double r) { return basis.model(r, theta_true); };
  law.du = [&basis, &theta_true](double r) { return basis.model_deriv(r, theta_true); };
  law.r_min = basis.r_min();
  law.r_max = basis.r_max();
  return synth_pair_data(law, n_particles, box, n_configs, seed, options);
}

Vec reference_potential_coefficients(const BasisSet& basis, double sigma, double well_depth) {
  if (basis.kind() == BasisKind::monomial)
    throw ArgumentError("reference potential projection expects a spline basis");
  const double r_cut = basis.r_max();
  auto lj = [&](double r) {
    const double s6 = std::pow(sigma / r, 6);
    return 4.0 * well_depth * (s6 * s6 - s6);
  };
  const double shift = lj(r_cut);
  // Dense least squares of the shifted curve on the span.
  const Index n_grid = 2001;
  LinearSystem sys(basis.size());
  Vec phi;
  for (Index i = 0; i < n_grid; ++i) {
    const double r =
        basis.r_min() + (basis.r_max() - basis.r_min()) * static_cast<double>(i) /
                            static_cast<double>(n_grid - 1);
    basis.eval(r, phi);
    const double w = (i == 0 || i == n_grid - 1) ? 0.5 : 1.0;
    sys.add_row(phi, lj(r) - shift, w);
  }
  Vec theta = solve_normal_equations(sys);
  // Report in the same u(r_max) = 0 gauge the force fit uses: the partition
  // of unity turns a uniform coefficient shift into a constant curve shift,
  // and for a clamped basis the last coefficient equals the curve at r_max.
  theta.array() -= theta[theta.size() - 1];
  return theta;
}

std::size_t unit_count(const std::vector<ParticleConfig>& configs) { return configs.size(); }

std::vector<ParticleConfig> select_units(const std::vector<ParticleConfig>& configs,
                                         const std::vector<std::size_t>& idx) {
  std::vector<ParticleConfig> out;
  out.reserve(idx.size());
  for (std::size_t c : idx) out.push_back(configs.at(c));
  return out;
}

QoiBand potential_band(const std::vector<ParticleConfig>& configs, const BasisSet& basis,
                       double cutoff, const Vec& grid, std::size_t b_count, double alpha,
                       std::uint64_t seed) {
  if (b_count < 2) throw ArgumentError("band needs at least two replicates");
  const std::size_t n = configs.size();
  if (n < 2) throw ArgumentError("band needs at least two configurations");
  const auto systems = per_config_systems(configs, basis, cutoff);

  std::vector<std::size_t> all(n);
  for (std::size_t c = 0; c < n; ++c) all[c] = c;
  const Vec theta_hat = solve_pair_system(combine(systems, all, basis.size()));

  // Bootstrap over configurations; per-config blocks make each refit exact
  // without re-walking the pair lists.
  std::vector<Vec> rows(b_count);
  std::vector<char> ok(b_count, 0);
  parallel_for(b_count, [&](std::size_t r) {
    Rng rep_rng(split_seed(seed, r));
    std::vector<std::size_t> idx(n);
    for (std::size_t j = 0; j < n; ++j) idx[j] = rep_rng.index(n);
    try {
      rows[r] = solve_pair_system(combine(systems, idx, basis.size()));
      ok[r] = 1;
    } catch (const Error&) {
      ok[r] = 0;
    }
  });
  BootstrapReplicates reps;
  reps.requested = b_count;
  reps.seed = seed;
  std::size_t n_ok = 0;
  for (std::size_t r = 0; r < b_count; ++r) n_ok += ok[r];
  reps.failed = b_count - n_ok;
  if (10 * reps.failed > b_count)
    throw ConvergenceError("potential band: " + std::to_string(reps.failed) + " of " +
                           std::to_string(b_count) + " replicates failed (over the 10% budget)");
  reps.thetas.resize(static_cast<Index>(n_ok), basis.size());
  Index at = 0;
  for (std::size_t r = 0; r < b_count; ++r)
    if (ok[r]) reps.thetas.row(at++) = rows[r].transpose();

  auto curve = [&](const Vec& theta) {
    Vec u(grid.size());
    for (Index i = 0; i < grid.size(); ++i) u[i] = basis.model(grid[i], theta);
    return u;
  };
  return qoi_bootstrap_band(grid, theta_hat, reps, curve, alpha);
}

QoiBand jackknife_potential_band(const std::vector<ParticleConfig>& configs,
                                 const BasisSet& basis, double cutoff, const Vec& grid,
                                 double alpha) {
  const std::size_t n = configs.size();
  if (n < 2) throw ArgumentError("jackknife needs at least two configurations");
  const auto systems = per_config_systems(configs, basis, cutoff);

  std::vector<std::size_t> all(n);
  for (std::size_t c = 0; c < n; ++c) all[c] = c;
  const Vec theta_hat = solve_pair_system(combine(systems, all, basis.size()));

  auto curve = [&](const Vec& theta) {
    Vec u(grid.size());
    for (Index i = 0; i < grid.size(); ++i) u[i] = basis.model(grid[i], theta);
    return u;
  };

  Mat curves(static_cast<Index>(n), grid.size());
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::size_t> idx;
    idx.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) idx.push_back(j);
    curves.row(static_cast<Index>(i)) =
        curve(solve_pair_system(combine(systems, idx, basis.size()))).transpose();
  });

  QoiBand band;
  band.grid = grid;
  band.estimate = curve(theta_hat);
  band.lower.resize(grid.size());
  band.upper.resize(grid.size());
  band.std_dev.resize(grid.size());
  const double z = z_critical(alpha);
  const double scale = static_cast<double>(n - 1) / static_cast<double>(n);
  for (Index j = 0; j < grid.size(); ++j) {
    const double mean = curves.col(j).mean();
    const double var = scale * (curves.col(j).array() - mean).square().sum();
    const double se = std::sqrt(var);
    band.std_dev[j] = se;
    band.lower[j] = band.estimate[j] - z * se;
    band.upper[j] = band.estimate[j] + z * se;
  }
  return band;
}

}  // namespace cgfit
