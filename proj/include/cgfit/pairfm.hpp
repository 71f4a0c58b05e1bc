#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cgfit/basis.hpp"
#include "cgfit/estimators.hpp"
#include "cgfit/linalg.hpp"
#include "cgfit/types.hpp"
#include "cgfit/uq.hpp"

namespace cgfit {

// A snapshot of m particles in a periodic cubic box with recorded forces.
// Positions are wrapped into [0, box).
struct ParticleConfig {
  Mat positions;  // m x 3
  Mat forces;     // m x 3
  double box = 0.0;

  Index n_particles() const { return positions.rows(); }
  void validate() const;
};

// An interacting pair under the minimum-image convention: i < j, separation
// r, and the unit vector from j to i (so the force on i from a potential u is
// -u'(r) * unit, and the force on j its negative).
struct PairEntry {
  Index i;
  Index j;
  double r;
  Eigen::Vector3d unit;
};

// All pairs within the cutoff, sorted by (i, j).  Uses a cell list when the
// box admits at least 3 cells per side, otherwise an all-pairs sweep; both
// return the same set.  cutoff must not exceed half the box.
std::vector<PairEntry> neighbor_pairs(const ParticleConfig& config, double cutoff);

// Normal equations of pair force matching: for every particle and axis, the
// model force sum_{pairs} -u'(r; theta) unit against the recorded force.
// The potential basis is evaluated with zero extension outside its domain:
// beyond the cutoff the force vanishes by construction, and the rare pair
// below the first knot contributes no regressor (its force is left to the
// residual).
LinearSystem assemble_pair_fm(const std::vector<ParticleConfig>& configs, const BasisSet& basis,
                              double cutoff);

// Solves the assembled system.  Forces determine the potential only up to an
// additive constant, so the fit is reported in the u(r_max) = 0 gauge (last
// clamped-spline coefficient pinned to zero).  Basis columns that no pair
// touched (knots below the minimum observed separation) are reported as a
// ConditioningError naming the empty columns.
ParamEstimate fit_pair_potential(const std::vector<ParticleConfig>& configs,
                                 const BasisSet& basis, double cutoff);

struct McOptions {
  double temperature = 1.0;
  std::size_t burn_in_sweeps = 200;
  std::size_t sweeps_per_sample = 20;  // decorrelation stride between records
  double target_acceptance = 0.4;
};

// An analytic pair interaction on [r_min, r_max]: u(r) and u'(r), with a hard
// core below r_min and zero interaction beyond r_max.
struct PairLaw {
  std::function<double(double)> u;
  std::function<double(double)> du;
  double r_min = 0.0;
  double r_max = 0.0;
};

// Truncated-and-shifted 12-6 curve (zero at r_max) as a PairLaw.
PairLaw reference_pair_law(double sigma = 0.40, double well_depth = 0.35, double r_min = 0.35,
                           double r_max = 1.4);

// Metropolis sampler for an arbitrary pair law.  Single-particle moves with a
// step auto-tuned during burn-in; records a configuration every
// sweeps_per_sample sweeps with exact forces F_i = sum -u'(r) unit.
std::vector<ParticleConfig> synth_pair_data(const PairLaw& law, Index n_particles, double box,
                                            std::size_t n_configs, std::uint64_t seed,
                                            const McOptions& options = {});

// Same sampler for the basis-expanded potential u(r; theta) = sum theta_k
// phi_k(r), hard core at the basis inner edge, cutoff at the outer edge.
std::vector<ParticleConfig> synth_pair_data(const BasisSet& basis, const Vec& theta_true,
                                            Index n_particles, double box,
                                            std::size_t n_configs, std::uint64_t seed,
                                            const McOptions& options = {});

// Short-range reference curve (12-6 shape, truncated and shifted to zero at
// the basis outer edge) projected onto the basis span by dense least squares,
// reported in the same u(r_max) = 0 gauge the force fit uses.  Gives
// synthetic experiments a ground truth the basis can represent exactly.
Vec reference_potential_coefficients(const BasisSet& basis, double sigma = 0.40,
                                     double well_depth = 0.35);

// Resampling units for particle data: whole configurations.
std::size_t unit_count(const std::vector<ParticleConfig>& configs);
std::vector<ParticleConfig> select_units(const std::vector<ParticleConfig>& configs,
                                         const std::vector<std::size_t>& idx);

// Bootstrap percentile band for the potential curve u(r; theta) over `grid`,
// resampling whole configurations.  Replicates reuse per-configuration
// normal-equation blocks, which combine additively, so each refit is exact.
QoiBand potential_band(const std::vector<ParticleConfig>& configs, const BasisSet& basis,
                       double cutoff, const Vec& grid, std::size_t b_count, double alpha,
                       std::uint64_t seed);

// Leave-one-configuration-out band: pointwise jackknife variance of the curve,
// interval estimate +- z * se(r); std_dev carries the jackknife se curve.
QoiBand jackknife_potential_band(const std::vector<ParticleConfig>& configs,
                                 const BasisSet& basis, double cutoff, const Vec& grid,
                                 double alpha);

}  // namespace cgfit
