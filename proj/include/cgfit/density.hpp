#pragma once

#include <cstdint>
#include <functional>

#include "cgfit/basis.hpp"
#include "cgfit/dataset.hpp"
#include "cgfit/types.hpp"

namespace cgfit {

// Normalized density tabulated on a uniform grid with trapezoid weights.
// trapezoid(pdf) = 1 up to roundoff; log_z is the log normalizer of the
// unnormalized weight the grid was built from.
struct DensityGrid {
  Vec x;
  Vec pdf;
  double log_z = 0.0;

  double spacing() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
  // Trapezoid integral of f(x) pdf(x) over the grid.
  double mean(const std::function<double(double)>& f) const;
  double trapezoid_mass() const;
};

// Stationary density exp(-2 U(x; theta)) / Z of the fitted model on
// [-half_width, half_width].  Throws IntegrabilityError when the weight at
// either end exceeds 1e-12 of its maximum (non-confining coefficients).
// Monomial bases only, through potential().
DensityGrid cg_invariant_density(const BasisSet& basis, const Vec& theta,
                                 double half_width = 8.0, Index n_points = 4001);

// Inverse-CDF sampler over the tabulated density (piecewise-linear CDF).
// Returns a one-column dataset of n draws.
IidDataset sample_density(const DensityGrid& grid, std::size_t n, std::uint64_t seed);

// Sufficient statistics of the monomial Gibbs family exp(-2 U(x; theta)):
// g_k(x) = x^k / k = -dU/dtheta_k, for k = 1..k_count.
Vec gibbs_statistics(double x, int k_count);

struct GibbsMoments {
  Vec mean;  // E[g] under the tabulated density
  Mat cov;   // Cov(g)
};
GibbsMoments gibbs_moments(const DensityGrid& grid, int k_count);

}  // namespace cgfit
