#include "cgfit/density.hpp"

#include <algorithm>
#include <cmath>

#include "cgfit/errors.hpp"
#include "cgfit/rng.hpp"

namespace cgfit {

namespace {

// Trapezoid weights on a uniform grid: dx * (1/2, 1, ..., 1, 1/2).
double trapezoid(const Vec& values, double dx) {
  const Index n = values.size();
  double acc = 0.5 * (values[0] + values[n - 1]);
  for (Index i = 1; i + 1 < n; ++i) acc += values[i];
  return acc * dx;
}

}  // namespace

double DensityGrid::trapezoid_mass() const { return trapezoid(pdf, spacing()); }

double DensityGrid::mean(const std::function<double(double)>& f) const {
  Vec vals(x.size());
  for (Index i = 0; i < x.size(); ++i) vals[i] = f(x[i]) * pdf[i];
  return trapezoid(vals, spacing());
}

DensityGrid cg_invariant_density(const BasisSet& basis, const Vec& theta, double half_width,
                                 Index n_points) {
  if (!(half_width > 0.0)) throw ArgumentError("density half_width must be positive");
  if (n_points < 3) throw ArgumentError("density grid needs at least 3 points");

  DensityGrid grid;
  grid.x = Vec::LinSpaced(n_points, -half_width, half_width);
  // Work with the log weight and subtract its maximum before exponentiating,
  // so steep potentials cannot overflow.
  Vec log_w(n_points);
  for (Index i = 0; i < n_points; ++i) log_w[i] = -2.0 * potential(basis, theta, grid.x[i]);
  const double peak = log_w.maxCoeff();
  Vec w = (log_w.array() - peak).exp();

  // Confinement check: the weight must have decayed at both ends, otherwise
  // the density is not integrable on the line and the grid does not hold it.
  const double edge = std::max(w[0], w[n_points - 1]);
  if (edge > 1e-12)
    throw IntegrabilityError("density weight at domain edge is " + std::to_string(edge) +
                             " of the peak; potential is not confining on [-" +
                             std::to_string(half_width) + ", " + std::to_string(half_width) + "]");

  const double dx = grid.x[1] - grid.x[0];
  const double mass = trapezoid(w, dx);
  grid.log_z = peak + std::log(mass);
  grid.pdf = w / mass;
  return grid;
}

Vec gibbs_statistics(double x, int k_count) {
  Vec g(k_count);
  double power = x;
  for (int k = 1; k <= k_count; ++k) {
    g[k - 1] = power / k;
    power *= x;
  }
  return g;
}

GibbsMoments gibbs_moments(const DensityGrid& grid, int k_count) {
  const Index n = grid.x.size();
  const double dx = grid.spacing();
  Vec mean = Vec::Zero(k_count);
  Mat second = Mat::Zero(k_count, k_count);
  for (Index i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1 ? 0.5 : 1.0) * grid.pdf[i] * dx;
    const Vec g = gibbs_statistics(grid.x[i], k_count);
    mean += w * g;
    second.selfadjointView<Eigen::Lower>().rankUpdate(g, w);
  }
  GibbsMoments m;
  m.mean = mean;
  m.cov = Mat(second.selfadjointView<Eigen::Lower>()) - mean * mean.transpose();
  return m;
}

IidDataset sample_density(const DensityGrid& grid, std::size_t n, std::uint64_t seed) {
  const Index m = grid.x.size();
  if (m < 2) throw ArgumentError("density grid too small to sample");
  const double dx = grid.spacing();
  // Cumulative trapezoid CDF; renormalized so the last entry is exactly 1.
  Vec cdf(m);
  cdf[0] = 0.0;
  for (Index i = 1; i < m; ++i) cdf[i] = cdf[i - 1] + 0.5 * (grid.pdf[i - 1] + grid.pdf[i]) * dx;
  const double total = cdf[m - 1];
  if (!(total > 0.0)) throw ArgumentError("density grid has no mass");
  cdf /= total;

  Rng rng(seed);
  IidDataset out;
  out.states.resize(static_cast<Index>(n), 1);
  out.label = "density-sample";
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf.data(), cdf.data() + m, u);
    Index hi = static_cast<Index>(it - cdf.data());
    hi = std::clamp<Index>(hi, 1, m - 1);
    const double span = cdf[hi] - cdf[hi - 1];
    const double frac = span > 0.0 ? (u - cdf[hi - 1]) / span : 0.5;
    out.states(static_cast<Index>(i), 0) = grid.x[hi - 1] + frac * dx;
  }
  return out;
}

}  // namespace cgfit
