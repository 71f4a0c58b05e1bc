#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cgfit/basis.hpp"
#include "cgfit/dataset.hpp"
#include "cgfit/estimators.hpp"
#include "cgfit/pairfm.hpp"
#include "cgfit/types.hpp"
#include "cgfit/uq.hpp"

namespace cgfit {

// Library version stamped into machine-readable outputs.
const char* version();

// All machine-readable text formats carry doubles with 17 significant digits,
// enough to round-trip the exact value.

// Unordered samples: header x_1..x_D[,f_1..f_d], one sample per row.
void write_iid_csv(const IidDataset& data, const std::string& path);
IidDataset read_iid_csv(const std::string& path);

// Recorded paths: a "# h=<real>" metadata line, then header
// path_id,step,x_1..x_D with rows grouped by path and steps increasing.
void write_timeseries_csv(const TimeSeriesDataset& data, const std::string& path);
TimeSeriesDataset read_timeseries_csv(const std::string& path);

// Basis description: {"kind", "K", "domain", "knots"}.
std::string basis_to_json(const BasisSet& basis);
BasisSet basis_from_json(const std::string& text);
void write_basis_json(const BasisSet& basis, const std::string& path);
BasisSet read_basis_json(const std::string& path);

// Fit result bundled with the basis that interprets the coefficients.
void write_estimate_json(const ParamEstimate& estimate, const BasisSet& basis,
                         const std::string& path);
std::pair<ParamEstimate, BasisSet> read_estimate_json(const std::string& path);

// Interval table: param,estimate,variance,lower,upper,method,alpha.
void write_report_csv(const ConfidenceReport& report, const std::string& path);
void write_report_json(const ConfidenceReport& report, const std::string& path);

// Pointwise band: grid,lower,estimate,upper.
void write_band_csv(const QoiBand& band, const std::string& path);

// Generic two-column curve (density grids, std curves, ...).
void write_curve_csv(const std::string& x_name, const std::string& y_name, const Vec& x,
                     const Vec& y, const std::string& path);

// Pair potential curve: r,u or r,u,lower,upper.
void write_potential_csv(const Vec& r, const Vec& u, const std::string& path);
void write_potential_csv(const QoiBand& band, const std::string& path);

// Particle snapshots: per-config block comment "# config=<i> box=<L>" with
// rows I,x,y,z,fx,fy,fz.
void write_pair_configs_csv(const std::vector<ParticleConfig>& configs, const std::string& path);
std::vector<ParticleConfig> read_pair_configs_csv(const std::string& path);

}  // namespace cgfit
