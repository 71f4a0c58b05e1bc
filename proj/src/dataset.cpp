#include "cgfit/dataset.hpp"

#include <cmath>

#include "cgfit/errors.hpp"

namespace cgfit {

void IidDataset::validate() const {
  if (states.rows() == 0) throw ArgumentError("dataset is empty");
  if (has_forces() && cg_forces.rows() != states.rows())
    throw ArgumentError("force rows do not match state rows");
  if (!states.allFinite() || (has_forces() && !cg_forces.allFinite()))
    throw ArgumentError("dataset contains non-finite entries");
}

std::size_t TimeSeriesDataset::n_transitions() const {
  std::size_t total = 0;
  for (const auto& p : paths)
    if (p.rows() > 1) total += static_cast<std::size_t>(p.rows() - 1);
  return total;
}

void TimeSeriesDataset::validate() const {
  if (paths.empty()) throw ArgumentError("time series has no paths");
  if (!(h > 0.0)) throw ArgumentError("recording interval h must be positive");
  const Index d = paths.front().cols();
  for (const auto& p : paths) {
    if (p.cols() != d) throw ArgumentError("paths disagree on state dimension");
    if (p.rows() < 2) throw ArgumentError("each path needs at least two records");
    if (!p.allFinite()) throw ArgumentError("path contains non-finite entries");
  }
}

CgMap CgMap::selection(std::vector<Index> coordinates, Index dim_in) {
  if (coordinates.empty()) throw ArgumentError("selection map needs at least one coordinate");
  for (Index c : coordinates)
    if (c < 0 || c >= dim_in) throw ArgumentError("selection coordinate out of range");
  CgMap m;
  m.kind_ = CgMapKind::selection;
  m.dim_in_ = dim_in;
  m.dim_out_ = static_cast<Index>(coordinates.size());
  m.coordinates_ = std::move(coordinates);
  return m;
}

CgMap CgMap::matrix(Mat weights) {
  if (weights.rows() == 0 || weights.cols() == 0)
    throw ArgumentError("weight matrix must be non-empty");
  for (Index i = 0; i < weights.rows(); ++i) {
    double row_sum = 0.0;
    for (Index j = 0; j < weights.cols(); ++j) {
      if (weights(i, j) < 0.0) throw ArgumentError("weight matrix entries must be non-negative");
      row_sum += weights(i, j);
    }
    if (!(row_sum > 0.0)) throw ArgumentError("weight matrix rows must have positive sum");
  }
  CgMap m;
  m.kind_ = CgMapKind::matrix;
  m.dim_in_ = weights.cols();
  m.dim_out_ = weights.rows();
  m.weights_ = std::move(weights);
  return m;
}

Vec CgMap::apply(const Vec& x) const {
  if (x.size() != dim_in_) throw ArgumentError("state dimension does not match map input");
  if (kind_ == CgMapKind::selection) {
    Vec out(dim_out_);
    for (Index k = 0; k < dim_out_; ++k) out[k] = x[coordinates_[static_cast<std::size_t>(k)]];
    return out;
  }
  return weights_ * x;
}

namespace {

Mat project_rows(const Mat& rows, const CgMap& map) {
  if (rows.cols() != map.dim_in())
    throw ArgumentError("state dimension does not match map input");
  if (map.kind() == CgMapKind::selection) {
    Mat out(rows.rows(), map.dim_out());
    for (Index k = 0; k < map.dim_out(); ++k)
      out.col(k) = rows.col(map.coordinates()[static_cast<std::size_t>(k)]);
    return out;
  }
  return rows * map.weights().transpose();
}

}  // namespace

IidDataset cg_project(const IidDataset& data, const CgMap& map) {
  IidDataset out;
  out.states = project_rows(data.states, map);
  out.cg_forces = data.cg_forces;
  out.label = data.label;
  return out;
}

TimeSeriesDataset cg_project(const TimeSeriesDataset& data, const CgMap& map) {
  TimeSeriesDataset out;
  out.h = data.h;
  out.stationary = data.stationary;
  out.paths.reserve(data.paths.size());
  for (const auto& p : data.paths) out.paths.push_back(project_rows(p, map));
  return out;
}

}  // namespace cgfit
