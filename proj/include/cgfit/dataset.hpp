#pragma once

#include <string>
#include <vector>

#include "cgfit/types.hpp"

namespace cgfit {

// Unordered samples, one per row.  cg_forces, when present, holds the matched
// coarse-grained force observations used by force matching.
struct IidDataset {
  Mat states;     // N x D
  Mat cg_forces;  // N x d, 0 x 0 when absent
  std::string label;

  bool has_forces() const { return cg_forces.size() > 0; }
  Index size() const { return states.rows(); }
  Index dim() const { return states.cols(); }
  void validate() const;  // shape agreement, finite entries
};

// Recorded paths sampled on a fixed interval h.  Paths may differ in length
// but share the state dimension.  `stationary` records whether the producer
// already discarded the burn-in transient.
struct TimeSeriesDataset {
  std::vector<Mat> paths;  // each N_t x D
  double h = 0.0;
  bool stationary = true;

  std::size_t n_paths() const { return paths.size(); }
  Index dim() const { return paths.empty() ? 0 : paths.front().cols(); }
  // Total transitions, sum of (N_t - 1) over paths.
  std::size_t n_transitions() const;
  void validate() const;
};

enum class CgMapKind { selection, matrix };

// Coarse-graining map x -> Pi x: either a coordinate selection or a linear
// map with non-negative weights (local averaging).  Rows of the weight matrix
// must have positive sum.
class CgMap {
 public:
  static CgMap selection(std::vector<Index> coordinates, Index dim_in);
  static CgMap matrix(Mat weights);

  CgMapKind kind() const { return kind_; }
  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }
  const std::vector<Index>& coordinates() const { return coordinates_; }
  const Mat& weights() const { return weights_; }

  Vec apply(const Vec& x) const;

 private:
  CgMap() = default;
  CgMapKind kind_ = CgMapKind::selection;
  Index dim_in_ = 0;
  Index dim_out_ = 0;
  std::vector<Index> coordinates_;
  Mat weights_;
};

// Projects every sample through the map; forces, which already live in the
// coarse space, are carried over unchanged.
IidDataset cg_project(const IidDataset& data, const CgMap& map);
TimeSeriesDataset cg_project(const TimeSeriesDataset& data, const CgMap& map);

}  // namespace cgfit
