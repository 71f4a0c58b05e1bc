#pragma once

#include <cstddef>

#include "cgfit/types.hpp"

namespace cgfit {

// Streaming normal equations for weighted linear least squares
//   min_theta sum_i w_i |y_i - phi_i . theta|^2.
// Accumulates weighted sums; gram() and moment() are normalized by the total
// weight, so systems assembled in chunks combine exactly via add().
class LinearSystem {
 public:
  explicit LinearSystem(Index k);

  void add_row(const Vec& phi, double y, double weight = 1.0);
  void add(const LinearSystem& other);

  Index k() const { return sum_gram_.rows(); }
  std::size_t n_rows() const { return n_rows_; }
  double weight_sum() const { return weight_sum_; }
  Mat gram() const;    // sum w phi phi^T / sum w   (symmetric PSD)
  Vec moment() const;  // sum w phi y / sum w

 private:
  Mat sum_gram_;
  Vec sum_moment_;
  double weight_sum_ = 0.0;
  std::size_t n_rows_ = 0;
};

// Solves gram * theta = moment through a symmetric eigendecomposition.
// Throws ConditioningError when the smallest eigenvalue falls below
// rcond_tol * largest (message carries the eigenvalue), and when the
// reconstructed residual exceeds what the conditioning predicts.
Vec solve_normal_equations(const LinearSystem& sys, double rcond_tol = 1e-12);
Vec solve_normal_equations(const Mat& gram, const Vec& moment, double rcond_tol = 1e-12);

// Inverse of a symmetric positive definite matrix with the same conditioning
// guard; used for sandwich covariance assembly.
Mat spd_inverse(const Mat& m, double rcond_tol = 1e-12);

}  // namespace cgfit
