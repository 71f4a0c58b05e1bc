#include "cgfit/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <string>

#include "cgfit/errors.hpp"

namespace cgfit {

LinearSystem::LinearSystem(Index k) {
  if (k < 1) throw ArgumentError("linear system needs at least one column");
  sum_gram_ = Mat::Zero(k, k);
  sum_moment_ = Vec::Zero(k);
}

void LinearSystem::add_row(const Vec& phi, double y, double weight) {
  if (phi.size() != sum_gram_.rows()) throw ArgumentError("row length does not match system");
  if (!(weight > 0.0)) throw ArgumentError("row weight must be positive");
  sum_gram_.selfadjointView<Eigen::Lower>().rankUpdate(phi, weight);
  sum_moment_ += weight * y * phi;
  weight_sum_ += weight;
  ++n_rows_;
}

void LinearSystem::add(const LinearSystem& other) {
  if (other.k() != k()) throw ArgumentError("cannot combine systems of different size");
  sum_gram_ += other.sum_gram_;
  sum_moment_ += other.sum_moment_;
  weight_sum_ += other.weight_sum_;
  n_rows_ += other.n_rows_;
}

Mat LinearSystem::gram() const {
  if (!(weight_sum_ > 0.0)) throw ArgumentError("empty linear system");
  Mat g = Mat(sum_gram_.selfadjointView<Eigen::Lower>());
  return g / weight_sum_;
}

Vec LinearSystem::moment() const {
  if (!(weight_sum_ > 0.0)) throw ArgumentError("empty linear system");
  return sum_moment_ / weight_sum_;
}

namespace {

Eigen::SelfAdjointEigenSolver<Mat> checked_eigen(const Mat& m, double rcond_tol,
                                                 const char* what) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(m);
  if (eig.info() != Eigen::Success) throw ConditioningError(std::string(what) + ": eigensolve failed");
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo <= rcond_tol * hi)
    throw ConditioningError(std::string(what) + ": smallest eigenvalue " + std::to_string(lo) +
                            " below " + std::to_string(rcond_tol) + " * largest (" +
                            std::to_string(hi) + ")");
  return eig;
}

}  // namespace

Vec solve_normal_equations(const Mat& gram, const Vec& moment, double rcond_tol) {
  if (gram.rows() != gram.cols() || gram.rows() != moment.size())
    throw ArgumentError("normal equation shapes disagree");
  const auto eig = checked_eigen(gram, rcond_tol, "normal equations");
  const Vec theta =
      eig.eigenvectors() *
      (eig.eigenvectors().transpose() * moment).cwiseQuotient(eig.eigenvalues());
  // Residual check: the eigensolve should reproduce the moment to roundoff
  // amplified by the condition number.
  const double scale = moment.norm();
  const double residual = (gram * theta - moment).norm();
  const double cond = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
  if (scale > 0.0 && residual > 1e-8 * cond * scale)
    throw ConditioningError("normal equations: residual " + std::to_string(residual) +
                            " exceeds tolerance for condition number " + std::to_string(cond));
  return theta;
}

Vec solve_normal_equations(const LinearSystem& sys, double rcond_tol) {
  return solve_normal_equations(sys.gram(), sys.moment(), rcond_tol);
}

Mat spd_inverse(const Mat& m, double rcond_tol) {
  if (m.rows() != m.cols()) throw ArgumentError("spd_inverse needs a square matrix");
  const auto eig = checked_eigen(m, rcond_tol, "spd inverse");
  return eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace cgfit
