#pragma once

#include <string>
#include <vector>

#include "cgfit/types.hpp"

namespace cgfit {

enum class BasisKind { monomial, linear_bspline, cubic_bspline };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& name);

// Function basis for drift and potential models: monomials 1, x, x^2, ... on
// the whole line, or clamped uniform B-splines (degree 1 or 3) supported on
// [r_min, r_max].  Spline evaluation outside the domain is a DomainError;
// extension policy (zero, clamp, ...) is the caller's decision.
class BasisSet {
 public:
  static BasisSet monomial(int size);
  static BasisSet linear_bspline(int size, double r_min, double r_max);
  static BasisSet cubic_bspline(int size, double r_min, double r_max);
  // Rebuild from a stored knot vector (validated against kind and size).
  static BasisSet from_knots(BasisKind kind, int size, double r_min, double r_max,
                             std::vector<double> knots);

  BasisKind kind() const { return kind_; }
  int size() const { return size_; }
  int degree() const { return degree_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  // Full clamped knot vector of length size + degree + 1; empty for monomials.
  const std::vector<double>& knots() const { return knots_; }

  // phi(x) into out (resized to size()).
  void eval(double x, Vec& out) const;
  // phi'(x); for the linear kind this is the one-sided (right) derivative at
  // interior knots and the left derivative at r_max.
  void eval_deriv(double x, Vec& out) const;
  Vec eval(double x) const;
  Vec eval_deriv(double x) const;

  // Sum_k theta_k phi_k(x).
  double model(double x, const Vec& theta) const;
  double model_deriv(double x, const Vec& theta) const;

  bool operator==(const BasisSet&) const = default;

 private:
  BasisSet() = default;
  int find_span(double x) const;
  void check_domain(double x) const;
  // Non-zero basis values (degree+1 of them) on the span containing x; returns
  // the span index.  values must hold at least degree+1 doubles.
  int local_values(double x, double* values) const;
  int local_derivs(double x, double* derivs) const;

  BasisKind kind_ = BasisKind::monomial;
  int size_ = 0;
  int degree_ = 0;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  std::vector<double> knots_;
};

// Potential whose negative derivative is the fitted drift: for a monomial
// basis, U(x) = -sum_k theta_k x^k / k, pinned to U(0) = 0.  Only monomial
// bases are supported; spline models parameterize the potential directly.
double potential(const BasisSet& basis, const Vec& theta, double x);

}  // namespace cgfit
