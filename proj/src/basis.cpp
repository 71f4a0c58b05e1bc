#include "cgfit/basis.hpp"

#include <algorithm>
#include <cmath>

#include "cgfit/errors.hpp"

namespace cgfit {

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::monomial: return "monomial";
    case BasisKind::linear_bspline: return "linear-bspline";
    case BasisKind::cubic_bspline: return "cubic-bspline";
  }
  throw ArgumentError("unknown basis kind");
}

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "monomial") return BasisKind::monomial;
  if (name == "linear-bspline") return BasisKind::linear_bspline;
  if (name == "cubic-bspline") return BasisKind::cubic_bspline;
  throw ParseError("unknown basis kind '" + name + "'");
}

namespace {

// Clamped uniform knot vector: degree+1 copies of each end, uniform interior.
std::vector<double> clamped_uniform_knots(int size, int degree, double lo, double hi) {
  const int segments = size - degree;  // number of polynomial pieces
  std::vector<double> t(static_cast<std::size_t>(size + degree + 1));
  for (int i = 0; i <= degree; ++i) {
    t[static_cast<std::size_t>(i)] = lo;
    t[static_cast<std::size_t>(size + i)] = hi;
  }
  for (int i = 1; i < segments; ++i)
    t[static_cast<std::size_t>(degree + i)] = lo + (hi - lo) * i / segments;
  return t;
}

void check_spline_args(int size, int degree, double r_min, double r_max) {
  if (size < degree + 1)
    throw ArgumentError("spline basis needs at least degree+1 functions, got " +
                        std::to_string(size));
  if (!(r_min < r_max)) throw ArgumentError("spline domain requires r_min < r_max");
  if (!std::isfinite(r_min) || !std::isfinite(r_max))
    throw ArgumentError("spline domain must be finite");
}

}  // namespace

BasisSet BasisSet::monomial(int size) {
  if (size < 1) throw ArgumentError("basis size must be positive");
  BasisSet b;
  b.kind_ = BasisKind::monomial;
  b.size_ = size;
  return b;
}

BasisSet BasisSet::linear_bspline(int size, double r_min, double r_max) {
  check_spline_args(size, 1, r_min, r_max);
  BasisSet b;
  b.kind_ = BasisKind::linear_bspline;
  b.size_ = size;
  b.degree_ = 1;
  b.r_min_ = r_min;
  b.r_max_ = r_max;
  b.knots_ = clamped_uniform_knots(size, 1, r_min, r_max);
  return b;
}

BasisSet BasisSet::cubic_bspline(int size, double r_min, double r_max) {
  check_spline_args(size, 3, r_min, r_max);
  BasisSet b;
  b.kind_ = BasisKind::cubic_bspline;
  b.size_ = size;
  b.degree_ = 3;
  b.r_min_ = r_min;
  b.r_max_ = r_max;
  b.knots_ = clamped_uniform_knots(size, 3, r_min, r_max);
  return b;
}

BasisSet BasisSet::from_knots(BasisKind kind, int size, double r_min, double r_max,
                              std::vector<double> knots) {
  if (kind == BasisKind::monomial) {
    if (!knots.empty()) throw ParseError("monomial basis carries no knots");
    return monomial(size);
  }
  const int degree = kind == BasisKind::linear_bspline ? 1 : 3;
  check_spline_args(size, degree, r_min, r_max);
  if (knots.size() != static_cast<std::size_t>(size + degree + 1))
    throw ParseError("knot vector has wrong length for basis size");
  if (!std::is_sorted(knots.begin(), knots.end()))
    throw ParseError("knot vector must be non-decreasing");
  if (knots.front() != r_min || knots.back() != r_max)
    throw ParseError("knot vector must span [r_min, r_max]");
  BasisSet b;
  b.kind_ = kind;
  b.size_ = size;
  b.degree_ = degree;
  b.r_min_ = r_min;
  b.r_max_ = r_max;
  b.knots_ = std::move(knots);
  return b;
}

void BasisSet::check_domain(double x) const {
  if (x < r_min_ || x > r_max_)
    throw DomainError("x = " + std::to_string(x) + " outside basis domain [" +
                      std::to_string(r_min_) + ", " + std::to_string(r_max_) + "]");
}

// Index s with knots[s] <= x < knots[s+1], clamped so x = r_max lands in the
// last non-empty span.  Valid spans are degree .. size-1.
int BasisSet::find_span(double x) const {
  const int hi_span = size_ - 1;
  if (x >= knots_[static_cast<std::size_t>(size_)]) return hi_span;
  int lo = degree_, hi = hi_span;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (knots_[static_cast<std::size_t>(mid)] <= x)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

// Cox-de Boor triangle: the degree+1 basis functions that are non-zero on the
// span containing x (indices span-degree .. span).
int BasisSet::local_values(double x, double* values) const {
  check_domain(x);
  const int s = find_span(x);
  const int p = degree_;
  double left[4], right[4];
  values[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - knots_[static_cast<std::size_t>(s + 1 - j)];
    right[j] = knots_[static_cast<std::size_t>(s + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = values[r] / (right[r + 1] + left[j - r]);
      values[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    values[j] = saved;
  }
  return s;
}

// Derivatives of the non-zero basis functions on the span of x: degree p-1
// values first, then phi'_{k,p} = p [N_{k,p-1}/(t_{k+p}-t_k)
//                                   - N_{k+1,p-1}/(t_{k+p+1}-t_{k+1})].
int BasisSet::local_derivs(double x, double* derivs) const {
  check_domain(x);
  const int s = find_span(x);
  const int p = degree_;
  double values[4], left[4], right[4];
  values[0] = 1.0;
  for (int j = 1; j <= p - 1; ++j) {
    left[j] = x - knots_[static_cast<std::size_t>(s + 1 - j)];
    right[j] = knots_[static_cast<std::size_t>(s + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = values[r] / (right[r + 1] + left[j - r]);
      values[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    values[j] = saved;
  }
  auto low_value = [&](int k) {  // phi_{k,p-1}(x), zero off the span
    const int offset = k - (s - p + 1);
    return (offset >= 0 && offset <= p - 1) ? values[offset] : 0.0;
  };
  for (int k = s - p; k <= s; ++k) {
    double d = 0.0;
    const double den_a = knots_[static_cast<std::size_t>(k + p)] - knots_[static_cast<std::size_t>(k)];
    const double den_b =
        knots_[static_cast<std::size_t>(k + p + 1)] - knots_[static_cast<std::size_t>(k + 1)];
    if (den_a > 0.0) d += low_value(k) / den_a;
    if (den_b > 0.0) d -= low_value(k + 1) / den_b;
    derivs[k - (s - p)] = p * d;
  }
  return s;
}

void BasisSet::eval(double x, Vec& out) const {
  out.setZero(size_);
  if (kind_ == BasisKind::monomial) {
    double power = 1.0;
    for (int k = 0; k < size_; ++k) {
      out[k] = power;
      power *= x;
    }
    return;
  }
  double values[4];
  const int s = local_values(x, values);
  for (int r = 0; r <= degree_; ++r) out[s - degree_ + r] = values[r];
}

void BasisSet::eval_deriv(double x, Vec& out) const {
  out.setZero(size_);
  if (kind_ == BasisKind::monomial) {
    double power = 1.0;
    for (int k = 1; k < size_; ++k) {
      out[k] = k * power;
      power *= x;
    }
    return;
  }
  double derivs[4];
  const int s = local_derivs(x, derivs);
  for (int r = 0; r <= degree_; ++r) out[s - degree_ + r] = derivs[r];
}

Vec BasisSet::eval(double x) const {
  Vec out;
  eval(x, out);
  return out;
}

Vec BasisSet::eval_deriv(double x) const {
  Vec out;
  eval_deriv(x, out);
  return out;
}

double BasisSet::model(double x, const Vec& theta) const {
  if (theta.size() != size_) throw ArgumentError("coefficient count does not match basis size");
  if (kind_ == BasisKind::monomial) {
    // Horner form.
    double acc = 0.0;
    for (int k = size_ - 1; k >= 0; --k) acc = acc * x + theta[k];
    return acc;
  }
  double values[4];
  const int s = local_values(x, values);
  double acc = 0.0;
  for (int r = 0; r <= degree_; ++r) acc += values[r] * theta[s - degree_ + r];
  return acc;
}

double BasisSet::model_deriv(double x, const Vec& theta) const {
  if (theta.size() != size_) throw ArgumentError("coefficient count does not match basis size");
  if (kind_ == BasisKind::monomial) {
    double acc = 0.0;
    for (int k = size_ - 1; k >= 1; --k) acc = acc * x + k * theta[k];
    return acc;
  }
  double derivs[4];
  const int s = local_derivs(x, derivs);
  double acc = 0.0;
  for (int r = 0; r <= degree_; ++r) acc += derivs[r] * theta[s - degree_ + r];
  return acc;
}

double potential(const BasisSet& basis, const Vec& theta, double x) {
  if (basis.kind() != BasisKind::monomial)
    throw UnsupportedError("potential(): antiderivative only defined for monomial bases");
  if (theta.size() != basis.size())
    throw ArgumentError("coefficient count does not match basis size");
  // -integral_0^x sum_k theta_k s^{k-1} ds = -sum_k theta_k x^k / k.
  double acc = 0.0;
  for (int k = basis.size(); k >= 1; --k) acc = acc * x + theta[k - 1] / k;
  return -acc * x;
}

}  // namespace cgfit
