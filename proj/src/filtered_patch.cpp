#include "osc/filtered_patch.hpp"
#include <numeric>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace osc {

Expr VectorField::apply(const Expr& f) const {
  Expr out(f.nvars());
  for (size_t k = 0; k < coeffs.size(); ++k)
    out += coeffs[k] * f.derivative(static_cast<int>(k));
  return out;
}

VectorField bracket(const VectorField& X, const VectorField& Y) {
  VectorField out;
  out.coeffs.reserve(X.coeffs.size());
  for (size_t k = 0; k < X.coeffs.size(); ++k)
    out.coeffs.push_back(X.apply(Y.coeffs[k]) - Y.apply(X.coeffs[k]));
  return out;
}

namespace {

Expr expr_det(const std::vector<std::vector<Expr>>& m) {
  size_t n = m.size();
  if (n == 1) return m[0][0];
  Expr acc(m[0][0].nvars());
  for (size_t col = 0; col < n; ++col) {
    std::vector<std::vector<Expr>> minor;
    minor.reserve(n - 1);
    for (size_t r = 1; r < n; ++r) {
      std::vector<Expr> row;
      for (size_t c = 0; c < n; ++c)
        if (c != col) row.push_back(m[r][c]);
      minor.push_back(std::move(row));
    }
    Expr term = m[0][col] * expr_det(minor);
    acc += (col % 2 == 0) ? term : -term;
  }
  return acc;
}

}  // namespace

FilteredPatch::FilteredPatch(std::vector<VectorField> frame,
                             std::vector<int> orders, int depth, bool periodic,
                             double injectivity_radius, double domain_radius,
                             std::string name)
    : dim_(static_cast<int>(frame.size())),
      depth_(depth),
      periodic_(periodic),
      injectivity_radius_(injectivity_radius),
      domain_radius_(domain_radius),
      name_(std::move(name)),
      frame_(std::move(frame)),
      orders_(std::move(orders)) {
  if (dim_ == 0) throw MalformedInput("empty frame");
  if (static_cast<int>(orders_.size()) != dim_)
    throw MalformedInput("orders list does not match frame size");
  for (const auto& X : frame_)
    if (static_cast<int>(X.coeffs.size()) != dim_)
      throw MalformedInput("vector field component count != patch dimension");
  for (int d : orders_)
    if (d <= 0) throw MalformedInput("filtration orders must be positive");
}

void FilteredPatch::compute_bracket_coeffs() const {
  if (coeffs_ready_) return;
  // frame matrix A with A[k][j] = coeff of d/dx_k in X_j
  std::vector<std::vector<Expr>> A(dim_, std::vector<Expr>(dim_, Expr(dim_)));
  for (int j = 0; j < dim_; ++j)
    for (int k = 0; k < dim_; ++k) A[k][j] = frame_[j].coeffs[k];
  frame_det_ = expr_det(A);
  if (!frame_det_.is_constant())
    throw DomainError(
        "frame determinant is not constant; exact frame expansion "
        "unsupported for this patch");
  Rational det = frame_det_.constant_value();
  if (det == 0) throw DomainError("degenerate frame: determinant vanishes");
  Rational inv_det = Rational(1) / det;

  bracket_coeffs_.assign(static_cast<size_t>(dim_) * dim_ * dim_, Expr(dim_));
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) {
      VectorField W = bracket(frame_[i], frame_[j]);
      // Cramer: coefficient of X_k is det(A with column k replaced by W)/det
      for (int k = 0; k < dim_; ++k) {
        auto Ak = A;
        for (int r = 0; r < dim_; ++r) Ak[r][k] = W.coeffs[r];
        Expr ck = expr_det(Ak).scaled(inv_det);
        bracket_coeffs_[(static_cast<size_t>(i) * dim_ + j) * dim_ + k] = ck;
        bracket_coeffs_[(static_cast<size_t>(j) * dim_ + i) * dim_ + k] = -ck;
      }
    }
  }
  coeffs_ready_ = true;
}

const Expr& FilteredPatch::bracket_coeff(int i, int j, int k) const {
  compute_bracket_coeffs();
  return bracket_coeffs_[(static_cast<size_t>(i) * dim_ + j) * dim_ + k];
}

ValidationReport FilteredPatch::check_filtration() const {
  std::ostringstream msg;
  int max_order = *std::max_element(orders_.begin(), orders_.end());
  if (max_order != depth_) {
    msg << "declared depth " << depth_ << " but frame orders reach "
        << max_order << ": X_" << max_order << "-order fields leave H^"
        << depth_;
    return {false, msg.str()};
  }
  try {
    compute_bracket_coeffs();
  } catch (const DomainError& e) {
    return {false, e.what()};
  }
  // pointwise independence on a sample grid
  double span = periodic_ ? 3.14159265358979 : 1.0;
  std::vector<double> pt(dim_, 0.0);
  for (int sample = 0; sample < 27; ++sample) {
    int s = sample;
    for (int k = 0; k < dim_; ++k) {
      pt[k] = span * ((s % 3) - 1);
      s /= 3;
    }
    if (std::abs(frame_det_.eval(pt)) < 1e-8)
      return {false, "degenerate frame at sample point"};
  }
  // filtration closure
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) {
        if (orders_[k] <= orders_[i] + orders_[j]) continue;
        if (!bracket_coeff(i, j, k).is_zero()) {
          msg << "filtration violated: [X_" << i << ", X_" << j
              << "] has a nonzero component on X_" << k << " of order "
              << orders_[k] << " > " << orders_[i] + orders_[j];
          return {false, msg.str()};
        }
      }
  return {true, ""};
}

GradedLieAlgebra FilteredPatch::osculating_at(const RationalVec& x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw DomainError("point dimension mismatch");
  if (domain_radius_ > 0)
    for (const Rational& c : x)
      if (abs(c) > Rational(domain_radius_))
        throw DomainError("point outside patch domain");
  compute_bracket_coeffs();
  GradedLieAlgebra alg(orders_, name_.empty() ? "osculating" : name_ + "@x");
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) {
        if (orders_[k] != orders_[i] + orders_[j]) continue;
        Rational v = bracket_coeff(i, j, k).eval_rational(x);
        if (v != 0) alg.set_bracket(i, j, k, v);
      }
  return alg;
}

double FilteredPatch::graded_norm(const std::vector<double>& xi) const {
  long L = 1;
  for (int d : orders_) L = std::lcm(L, static_cast<long>(d));
  double s = 0;
  for (int j = 0; j < dim_; ++j)
    s += std::pow(std::abs(xi[j]), 2.0 * L / orders_[j]);
  return std::pow(s, 1.0 / (2.0 * L));
}

std::vector<std::vector<double>> FilteredPatch::frame_matrix(
    const std::vector<double>& x) const {
  std::vector<std::vector<double>> A(dim_, std::vector<double>(dim_));
  for (int k = 0; k < dim_; ++k)
    for (int j = 0; j < dim_; ++j) A[k][j] = frame_[j].coeffs[k].eval(x);
  return A;
}

void FilteredPatch::check_point(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw DomainError("point dimension mismatch");
  if (domain_radius_ > 0)
    for (double c : x)
      if (std::abs(c) > domain_radius_)
        throw DomainError("point outside patch domain");
}

FilteredPatch::ChartPoint FilteredPatch::exp_chart(
    const std::vector<double>& x, const std::vector<double>& xi,
    double t) const {
  check_point(x);
  if (static_cast<int>(xi.size()) != dim_)
    throw DomainError("fibre coordinate dimension mismatch");
  // delta_t xi, signed powers of t
  std::vector<double> v(dim_);
  for (int j = 0; j < dim_; ++j) v[j] = std::pow(t, orders_[j]) * xi[j];
  std::vector<double> vabs(dim_);
  for (int j = 0; j < dim_; ++j)
    vabs[j] = std::pow(std::abs(t), orders_[j]) * xi[j];
  if (t != 0 && injectivity_radius_ > 0 &&
      graded_norm(vabs) > injectivity_radius_)
    throw DomainError("outside injectivity domain of the exponential chart");
  if (t == 0) return {x, xi, 0.0};
  // flat connection: time-1 flow of the frozen field -psi(delta_t xi)
  auto A = frame_matrix(x);
  std::vector<double> y = x;
  for (int k = 0; k < dim_; ++k)
    for (int j = 0; j < dim_; ++j) y[k] -= A[k][j] * v[j];
  return {x, y, t};
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

VectorField coordinate_field(int n, int k) {
  VectorField X;
  X.coeffs.assign(n, Expr(n));
  X.coeffs[k] = Expr::constant(n, 1);
  return X;
}

std::vector<VectorField> heisenberg_frame() {
  const int n = 3;
  VectorField X = coordinate_field(n, 0);
  X.coeffs[2] = Expr::variable(n, 1).scaled(Rational(-1, 2));  // -(y/2) dz
  VectorField Y = coordinate_field(n, 1);
  Y.coeffs[2] = Expr::variable(n, 0).scaled(Rational(1, 2));  // (x/2) dz
  VectorField Z = coordinate_field(n, 2);
  return {X, Y, Z};
}

}  // namespace

FilteredPatch trivial_patch(int n, bool periodic) {
  std::vector<VectorField> frame;
  for (int k = 0; k < n; ++k) frame.push_back(coordinate_field(n, k));
  return FilteredPatch(std::move(frame), std::vector<int>(n, 1), 1, periodic,
                       periodic ? 1.5 : 10.0, 0.0, "trivial");
}

FilteredPatch heisenberg_patch() {
  return FilteredPatch(heisenberg_frame(), {1, 1, 2}, 2, false, 4.0, 0.0,
                       "heis");
}

FilteredPatch heisenberg_bad_patch() {
  return FilteredPatch(heisenberg_frame(), {1, 1, 2}, 1, false, 4.0, 0.0,
                       "heis-depth1");
}

FilteredPatch engel_patch() {
  const int n = 4;
  VectorField X1 = coordinate_field(n, 0);
  VectorField X2 = coordinate_field(n, 1);
  X2.coeffs[2] = Expr::variable(n, 0);  // x1 d3
  X2.coeffs[3] =
      (Expr::variable(n, 0) * Expr::variable(n, 0)).scaled(Rational(1, 2));
  VectorField X3 = coordinate_field(n, 2);
  X3.coeffs[3] = Expr::variable(n, 0);  // x1 d4
  VectorField X4 = coordinate_field(n, 3);
  return FilteredPatch({X1, X2, X3, X4}, {1, 1, 2, 3}, 3, false, 4.0, 0.0,
                       "engel");
}

}  // namespace osc
