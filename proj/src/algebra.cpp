#include "abnn/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "abnn/error.hpp"
#include "abnn/rng.hpp"

namespace abnn {

Poly3::Poly3(std::size_t dx, std::size_t dy, std::size_t dz)
    : deg_{dx, dy, dz}, c_((dx + 1) * (dy + 1) * (dz + 1), 0.0) {}

Poly3 Poly3::constant(double c) {
  Poly3 p;
  p.c_[0] = c;
  return p;
}

Poly3 Poly3::variable(int axis) {
  std::array<std::size_t, 3> d{0, 0, 0};
  d[static_cast<std::size_t>(axis)] = 1;
  Poly3 p(d[0], d[1], d[2]);
  p.coeff(d[0], d[1], d[2]) = 1.0;
  return p;
}

double Poly3::coeff(std::size_t i, std::size_t j, std::size_t k) const {
  if (i > deg_[0] || j > deg_[1] || k > deg_[2]) return 0.0;
  return c_[index(i, j, k)];
}

double& Poly3::coeff(std::size_t i, std::size_t j, std::size_t k) { return c_[index(i, j, k)]; }

double Poly3::max_abs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

Poly3 Poly3::operator+(const Poly3& o) const {
  Poly3 r(std::max(deg_[0], o.deg_[0]), std::max(deg_[1], o.deg_[1]), std::max(deg_[2], o.deg_[2]));
  for (std::size_t i = 0; i <= r.deg_[0]; ++i)
    for (std::size_t j = 0; j <= r.deg_[1]; ++j)
      for (std::size_t k = 0; k <= r.deg_[2]; ++k) r.coeff(i, j, k) = coeff(i, j, k) + o.coeff(i, j, k);
  return r;
}

Poly3 Poly3::operator*(const Poly3& o) const {
  Poly3 r(deg_[0] + o.deg_[0], deg_[1] + o.deg_[1], deg_[2] + o.deg_[2]);
  for (std::size_t i = 0; i <= deg_[0]; ++i)
    for (std::size_t j = 0; j <= deg_[1]; ++j)
      for (std::size_t k = 0; k <= deg_[2]; ++k) {
        const double a = c_[index(i, j, k)];
        if (a == 0.0) continue;
        for (std::size_t u = 0; u <= o.deg_[0]; ++u)
          for (std::size_t v = 0; v <= o.deg_[1]; ++v)
            for (std::size_t w = 0; w <= o.deg_[2]; ++w)
              r.coeff(i + u, j + v, k + w) += a * o.c_[o.index(u, v, w)];
      }
  return r;
}

Poly3 Poly3::operator*(double c) const {
  Poly3 r = *this;
  for (double& v : r.c_) v *= c;
  return r;
}

double Poly3::max_abs_difference(const Poly3& a, const Poly3& b) {
  double m = 0.0;
  const std::size_t dx = std::max(a.deg_[0], b.deg_[0]);
  const std::size_t dy = std::max(a.deg_[1], b.deg_[1]);
  const std::size_t dz = std::max(a.deg_[2], b.deg_[2]);
  for (std::size_t i = 0; i <= dx; ++i)
    for (std::size_t j = 0; j <= dy; ++j)
      for (std::size_t k = 0; k <= dz; ++k) m = std::max(m, std::abs(a.coeff(i, j, k) - b.coeff(i, j, k)));
  return m;
}

SymPoly2::SymPoly2(std::vector<std::vector<double>> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw Error(Errc::InvalidArgument, "SymPoly2: empty coefficient grid");
  for (const auto& row : coeffs_)
    if (row.size() != coeffs_.size())
      throw Error(Errc::InvalidArgument, "SymPoly2: coefficient grid must be square");
}

bool SymPoly2::is_symmetric(double tol) const {
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = i + 1; j < coeffs_.size(); ++j)
      if (std::abs(coeffs_[i][j] - coeffs_[j][i]) > tol) return false;
  return true;
}

double SymPoly2::eval(double x, double y) const {
  double acc = 0.0;
  double xi = 1.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    double yj = 1.0;
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
      acc += coeffs_[i][j] * xi * yj;
      yj *= y;
    }
    xi *= x;
  }
  return acc;
}

Poly3 SymPoly2::compose(const Poly3& first, const Poly3& second) const {
  const std::size_t n = coeffs_.size();
  std::vector<Poly3> first_pow{Poly3::constant(1.0)};
  std::vector<Poly3> second_pow{Poly3::constant(1.0)};
  for (std::size_t i = 1; i < n; ++i) {
    first_pow.push_back(first_pow.back() * first);
    second_pow.push_back(second_pow.back() * second);
  }
  Poly3 acc = Poly3::constant(0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (coeffs_[i][j] != 0.0) acc = acc + first_pow[i] * second_pow[j] * coeffs_[i][j];
  return acc;
}

Witness search_witness(const SymPoly2& p) {
  Rng rng(0x5eedULL);
  Witness best;
  best.discrepancy = -1.0;
  for (int t = 0; t < 100; ++t) {
    const double x = uniform(rng, -2.0, 2.0);
    const double y = uniform(rng, -2.0, 2.0);
    const double z = uniform(rng, -2.0, 2.0);
    const double gap = std::abs(p.eval(p.eval(x, y), z) - p.eval(x, p.eval(y, z)));
    if (gap > best.discrepancy) best = Witness{x, y, z, gap};
  }
  return best;
}

AssociativityResult is_associative(const SymPoly2& p) {
  if (p.degree() > SymPoly2::kMaxDegree)
    throw Error(Errc::DegreeBoundExceeded,
                "is_associative: degree " + std::to_string(p.degree()) + " exceeds bound " +
                    std::to_string(SymPoly2::kMaxDegree));
  const Poly3 x = Poly3::variable(0), y = Poly3::variable(1), z = Poly3::variable(2);
  const Poly3 left = p.compose(p.compose(x, y), z);
  const Poly3 right = p.compose(x, p.compose(y, z));
  const double scale = std::max({1.0, left.max_abs(), right.max_abs()});
  AssociativityResult r;
  r.associative = Poly3::max_abs_difference(left, right) <= kCoeffTol * scale;
  if (!r.associative) r.witness = search_witness(p);
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string CanonicalForm::describe() const {
  switch (kind) {
    case Kind::Constant: return "Constant α=" + fmt(alpha);
    case Kind::Additive: return "Additive α=" + fmt(alpha);
    case Kind::Bilinear: return "Bilinear β=" + fmt(beta) + " γ=" + fmt(gamma);
  }
  return {};
}

Classification classify(const SymPoly2& p) {
  if (p.degree() > SymPoly2::kMaxDegree)
    throw Error(Errc::DegreeBoundExceeded, "classify: degree exceeds bound");
  if (!p.is_symmetric()) throw Error(Errc::NotSymmetric, "not symmetric");

  double scale = 1.0;
  for (const auto& row : p.grid())
    for (double v : row) scale = std::max(scale, std::abs(v));
  const double tol = kCoeffTol * scale;

  Classification out;
  auto reject = [&] {
    out.witness = search_witness(p);
    return out;
  };
  const std::size_t n = p.degree() + 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((i >= 2 || j >= 2) && std::abs(p.coeff(i, j)) > tol) return reject();

  const double alpha = p.coeff(0, 0);
  const double beta = n > 1 ? p.coeff(1, 0) : 0.0;
  const double gamma = n > 1 ? p.coeff(1, 1) : 0.0;
  if (std::abs(alpha * gamma - beta * (beta - 1.0)) > kCoeffTol * scale * scale) return reject();

  CanonicalForm form;
  form.alpha = alpha;
  form.beta = beta;
  form.gamma = gamma;
  if (std::abs(gamma) > tol) {
    form.kind = CanonicalForm::Kind::Bilinear;
  } else if (std::abs(beta) <= tol) {
    form.kind = CanonicalForm::Kind::Constant;
  } else if (std::abs(beta - 1.0) <= tol) {
    form.kind = CanonicalForm::Kind::Additive;
  } else {
    return reject();
  }
  out.form = form;
  return out;
}

SemigroupForm SemigroupForm::broadcast(const CanonicalForm& form, std::size_t dim) {
  SemigroupForm s;
  s.kind = form.kind;
  s.alpha.assign(dim, form.alpha);
  s.beta.assign(dim, form.beta);
  s.gamma.assign(dim, form.gamma);
  return s;
}

CanonicalOp::CanonicalOp(SemigroupForm form, InvertibleMap rho, ParamStore params)
    : form_(std::move(form)), rho_(std::move(rho)), params_(std::move(params)) {
  const std::size_t d = rho_.dim();
  if (params_.size() != rho_.param_count()) throw Error(Errc::ShapeMismatch, "CanonicalOp: wrong parameter count");
  if (form_.alpha.size() != d || form_.beta.size() != d || form_.gamma.size() != d)
    throw Error(Errc::ShapeMismatch, "CanonicalOp: coefficient vectors must match rho's dimension");
  if (form_.kind == CanonicalForm::Kind::Bilinear)
    for (double g : form_.gamma)
      if (g == 0.0) throw Error(Errc::ZeroGamma, "CanonicalOp: gamma must be nonzero in every coordinate");
}

Vector CanonicalOp::apply(std::span<const double> x, std::span<const double> y) const {
  const auto rho = rho_.bind<double>(params_.values());
  const Vector rx = rho.forward(x);
  const Vector ry = rho.forward(y);
  Vector out(dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (form_.kind) {
      case CanonicalForm::Kind::Constant:
        out[i] = form_.alpha[i];
        break;
      case CanonicalForm::Kind::Additive:
        out[i] = form_.alpha[i] + rx[i] + ry[i];
        break;
      case CanonicalForm::Kind::Bilinear: {
        const double b = form_.beta[i], g = form_.gamma[i];
        out[i] = b * (b - 1.0) / g + b * (rx[i] + ry[i]) + g * rx[i] * ry[i];
        break;
      }
    }
  }
  return rho.inverse(out);
}

std::optional<AbelianOp> CanonicalOp::as_group_network() const {
  const MonotonicNet* net = rho_.monotonic();
  if (form_.kind != CanonicalForm::Kind::Additive || net == nullptr) return std::nullopt;
  ParamStore shifted(std::vector<double>(params_.values().begin(), params_.values().end()));
  // Adding alpha to every bias shifts the min/max output by alpha.
  for (std::size_t k = 0; k < net->groups(); ++k)
    for (std::size_t j = 0; j < net->units(); ++j) shifted[net->b_index(k, j)] += form_.alpha[0];
  return AbelianOp(rho_, std::move(shifted), Combiner::Sum);
}

}  // namespace abnn
