#include "abnn/abelian.hpp"

#include <algorithm>
#include <cmath>

#include "abnn/error.hpp"

namespace abnn {

const char* combiner_name(Combiner c) { return c == Combiner::Sum ? "sum" : "product"; }

template <class S>
std::vector<S> fold_bound(const BoundMap<S>& phi, Combiner combiner, std::span<const Vector> xs, Tape* tape) {
  if (xs.empty()) throw Error(Errc::EmptyMultiset, "empty multiset");
  std::vector<S> acc;
  for (const Vector& x : xs) {
    require_same_dim(x.size(), phi.dim(), "fold");
    const std::vector<S> lifted = lift<S>(tape, x);
    std::vector<S> image = phi.forward(lifted);
    if (acc.empty()) {
      acc = std::move(image);
      continue;
    }
    for (std::size_t i = 0; i < acc.size(); ++i)
      acc[i] = combiner == Combiner::Sum ? acc[i] + image[i] : acc[i] * image[i];
  }
  return phi.inverse(acc);
}

template std::vector<double> fold_bound(const BoundMap<double>&, Combiner, std::span<const Vector>, Tape*);
template std::vector<Var> fold_bound(const BoundMap<Var>&, Combiner, std::span<const Vector>, Tape*);

AbelianOp::AbelianOp(InvertibleMap phi, ParamStore params, Combiner combiner)
    : phi_(std::move(phi)), params_(std::move(params)), combiner_(combiner) {
  if (params_.size() != phi_.param_count())
    throw Error(Errc::ShapeMismatch, "AbelianOp: parameter count does not match phi");
}

Vector AbelianOp::binop(std::span<const double> x, std::span<const double> y) const {
  require_same_dim(x.size(), dim(), "binop");
  require_same_dim(y.size(), dim(), "binop");
  const auto phi = bound();
  const Vector px = phi.forward(x);
  const Vector py = phi.forward(y);
  Vector combined(dim());
  for (std::size_t i = 0; i < combined.size(); ++i)
    combined[i] = combiner_ == Combiner::Sum ? px[i] + py[i] : px[i] * py[i];
  return phi.inverse(combined);
}

void AbelianOp::require_group(const char* what) const {
  if (combiner_ != Combiner::Sum)
    throw Error(Errc::NotAGroup, std::string(what) + ": not a group (product combiner has no guaranteed identity)");
}

Vector AbelianOp::identity_element() const {
  require_group("identity_element");
  const Vector zero(dim(), 0.0);
  return bound().inverse(zero);
}

Vector AbelianOp::inverse_element(std::span<const double> x) const {
  require_group("inverse_element");
  require_same_dim(x.size(), dim(), "inverse_element");
  const auto phi = bound();
  Vector px = phi.forward(x);
  for (double& v : px) v = -v;
  return phi.inverse(px);
}

Vector AbelianOp::fold(std::span<const Vector> xs) const { return fold_bound(bound(), combiner_, xs); }

std::int64_t ceil_log(std::int64_t a, std::int64_t b) {
  if (a < 2 || b < 1) throw Error(Errc::InvalidArgument, "ceil_log needs a >= 2, b >= 1");
  std::int64_t n = 0;
  std::int64_t power = 1;
  while (power < b) {
    power *= a;
    ++n;
  }
  return n;
}

double size_gen_bound(const SizeGenBound& sg) {
  if (sg.a < 2) throw Error(Errc::InvalidArgument, "size_gen_bound: a must be >= 2");
  if (sg.b < sg.a) throw Error(Errc::InvalidArgument, "size_gen_bound: b must be >= a");
  if (!(sg.epsilon >= 0.0)) throw Error(Errc::InvalidArgument, "size_gen_bound: epsilon must be >= 0");
  const double r = static_cast<double>(sg.a) * sg.k1 * sg.k2;
  if (!(r > 1.0)) throw Error(Errc::DegenerateLipschitz, "degenerate Lipschitz product: a*K1*K2 <= 1");
  const auto n = static_cast<int>(ceil_log(sg.a, sg.b));
  return sg.epsilon * (std::pow(r, n) - 1.0) / (r - 1.0);
}

LipschitzEstimate estimate_lipschitz(const BoundMap<double>& map, const Box& box, std::size_t samples,
                                     std::uint64_t seed) {
  const std::size_t d = map.dim();
  require_same_dim(box.lo.size(), d, "estimate_lipschitz");
  require_same_dim(box.hi.size(), d, "estimate_lipschitz");
  if (samples < 2) throw Error(Errc::InvalidArgument, "estimate_lipschitz needs samples >= 2");
  Rng rng(seed);
  auto draw = [&] {
    Vector u(d);
    for (std::size_t i = 0; i < d; ++i) u[i] = uniform(rng, box.lo[i], box.hi[i]);
    return u;
  };
  const double step = 1e-4 * distance(box.lo, box.hi);

  LipschitzEstimate est;
  auto consider = [&](const Vector& u, const Vector& v) {
    const double dx = distance(u, v);
    if (dx == 0.0) return;
    const double dy = distance(map.forward(u), map.forward(v));
    if (dy == 0.0) return;
    est.k1 = std::max(est.k1, dy / dx);
    est.k2 = std::max(est.k2, dx / dy);
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector u = draw();
    Vector near = u;
    const std::size_t axis = d == 1 ? 0 : static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(d) - 1));
    near[axis] = u[axis] + step <= box.hi[axis] ? u[axis] + step : u[axis] - step;
    consider(u, near);
    consider(u, draw());
  }
  return est;
}

}  // namespace abnn
