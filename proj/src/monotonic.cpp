#include "abnn/monotonic.hpp"

#include <cmath>
#include <string>

#include "abnn/error.hpp"
#include "abnn/tape.hpp"

namespace abnn {

MonotonicNet::MonotonicNet(std::size_t groups, std::size_t units) : groups_(groups), units_(units) {
  if (groups == 0 || units == 0) throw Error(Errc::InvalidArgument, "MonotonicNet needs K >= 1 and J >= 1");
}

ParamStore MonotonicNet::init(Rng& rng) const {
  ParamStore p(param_count());
  for (std::size_t i = 0; i < groups_ * units_; ++i) p[i] = uniform(rng, -1.0, 0.0);
  for (std::size_t i = 0; i < groups_ * units_; ++i) p[groups_ * units_ + i] = uniform(rng, -1.0, 1.0);
  p[sign_index()] = 1.0;
  return p;
}

template <class S>
MonoWeights<S> MonotonicNet::weights(std::span<const S> params) const {
  if (params.size() != param_count()) throw Error(Errc::ShapeMismatch, "MonotonicNet: wrong parameter count");
  const std::size_t n = groups_ * units_;
  MonoWeights<S> w;
  w.slope.reserve(n);
  w.bias.reserve(n);
  const S s = params[sign_index()];
  for (std::size_t i = 0; i < n; ++i) {
    w.slope.push_back(s * exp(params[i]));
    w.bias.push_back(params[n + i]);
  }
  return w;
}

template <class S>
S MonotonicNet::apply(const MonoWeights<S>& w, S x) const {
  S result = x;
  for (std::size_t k = 0; k < groups_; ++k) {
    S group = w.slope[k * units_] * x + w.bias[k * units_];
    for (std::size_t j = 1; j < units_; ++j) {
      const std::size_t i = k * units_ + j;
      group = maximum(group, w.slope[i] * x + w.bias[i]);
    }
    result = k == 0 ? group : minimum(result, group);
  }
  return result;
}

double MonotonicNet::active_slope(const MonoWeights<double>& w, double x) const {
  double best_val = 0.0, best_slope = 0.0;
  for (std::size_t k = 0; k < groups_; ++k) {
    double gv = w.slope[k * units_] * x + w.bias[k * units_];
    double gs = w.slope[k * units_];
    for (std::size_t j = 1; j < units_; ++j) {
      const std::size_t i = k * units_ + j;
      const double v = w.slope[i] * x + w.bias[i];
      if (v > gv) {
        gv = v;
        gs = w.slope[i];
      }
    }
    if (k == 0 || gv < best_val) {
      best_val = gv;
      best_slope = gs;
    }
  }
  return best_slope;
}

namespace {

double invert(const MonotonicNet& net, const MonoWeights<double>& w, double y, double tol) {
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "inverse tolerance must be positive");
  if (!std::isfinite(y)) throw Error(Errc::InversionOutOfRange, "inversion out of range: non-finite target");
  auto g = [&](double x) { return net.apply(w, x) - y; };

  double lo = -1.0, hi = 1.0;
  double glo = g(lo), ghi = g(hi);
  int doublings = 0;
  while ((glo > 0.0) == (ghi > 0.0) && glo != 0.0 && ghi != 0.0) {
    if (++doublings > 1024 || !std::isfinite(lo))
      throw Error(Errc::InversionOutOfRange,
                  "inversion out of range: no bracket for y=" + std::to_string(y));
    lo *= 2.0;
    hi *= 2.0;
    glo = g(lo);
    ghi = g(hi);
    if (!std::isfinite(glo) || !std::isfinite(ghi))
      throw Error(Errc::InversionOutOfRange,
                  "inversion out of range: no bracket for y=" + std::to_string(y));
  }
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;

  double x = lo + 0.5 * (hi - lo);
  double gx = g(x);
  while (std::abs(gx) >= tol) {
    if ((gx > 0.0) == (glo > 0.0)) {
      lo = x;
      glo = gx;
    } else {
      hi = x;
    }
    const double mid = lo + 0.5 * (hi - lo);
    if (mid == lo || mid == hi) break;
    x = mid;
    gx = g(x);
  }

  const double slope = net.active_slope(w, x);
  if (slope != 0.0) {
    const double polished = x - gx / slope;
    if (std::abs(g(polished)) <= std::abs(gx)) x = polished;
  }
  return x;
}

MonoWeights<double> primal_weights(const MonoWeights<Var>& w) {
  MonoWeights<double> out;
  out.slope.reserve(w.slope.size());
  out.bias.reserve(w.bias.size());
  for (const Var& v : w.slope) out.slope.push_back(v.value());
  for (const Var& v : w.bias) out.bias.push_back(v.value());
  return out;
}

}  // namespace

template <class S>
S MonotonicNet::inverse(const MonoWeights<S>& w, S y, double tol) const {
  if constexpr (std::is_same_v<S, double>) {
    return invert(*this, w, y, tol);
  } else {
    const MonoWeights<double> wd = primal_weights(w);
    const double x0 = invert(*this, wd, y.value(), tol);
    const double slope = active_slope(wd, x0);
    // f(x0; theta) on the tape carries the parameter dependence; the node
    // value stays x0 and dx = (dy - df) / f'(x0).
    const Var fx = apply(w, y.tape->constant(x0));
    return y.tape->push(x0, {{y.id, 1.0 / slope}, {fx.id, -1.0 / slope}});
  }
}

template MonoWeights<double> MonotonicNet::weights(std::span<const double>) const;
template MonoWeights<Var> MonotonicNet::weights(std::span<const Var>) const;
template double MonotonicNet::apply(const MonoWeights<double>&, double) const;
template Var MonotonicNet::apply(const MonoWeights<Var>&, Var) const;
template double MonotonicNet::inverse(const MonoWeights<double>&, double, double) const;
template Var MonotonicNet::inverse(const MonoWeights<Var>&, Var, double) const;

}  // namespace abnn
