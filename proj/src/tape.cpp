#include "abnn/tape.hpp"

#include <cmath>

#include "abnn/error.hpp"
#include "abnn/param_store.hpp"
#include "abnn/vector.hpp"

namespace abnn {

std::vector<Var> Tape::bind(const ParamStore& params) {
  if (bound_) throw Error(Errc::InvalidArgument, "tape already bound to a parameter store");
  bound_ = true;
  param_first_ = static_cast<std::uint32_t>(values_.size());
  param_count_ = static_cast<std::uint32_t>(params.size());
  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (double v : params.values()) leaves.push_back(push(v, {}));
  return leaves;
}

Var Tape::push(double value, std::initializer_list<Edge> edges) {
  return push(value, std::span<const Edge>(edges.begin(), edges.size()));
}

Var Tape::push(double value, std::span<const Edge> edges) {
  const auto id = static_cast<std::uint32_t>(values_.size());
  values_.push_back(value);
  edges_.insert(edges_.end(), edges.begin(), edges.end());
  edge_end_.push_back(static_cast<std::uint32_t>(edges_.size()));
  return Var{this, id};
}

void Tape::check(Var v) const {
  if (v.tape != this || v.id >= values_.size()) throw Error(Errc::DanglingNode, "dangling node");
}

std::vector<double> Tape::adjoints(Var output) const {
  check(output);
  std::vector<double> adj(output.id + 1, 0.0);
  adj[output.id] = 1.0;
  for (std::uint32_t i = output.id + 1; i-- > 0;) {
    const double a = adj[i];
    if (a == 0.0) continue;
    const std::uint32_t begin = i == 0 ? 0 : edge_end_[i - 1];
    for (std::uint32_t e = begin; e < edge_end_[i]; ++e) adj[edges_[e].parent] += a * edges_[e].partial;
  }
  adj.resize(values_.size(), 0.0);
  return adj;
}

void Tape::backward(Var output, ParamStore& params) const {
  if (!bound_ || params.size() != param_count_)
    throw Error(Errc::InvalidArgument, "backward: parameter store was not bound to this tape");
  const std::vector<double> adj = adjoints(output);
  auto grads = params.grads();
  for (std::uint32_t i = 0; i < param_count_; ++i) grads[i] = adj[param_first_ + i];
}

void Tape::clear() {
  values_.clear();
  edge_end_.clear();
  edges_.clear();
  bound_ = false;
  param_first_ = 0;
  param_count_ = 0;
}

Var operator+(Var a, Var b) { return a.tape->push(a.value() + b.value(), {{a.id, 1.0}, {b.id, 1.0}}); }
Var operator-(Var a, Var b) { return a.tape->push(a.value() - b.value(), {{a.id, 1.0}, {b.id, -1.0}}); }
Var operator*(Var a, Var b) {
  const double av = a.value(), bv = b.value();
  return a.tape->push(av * bv, {{a.id, bv}, {b.id, av}});
}
Var operator/(Var a, Var b) {
  const double av = a.value(), bv = b.value();
  return a.tape->push(av / bv, {{a.id, 1.0 / bv}, {b.id, -av / (bv * bv)}});
}
Var operator-(Var a) { return a.tape->push(-a.value(), {{a.id, -1.0}}); }
Var operator+(Var a, double b) { return a.tape->push(a.value() + b, {{a.id, 1.0}}); }
Var operator+(double a, Var b) { return b + a; }
Var operator-(Var a, double b) { return a.tape->push(a.value() - b, {{a.id, 1.0}}); }
Var operator-(double a, Var b) { return b.tape->push(a - b.value(), {{b.id, -1.0}}); }
Var operator*(Var a, double b) { return a.tape->push(a.value() * b, {{a.id, b}}); }
Var operator*(double a, Var b) { return b * a; }
Var operator/(Var a, double b) { return a.tape->push(a.value() / b, {{a.id, 1.0 / b}}); }
Var operator/(double a, Var b) {
  const double bv = b.value();
  return b.tape->push(a / bv, {{b.id, -a / (bv * bv)}});
}

Var exp(Var a) {
  const double v = std::exp(a.value());
  return a.tape->push(v, {{a.id, v}});
}
Var log(Var a) { return a.tape->push(std::log(a.value()), {{a.id, 1.0 / a.value()}}); }
Var sin(Var a) { return a.tape->push(std::sin(a.value()), {{a.id, std::cos(a.value())}}); }
Var cos(Var a) { return a.tape->push(std::cos(a.value()), {{a.id, -std::sin(a.value())}}); }
Var tanh(Var a) {
  const double t = std::tanh(a.value());
  return a.tape->push(t, {{a.id, 1.0 - t * t}});
}
Var sqrt(Var a) {
  const double r = std::sqrt(a.value());
  return a.tape->push(r, {{a.id, 0.5 / r}});
}
Var relu(Var a) {
  const double v = a.value();
  return v > 0.0 ? a.tape->push(v, {{a.id, 1.0}}) : a.tape->push(0.0, {});
}
Var maximum(Var a, Var b) { return a.value() >= b.value() ? a : b; }
Var minimum(Var a, Var b) { return a.value() <= b.value() ? a : b; }
Var clamp(Var a, double lo, double hi) {
  const double v = a.value();
  if (v < lo) return a.tape->constant(lo);
  if (v > hi) return a.tape->constant(hi);
  return a;
}

Var sum(std::span<const Var> xs) {
  if (xs.empty()) throw Error(Errc::InvalidArgument, "sum of empty span");
  Tape* tape = xs[0].tape;
  std::vector<Tape::Edge> edges;
  edges.reserve(xs.size());
  double acc = 0.0;
  for (const Var& x : xs) {
    acc += x.value();
    edges.push_back({x.id, 1.0});
  }
  return tape->push(acc, edges);
}

Var dot(std::span<const Var> w, std::span<const Var> x, Var bias) {
  require_same_dim(w.size(), x.size(), "dot");
  std::vector<Tape::Edge> edges;
  edges.reserve(2 * w.size() + 1);
  double acc = bias.value();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double wv = w[i].value(), xv = x[i].value();
    acc += wv * xv;
    edges.push_back({w[i].id, xv});
    edges.push_back({x[i].id, wv});
  }
  edges.push_back({bias.id, 1.0});
  return bias.tape->push(acc, edges);
}

double sum(std::span<const double> xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc;
}

double dot(std::span<const double> w, std::span<const double> x, double bias) {
  require_same_dim(w.size(), x.size(), "dot");
  double acc = bias;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
  return acc;
}

}  // namespace abnn
