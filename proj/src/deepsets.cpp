#include "abnn/deepsets.hpp"

#include <algorithm>
#include <numeric>

#include "abnn/error.hpp"

namespace abnn {

namespace {

std::vector<std::size_t> stack(std::size_t in, std::size_t hidden, std::size_t out, std::size_t layers) {
  std::vector<std::size_t> sizes{in};
  for (std::size_t l = 1; l < layers; ++l) sizes.push_back(hidden);
  sizes.push_back(out);
  return sizes;
}

Mlp make_inner(const DeepSetsShape& s) { return Mlp(stack(s.dim, s.hidden, s.middle, s.layers), 0); }

Mlp make_outer(const DeepSetsShape& s) {
  return Mlp(stack(s.middle, s.hidden, s.dim, s.layers), make_inner(s).param_count());
}

void validate(const DeepSetsShape& s) {
  if (s.dim == 0 || s.layers == 0 || s.hidden == 0 || s.middle == 0)
    throw Error(Errc::InvalidArgument, "DeepSets: all shape fields must be positive");
}

}  // namespace

std::size_t DeepSets::param_count(const DeepSetsShape& shape) {
  validate(shape);
  return make_inner(shape).param_count() + make_outer(shape).param_count();
}

DeepSets::DeepSets(DeepSetsShape shape, ParamStore params)
    : shape_(shape), inner_(make_inner(shape)), outer_(make_outer(shape)), params_(std::move(params)) {
  if (params_.size() != param_count(shape)) throw Error(Errc::ShapeMismatch, "DeepSets: wrong parameter count");
}

DeepSets::DeepSets(DeepSetsShape shape, Rng& rng) : DeepSets(shape, ParamStore(param_count(shape))) {
  inner_.init(params_.values(), rng);
  outer_.init(params_.values(), rng);
}

template <class S>
std::vector<S> DeepSets::forward(std::span<const S> params, std::span<const Vector> xs, Tape* tape) const {
  if (xs.empty()) throw Error(Errc::EmptyMultiset, "empty multiset");
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

  std::vector<std::vector<S>> columns(shape_.middle);
  for (std::size_t idx : order) {
    require_same_dim(xs[idx].size(), shape_.dim, "DeepSets::forward");
    const std::vector<S> h = inner_.forward(params, std::span<const S>(lift<S>(tape, xs[idx])));
    for (std::size_t m = 0; m < shape_.middle; ++m) columns[m].push_back(h[m]);
  }
  std::vector<S> pooled;
  pooled.reserve(shape_.middle);
  for (const auto& col : columns) pooled.push_back(sum(std::span<const S>(col)));
  return outer_.forward(params, std::span<const S>(pooled));
}

template std::vector<double> DeepSets::forward(std::span<const double>, std::span<const Vector>, Tape*) const;
template std::vector<Var> DeepSets::forward(std::span<const Var>, std::span<const Vector>, Tape*) const;

}  // namespace abnn
