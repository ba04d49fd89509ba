#include "abnn/coupling.hpp"

#include <algorithm>
#include <numeric>

#include "abnn/error.hpp"
#include "abnn/tape.hpp"
#include "abnn/vector.hpp"

namespace abnn {

CouplingFlow::CouplingFlow(std::size_t dim, std::size_t layers, std::size_t hidden, Rng& rng,
                           bool random_permutations, double clamp)
    : dim_(dim), split_(dim / 2), hidden_(hidden), clamp_(clamp) {
  if (dim < 2) throw Error(Errc::InvalidArgument, "CouplingFlow needs d >= 2");
  std::vector<std::vector<std::size_t>> perms(layers);
  for (auto& p : perms) {
    p.resize(dim);
    std::iota(p.begin(), p.end(), std::size_t{0});
    if (random_permutations) shuffle(std::span<std::size_t>(p), rng);
  }
  build(std::move(perms));
}

CouplingFlow::CouplingFlow(std::size_t dim, std::size_t hidden,
                           std::vector<std::vector<std::size_t>> permutations, double clamp)
    : dim_(dim), split_(dim / 2), hidden_(hidden), clamp_(clamp) {
  if (dim < 2) throw Error(Errc::InvalidArgument, "CouplingFlow needs d >= 2");
  build(std::move(permutations));
}

void CouplingFlow::build(std::vector<std::vector<std::size_t>> permutations) {
  if (hidden_ == 0) throw Error(Errc::InvalidArgument, "CouplingFlow needs hidden >= 1");
  if (!(clamp_ > 0.0)) throw Error(Errc::InvalidArgument, "CouplingFlow clamp must be positive");
  for (auto& perm : permutations) {
    std::vector<std::size_t> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (sorted.size() != dim_ || sorted[i] != i)
        throw Error(Errc::InvalidArgument, "CouplingFlow: invalid permutation");
    const std::vector<std::size_t> sizes{split_, hidden_, hidden_, dim_ - split_};
    Mlp scale(sizes, count_);
    count_ += scale.param_count();
    Mlp shift(sizes, count_);
    count_ += shift.param_count();
    layers_.push_back(CouplingLayer{std::move(perm), std::move(scale), std::move(shift)});
  }
}

ParamStore CouplingFlow::init(Rng& rng, double output_scale) const {
  ParamStore p(count_);
  for (const auto& layer : layers_) {
    layer.scale.init(p.values(), rng, output_scale);
    layer.shift.init(p.values(), rng, output_scale);
  }
  return p;
}

template <class S>
std::vector<S> CouplingFlow::forward(std::span<const S> params, std::span<const S> x) const {
  require_same_dim(x.size(), dim_, "CouplingFlow::forward");
  if (params.size() != count_) throw Error(Errc::ShapeMismatch, "CouplingFlow: wrong parameter count");
  std::vector<S> cur(x.begin(), x.end());
  std::vector<S> z(dim_, cur[0]);
  for (const auto& layer : layers_) {
    for (std::size_t i = 0; i < dim_; ++i) z[i] = cur[layer.permutation[i]];
    const std::span<const S> head(z.data(), split_);
    const std::vector<S> a = layer.scale.forward(params, head);
    const std::vector<S> b = layer.shift.forward(params, head);
    for (std::size_t i = split_; i < dim_; ++i)
      z[i] = z[i] * exp(clamp(a[i - split_], -clamp_, clamp_)) + b[i - split_];
    cur.swap(z);
  }
  return cur;
}

template <class S>
std::vector<S> CouplingFlow::inverse(std::span<const S> params, std::span<const S> y) const {
  require_same_dim(y.size(), dim_, "CouplingFlow::inverse");
  if (params.size() != count_) throw Error(Errc::ShapeMismatch, "CouplingFlow: wrong parameter count");
  std::vector<S> cur(y.begin(), y.end());
  std::vector<S> x(dim_, cur[0]);
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto& layer = layers_[l];
    const std::span<const S> head(cur.data(), split_);
    const std::vector<S> a = layer.scale.forward(params, head);
    const std::vector<S> b = layer.shift.forward(params, head);
    for (std::size_t i = split_; i < dim_; ++i)
      cur[i] = (cur[i] - b[i - split_]) * exp(-clamp(a[i - split_], -clamp_, clamp_));
    for (std::size_t i = 0; i < dim_; ++i) x[layer.permutation[i]] = cur[i];
    cur.swap(x);
  }
  return cur;
}

template std::vector<double> CouplingFlow::forward(std::span<const double>, std::span<const double>) const;
template std::vector<Var> CouplingFlow::forward(std::span<const Var>, std::span<const Var>) const;
template std::vector<double> CouplingFlow::inverse(std::span<const double>, std::span<const double>) const;
template std::vector<Var> CouplingFlow::inverse(std::span<const Var>, std::span<const Var>) const;

}  // namespace abnn
