#include "abnn/mlp.hpp"

#include <cmath>

#include "abnn/error.hpp"
#include "abnn/tape.hpp"
#include "abnn/vector.hpp"

namespace abnn {

Mlp::Mlp(std::vector<std::size_t> sizes, std::size_t offset) : sizes_(std::move(sizes)), offset_(offset) {
  if (sizes_.size() < 2) throw Error(Errc::InvalidArgument, "Mlp needs at least input and output sizes");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] == 0 || sizes_[l + 1] == 0) throw Error(Errc::InvalidArgument, "Mlp layer of width 0");
    count_ += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
}

void Mlp::init(std::span<double> params, Rng& rng, double output_scale) const {
  std::size_t at = offset_;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const std::size_t in = sizes_[l], out = sizes_[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in));
    const double mult = (l + 2 == sizes_.size()) ? output_scale : 1.0;
    for (std::size_t i = 0; i < in * out; ++i) params[at++] = mult * uniform(rng, -limit, limit);
    for (std::size_t i = 0; i < out; ++i) params[at++] = 0.0;
  }
}

template <class S>
std::vector<S> Mlp::forward(std::span<const S> params, std::span<const S> x) const {
  require_same_dim(x.size(), in_dim(), "Mlp::forward");
  std::vector<S> cur(x.begin(), x.end());
  std::vector<S> next;
  std::size_t at = offset_;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const std::size_t in = sizes_[l], out = sizes_[l + 1];
    const bool hidden = l + 2 < sizes_.size();
    next.clear();
    next.reserve(out);
    const std::size_t bias_at = at + in * out;
    for (std::size_t o = 0; o < out; ++o) {
      S v = dot(params.subspan(at + o * in, in), std::span<const S>(cur), params[bias_at + o]);
      next.push_back(hidden ? relu(v) : v);
    }
    at = bias_at + out;
    cur.swap(next);
  }
  return cur;
}

template std::vector<double> Mlp::forward(std::span<const double>, std::span<const double>) const;
template std::vector<Var> Mlp::forward(std::span<const Var>, std::span<const Var>) const;

}  // namespace abnn
