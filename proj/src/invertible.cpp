#include "abnn/invertible.hpp"

#include "abnn/error.hpp"
#include "abnn/tape.hpp"
#include "abnn/vector.hpp"

namespace abnn {

std::size_t InvertibleMap::dim() const {
  if (monotonic()) return 1;
  return coupling()->dim();
}

std::size_t InvertibleMap::param_count() const {
  if (const auto* m = monotonic()) return m->param_count();
  return coupling()->param_count();
}

template <class S>
BoundMap<S>::BoundMap(const InvertibleMap& map, std::span<const S> params, double tol)
    : map_(&map), params_(params), tol_(tol) {
  if (params.size() != map.param_count())
    throw Error(Errc::ShapeMismatch, "InvertibleMap: wrong parameter count");
  if (const auto* m = map.monotonic()) mono_ = m->weights(params);
}

template <class S>
std::vector<S> BoundMap<S>::forward(std::span<const S> x) const {
  if (const auto* m = map_->monotonic()) {
    require_same_dim(x.size(), 1, "InvertibleMap::forward");
    return {m->apply(*mono_, x[0])};
  }
  return map_->coupling()->forward(params_, x);
}

template <class S>
std::vector<S> BoundMap<S>::inverse(std::span<const S> y) const {
  if (const auto* m = map_->monotonic()) {
    require_same_dim(y.size(), 1, "InvertibleMap::inverse");
    return {m->inverse(*mono_, y[0], tol_)};
  }
  return map_->coupling()->inverse(params_, y);
}

template class BoundMap<double>;
template class BoundMap<Var>;

}  // namespace abnn
