#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "abnn/coupling.hpp"
#include "abnn/monotonic.hpp"
#include "abnn/rng.hpp"

namespace abnn {

template <class S>
class BoundMap;

// A parameterized bijection of R^d: a monotonic network for d = 1 or an affine
// coupling flow for d >= 2. Holds structure only; parameters live in a
// ParamStore owned by the caller.
class InvertibleMap {
 public:
  InvertibleMap(MonotonicNet net) : impl_(std::move(net)) {}
  InvertibleMap(CouplingFlow flow) : impl_(std::move(flow)) {}

  std::size_t dim() const;
  std::size_t param_count() const;

  const MonotonicNet* monotonic() const { return std::get_if<MonotonicNet>(&impl_); }
  const CouplingFlow* coupling() const { return std::get_if<CouplingFlow>(&impl_); }

  // Binds a parameter snapshot; the result borrows both `*this` and `params`.
  template <class S>
  BoundMap<S> bind(std::span<const S> params, double tol = kDefaultInverseTol) const {
    return BoundMap<S>(*this, params, tol);
  }

 private:
  std::variant<MonotonicNet, CouplingFlow> impl_;
};

template <class S>
class BoundMap {
 public:
  BoundMap(const InvertibleMap& map, std::span<const S> params, double tol);

  std::size_t dim() const { return map_->dim(); }
  std::vector<S> forward(std::span<const S> x) const;
  std::vector<S> inverse(std::span<const S> y) const;

 private:
  const InvertibleMap* map_;
  std::span<const S> params_;
  double tol_;
  std::optional<MonoWeights<S>> mono_;
};

}  // namespace abnn
