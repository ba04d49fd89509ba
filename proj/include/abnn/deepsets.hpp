#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "abnn/mlp.hpp"
#include "abnn/param_store.hpp"
#include "abnn/rng.hpp"
#include "abnn/tape.hpp"
#include "abnn/vector.hpp"

namespace abnn {

struct DeepSetsShape {
  std::size_t dim = 1;
  std::size_t layers = 3;   // linear layers in each of inner and outer
  std::size_t hidden = 16;
  std::size_t middle = 8;
};

// Sum-pooling baseline f(X) = outer(sum_{x in X} inner(x)). The pooled sum is
// taken in lexicographic order of the elements, so the output is bitwise
// invariant to input order.
class DeepSets {
 public:
  DeepSets(DeepSetsShape shape, ParamStore params);
  // He-uniform initialization from rng.
  DeepSets(DeepSetsShape shape, Rng& rng);

  const DeepSetsShape& shape() const { return shape_; }
  std::size_t dim() const { return shape_.dim; }
  const Mlp& inner() const { return inner_; }
  const Mlp& outer() const { return outer_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  template <class S>
  std::vector<S> forward(std::span<const S> params, std::span<const Vector> xs, Tape* tape = nullptr) const;

  Vector operator()(std::span<const Vector> xs) const { return forward<double>(params_.values(), xs); }

  static std::size_t param_count(const DeepSetsShape& shape);

 private:
  DeepSetsShape shape_;
  Mlp inner_;
  Mlp outer_;
  ParamStore params_;
};

}  // namespace abnn
