#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "abnn/mlp.hpp"
#include "abnn/param_store.hpp"
#include "abnn/rng.hpp"

namespace abnn {

struct CouplingLayer {
  // z[i] = x[permutation[i]] is applied before the coupling transform.
  std::vector<std::size_t> permutation;
  Mlp scale;  // alpha: R^k -> R^(d-k)
  Mlp shift;  // beta:  R^k -> R^(d-k)
};

// Stack of (permutation, affine coupling) layers on R^d, d >= 2:
//   y[<k] = z[<k]
//   y[>=k] = z[>=k] * exp(clamp(alpha(z[<k]))) + beta(z[<k])
// with split k = floor(d/2) and three-layer ReLU subnets.
class CouplingFlow {
 public:
  static constexpr double kDefaultClamp = 5.0;

  // Draws one permutation per layer from rng (identity when random_permutations
  // is false).
  CouplingFlow(std::size_t dim, std::size_t layers, std::size_t hidden, Rng& rng,
               bool random_permutations = true, double clamp = kDefaultClamp);
  // Rebuilds a flow from stored permutations.
  CouplingFlow(std::size_t dim, std::size_t hidden, std::vector<std::vector<std::size_t>> permutations,
               double clamp = kDefaultClamp);

  std::size_t dim() const { return dim_; }
  std::size_t split() const { return split_; }
  std::size_t hidden() const { return hidden_; }
  double clamp_bound() const { return clamp_; }
  std::size_t layer_count() const { return layers_.size(); }
  const CouplingLayer& layer(std::size_t i) const { return layers_[i]; }
  std::size_t param_count() const { return count_; }

  // He-uniform subnet weights; subnet output layers are scaled by output_scale,
  // so output_scale = 0 gives the identity map.
  ParamStore init(Rng& rng, double output_scale) const;

  template <class S>
  std::vector<S> forward(std::span<const S> params, std::span<const S> x) const;

  template <class S>
  std::vector<S> inverse(std::span<const S> params, std::span<const S> y) const;

 private:
  void build(std::vector<std::vector<std::size_t>> permutations);

  std::size_t dim_;
  std::size_t split_;
  std::size_t hidden_;
  double clamp_;
  std::vector<CouplingLayer> layers_;
  std::size_t count_ = 0;
};

}  // namespace abnn
