#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "abnn/rng.hpp"

namespace abnn {

// Fully connected network over a slice of a flat parameter array. ReLU on
// hidden layers, linear output. Per layer the weights are stored row-major
// (out x in) followed by the biases.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<std::size_t> sizes, std::size_t offset);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t in_dim() const { return sizes_.front(); }
  std::size_t out_dim() const { return sizes_.back(); }
  std::size_t offset() const { return offset_; }
  std::size_t param_count() const { return count_; }

  // Uniform(-sqrt(6/fan_in), sqrt(6/fan_in)) weights and zero biases; the
  // output layer is further multiplied by output_scale.
  void init(std::span<double> params, Rng& rng, double output_scale = 1.0) const;

  template <class S>
  std::vector<S> forward(std::span<const S> params, std::span<const S> x) const;

 private:
  std::vector<std::size_t> sizes_;
  std::size_t offset_ = 0;
  std::size_t count_ = 0;
};

}  // namespace abnn
