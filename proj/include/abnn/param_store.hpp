#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace abnn {

// Flat trainable parameters with parallel gradient and Adam moment buffers.
class ParamStore {
 public:
  ParamStore() = default;
  explicit ParamStore(std::size_t n) : values_(n, 0.0), grads_(n, 0.0), m_(n, 0.0), v_(n, 0.0) {}
  explicit ParamStore(std::vector<double> values);

  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> grads() { return grads_; }
  std::span<const double> grads() const { return grads_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }
  std::uint64_t step_count() const { return step_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  void zero_grads();
  // Resets moments and the step counter; values are kept.
  void reset_optimizer();

 private:
  friend struct AdamAccess;
  std::vector<double> values_;
  std::vector<double> grads_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t step_ = 0;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // L2 penalty folded into the gradient before the moment update.
  double weight_decay = 0.0;
};

// One bias-corrected Adam update from params.grads(). Increments the step
// count and zeroes the gradients. Throws Diverged on a non-finite gradient,
// leaving the parameters untouched.
void adam_step(ParamStore& params, const AdamConfig& cfg = {});

}  // namespace abnn
