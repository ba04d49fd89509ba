#include "abnn/param_store.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "abnn/error.hpp"

namespace abnn {

ParamStore::ParamStore(std::vector<double> values)
    : values_(std::move(values)),
      grads_(values_.size(), 0.0),
      m_(values_.size(), 0.0),
      v_(values_.size(), 0.0) {}

void ParamStore::zero_grads() { std::fill(grads_.begin(), grads_.end(), 0.0); }

void ParamStore::reset_optimizer() {
  std::fill(m_.begin(), m_.end(), 0.0);
  std::fill(v_.begin(), v_.end(), 0.0);
  step_ = 0;
}

struct AdamAccess {
  static void step(ParamStore& p, const AdamConfig& cfg) {
    for (std::size_t i = 0; i < p.grads_.size(); ++i) {
      if (!std::isfinite(p.grads_[i]))
        throw Diverged("diverged: non-finite gradient at parameter " + std::to_string(i) +
                           " (value " + std::to_string(p.values_[i]) + ", step " +
                           std::to_string(p.step_) + ")",
                       {});
    }
    p.step_ += 1;
    const double t = static_cast<double>(p.step_);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < p.values_.size(); ++i) {
      const double g = p.grads_[i] + cfg.weight_decay * p.values_[i];
      p.m_[i] = cfg.beta1 * p.m_[i] + (1.0 - cfg.beta1) * g;
      p.v_[i] = cfg.beta2 * p.v_[i] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = p.m_[i] / bc1;
      const double v_hat = p.v_[i] / bc2;
      p.values_[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
      p.grads_[i] = 0.0;
    }
  }
};

void adam_step(ParamStore& params, const AdamConfig& cfg) { AdamAccess::step(params, cfg); }

}  // namespace abnn
