#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "abnn/param_store.hpp"
#include "abnn/rng.hpp"

namespace abnn {

// Effective unit slopes s*exp(w~) and biases, computed once per parameter
// snapshot and reused across evaluations.
template <class S>
struct MonoWeights {
  std::vector<S> slope;
  std::vector<S> bias;
};

inline constexpr double kDefaultInverseTol = 1e-10;

// Single-input monotonic network
//   f(x) = min_k max_j  s * exp(w~[k][j]) * x + b[k][j]
// with K groups of J units. Parameter layout: w~ (K*J), b (K*J), s.
class MonotonicNet {
 public:
  MonotonicNet(std::size_t groups, std::size_t units);

  std::size_t groups() const { return groups_; }
  std::size_t units() const { return units_; }
  std::size_t param_count() const { return 2 * groups_ * units_ + 1; }
  std::size_t w_index(std::size_t k, std::size_t j) const { return k * units_ + j; }
  std::size_t b_index(std::size_t k, std::size_t j) const { return groups_ * units_ + k * units_ + j; }
  std::size_t sign_index() const { return 2 * groups_ * units_; }

  // w~ ~ U(-1, 0), b ~ U(-1, 1), s = 1.
  ParamStore init(Rng& rng) const;

  template <class S>
  MonoWeights<S> weights(std::span<const S> params) const;

  template <class S>
  S apply(const MonoWeights<S>& w, S x) const;

  template <class S>
  S forward(std::span<const S> params, S x) const {
    return apply(weights(params), x);
  }

  // Slope of the unit selected by the min/max at x (lowest index on ties).
  double active_slope(const MonoWeights<double>& w, double x) const;

  // Solves f(x) = y: the bracket [-1, 1] is doubled until it straddles y, then
  // bisected until |f(x) - y| < tol, followed by one exact step on the active
  // linear piece. On a tape the result is a single node whose partials come
  // from the implicit function theorem.
  template <class S>
  S inverse(const MonoWeights<S>& w, S y, double tol = kDefaultInverseTol) const;

 private:
  std::size_t groups_;
  std::size_t units_;
};

}  // namespace abnn
