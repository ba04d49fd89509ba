#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "abnn/monotonic.hpp"
#include "abnn/rng.hpp"

namespace abnn::testing {

// Monotonic net with parameters spread wider than the training init:
// w~ ~ U(-1, 1), b ~ U(-2, 2), |s| ~ U(0.5, 2).
inline ParamStore random_monotonic(const MonotonicNet& net, Rng& rng, double sign) {
  ParamStore p(net.param_count());
  for (std::size_t k = 0; k < net.groups(); ++k)
    for (std::size_t j = 0; j < net.units(); ++j) {
      p[net.w_index(k, j)] = uniform(rng, -1.0, 1.0);
      p[net.b_index(k, j)] = uniform(rng, -2.0, 2.0);
    }
  p[net.sign_index()] = sign * uniform(rng, 0.5, 2.0);
  return p;
}

// Smallest gap between the selected value and its runner-up, over both the
// inner max and the outer min. Small margins mean a kink is nearby.
inline double tie_margin(const MonotonicNet& net, const MonoWeights<double>& w, double x) {
  double margin = std::numeric_limits<double>::infinity();
  std::vector<double> group_vals;
  for (std::size_t k = 0; k < net.groups(); ++k) {
    std::vector<double> v;
    for (std::size_t j = 0; j < net.units(); ++j) v.push_back(w.slope[k * net.units() + j] * x + w.bias[k * net.units() + j]);
    std::sort(v.rbegin(), v.rend());
    if (v.size() > 1) margin = std::min(margin, v[0] - v[1]);
    group_vals.push_back(v[0]);
  }
  std::sort(group_vals.begin(), group_vals.end());
  if (group_vals.size() > 1) margin = std::min(margin, group_vals[1] - group_vals[0]);
  return margin;
}

}  // namespace abnn::testing
