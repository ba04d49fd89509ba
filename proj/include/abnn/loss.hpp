#pragma once

#include <span>
#include <vector>

#include "abnn/error.hpp"
#include "abnn/tape.hpp"
#include "abnn/vector.hpp"

namespace abnn {

template <class S>
S squared_error(std::span<const S> pred, std::span<const double> target) {
  require_same_dim(pred.size(), target.size(), "squared_error");
  S acc = (pred[0] - target[0]) * (pred[0] - target[0]);
  for (std::size_t i = 1; i < pred.size(); ++i) {
    const S diff = pred[i] - target[i];
    acc = acc + diff * diff;
  }
  return acc;
}

// Mean over batch and dimensions of the squared error.
template <class S>
S mse_loss(std::span<const std::vector<S>> pred, std::span<const Vector> target) {
  if (pred.empty() || pred.size() != target.size())
    throw Error(Errc::ShapeMismatch, "mse_loss: batch size mismatch");
  const std::size_t dim = target[0].size();
  S acc = squared_error<S>(pred[0], target[0]);
  for (std::size_t i = 1; i < pred.size(); ++i) {
    if (target[i].size() != dim) throw Error(Errc::ShapeMismatch, "mse_loss: ragged targets");
    acc = acc + squared_error<S>(pred[i], target[i]);
  }
  return acc * (1.0 / static_cast<double>(pred.size() * dim));
}

double cosine(std::span<const double> a, std::span<const double> b);

// cos(a, b) with a differentiable and b fixed.
template <class S>
S cosine(std::span<const S> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "cosine");
  const double nb = norm(b);
  if (nb == 0.0) throw Error(Errc::ZeroVector, "cosine: zero vector");
  S ab = a[0] * b[0];
  S aa = a[0] * a[0];
  for (std::size_t i = 1; i < a.size(); ++i) {
    ab = ab + a[i] * b[i];
    aa = aa + a[i] * a[i];
  }
  if (primal(aa) == 0.0) throw Error(Errc::ZeroVector, "cosine: zero vector");
  return ab / (sqrt(aa) * nb);
}

}  // namespace abnn
