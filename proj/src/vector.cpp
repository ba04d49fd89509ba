#include "abnn/vector.hpp"

#include <cmath>
#include <string>

#include "abnn/error.hpp"

namespace abnn {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw Error(Errc::ShapeMismatch, std::string(what) + ": dimension mismatch (" +
                                         std::to_string(a) + " vs " + std::to_string(b) + ")");
}

Vector add(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector sub(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "sub");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector scale(std::span<const double> a, double c) {
  Vector out(a.begin(), a.end());
  for (double& x : out) x *= c;
  return out;
}

double inner(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "inner");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(std::span<const double> a) { return std::sqrt(inner(a, a)); }

double distance(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

bool all_finite(std::span<const double> a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace abnn
