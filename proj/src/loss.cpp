#include "abnn/loss.hpp"

namespace abnn {

double cosine(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "cosine");
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw Error(Errc::ZeroVector, "cosine: zero vector");
  const double c = inner(a, b) / (na * nb);
  return c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
}

}  // namespace abnn
