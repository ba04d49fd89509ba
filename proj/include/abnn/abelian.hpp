#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abnn/invertible.hpp"
#include "abnn/param_store.hpp"
#include "abnn/tape.hpp"
#include "abnn/vector.hpp"

namespace abnn {

// Sum gives an Abelian group, phi^-1(phi(x) + phi(y)); Product gives an
// Abelian semigroup, phi^-1(phi(x) * phi(y)) elementwise.
enum class Combiner { Sum, Product };

const char* combiner_name(Combiner c);

// Combines phi-images of `xs` in stored order and maps back through phi^-1.
// `tape` is only used to lift the data when S = Var.
template <class S>
std::vector<S> fold_bound(const BoundMap<S>& phi, Combiner combiner, std::span<const Vector> xs,
                          Tape* tape = nullptr);

// Binary operation built from an invertible map and a combiner. Owns its
// parameters.
class AbelianOp {
 public:
  AbelianOp(InvertibleMap phi, ParamStore params, Combiner combiner);

  std::size_t dim() const { return phi_.dim(); }
  Combiner combiner() const { return combiner_; }
  const InvertibleMap& phi() const { return phi_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Tolerance for monotonic-network inversion (unused by coupling flows).
  double inverse_tol() const { return tol_; }
  void set_inverse_tol(double tol) { tol_ = tol; }

  BoundMap<double> bound() const { return phi_.bind<double>(params_.values(), tol_); }

  Vector binop(std::span<const double> x, std::span<const double> y) const;
  // phi^-1(0); Sum combiner only.
  Vector identity_element() const;
  // phi^-1(-phi(x)); Sum combiner only.
  Vector inverse_element(std::span<const double> x) const;
  // Throws EmptyMultiset on an empty input.
  Vector fold(std::span<const Vector> xs) const;

  // Multiset model output under an arbitrary parameter snapshot (training).
  template <class S>
  std::vector<S> forward(std::span<const S> params, std::span<const Vector> xs, Tape* tape = nullptr) const {
    return fold_bound(phi_.bind<S>(params, tol_), combiner_, xs, tape);
  }

 private:
  void require_group(const char* what) const;

  InvertibleMap phi_;
  ParamStore params_;
  Combiner combiner_;
  double tol_ = kDefaultInverseTol;
};

// Inputs of the size-generalization bound for AGN multiset models.
struct SizeGenBound {
  double epsilon = 0.0;   // error bound on multisets smaller than a
  std::int64_t a = 2;     // small-size threshold, >= 2
  std::int64_t b = 2;     // evaluation size, >= a
  double k1 = 1.0;        // Lipschitz constant of phi
  double k2 = 1.0;        // Lipschitz constant of phi^-1
};

// eps * ((a K1 K2)^ceil(log_a b) - 1) / (a K1 K2 - 1). Throws
// DegenerateLipschitz when a K1 K2 <= 1.
double size_gen_bound(const SizeGenBound& sg);

// Smallest n with a^n >= b, computed in integers.
std::int64_t ceil_log(std::int64_t a, std::int64_t b);

struct Box {
  Vector lo;
  Vector hi;
};

struct LipschitzEstimate {
  double k1 = 0.0;  // max |f(u) - f(v)| / |u - v|
  double k2 = 0.0;  // max |u - v| / |f(u) - f(v)|
  // Sampled ratios only ever under-estimate the true constants.
  bool lower_bound = true;
};

// Each sample contributes a short local pair (captures the steepest slope)
// and a pair with another random point of the box.
LipschitzEstimate estimate_lipschitz(const BoundMap<double>& map, const Box& box, std::size_t samples,
                                     std::uint64_t seed);

}  // namespace abnn
