#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abnn/abelian.hpp"
#include "abnn/invertible.hpp"
#include "abnn/param_store.hpp"
#include "abnn/vector.hpp"

namespace abnn {

// Dense polynomial in (x, y, z) with per-variable degree bounds.
class Poly3 {
 public:
  Poly3() : Poly3(0, 0, 0) {}
  Poly3(std::size_t dx, std::size_t dy, std::size_t dz);

  static Poly3 constant(double c);
  static Poly3 variable(int axis);  // 0 = x, 1 = y, 2 = z

  const std::array<std::size_t, 3>& degrees() const { return deg_; }
  double coeff(std::size_t i, std::size_t j, std::size_t k) const;
  double& coeff(std::size_t i, std::size_t j, std::size_t k);
  double max_abs() const;

  Poly3 operator+(const Poly3& o) const;
  Poly3 operator*(const Poly3& o) const;
  Poly3 operator*(double c) const;

  // Largest coefficient difference after aligning degree bounds.
  static double max_abs_difference(const Poly3& a, const Poly3& b);

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * (deg_[1] + 1) + j) * (deg_[2] + 1) + k;
  }

  std::array<std::size_t, 3> deg_;
  std::vector<double> c_;
};

// Two-variable polynomial x*y = sum_{i,j} alpha[i][j] x^i y^j on a square
// (n+1) x (n+1) grid.
class SymPoly2 {
 public:
  static constexpr std::size_t kMaxDegree = 4;

  explicit SymPoly2(std::vector<std::vector<double>> coeffs);

  std::size_t degree() const { return coeffs_.size() - 1; }
  double coeff(std::size_t i, std::size_t j) const { return coeffs_[i][j]; }
  const std::vector<std::vector<double>>& grid() const { return coeffs_; }
  bool is_symmetric(double tol = 0.0) const;
  double eval(double x, double y) const;

  // Substitutes (x, y) into the first and second slot.
  Poly3 compose(const Poly3& first, const Poly3& second) const;

 private:
  std::vector<std::vector<double>> coeffs_;
};

struct Witness {
  double x = 0.0, y = 0.0, z = 0.0;
  double discrepancy = 0.0;  // |(x*y)*z - x*(y*z)|
};

struct AssociativityResult {
  bool associative = false;
  std::optional<Witness> witness;  // set when not associative
};

inline constexpr double kCoeffTol = 1e-12;

// Symbolic expansion of (x*y)*z and x*(y*z), compared coefficient-wise with
// tolerance kCoeffTol * max(1, largest coefficient). Throws
// DegreeBoundExceeded above degree 4.
AssociativityResult is_associative(const SymPoly2& p);

// Max-discrepancy triple over 100 seeded random points in [-2, 2]^3.
Witness search_witness(const SymPoly2& p);

struct CanonicalForm {
  enum class Kind { Constant, Additive, Bilinear };
  Kind kind = Kind::Constant;
  double alpha = 0.0;  // constant term
  double beta = 0.0;   // coefficient of x + y
  double gamma = 0.0;  // coefficient of xy

  std::string describe() const;
};

struct Classification {
  std::optional<CanonicalForm> form;  // empty means not associative
  std::optional<Witness> witness;
};

// Reads the form off the coefficient grid: every coefficient with i >= 2 or
// j >= 2 must vanish and the remaining alpha + beta(x+y) + gamma xy must
// satisfy alpha*gamma = beta*(beta-1). Independent of is_associative.
// Throws NotSymmetric on an asymmetric grid.
Classification classify(const SymPoly2& p);

// Elementwise coefficients of a canonical semigroup operation on R^d.
struct SemigroupForm {
  CanonicalForm::Kind kind = CanonicalForm::Kind::Constant;
  Vector alpha, beta, gamma;

  static SemigroupForm broadcast(const CanonicalForm& form, std::size_t dim);
};

// x o y = rho^-1(F(rho(x), rho(y))) with F one of the canonical forms applied
// per coordinate.
class CanonicalOp {
 public:
  // Throws ZeroGamma if a Bilinear form has a zero gamma coordinate.
  CanonicalOp(SemigroupForm form, InvertibleMap rho, ParamStore params);

  std::size_t dim() const { return rho_.dim(); }
  const SemigroupForm& form() const { return form_; }
  Vector apply(std::span<const double> x, std::span<const double> y) const;

  // The Additive form as a group network with phi(x) = rho(x) + alpha. Only
  // available for a monotonic rho, where the shift folds into the biases.
  std::optional<AbelianOp> as_group_network() const;

 private:
  SemigroupForm form_;
  InvertibleMap rho_;
  ParamStore params_;
};

}  // namespace abnn
