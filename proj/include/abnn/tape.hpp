#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <type_traits>
#include <vector>

namespace abnn {

class ParamStore;
class Tape;

// Handle to a scalar node recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::uint32_t id = 0;

  double value() const;
};

// Reverse-mode differentiation tape over scalar primitives. Every node stores
// its value and the local partial derivative towards each operand; backward()
// replays the nodes in reverse order.
class Tape {
 public:
  struct Edge {
    std::uint32_t parent;
    double partial;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(double v) { return push(v, {}); }

  // One leaf per parameter, in store order. Only one store may be bound per
  // tape recording.
  std::vector<Var> bind(const ParamStore& params);

  Var push(double value, std::initializer_list<Edge> edges);
  Var push(double value, std::span<const Edge> edges);

  double value(std::uint32_t id) const { return values_[id]; }
  std::size_t size() const { return values_.size(); }

  // d(output)/d(node) for every node on the tape.
  std::vector<double> adjoints(Var output) const;

  // Assigns d(output)/d(theta) into params.grads(); parameters the output does
  // not depend on receive 0.
  void backward(Var output, ParamStore& params) const;

  void clear();

 private:
  void check(Var v) const;

  std::vector<double> values_;
  std::vector<std::uint32_t> edge_end_;
  std::vector<Edge> edges_;
  std::uint32_t param_first_ = 0;
  std::uint32_t param_count_ = 0;
  bool bound_ = false;
};

inline double Var::value() const { return tape->value(id); }

inline double primal(double x) { return x; }
inline double primal(Var x) { return x.value(); }

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double b);
Var operator+(double a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator*(Var a, double b);
Var operator*(double a, Var b);
Var operator/(Var a, double b);
Var operator/(double a, Var b);
inline Var& operator+=(Var& a, Var b) { return a = a + b; }
inline Var& operator-=(Var& a, Var b) { return a = a - b; }
inline Var& operator*=(Var& a, Var b) { return a = a * b; }

Var exp(Var a);
Var log(Var a);
Var sin(Var a);
Var cos(Var a);
Var tanh(Var a);
Var sqrt(Var a);
Var relu(Var a);
// Gradient flows through the selected operand only; ties select `a`.
Var maximum(Var a, Var b);
Var minimum(Var a, Var b);
Var clamp(Var a, double lo, double hi);
// Fused n-ary primitives: sum(x) and bias + <w, x>.
Var sum(std::span<const Var> xs);
Var dot(std::span<const Var> w, std::span<const Var> x, Var bias);

// Scalar counterparts so model code can be written once over S = double | Var.
inline double exp(double a) { return std::exp(a); }
inline double log(double a) { return std::log(a); }
inline double sin(double a) { return std::sin(a); }
inline double cos(double a) { return std::cos(a); }
inline double tanh(double a) { return std::tanh(a); }
inline double sqrt(double a) { return std::sqrt(a); }
inline double relu(double a) { return a > 0.0 ? a : 0.0; }
inline double maximum(double a, double b) { return a >= b ? a : b; }
inline double minimum(double a, double b) { return a <= b ? a : b; }
inline double clamp(double a, double lo, double hi) { return minimum(maximum(a, lo), hi); }
double sum(std::span<const double> xs);
double dot(std::span<const double> w, std::span<const double> x, double bias);

}  // namespace abnn

namespace abnn {

// Data as S-valued constants: doubles pass through, Vars become constant
// nodes on `tape`.
template <class S>
std::vector<S> lift(Tape* tape, std::span<const double> v) {
  if constexpr (std::is_same_v<S, double>) {
    (void)tape;
    return std::vector<double>(v.begin(), v.end());
  } else {
    std::vector<Var> out;
    out.reserve(v.size());
    for (double x : v) out.push_back(tape->constant(x));
    return out;
  }
}

}  // namespace abnn
