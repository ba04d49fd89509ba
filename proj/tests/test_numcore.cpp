#include <cmath>
#include <vector>

#include "abnn/error.hpp"
#include "abnn/loss.hpp"
#include "abnn/param_store.hpp"
#include "abnn/rng.hpp"
#include "abnn/tape.hpp"
#include "doctest.h"
#include "fd.hpp"

using namespace abnn;
using abnn::testing::central_diff;
using abnn::testing::max_rel_err;

TEST_CASE("backward: square") {
  ParamStore p(std::vector<double>{3.0});
  Tape tape;
  const auto th = tape.bind(p);
  tape.backward(th[0] * th[0], p);
  CHECK(p.grads()[0] == 6.0);
}

TEST_CASE("backward: constant output leaves gradient at zero") {
  ParamStore p(std::vector<double>{3.0});
  p.grads()[0] = 42.0;
  Tape tape;
  tape.bind(p);
  tape.backward(tape.constant(5.0), p);
  CHECK(p.grads()[0] == 0.0);
}

TEST_CASE("backward: product plus sine matches finite differences") {
  auto f = [](const std::vector<double>& t) { return t[0] * t[1] + std::sin(t[0]); };
  const auto fd = central_diff(f, {1.0, 2.0}, 1e-6);
  ParamStore p(std::vector<double>{1.0, 2.0});
  Tape tape;
  const auto th = tape.bind(p);
  tape.backward(th[0] * th[1] + sin(th[0]), p);
  CHECK(p.grads()[0] == doctest::Approx(fd[0]).epsilon(1e-8));
  CHECK(p.grads()[1] == doctest::Approx(fd[1]).epsilon(1e-8));
  CHECK(p.grads()[0] == doctest::Approx(2.0 + std::cos(1.0)).epsilon(1e-12));
  CHECK(p.grads()[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("backward: dangling node") {
  ParamStore p(std::vector<double>{1.0});
  Tape tape, other;
  tape.bind(p);
  const Var foreign = other.constant(1.0);
  try {
    tape.backward(foreign, p);
    FAIL("expected dangling node");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DanglingNode);
    CHECK(std::string(e.what()) == "dangling node");
  }
  CHECK_THROWS_AS(tape.backward(Var{&tape, 999}, p), Error);
}

TEST_CASE("min/max route the gradient through the selected branch, lowest index on ties") {
  ParamStore p(std::vector<double>{2.0, 2.0, 1.0});
  Tape tape;
  const auto t = tape.bind(p);
  tape.backward(maximum(t[0], t[1]) * 3.0 + minimum(t[1], t[2]), p);
  CHECK(p.grads()[0] == 3.0);
  CHECK(p.grads()[1] == 0.0);
  CHECK(p.grads()[2] == 1.0);
}

namespace abnn {

// Composites that together exercise every primitive on the tape.
template <class S>
S composite(int which, const std::vector<S>& t) {
  switch (which) {
    case 0: return exp(t[0] * t[1]) / (1.0 + tanh(t[2]) * tanh(t[2]));
    case 1: return log(1.0 + t[0] * t[0]) + sqrt(t[1] * t[1] + 1.0) * sin(t[2]);
    case 2: return relu(t[0] - t[1]) * cos(t[2]) + maximum(t[0], t[2]) - minimum(t[1], t[2]) * t[0];
    case 3: {
      const std::vector<S> w{t[0], t[1]}, x{t[2], t[0]};
      return dot(std::span<const S>(w), std::span<const S>(x), t[1]) - sum(std::span<const S>(x)) / (2.0 + t[1] * t[1]);
    }
    default: return (t[0] - 2.0) * (3.0 - t[1]) + clamp(t[2], -0.5, 0.5) * t[0];
  }
}

}  // namespace abnn

TEST_CASE("gradient correctness over random points") {
  Rng rng(17);
  for (int which = 0; which < 5; ++which) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x{uniform(rng, -1.5, 1.5), uniform(rng, -1.5, 1.5), uniform(rng, -1.5, 1.5)};
      // Stay away from relu/min/max/clamp kinks where FD is meaningless.
      if (which == 2 && (std::abs(x[0] - x[1]) < 1e-3 || std::abs(x[0] - x[2]) < 1e-3 || std::abs(x[1] - x[2]) < 1e-3))
        continue;
      if (which == 4 && std::abs(std::abs(x[2]) - 0.5) < 1e-3) continue;
      const auto fd = central_diff([&](const std::vector<double>& v) { return composite<double>(which, v); }, x, 1e-5);
      ParamStore p(x);
      Tape tape;
      const auto t = tape.bind(p);
      const Var out = composite<Var>(which, t);
      CHECK(out.value() == doctest::Approx(composite<double>(which, x)).epsilon(1e-14));
      tape.backward(out, p);
      const std::vector<double> g(p.grads().begin(), p.grads().end());
      CHECK(max_rel_err(g, fd) < 1e-4);
    }
  }
}

TEST_CASE("adam: zero gradient keeps values and advances the step") {
  ParamStore p(std::vector<double>{0.5, -1.0});
  adam_step(p);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == -1.0);
  CHECK(p.step_count() == 1);
}

TEST_CASE("adam: first bias-corrected step moves by lr") {
  ParamStore p(std::vector<double>{0.0});
  p.grads()[0] = 1.0;
  adam_step(p, AdamConfig{});
  // m_hat = v_hat = 1 at t = 1, so the step is lr / (1 + eps).
  CHECK(p[0] == doctest::Approx(-1e-3 / (1.0 + 1e-8)).epsilon(1e-14));
  CHECK(p.grads()[0] == 0.0);
  CHECK(p.step_count() == 1);
}

TEST_CASE("adam: repeated identical gradient does not grow the step") {
  ParamStore p(std::vector<double>{0.0});
  p.grads()[0] = 1.0;
  adam_step(p);
  const double first = -p[0];
  p.grads()[0] = 1.0;
  adam_step(p);
  const double second = -p[0] - first;
  CHECK(second <= first + 1e-8);
  CHECK(second == doctest::Approx(first).epsilon(1e-9));
}

TEST_CASE("adam: non-finite gradient diverges without touching values") {
  ParamStore p(std::vector<double>{1.0, 2.0});
  p.grads()[1] = std::nan("");
  CHECK_THROWS_AS(adam_step(p), Diverged);
  CHECK(p[0] == 1.0);
  CHECK(p.step_count() == 0);
}

TEST_CASE("adam: weight decay pulls towards zero") {
  ParamStore p(std::vector<double>{2.0});
  AdamConfig cfg;
  cfg.weight_decay = 0.1;
  adam_step(p, cfg);
  CHECK(p[0] < 2.0);
}

TEST_CASE("adam: identical runs are bitwise identical") {
  auto run = [] {
    Rng rng(99);
    ParamStore p(std::vector<double>{0.3, -0.7, 1.1});
    for (int s = 0; s < 50; ++s) {
      Tape tape;
      const auto t = tape.bind(p);
      const double c = uniform(rng, -1.0, 1.0);
      const Var loss = (t[0] * t[1] - c) * (t[0] * t[1] - c) + exp(t[2] * c);
      tape.backward(loss, p);
      adam_step(p);
    }
    return std::vector<double>(p.values().begin(), p.values().end());
  };
  CHECK(run() == run());
}

TEST_CASE("mse_loss") {
  const std::vector<Vector> same{{1.0, 2.0}};
  CHECK(mse_loss<double>(std::span<const std::vector<double>>(same), same) == 0.0);
  const std::vector<Vector> pred{{1.0}}, target{{3.0}};
  CHECK(mse_loss<double>(std::span<const std::vector<double>>(pred), target) == 4.0);
  const std::vector<Vector> p2{{0.0}, {2.0}}, t2{{1.0}, {0.0}};
  CHECK(mse_loss<double>(std::span<const std::vector<double>>(p2), t2) == 2.5);
  const std::vector<Vector> bad{{1.0}};
  CHECK_THROWS_AS(mse_loss<double>(std::span<const std::vector<double>>(bad), t2), Error);
}

TEST_CASE("cosine") {
  CHECK(cosine(Vector{1, 0}, Vector{1, 0}) == 1.0);
  CHECK(cosine(Vector{1, 0}, Vector{0, 1}) == 0.0);
  CHECK(cosine(Vector{1, 1}, Vector{2, 2}) == doctest::Approx(1.0).epsilon(1e-15));
  try {
    cosine(Vector{0, 0}, Vector{1, 0});
    FAIL("expected zero vector");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroVector);
  }
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vector v{uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3)};
    const Vector w{uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3)};
    const double c = uniform(rng, 0.01, 100.0);
    CHECK(cosine(v, scale(v, c)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine(v, w) == cosine(w, v));
  }
}

TEST_CASE("cosine gradient matches finite differences") {
  const Vector target{0.3, -1.2, 0.8};
  auto f = [&](const std::vector<double>& a) { return cosine(a, target); };
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a{uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2)};
    const auto fd = central_diff(f, a, 1e-5);
    ParamStore p(a);
    Tape tape;
    const auto t = tape.bind(p);
    tape.backward(cosine<Var>(std::span<const Var>(t), target), p);
    CHECK(max_rel_err(std::vector<double>(p.grads().begin(), p.grads().end()), fd) < 1e-4);
  }
}
