#include <algorithm>
#include <cmath>
#include <vector>

#include "abnn/abelian.hpp"
#include "abnn/error.hpp"
#include "doctest.h"
#include "fd.hpp"
#include "helpers.hpp"

using namespace abnn;

namespace {

// phi(x) = x + shift as a one-unit monotonic net.
AbelianOp affine_op(double shift, Combiner c) {
  const MonotonicNet net(1, 1);
  ParamStore p(net.param_count());
  p[net.b_index(0, 0)] = shift;
  p[net.sign_index()] = 1.0;
  return AbelianOp(InvertibleMap(net), std::move(p), c);
}

AbelianOp random_mono_op(Rng& rng, Combiner c) {
  const MonotonicNet net(4, 4);
  ParamStore p = abnn::testing::random_monotonic(net, rng, uniform01(rng) < 0.5 ? 1.0 : -1.0);
  return AbelianOp(InvertibleMap(net), std::move(p), c);
}

AbelianOp random_flow_op(Rng& rng, Combiner c) {
  const CouplingFlow flow(4, 3, 8, rng);
  ParamStore p = flow.init(rng, 0.3);
  return AbelianOp(InvertibleMap(flow), std::move(p), c);
}

Vector draw(Rng& rng, std::size_t d, double lo, double hi) {
  Vector v(d);
  for (double& x : v) x = uniform(rng, lo, hi);
  return v;
}

template <class F>
void expect_error(F&& f, Errc code) {
  try {
    f();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("binop examples") {
  CHECK(affine_op(0.0, Combiner::Sum).binop(Vector{2.0}, Vector{3.0})[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(affine_op(0.0, Combiner::Product).binop(Vector{2.0}, Vector{3.0})[0] == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(affine_op(1.0, Combiner::Sum).binop(Vector{2.0}, Vector{3.0})[0] == doctest::Approx(6.0).epsilon(1e-12));
  CHECK_THROWS_AS(affine_op(0.0, Combiner::Sum).binop(Vector{2.0}, Vector{3.0, 1.0}), Error);
}

TEST_CASE("identity_element and inverse_element examples") {
  const AbelianOp id = affine_op(0.0, Combiner::Sum);
  const AbelianOp shifted = affine_op(1.0, Combiner::Sum);
  CHECK(std::abs(id.identity_element()[0]) < 1e-10);
  CHECK(std::abs(shifted.identity_element()[0] + 1.0) < 1e-10);
  CHECK(std::abs(id.inverse_element(Vector{5.0})[0] + 5.0) < 1e-10);
  CHECK(std::abs(shifted.inverse_element(Vector{3.0})[0] + 5.0) < 1e-10);
  CHECK(std::abs(shifted.binop(Vector{3.0}, Vector{-5.0})[0] + 1.0) < 1e-10);
  const Vector e = shifted.identity_element();
  CHECK(std::abs(shifted.inverse_element(e)[0] - e[0]) < 1e-10);

  const AbelianOp asn = affine_op(0.0, Combiner::Product);
  expect_error([&] { asn.identity_element(); }, Errc::NotAGroup);
  expect_error([&] { asn.inverse_element(Vector{1.0}); }, Errc::NotAGroup);
}

TEST_CASE("fold_multiset examples") {
  const Multiset sum_in{{1.0}, {2.0}, {3.0}};
  CHECK(affine_op(0.0, Combiner::Sum).fold(sum_in)[0] == doctest::Approx(6.0).epsilon(1e-12));
  const Multiset prod_in{{2.0}, {3.0}, {4.0}};
  CHECK(affine_op(0.0, Combiner::Product).fold(prod_in)[0] == doctest::Approx(24.0).epsilon(1e-12));
  expect_error([] { affine_op(0.0, Combiner::Sum).fold(Multiset{}); }, Errc::EmptyMultiset);

  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const AbelianOp mono = random_mono_op(rng, i % 2 ? Combiner::Sum : Combiner::Product);
    const Vector x = draw(rng, 1, -3.0, 3.0);
    CHECK(std::abs(mono.fold(Multiset{x})[0] - x[0]) < 1e-9);
    const AbelianOp flow = random_flow_op(rng, i % 2 ? Combiner::Sum : Combiner::Product);
    const Vector v = draw(rng, 4, -2.0, 2.0);
    CHECK(distance(flow.fold(Multiset{v}), v) < 1e-9);
  }
}

TEST_CASE("commutativity and associativity of random operations") {
  Rng rng(17);
  for (Combiner c : {Combiner::Sum, Combiner::Product}) {
    const AbelianOp mono = random_mono_op(rng, c);
    const AbelianOp flow = random_flow_op(rng, c);
    for (int i = 0; i < 1000; ++i) {
      const Vector x = draw(rng, 1, -2.0, 2.0), y = draw(rng, 1, -2.0, 2.0), z = draw(rng, 1, -2.0, 2.0);
      CHECK(distance(mono.binop(x, y), mono.binop(y, x)) < 1e-8 + kDefaultInverseTol);
      CHECK(distance(mono.binop(mono.binop(x, y), z), mono.binop(x, mono.binop(y, z))) < 1e-6);

      const Vector u = draw(rng, 4, -1.0, 1.0), v = draw(rng, 4, -1.0, 1.0), w = draw(rng, 4, -1.0, 1.0);
      CHECK(distance(flow.binop(u, v), flow.binop(v, u)) < 1e-8);
      CHECK(distance(flow.binop(flow.binop(u, v), w), flow.binop(u, flow.binop(v, w))) < 1e-6);
    }
  }
}

TEST_CASE("group laws of random Sum operations") {
  Rng rng(19);
  const AbelianOp mono = random_mono_op(rng, Combiner::Sum);
  const AbelianOp flow = random_flow_op(rng, Combiner::Sum);
  const Vector e1 = mono.identity_element();
  const Vector e4 = flow.identity_element();
  for (int i = 0; i < 1000; ++i) {
    const Vector x = draw(rng, 1, -3.0, 3.0);
    CHECK(distance(mono.binop(x, e1), x) < 1e-6);
    CHECK(distance(mono.binop(x, mono.inverse_element(x)), e1) < 1e-6);
    const Vector u = draw(rng, 4, -1.0, 1.0);
    CHECK(distance(flow.binop(u, e4), u) < 1e-6);
    CHECK(distance(flow.binop(u, flow.inverse_element(u)), e4) < 1e-6);
  }
}

TEST_CASE("fold is permutation invariant and agrees with binop") {
  Rng rng(29);
  for (Combiner c : {Combiner::Sum, Combiner::Product}) {
    const AbelianOp mono = random_mono_op(rng, c);
    const AbelianOp flow = random_flow_op(rng, c);
    Multiset xs, us;
    for (int i = 0; i < 8; ++i) {
      xs.push_back(draw(rng, 1, -1.0, 1.0));
      us.push_back(draw(rng, 4, -0.5, 0.5));
    }
    const Vector ref_x = mono.fold(xs);
    const Vector ref_u = flow.fold(us);
    for (int p = 0; p < 10; ++p) {
      shuffle(std::span<Vector>(xs), rng);
      shuffle(std::span<Vector>(us), rng);
      CHECK(distance(mono.fold(xs), ref_x) < 1e-6);
      CHECK(distance(flow.fold(us), ref_u) < 1e-6);
    }
    for (int i = 0; i < 100; ++i) {
      const Vector x = draw(rng, 1, -2.0, 2.0), y = draw(rng, 1, -2.0, 2.0);
      CHECK(distance(mono.fold(Multiset{x, y}), mono.binop(x, y)) < 1e-8);
      const Vector u = draw(rng, 4, -1.0, 1.0), v = draw(rng, 4, -1.0, 1.0);
      CHECK(distance(flow.fold(Multiset{u, v}), flow.binop(u, v)) < 1e-8);
    }
  }
}

TEST_CASE("multiset model gradients match finite differences") {
  Rng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const Combiner c = trial % 2 ? Combiner::Sum : Combiner::Product;
    const AbelianOp op = trial < 20 ? random_mono_op(rng, c) : random_flow_op(rng, c);
    ParamStore q = op.params();
    if (trial >= 20)
      for (double& v : q.values()) v += uniform(rng, -0.05, 0.05);
    Multiset xs;
    for (int i = 0; i < 3; ++i) xs.push_back(draw(rng, op.dim(), -1.0, 1.0));
    const std::vector<double> theta(q.values().begin(), q.values().end());
    auto f = [&](const std::vector<double>& t) {
      const auto y = op.forward<double>(std::span<const double>(t), xs);
      double s = 0.0;
      for (double v : y) s += v;
      return s;
    };
    if (op.dim() == 1) {
      // Skip configurations with a kink near any evaluation point.
      const auto& net = *op.phi().monotonic();
      const auto w = net.weights<double>(q.values());
      bool near_tie = false;
      for (const auto& x : xs) near_tie |= abnn::testing::tie_margin(net, w, x[0]) < 1e-3;
      near_tie |= abnn::testing::tie_margin(net, w, f(theta)) < 1e-3;
      if (near_tie) continue;
    }
    Tape tape;
    const auto tv = tape.bind(q);
    const auto y = op.forward<Var>(std::span<const Var>(tv), xs, &tape);
    tape.backward(sum(y), q);
    CHECK(abnn::testing::max_rel_err({q.grads().begin(), q.grads().end()},
                                     abnn::testing::central_diff(f, theta, 1e-6)) < 1e-4);
  }
}

TEST_CASE("size_gen_bound examples") {
  CHECK(size_gen_bound({0.1, 2, 4, 1.0, 1.0}) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(size_gen_bound({0.1, 2, 2, 1.0, 1.0}) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(size_gen_bound({0.01, 3, 10, 2.0, 1.0}) == doctest::Approx(0.43).epsilon(1e-12));
  // Independent oracle: unroll the induction a -> a^2 -> ... directly.
  for (std::int64_t b : {2, 3, 5, 8, 9, 17, 100}) {
    double err = 0.1, r = 2.0 * 1.5 * 1.2;
    std::int64_t size = 2;
    while (size < b) {
      err = r * err + 0.1;
      size *= 2;
    }
    CHECK(size_gen_bound({0.1, 2, b, 1.5, 1.2}) == doctest::Approx(err).epsilon(1e-12));
  }
  CHECK(ceil_log(3, 10) == 3);
  CHECK(ceil_log(2, 4) == 2);
  CHECK(ceil_log(10, 1000) == 3);
  CHECK(ceil_log(10, 1001) == 4);
  expect_error([] { size_gen_bound({0.1, 2, 4, 0.5, 1.0}); }, Errc::DegenerateLipschitz);
  expect_error([] { size_gen_bound({0.1, 2, 4, 0.4, 1.0}); }, Errc::DegenerateLipschitz);
  CHECK_THROWS_AS(size_gen_bound({0.1, 1, 4, 1.0, 1.0}), Error);
  CHECK_THROWS_AS(size_gen_bound({0.1, 4, 2, 1.0, 1.0}), Error);
}

TEST_CASE("estimate_lipschitz examples") {
  const Box box{{-3.0}, {3.0}};
  const AbelianOp id = affine_op(0.0, Combiner::Sum);
  const auto e_id = estimate_lipschitz(id.bound(), box, 200, 1);
  CHECK(e_id.k1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e_id.k2 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e_id.lower_bound);

  const MonotonicNet net(1, 1);
  ParamStore two(net.param_count());
  two[net.w_index(0, 0)] = std::log(2.0);
  two[net.sign_index()] = 1.0;
  const InvertibleMap doubling(net);
  const auto e2 = estimate_lipschitz(doubling.bind<double>(two.values()), box, 200, 1);
  CHECK(e2.k1 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(e2.k2 == doctest::Approx(0.5).epsilon(1e-9));

  // Piecewise-linear oracle: the exact constants are the extreme active
  // slopes over the box, read off a fine grid.
  Rng rng(47);
  for (int i = 0; i < 20; ++i) {
    const MonotonicNet m(3, 3);
    const ParamStore p = abnn::testing::random_monotonic(m, rng, 1.0);
    const auto w = m.weights<double>(p.values());
    double max_slope = 0.0, min_slope = INFINITY;
    for (int g = 0; g <= 60000; ++g) {
      const double s = m.active_slope(w, -3.0 + 6.0 * g / 60000.0);
      max_slope = std::max(max_slope, s);
      min_slope = std::min(min_slope, s);
    }
    const InvertibleMap map(m);
    const auto est = estimate_lipschitz(map.bind<double>(p.values()), box, 2000, 5);
    CHECK(est.k1 <= max_slope * (1.0 + 1e-9));
    CHECK(est.k2 <= 1.0 / min_slope * (1.0 + 1e-9));
    CHECK(est.k1 >= 0.9 * max_slope);
  }
  CHECK_THROWS_AS(estimate_lipschitz(id.bound(), box, 1, 1), Error);
}
