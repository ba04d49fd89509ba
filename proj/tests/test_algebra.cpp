#include <cmath>
#include <vector>

#include "abnn/algebra.hpp"
#include "abnn/error.hpp"
#include "abnn/rng.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace abnn;
using Grid = std::vector<std::vector<double>>;
using Kind = CanonicalForm::Kind;

namespace {

// Numeric associativity oracle: worst relative gap over random triples.
double sampled_gap(const SymPoly2& p, Rng& rng, int triples = 30) {
  double worst = 0.0;
  for (int t = 0; t < triples; ++t) {
    const double x = uniform(rng, -1.5, 1.5), y = uniform(rng, -1.5, 1.5), z = uniform(rng, -1.5, 1.5);
    const double l = p.eval(p.eval(x, y), z), r = p.eval(x, p.eval(y, z));
    worst = std::max(worst, std::abs(l - r) / std::max({1.0, std::abs(l), std::abs(r)}));
  }
  return worst;
}

Grid canonical_grid(std::size_t n, double alpha, double beta, double gamma) {
  Grid g(n + 1, std::vector<double>(n + 1, 0.0));
  g[0][0] = alpha;
  if (n >= 1) {
    g[1][0] = g[0][1] = beta;
    g[1][1] = gamma;
  }
  return g;
}

void set_sym(Grid& g, std::size_t i, std::size_t j, double v) { g[i][j] = g[j][i] = v; }

}  // namespace

TEST_CASE("is_associative examples") {
  CHECK(is_associative(SymPoly2(canonical_grid(1, 0.0, 1.0, 0.0))).associative);
  Rng rng(1);
  const SymPoly2 bilinear(canonical_grid(1, 3.0, 3.0, 2.0));
  CHECK(is_associative(bilinear).associative);
  CHECK(sampled_gap(bilinear, rng, 100) < 1e-12);

  const SymPoly2 bad(canonical_grid(1, 1.0, 1.0, 1.0));
  const auto r = is_associative(bad);
  CHECK_FALSE(r.associative);
  REQUIRE(r.witness.has_value());
  const Witness& w = *r.witness;
  CHECK(w.x >= -2.0);
  CHECK(w.z <= 2.0);
  const double gap = std::abs(bad.eval(bad.eval(w.x, w.y), w.z) - bad.eval(w.x, bad.eval(w.y, w.z)));
  CHECK(gap == doctest::Approx(w.discrepancy));
  CHECK(gap > 1e-6);

  Grid deg5(6, std::vector<double>(6, 0.0));
  try {
    is_associative(SymPoly2(deg5));
    FAIL("expected degree bound error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegreeBoundExceeded);
  }
}

TEST_CASE("classify examples") {
  const auto c5 = classify(SymPoly2(canonical_grid(0, 5.0, 0.0, 0.0)));
  REQUIRE(c5.form.has_value());
  CHECK(c5.form->kind == Kind::Constant);
  CHECK(c5.form->alpha == 5.0);
  CHECK(c5.form->describe() == "Constant α=5");

  const auto add = classify(SymPoly2(canonical_grid(1, 1.0, 1.0, 0.0)));
  REQUIRE(add.form.has_value());
  CHECK(add.form->kind == Kind::Additive);
  CHECK(add.form->alpha == 1.0);
  CHECK(add.form->describe() == "Additive α=1");

  const auto bil = classify(SymPoly2(canonical_grid(2, 0.0, 1.0, 0.5)));
  REQUIRE(bil.form.has_value());
  CHECK(bil.form->kind == Kind::Bilinear);
  CHECK(bil.form->beta == 1.0);
  CHECK(bil.form->gamma == 0.5);
  CHECK(bil.form->describe() == "Bilinear β=1 γ=0.5");

  const auto bad = classify(SymPoly2(canonical_grid(1, 1.0, 1.0, 1.0)));
  CHECK_FALSE(bad.form.has_value());
  CHECK(bad.witness.has_value());

  Grid sq = canonical_grid(2, 0.0, 0.0, 0.0);
  sq[2][0] = sq[0][2] = 1.0;  // x^2 + y^2
  CHECK_FALSE(classify(SymPoly2(sq)).form.has_value());
  CHECK_FALSE(is_associative(SymPoly2(sq)).associative);

  Grid asym = canonical_grid(1, 0.0, 1.0, 0.0);
  asym[1][0] = 2.0;
  try {
    classify(SymPoly2(asym));
    FAIL("expected not symmetric");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotSymmetric);
  }
}

TEST_CASE("classify agrees with is_associative on 10,000 random symmetric polynomials") {
  Rng rng(2024);
  const double betas[] = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0};
  const double gammas[] = {-2.0, -1.0, -0.5, 0.25, 0.5, 1.0, 2.0, 4.0};
  int associative = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 0, 3));
    Grid g;
    switch (t % 4) {
      case 0: {  // canonical bilinear
        const double b = betas[uniform_int(rng, 0, 7)], c = gammas[uniform_int(rng, 0, 7)];
        g = canonical_grid(std::max<std::size_t>(n, 1), b * (b - 1.0) / c, b, c);
        break;
      }
      case 1:  // constant or additive
        g = canonical_grid(n, static_cast<double>(uniform_int(rng, -3, 3)),
                           n >= 1 && uniform01(rng) < 0.5 ? 1.0 : 0.0, 0.0);
        break;
      case 2: {  // canonical with one symmetric perturbation
        const double b = betas[uniform_int(rng, 0, 7)], c = gammas[uniform_int(rng, 0, 7)];
        const std::size_t m = std::max<std::size_t>(n, 1);
        g = canonical_grid(m, b * (b - 1.0) / c, b, c);
        const auto i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(m)));
        const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(m)));
        set_sym(g, i, j, g[i][j] + static_cast<double>(uniform_int(rng, 1, 2)));
        break;
      }
      default:  // small integer coefficients
        g.assign(n + 1, std::vector<double>(n + 1, 0.0));
        for (std::size_t i = 0; i <= n; ++i)
          for (std::size_t j = i; j <= n; ++j) set_sym(g, i, j, static_cast<double>(uniform_int(rng, -1, 1)));
    }
    const SymPoly2 p(g);
    const bool symbolic = is_associative(p).associative;
    const auto c = classify(p);
    CHECK(symbolic == c.form.has_value());
    CHECK((sampled_gap(p, rng) < 1e-9) == symbolic);
    if (c.form) {
      ++associative;
      CHECK(std::abs(c.form->alpha * c.form->gamma - c.form->beta * (c.form->beta - 1.0)) < 1e-9);
    } else {
      CHECK(c.witness.has_value());
    }
  }
  CHECK(associative > 2000);
}

TEST_CASE("associative polynomials are first order in each variable") {
  // Exhaustive over coefficient grids with entries in {-1, 0, 1}.
  for (std::size_t n : {2u, 3u}) {
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = i; j <= n; ++j) cells.emplace_back(i, j);
    const std::size_t base = n == 2 ? 3 : 2;  // degree 3 uses {0, 1} to stay small
    std::size_t total = 1;
    for (std::size_t c = 0; c < cells.size(); ++c) total *= base;
    int found = 0;
    for (std::size_t code = 0; code < total; ++code) {
      Grid g(n + 1, std::vector<double>(n + 1, 0.0));
      std::size_t rest = code;
      for (const auto& [i, j] : cells) {
        const double v = base == 3 ? static_cast<double>(rest % 3) - 1.0 : static_cast<double>(rest % 2);
        rest /= base;
        set_sym(g, i, j, v);
      }
      if (!is_associative(SymPoly2(g)).associative) continue;
      ++found;
      for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= n; ++j)
          if (i >= 2 || j >= 2) CHECK(g[i][j] == 0.0);
    }
    CHECK(found > 0);
  }
}

TEST_CASE("canonical_semigroup_op examples") {
  const MonotonicNet net(1, 1);
  ParamStore id(net.param_count());
  id[net.sign_index()] = 1.0;
  const InvertibleMap rho(net);

  const CanonicalOp add(SemigroupForm::broadcast({Kind::Additive, 0.0, 1.0, 0.0}, 1), rho, id);
  CHECK(add.apply(Vector{2.0}, Vector{3.0})[0] == doctest::Approx(5.0).epsilon(1e-12));
  const CanonicalOp mul(SemigroupForm::broadcast({Kind::Bilinear, 0.0, 0.0, 1.0}, 1), rho, id);
  CHECK(mul.apply(Vector{2.0}, Vector{3.0})[0] == doctest::Approx(6.0).epsilon(1e-12));
  const CanonicalOp half(SemigroupForm::broadcast({Kind::Bilinear, 0.0, 1.0, 0.5}, 1), rho, id);
  CHECK(half.apply(Vector{2.0}, Vector{3.0})[0] == doctest::Approx(8.0).epsilon(1e-12));

  CHECK_THROWS_AS(CanonicalOp(SemigroupForm::broadcast({Kind::Bilinear, 0.0, 1.0, 0.0}, 1), rho, id), Error);
  SemigroupForm mixed = SemigroupForm::broadcast({Kind::Bilinear, 0.0, 1.0, 1.0}, 2);
  mixed.gamma[1] = 0.0;
  Rng rng(0);
  const CouplingFlow flow(2, 1, 3, rng);
  try {
    CanonicalOp(mixed, InvertibleMap(flow), flow.init(rng, 0.0));
    FAIL("expected zero gamma");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroGamma);
  }
}

TEST_CASE("Additive canonical op equals its group network") {
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    const MonotonicNet net(3, 3);
    const ParamStore p = abnn::testing::random_monotonic(net, rng, i % 2 ? 1.0 : -1.0);
    const double alpha = uniform(rng, -2.0, 2.0);
    const CanonicalOp op(SemigroupForm::broadcast({Kind::Additive, alpha, 1.0, 0.0}, 1), InvertibleMap(net), p);
    const auto agn = op.as_group_network();
    REQUIRE(agn.has_value());
    for (int t = 0; t < 50; ++t) {
      const Vector x{uniform(rng, -2.0, 2.0)}, y{uniform(rng, -2.0, 2.0)};
      CHECK(std::abs(agn->binop(x, y)[0] - op.apply(x, y)[0]) < 1e-8);
    }
  }
  const MonotonicNet net(1, 1);
  Rng r2(1);
  const CanonicalOp bil(SemigroupForm::broadcast({Kind::Bilinear, 0.0, 1.0, 1.0}, 1), InvertibleMap(net),
                        net.init(r2));
  CHECK_FALSE(bil.as_group_network().has_value());
}

TEST_CASE("canonical ops with random rho are commutative and associative") {
  Rng rng(13);
  const CanonicalForm forms[] = {{Kind::Additive, 0.5, 1.0, 0.0}, {Kind::Bilinear, 0.0, 1.0, 0.5},
                                 {Kind::Bilinear, 3.0, 3.0, 2.0}, {Kind::Constant, 2.0, 0.0, 0.0}};
  for (const auto& form : forms) {
    const MonotonicNet net(3, 3);
    const CanonicalOp mono(SemigroupForm::broadcast(form, 1), InvertibleMap(net),
                           abnn::testing::random_monotonic(net, rng, 1.0));
    const CouplingFlow flow(4, 2, 6, rng);
    const CanonicalOp multi(SemigroupForm::broadcast(form, 4), InvertibleMap(flow), flow.init(rng, 0.2));
    for (int t = 0; t < 200; ++t) {
      // Small inputs keep the bilinear forms inside the range where the
      // monotonic rho remains invertible to full precision.
      const Vector x{uniform(rng, -0.3, 0.3)}, y{uniform(rng, -0.3, 0.3)}, z{uniform(rng, -0.3, 0.3)};
      CHECK(distance(mono.apply(x, y), mono.apply(y, x)) < 1e-8 + kDefaultInverseTol);
      CHECK(distance(mono.apply(mono.apply(x, y), z), mono.apply(x, mono.apply(y, z))) < 1e-6);
      Vector u(4), v(4), w(4);
      for (std::size_t i = 0; i < 4; ++i) {
        u[i] = uniform(rng, -0.3, 0.3);
        v[i] = uniform(rng, -0.3, 0.3);
        w[i] = uniform(rng, -0.3, 0.3);
      }
      CHECK(distance(multi.apply(u, v), multi.apply(v, u)) < 1e-8);
      CHECK(distance(multi.apply(multi.apply(u, v), w), multi.apply(u, multi.apply(v, w))) < 1e-6);
    }
  }
}
