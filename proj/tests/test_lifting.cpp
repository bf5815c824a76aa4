#include <doctest.h>

#include <numbers>

#include "coarse/errors.hpp"
#include "coarse/lifting.hpp"
#include "support.hpp"

using namespace coarse;
using testing::Gen;

namespace {

CoveringMap z_to_cyclic(int n, int ball) {
  return quotient_covering(marked_group_from_spec("z", ball), marked_group_from_spec("cyclic:" + std::to_string(n)));
}

/// Family sharing one source ball, as profiles require.
std::vector<CoveringMap> z_family(std::initializer_list<int> orders, int ball) {
  const auto z = marked_group_from_spec("z", ball);
  std::vector<CoveringMap> fam;
  for (int n : orders) fam.push_back(quotient_covering(z, marked_group_from_spec("cyclic:" + std::to_string(n))));
  return fam;
}

int exponent(const MarkedGroup& g, int y) {
  int e = 0;
  for (Letter l : g.word(y)) e += l > 0 ? 1 : -1;
  return e;
}

/// sup |symbol| sampled at the N-th roots of unity: a lower bound converging from below.
double root_of_unity_norm(const std::vector<std::pair<int, std::complex<double>>>& terms, int N) {
  double best = 0.0;
  for (int k = 0; k < N; ++k) {
    std::complex<double> sum = 0.0;
    for (auto [j, c] : terms) sum += c * std::polar(1.0, 2.0 * std::numbers::pi * j * k / N);
    best = std::max(best, std::abs(sum));
  }
  return best;
}

}  // namespace

TEST_CASE("lift windows") {
  const auto c = z_to_cyclic(12, 8);
  CHECK_NOTHROW(LiftWindow::make(c, 3));
  CHECK_THROWS_AS(LiftWindow::make(c, 4), PreconditionError);
  CHECK_THROWS_AS(LiftWindow::make(c, -1), PreconditionError);
}

TEST_CASE("operator lifts follow the entry formula") {
  const auto c = z_to_cyclic(12, 8);
  const auto w = LiftWindow::make(c, 3);
  const auto& src = *c.source_group();
  const auto id = lift_operator(BandOperator::identity(c.target()), w);
  CHECK(max_entry_difference(id, BandOperator::identity(c.source())) == 0.0);

  const auto adj = lift_operator(BandOperator::adjacency(c.target()), w);
  for (int y = 0; y < c.source()->size(); ++y)
    for (int z = 0; z < c.source()->size(); ++z)
      CHECK(adj(y, z).real() == (std::abs(exponent(src, y) - exponent(src, z)) == 1 ? 1.0 : 0.0));

  Gen gen(1);
  const auto wide = gen.band(c.target(), 5);
  CHECK_THROWS_AS(lift_operator(wide, w), PreconditionError);
}

TEST_CASE("lift is a linear *-preserving bijection on the grade") {
  Gen gen(77);
  for (int n : {8, 12, 16, 24}) {
    const auto c = z_to_cyclic(n, n);
    const int r = c.injectivity_radius();
    const auto w = LiftWindow::make(c, r);
    for (int trial = 0; trial < 10; ++trial) {
      const auto s = gen.band(c.target(), gen.uniform(0, r)), t = gen.band(c.target(), gen.uniform(0, r));
      const auto ls = lift_operator(s, w), lt = lift_operator(t, w);
      CHECK(max_entry_difference(pushforward_operator(ls, w), s) == 0.0);
      CHECK(max_entry_difference(lift_operator(adjoint(s), w), adjoint(ls)) == 0.0);
      const auto alpha = gen.complex(), beta = gen.complex();
      CHECK(max_entry_difference(lift_operator(add_scale(alpha, s, beta, t), w), add_scale(alpha, ls, beta, lt)) <=
            1e-15);
      CHECK(max_entry_difference(lift_operator(pushforward_operator(ls, w), w), ls) == 0.0);
    }
  }
}

TEST_CASE("group ring lifts") {
  const auto c = z_to_cyclic(12, 8);
  const auto w = LiftWindow::make(c, 3);
  const auto tgt = c.target_group();
  const auto src = c.source_group();
  const auto e = lift_group_ring(GroupRingElement::delta(tgt, tgt->identity()), w);
  CHECK(e.coefficients().size() == 1);
  CHECK(e.at(src->identity()) == std::complex<double>(1.0));
  const auto one = lift_group_ring(GroupRingElement::parse(tgt, "a"), w);
  REQUIRE(one.coefficients().size() == 1);
  CHECK(src->word(one.coefficients().begin()->first) == Word{1});
  CHECK_THROWS_AS(lift_group_ring(GroupRingElement::parse(tgt, "aaaa"), w), PreconditionError);

  Gen gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = gen.element(tgt, 3, gen.uniform(1, 6));
    const auto up = lift_group_ring(a, w);
    CHECK(up.support_radius() == a.support_radius());
    CHECK(std::abs(up.l2_norm() - a.l2_norm()) <= 1e-15);
    CHECK(max_coefficient_difference(pushforward_group_ring(up, w), a) == 0.0);
  }
}

TEST_CASE("local multiplicativity") {
  const auto c = z_to_cyclic(12, 8);
  const auto w = LiftWindow::make(c, 3);
  const auto id = BandOperator::identity(c.target());
  const auto adj = BandOperator::adjacency(c.target());
  CHECK(local_multiplicativity_check(id, id, w).equal);
  const auto pair = local_multiplicativity_check(adj, adj, w);
  CHECK(pair.expected_equal);
  CHECK(pair.equal);
  CHECK(pair.max_difference == 0.0);

  const auto a4 = multiply(multiply(adj, adj), multiply(adj, adj));
  REQUIRE(a4.propagation() == 4);
  const auto far = local_multiplicativity_check(a4, a4, w);
  CHECK_FALSE(far.expected_equal);
  CHECK_FALSE(far.equal);
  CHECK(far.witness.has_value());

  Gen gen(99);
  const auto tgt = c.target_group();
  for (int trial = 0; trial < 100; ++trial) {
    const int ra = gen.uniform(0, 3);
    const auto a = gen.element(tgt, ra, 3), b = gen.element(tgt, 3 - ra, 3);
    CHECK(group_ring_multiplicativity_check(a, b, w).equal);
    const auto s = gen.band(c.target(), ra), t = gen.band(c.target(), 3 - ra);
    CHECK(local_multiplicativity_check(s, t, w).equal);
  }
}

TEST_CASE("Fourier symbol norm") {
  using Terms = std::vector<std::pair<int, std::complex<double>>>;
  CHECK(symbol_sup_norm(Terms{{1, 1.0}, {-1, 1.0}}) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(symbol_sup_norm(Terms{{0, 1.0}, {1, -1.0}}) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(symbol_sup_norm(Terms{{0, 1.0}, {1, std::complex<double>(0, 1)}}) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(symbol_sup_norm(Terms{{5, 3.0}}) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(symbol_sup_norm(Terms{}) == 0.0);
  Gen gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    Terms t;
    for (int k = gen.uniform(1, 6); k > 0; --k) t.emplace_back(gen.uniform(-8, 8), gen.complex());
    const double lower = root_of_unity_norm(t, 1 << 14);
    const double v = symbol_sup_norm(t);
    CHECK(v >= lower - 1e-12);
    CHECK(v <= lower + 1e-5);
  }
}

TEST_CASE("regular representation norms") {
  const auto z12 = marked_group_from_spec("cyclic:12");
  const auto adj = GroupRingElement::parse(z12, "a + A");
  const auto rn = regular_representation_norm(adj);
  CHECK(rn.method == "finite group");
  CHECK(rn.norm == doctest::Approx(2.0).epsilon(1e-12));
  const auto z = MarkedGroup::free_ball(1, 10);
  const auto zn = regular_representation_norm(GroupRingElement::parse(z, "a + A"));
  CHECK(zn.method == "fourier symbol");
  CHECK(zn.norm == doctest::Approx(2.0).epsilon(1e-13));
  const auto f2 = MarkedGroup::free_ball(2, 4);
  const auto fn = regular_representation_norm(GroupRingElement::parse(f2, "a + A + b + B"));
  CHECK(fn.method == "interior columns (lower bound)");
  // Kesten: the norm on the free group is 2 sqrt(3); interior columns stay below it.
  CHECK(fn.norm <= 2.0 * std::sqrt(3.0) + 1e-12);
  CHECK(fn.norm > 3.0);
}

TEST_CASE("limsup norm profiles") {
  const auto fam = z_family({8, 12, 16}, 10);
  const auto z = fam[0].source_group();
  const auto e = limsup_norm_profile(GroupRingElement::delta(z, z->identity()), fam, 1e-9);
  for (const auto& t : e.terms) CHECK(t.norm_lift == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.limsup == doctest::Approx(1.0).epsilon(1e-12));

  const auto a = GroupRingElement::parse(z, "a + A");
  const auto p = limsup_norm_profile(a, fam, 1e-9);
  REQUIRE(p.terms.size() == 3);
  for (const auto& t : p.terms) {
    CHECK(t.admissible);
    CHECK(t.norm_lift == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(t.witness_residual <= 1e-9);
  }
  CHECK(p.base_norm <= 2.0 + 1e-12);
  CHECK(p.continuity_bound_holds);

  const auto wide = GroupRingElement::from_words(z, {{Word(9, 1), 1.0}});
  CHECK_THROWS_AS(limsup_norm_profile(wide, fam, 1e-9), PreconditionError);
}

TEST_CASE("continuity classification") {
  const auto fam = z_family({8, 12, 16, 24}, 12);
  const auto z = fam[0].source_group();
  const auto id = continuity_classification(fam, {GroupRingElement::delta(z, z->identity())}, 1e-9);
  CHECK(id.verdict == "isometric (window evidence)");
  const auto adj = continuity_classification(fam, {GroupRingElement::parse(z, "a + A")}, 1e-9);
  CHECK(adj.verdict == "isometric (window evidence)");

  std::vector<CoveringMap> stuck;
  const auto ball = MarkedGroup::free_ball(2, 6);
  for (int n : {5, 7}) stuck.push_back(quotient_covering(ball,
                                                         marked_group_from_spec("product:" + std::to_string(n) + "," +
                                                                                std::to_string(n))));
  const auto f2 = stuck[0].source_group();
  const auto st = continuity_classification(stuck, {GroupRingElement::parse(f2, "ab")}, 1e-9);
  CHECK(st.verdict == "inadmissible");
}
