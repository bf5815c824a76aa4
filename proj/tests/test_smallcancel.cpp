#include <doctest.h>

#include <set>

#include "coarse/errors.hpp"
#include "coarse/smallcancel.hpp"
#include "support.hpp"

using namespace coarse;
using testing::Gen;

namespace {

/// Reading of relator r starting at position p, forward or along the inverse word.
Word reading(const Word& r, int p, bool inverse) {
  const Word base = inverse ? inverse_word(r) : r;
  const int n = static_cast<int>(base.size());
  Word out(n);
  for (int i = 0; i < n; ++i) out[i] = base[(p + i) % n];
  return out;
}

/// Longest piece starting at each position, by comparing every pair of readings.
std::vector<std::vector<int>> brute_pieces(const std::vector<Word>& rels) {
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < rels.size(); ++i) {
    const int n = static_cast<int>(rels[i].size());
    std::vector<int> at(n, 0);
    for (int p = 0; p < n; ++p) {
      const Word u = reading(rels[i], p, false);
      for (std::size_t j = 0; j < rels.size(); ++j)
        for (int q = 0; q < static_cast<int>(rels[j].size()); ++q)
          for (bool inv : {false, true}) {
            if (j == i && q == p && !inv) continue;
            const Word v = reading(rels[j], q, inv);
            const int cap = j == i ? n - 1 : static_cast<int>(std::min(u.size(), v.size()));
            int len = 0;
            while (len < cap && u[len] == v[len]) ++len;
            at[p] = std::max(at[p], len);
          }
    }
    out.push_back(at);
  }
  return out;
}

/// Fewest pieces whose concatenation reads the whole relator from some start.
int brute_piece_count(const Word& r, const std::vector<int>& at) {
  const int n = static_cast<int>(r.size());
  int best = 1 << 20;
  for (int start = 0; start < n; ++start) {
    std::vector<int> dp(n + 1, 1 << 20);
    dp[0] = 0;
    for (int i = 0; i < n; ++i)
      for (int len = 1; len <= at[(start + i) % n] && i + len <= n; ++len) dp[i + len] = std::min(dp[i + len], dp[i] + 1);
    best = std::min(best, dp[n]);
  }
  return best >= (1 << 20) ? -1 : best;
}

LabelledGraph labelled_cycle(int n, bool injective) {
  LabelledGraph g;
  g.vertices = n;
  for (int i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n, injective ? i + 1 : 1});
  return g;
}

ScheduleOracle doubling() {
  return [](double r, double eps) { return std::pair{2.0 * r, eps / 2.0}; };
}

std::vector<StreamItem> powers_of_two(int count) {
  std::vector<StreamItem> s;
  for (int k = 0; k < count; ++k) s.push_back({k, 1LL << k});
  return s;
}

/// Stage invariants checked without the library's own verifier.
void check_stage_invariants(const Schedule& s, double gap) {
  for (std::size_t m = 0; m < s.stages.size(); ++m) {
    const auto& st = s.stages[m];
    CHECK(st.eps > 0.0);
    CHECK(st.eps < 0.25);
    if (m == 0) continue;
    const auto& prev = s.stages[m - 1];
    CHECK(st.r >= gap * prev.t);
    CHECK(st.eps == prev.eps_prime);
    const std::set<int> now(st.accumulated.begin(), st.accumulated.end());
    for (int id : prev.accumulated) CHECK(now.count(id) == 1);
  }
}

}  // namespace

TEST_CASE("word helpers") {
  CHECK(is_reduced(Word{1, 2, -1}));
  CHECK_FALSE(is_reduced(Word{1, -1}));
  CHECK_FALSE(is_cyclically_reduced(Word{1, 2, -1}));
  CHECK(cyclic_reduce(Word{1, 2, 3, -1}) == Word{2, 3});
  CHECK(canonical_form(Word{-1, -1, -1}) == Word{1, 1, 1});

  Gen gen(19);
  for (int trial = 0; trial < 300; ++trial) {
    Word w;
    for (int k = gen.uniform(1, 9); k > 0; --k) w.push_back(gen.uniform(1, 3) * (gen.coin() ? 1 : -1));
    w = cyclic_reduce(reduce_word(w));
    if (w.empty()) continue;
    CHECK(is_cyclically_reduced(w));
    const Word canon = canonical_form(w);
    CHECK(canonical_form(canon) == canon);
    const int shift = gen.uniform(0, static_cast<int>(w.size()) - 1);
    CHECK(canonical_form(reading(w, shift, false)) == canon);
    CHECK(canonical_form(inverse_word(w)) == canon);
  }
}

TEST_CASE("relators read from labelled graphs") {
  const auto five = relators_from_graph(labelled_cycle(5, false), 5);
  REQUIRE(five.relators.size() == 1);
  CHECK(five.relators[0] == Word(5, 1));

  // Theta graph: branch points 0 and 1 joined by paths a, bc and de.
  LabelledGraph theta;
  theta.vertices = 4;
  theta.edges = {{0, 1, 1}, {0, 2, 2}, {2, 1, 3}, {0, 3, 4}, {3, 1, 5}};
  const auto th = relators_from_graph(theta, 4);
  std::set<Word> expected{canonical_form(Word{1, -3, -2}), canonical_form(Word{1, -5, -4}),
                          canonical_form(Word{2, 3, -5, -4})};
  CHECK(std::set<Word>(th.relators.begin(), th.relators.end()) == expected);
  for (const auto& r : th.relators) {
    CHECK(traces_cycle(theta, r));
    CHECK(canonical_form(r) == r);
  }
  CHECK(relators_from_graph(theta, 3).relators.size() == 2);
  CHECK_FALSE(traces_cycle(theta, Word{1, 1, 1}));

  LabelledGraph tree;
  tree.vertices = 4;
  tree.edges = {{0, 1, 1}, {1, 2, 2}, {1, 3, 1}};
  const auto none = relators_from_graph(tree, 10);
  CHECK(none.relators.empty());
  CHECK_FALSE(none.note.empty());
  CHECK_FALSE(tree.girth().has_value());
  CHECK(theta.girth() == 3);
}

TEST_CASE("pieces match the brute-force reading comparison") {
  const std::vector<Word> a7{Word(7, 1)};
  const auto p = compute_pieces(a7);
  CHECK(p.overall_max == 6);
  CHECK(p.max_piece[0] == 6);

  const std::vector<Word> comm{word_from_string("abAB")};
  CHECK(compute_pieces(comm).overall_max == 1);

  const std::vector<Word> disjoint{word_from_string("aab"), word_from_string("ccd")};
  CHECK(compute_pieces(disjoint).pair_max[0][1] == 0);

  const std::vector<Word> genus2{word_from_string("abABcdCD")};
  const auto g2 = compute_pieces(genus2);
  const auto oracle = brute_pieces(genus2);
  CHECK(g2.piece_at[0] == oracle[0]);
  CHECK(g2.overall_max == 1);

  Gen gen(23);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Word> rels;
    for (int k = gen.uniform(1, 3); k > 0; --k) {
      Word w;
      for (int len = gen.uniform(2, 10); len > 0; --len) w.push_back(gen.uniform(1, 2) * (gen.coin() ? 1 : -1));
      w = cyclic_reduce(reduce_word(w));
      if (!w.empty()) rels.push_back(w);
    }
    if (rels.empty()) continue;
    const auto table = compute_pieces(rels);
    const auto brute = brute_pieces(rels);
    for (std::size_t i = 0; i < rels.size(); ++i) CHECK(table.piece_at[i] == brute[i]);
    const auto cp = check_piece_condition(rels, 3);
    for (std::size_t i = 0; i < rels.size(); ++i) CHECK(cp.piece_counts[i] == brute_piece_count(rels[i], brute[i]));
  }
}

TEST_CASE("small cancellation conditions") {
  const std::vector<Word> a7{Word(7, 1)};
  const auto metric = check_metric_condition(a7, 1.0 / 6.0);
  CHECK_FALSE(metric.passed);
  CHECK(metric.witness_relator == 0);
  CHECK(metric.witness_value == 6);
  CHECK(check_piece_condition(a7, 2).passed);
  CHECK_FALSE(check_piece_condition(a7, 3).passed);

  const std::vector<Word> disjoint{word_from_string("aab"), word_from_string("ccd")};
  const auto d = compute_pieces(disjoint);
  CHECK(d.pair_max[0][1] == 0);

  // Genus two: pieces are single letters, so 1 < 8/6 and eight pieces are needed.
  const std::vector<Word> genus2{word_from_string("abABcdCD")};
  CHECK(check_metric_condition(genus2, 1.0 / 6.0).passed);
  CHECK_FALSE(check_metric_condition(genus2, 1.0 / 8.0).passed);
  CHECK(check_piece_condition(genus2, 8).passed);
  CHECK_FALSE(check_piece_condition(genus2, 9).passed);

  // Monotone in lambda.
  Gen gen(29);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Word> rels;
    Word w;
    for (int len = gen.uniform(3, 12); len > 0; --len) w.push_back(gen.uniform(1, 3) * (gen.coin() ? 1 : -1));
    w = cyclic_reduce(reduce_word(w));
    if (w.empty()) continue;
    rels.push_back(w);
    bool passed = false;
    for (double lambda = 0.05; lambda < 1.0; lambda += 0.05) {
      const bool now = check_metric_condition(rels, lambda).passed;
      if (passed) CHECK(now);
      passed = now;
    }
  }
  CHECK_THROWS_AS(check_metric_condition(a7, 0.0), PreconditionError);
  CHECK_THROWS_AS(check_piece_condition(a7, 0), PreconditionError);
}

TEST_CASE("general scheduler on the power-of-two stream") {
  const auto stream = powers_of_two(14);
  const auto s = schedule_general(stream, doubling(), 4, 0.2);
  REQUIRE(s.stages.size() == 4);
  const std::vector<double> rs{4, 32, 256, 2048};
  for (std::size_t m = 0; m < 4; ++m) {
    CHECK(s.stages[m].r == rs[m]);
    CHECK(s.stages[m].t == 2 * rs[m]);
  }
  check_stage_invariants(s, 4.0);
  CHECK_FALSE(verify_schedule(s, stream).has_value());
  // Stage 1 takes lengths in (8, 32]: 16 and 32.
  CHECK(s.stages[1].block == std::vector<int>{4, 5});
  // 64 falls in (r_1, t_1] and is skipped for good; the next relator used is 128.
  CHECK(s.stages[2].skipped == std::vector<int>{6});
  REQUIRE(s.stages[1].injectivity_lower_bound.has_value());
  CHECK(*s.stages[1].injectivity_lower_bound == 63.0);
  CHECK(s.oracle_inputs == "r and eps");

  const auto empty = schedule_general({}, doubling(), 4, 0.2);
  REQUIRE(empty.stages.size() == 1);
  CHECK(empty.stages[0].block.empty());

  const ScheduleOracle loose = [](double r, double) { return std::pair{2.0 * r, 0.3}; };
  CHECK_THROWS_AS(schedule_general(stream, loose, 4, 0.2), PreconditionError);
  CHECK_THROWS_AS(schedule_general(powers_of_two(4), doubling(), 4, 0.2, 4.0, 3), PreconditionError);
}

TEST_CASE("general scheduler on random sparse streams") {
  Gen gen(37);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<StreamItem> stream;
    long long len = gen.uniform(1, 5);
    for (int id = 0; id < 40; ++id) {
      stream.push_back({id, len});
      len += gen.uniform(0, 3) == 0 ? len * gen.uniform(1, 5) : gen.uniform(0, 4);
    }
    const double gap = gen.real(1.5, 6.0);
    const auto s = schedule_general(stream, doubling(), gen.uniform(1, 10), 0.2, gap);
    check_stage_invariants(s, gap);
    CHECK_FALSE(verify_schedule(s, stream).has_value());
    // Every id is in exactly one of: some block, some skipped list, or after the last stage.
    std::multiset<int> seen;
    for (const auto& st : s.stages) {
      seen.insert(st.block.begin(), st.block.end());
      seen.insert(st.skipped.begin(), st.skipped.end());
    }
    for (int id = 0; id < 40; ++id) CHECK(seen.count(id) <= 1);
  }
}

TEST_CASE("graph scheduler") {
  std::vector<LabelledGraph> cycles;
  for (int k = 2; k <= 10; ++k) cycles.push_back(labelled_cycle(1 << k, false));
  const auto s = schedule_from_graphs(cycles, doubling(), 0.2);
  REQUIRE(s.stages.size() >= 2);
  for (std::size_t m = 1; m < s.stages.size(); ++m) {
    CHECK(*s.stages[m].girth > *s.stages[m - 1].girth);
    CHECK(*s.stages[m].girth > 4.0 * s.stages[m - 1].t);
    CHECK(*s.stages[m].graph_index > *s.stages[m - 1].graph_index);
  }
  CHECK_FALSE(verify_schedule(s).has_value());

  const std::vector<LabelledGraph> constant(4, labelled_cycle(6, false));
  const auto flat = schedule_from_graphs(constant, doubling(), 0.2);
  CHECK(flat.stages.size() == 1);
  CHECK(flat.shortfall_threshold.has_value());

  const auto one = schedule_from_graphs({labelled_cycle(8, true)}, doubling(), 0.2);
  CHECK(one.stages.size() == 1);
}

TEST_CASE("lacunarity check") {
  std::vector<double> r, d;
  for (int m = 1; m <= 50; ++m) {
    d.push_back(m);
    r.push_back(static_cast<double>(m) * m);
  }
  CHECK(lacunarity_check(r, d).verdict == "ratios decreasing (window evidence)");
  CHECK(lacunarity_check(r, r).verdict == "ratios not decreasing");
  CHECK(lacunarity_check({4}, {1}).verdict == "insufficient data");
  const auto withprofile = lacunarity_check(r, d, {1, 2, 8, 64});
  CHECK(withprofile.gaps == std::vector<double>{2, 4, 8});
}

TEST_CASE("presentation text") {
  const auto rels = parse_presentation("# comment\nabAB\n\ncdCD  # trailing\n");
  REQUIRE(rels.size() == 2);
  CHECK(rels[0] == word_from_string("abAB"));
  CHECK(parse_presentation(format_presentation(rels)) == rels);
  CHECK_THROWS_AS(parse_presentation("ab1\n"), InputError);
}
