#include "coarse/smallcancel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "coarse/errors.hpp"
#include "coarse/spaces.hpp"

namespace coarse {

namespace {

int letter_key(Letter l) { return 2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0); }

// Start index of the least rotation of `keys` (Booth's algorithm).
std::size_t least_rotation(const std::vector<int>& keys) {
  const std::size_t n = keys.size();
  if (n == 0) return 0;
  std::vector<long long> f(2 * n, -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < 2 * n; ++j) {
    const int sj = keys[j % n];
    long long i = f[j - k - 1];
    while (i != -1 && sj != keys[(k + i + 1) % n]) {
      if (sj < keys[(k + i + 1) % n]) k = j - i - 1;
      i = f[i];
    }
    if (sj != keys[(k + i + 1) % n]) {
      if (sj < keys[k % n]) k = j;
      f[j - k] = -1;
    } else {
      f[j - k] = i + 1;
    }
  }
  return k % n;
}

std::vector<int> keys_of(std::span<const Letter> w) {
  std::vector<int> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = letter_key(w[i]);
  return out;
}

CyclicWord rotate(std::span<const Letter> w, std::size_t start) {
  CyclicWord out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[(start + i) % w.size()];
  return out;
}

bool key_less(const CyclicWord& a, const CyclicWord& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int ka = letter_key(a[i]), kb = letter_key(b[i]);
    if (ka != kb) return ka < kb;
  }
  return false;
}

}  // namespace

bool is_reduced(std::span<const Letter> word) {
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    if (word[i] == -word[i + 1]) return false;
  return std::none_of(word.begin(), word.end(), [](Letter l) { return l == 0; });
}

bool is_cyclically_reduced(std::span<const Letter> word) {
  if (!is_reduced(word)) return false;
  return word.size() < 2 || word.front() != -word.back();
}

CyclicWord cyclic_reduce(std::span<const Letter> word) {
  Word w = reduce_word(word);
  std::size_t lo = 0, hi = w.size();
  while (hi - lo >= 2 && w[lo] == -w[hi - 1]) {
    ++lo;
    --hi;
  }
  return CyclicWord(w.begin() + static_cast<std::ptrdiff_t>(lo), w.begin() + static_cast<std::ptrdiff_t>(hi));
}

CyclicWord canonical_form(std::span<const Letter> word) {
  if (word.empty()) return {};
  CyclicWord fwd = rotate(word, least_rotation(keys_of(word)));
  Word inv = inverse_word(word);
  CyclicWord bwd = rotate(inv, least_rotation(keys_of(inv)));
  return key_less(bwd, fwd) ? bwd : fwd;
}

void LabelledGraph::validate() const {
  if (vertices < 1) throw InputError("labelled graph needs at least one vertex");
  for (const auto& e : edges) {
    if (e.from < 0 || e.from >= vertices || e.to < 0 || e.to >= vertices)
      throw InputError("labelled graph edge endpoint out of range");
    if (e.label == 0) throw InputError("labelled graph edge label must be nonzero");
  }
}

std::optional<int> LabelledGraph::girth() const {
  std::vector<Edge> plain;
  plain.reserve(edges.size());
  for (const auto& e : edges) plain.emplace_back(e.from, e.to);
  return multigraph_girth(vertices, plain);
}

namespace {

struct HalfEdge {
  int to;
  Letter label;
  int edge;
};

std::vector<std::vector<HalfEdge>> half_edges(const LabelledGraph& g) {
  std::vector<std::vector<HalfEdge>> adj(static_cast<std::size_t>(g.vertices));
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    adj[e.from].push_back({e.to, e.label, static_cast<int>(i)});
    if (e.from != e.to) adj[e.to].push_back({e.from, -e.label, static_cast<int>(i)});
  }
  return adj;
}

constexpr long long kCycleStepLimit = 200'000'000;

}  // namespace

RelatorList relators_from_graph(const LabelledGraph& graph, int cap) {
  graph.validate();
  if (cap < 1) throw PreconditionError("relator length cap must be >= 1");
  const auto adj = half_edges(graph);
  std::set<CyclicWord, decltype(&key_less)> found(&key_less);
  Word path;
  std::vector<char> on_path(static_cast<std::size_t>(graph.vertices), 0);
  long long steps = 0;
  int dropped = 0;

  // Simple cycles through s whose other vertices all exceed s.
  auto dfs = [&](auto&& self, int s, int v, int via_edge) -> void {
    if (++steps > kCycleStepLimit) throw PreconditionError("cycle enumeration exceeded its step limit");
    for (const auto& h : adj[v]) {
      if (h.edge == via_edge) continue;
      if (h.to == s) {
        path.push_back(h.label);
        CyclicWord w = cyclic_reduce(path);
        if (w.empty())
          ++dropped;
        else
          found.insert(canonical_form(w));
        path.pop_back();
        continue;
      }
      if (h.to < s || on_path[h.to] || static_cast<int>(path.size()) + 1 >= cap) continue;
      on_path[h.to] = 1;
      path.push_back(h.label);
      self(self, s, h.to, h.edge);
      path.pop_back();
      on_path[h.to] = 0;
    }
  };
  for (int s = 0; s < graph.vertices; ++s) {
    on_path[s] = 1;
    dfs(dfs, s, s, -1);
    on_path[s] = 0;
  }

  RelatorList out;
  out.relators.assign(found.begin(), found.end());
  if (out.relators.empty()) {
    out.note = graph.girth() ? "no cycle of length <= cap has a nontrivial label"
                             : "graph is a forest; no relators";
  } else if (dropped > 0) {
    out.note = std::to_string(dropped) + " cycle readings reduced to the empty word";
  }
  return out;
}

bool traces_cycle(const LabelledGraph& graph, std::span<const Letter> word) {
  graph.validate();
  if (word.empty()) return true;
  const auto adj = half_edges(graph);
  for (int s = 0; s < graph.vertices; ++s) {
    std::vector<char> cur(static_cast<std::size_t>(graph.vertices), 0), next;
    cur[s] = 1;
    for (Letter l : word) {
      next.assign(cur.size(), 0);
      for (int v = 0; v < graph.vertices; ++v)
        if (cur[v])
          for (const auto& h : adj[v])
            if (h.label == l) next[h.to] = 1;
      cur.swap(next);
    }
    if (cur[s]) return true;
  }
  return false;
}

PieceTable compute_pieces(const std::vector<CyclicWord>& relators) {
  const int k = static_cast<int>(relators.size());
  for (const auto& r : relators)
    if (r.empty()) throw InputError("relators must be nonempty");
  std::vector<Word> inverses;
  for (const auto& r : relators) inverses.push_back(inverse_word(r));

  PieceTable t;
  t.max_piece.assign(k, 0);
  t.piece_at.resize(k);
  t.pair_max.assign(k, std::vector<int>(k, 0));
  for (int i = 0; i < k; ++i) {
    const auto& ri = relators[i];
    const int ni = static_cast<int>(ri.size());
    t.piece_at[i].assign(ni, 0);
    for (int p = 0; p < ni; ++p) {
      PieceOccurrence best{i, p, i, p, false, 0};
      for (int j = 0; j < k; ++j) {
        const int nj = static_cast<int>(relators[j].size());
        const int cap = i == j ? ni - 1 : std::min(ni, nj);
        for (int o = 0; o < 2; ++o) {
          const Word& rj = o == 0 ? relators[j] : inverses[j];
          for (int q = 0; q < nj; ++q) {
            if (i == j && o == 0 && q == p) continue;
            int len = 0;
            while (len < cap && ri[(p + len) % ni] == rj[(q + len) % nj]) ++len;
            t.pair_max[i][j] = std::max(t.pair_max[i][j], len);
            if (len > best.length) best = {i, p, j, q, o == 1, len};
          }
        }
      }
      t.piece_at[i][p] = best.length;
      t.max_piece[i] = std::max(t.max_piece[i], best.length);
      if (best.length > 0) t.occurrences.push_back(best);
    }
    t.overall_max = std::max(t.overall_max, t.max_piece[i]);
  }
  return t;
}

ConditionResult check_metric_condition(const std::vector<CyclicWord>& relators, double lambda) {
  if (!(lambda > 0.0)) throw PreconditionError("C'(lambda) needs lambda > 0");
  ConditionResult out;
  std::ostringstream name;
  name << "C'(" << lambda << ")";
  out.condition = name.str();
  const PieceTable t = compute_pieces(relators);
  for (std::size_t i = 0; i < relators.size(); ++i) {
    const double bound = lambda * static_cast<double>(relators[i].size());
    if (!(t.max_piece[i] < bound)) {
      out.passed = false;
      out.witness_relator = static_cast<int>(i);
      out.witness_value = t.max_piece[i];
      out.detail = "relator " + word_to_string(relators[i]) + " has a piece of length " +
                   std::to_string(t.max_piece[i]);
      return out;
    }
  }
  out.detail = "longest piece " + std::to_string(t.overall_max);
  return out;
}

ConditionResult check_piece_condition(const std::vector<CyclicWord>& relators, int p) {
  if (p < 1) throw PreconditionError("C(p) needs p >= 1");
  ConditionResult out;
  out.condition = "C(" + std::to_string(p) + ")";
  const PieceTable t = compute_pieces(relators);
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  for (std::size_t i = 0; i < relators.size(); ++i) {
    const int n = static_cast<int>(relators[i].size());
    int best = kInf;
    for (int s = 0; s < n; ++s) {
      std::vector<int> dp(static_cast<std::size_t>(n) + 1, kInf);
      dp[0] = 0;
      for (int a = 0; a < n; ++a) {
        if (dp[a] >= kInf) continue;
        const int reach = std::min(t.piece_at[i][(s + a) % n], n - a);
        for (int len = 1; len <= reach; ++len) dp[a + len] = std::min(dp[a + len], dp[a] + 1);
      }
      best = std::min(best, dp[n]);
    }
    const int count = best >= kInf ? -1 : best;
    out.piece_counts.push_back(count);
    if (count != -1 && count < p && out.passed) {
      out.passed = false;
      out.witness_relator = static_cast<int>(i);
      out.witness_value = count;
      out.detail = "relator " + word_to_string(relators[i]) + " is a product of " +
                   std::to_string(count) + " pieces";
    }
  }
  return out;
}

namespace {

std::pair<double, double> call_oracle(const ScheduleOracle& oracle, double r, double eps) {
  auto [t, eps_prime] = oracle(r, eps);
  if (!std::isfinite(t) || t < 0.0) throw PreconditionError("schedule oracle returned an invalid scale");
  if (!(eps_prime > 0.0 && eps_prime < 0.25))
    throw PreconditionError("schedule oracle tolerance left (0, 1/4)");
  return {t, eps_prime};
}

void fill_injectivity_bounds(Schedule& s, const std::map<int, long long>& length_of) {
  for (std::size_t m = 0; m < s.stages.size(); ++m) {
    std::optional<long long> shortest;
    for (std::size_t later = m + 1; later < s.stages.size(); ++later)
      for (int id : s.stages[later].block) {
        const long long len = length_of.at(id);
        if (!shortest || len < *shortest) shortest = len;
      }
    if (shortest) s.stages[m].injectivity_lower_bound = static_cast<double>(*shortest) / 2.0 - 1.0;
  }
}

}  // namespace

Schedule schedule_general(std::vector<StreamItem> stream, const ScheduleOracle& oracle, double r0,
                          double eps0, double gap, int required_stages) {
  if (!oracle) throw PreconditionError("schedule needs an oracle");
  if (!(gap >= 1.0)) throw PreconditionError("schedule gap must be >= 1");
  if (r0 < 0.0) throw PreconditionError("initial scale must be >= 0");
  if (!(eps0 > 0.0 && eps0 < 0.25)) throw PreconditionError("initial tolerance must lie in (0, 1/4)");
  std::map<int, long long> length_of;
  for (const auto& it : stream) {
    if (it.length < 1) throw InputError("relator lengths must be >= 1");
    if (!length_of.emplace(it.id, it.length).second) throw InputError("duplicate relator id in stream");
  }
  std::stable_sort(stream.begin(), stream.end(),
                   [](const StreamItem& a, const StreamItem& b) { return a.length < b.length; });

  Schedule s;
  s.gap = gap;
  std::size_t pos = 0;
  ScheduleStage st;
  st.m = 0;
  st.r = r0;
  st.eps = eps0;
  while (pos < stream.size() && static_cast<double>(stream[pos].length) <= r0) st.block.push_back(stream[pos++].id);
  st.accumulated = st.block;
  std::tie(st.t, st.eps_prime) = call_oracle(oracle, st.r, st.eps);
  s.stages.push_back(st);

  while (pos < stream.size()) {
    const ScheduleStage& prev = s.stages.back();
    const double threshold = gap * prev.t;
    std::size_t pick = pos;
    while (pick < stream.size() && static_cast<double>(stream[pick].length) < threshold) ++pick;
    if (pick == stream.size()) break;
    ScheduleStage next;
    next.m = prev.m + 1;
    next.r = static_cast<double>(stream[pick].length);
    next.eps = prev.eps_prime;
    next.accumulated = prev.accumulated;
    while (pos < stream.size() && static_cast<double>(stream[pos].length) <= next.r) {
      if (static_cast<double>(stream[pos].length) <= prev.t)
        next.skipped.push_back(stream[pos].id);
      else
        next.block.push_back(stream[pos].id);
      ++pos;
    }
    next.accumulated.insert(next.accumulated.end(), next.block.begin(), next.block.end());
    std::tie(next.t, next.eps_prime) = call_oracle(oracle, next.r, next.eps);
    s.stages.push_back(std::move(next));
  }
  if (static_cast<int>(s.stages.size()) < required_stages)
    throw PreconditionError("stream exhausted before gap satisfiable: formed " +
                            std::to_string(s.stages.size()) + " of " + std::to_string(required_stages) +
                            " stages");
  fill_injectivity_bounds(s, length_of);
  return s;
}

Schedule schedule_from_graphs(const std::vector<LabelledGraph>& graphs, const ScheduleOracle& oracle,
                              double eps0, double gap, int cap_factor) {
  if (!oracle) throw PreconditionError("schedule needs an oracle");
  if (graphs.empty()) throw PreconditionError("graph schedule needs at least one graph");
  if (!(gap >= 1.0)) throw PreconditionError("schedule gap must be >= 1");
  if (cap_factor < 1) throw PreconditionError("relator cap factor must be >= 1");
  if (!(eps0 > 0.0 && eps0 < 0.25)) throw PreconditionError("initial tolerance must lie in (0, 1/4)");

  std::vector<std::optional<int>> girths(graphs.size());
  std::vector<char> girth_known(graphs.size(), 0);
  auto girth_of = [&](std::size_t i) {
    if (!girth_known[i]) {
      girths[i] = graphs[i].girth();
      girth_known[i] = 1;
    }
    return girths[i];
  };

  std::map<int, long long> length_of;
  int next_id = 0;
  long long longest = 0;
  auto add_relators = [&](std::size_t i, ScheduleStage& st) {
    const auto g = girth_of(i);
    st.girth = g;
    st.graph_index = static_cast<int>(i);
    if (!g) return;
    for (const auto& w : relators_from_graph(graphs[i], *g * cap_factor).relators) {
      length_of[next_id] = static_cast<long long>(w.size());
      longest = std::max(longest, static_cast<long long>(w.size()));
      st.block.push_back(next_id++);
    }
  };

  Schedule s;
  s.gap = gap;
  ScheduleStage st;
  st.eps = eps0;
  add_relators(0, st);
  st.accumulated = st.block;
  st.r = static_cast<double>(longest);
  std::tie(st.t, st.eps_prime) = call_oracle(oracle, st.r, st.eps);
  s.stages.push_back(st);

  std::size_t last = 0;
  while (true) {
    const ScheduleStage& prev = s.stages.back();
    const double threshold = gap * prev.t;
    std::size_t pick = last + 1;
    std::optional<int> best_girth;
    for (; pick < graphs.size(); ++pick) {
      const auto g = girth_of(pick);
      if (g && (!best_girth || *g > *best_girth)) best_girth = g;
      if (g && static_cast<double>(*g) > threshold) break;
    }
    if (pick >= graphs.size()) {
      if (last + 1 < graphs.size()) {
        s.shortfall_threshold = threshold;
        s.shortfall_best_girth = best_girth;
      }
      break;
    }
    ScheduleStage next;
    next.m = prev.m + 1;
    next.eps = prev.eps_prime;
    next.accumulated = prev.accumulated;
    add_relators(pick, next);
    next.accumulated.insert(next.accumulated.end(), next.block.begin(), next.block.end());
    next.r = static_cast<double>(longest);
    std::tie(next.t, next.eps_prime) = call_oracle(oracle, next.r, next.eps);
    s.stages.push_back(std::move(next));
    last = pick;
  }
  fill_injectivity_bounds(s, length_of);
  return s;
}

std::optional<std::string> verify_schedule(const Schedule& schedule, const std::vector<StreamItem>& stream) {
  if (schedule.stages.empty()) return "schedule has no stages";
  std::map<int, long long> length_of;
  for (const auto& it : stream) length_of[it.id] = it.length;
  std::set<int> seen;
  for (std::size_t m = 0; m < schedule.stages.size(); ++m) {
    const auto& st = schedule.stages[m];
    const std::string tag = "stage " + std::to_string(m) + ": ";
    if (st.m != static_cast<int>(m)) return tag + "index out of sequence";
    if (!(st.eps > 0.0 && st.eps < 0.25)) return tag + "eps outside (0, 1/4)";
    if (!(st.eps_prime > 0.0 && st.eps_prime < 0.25)) return tag + "eps' outside (0, 1/4)";
    for (int id : st.block)
      if (!seen.insert(id).second) return tag + "relator " + std::to_string(id) + " added twice";
    std::vector<int> acc(st.accumulated);
    std::sort(acc.begin(), acc.end());
    if (!std::equal(acc.begin(), acc.end(), seen.begin(), seen.end()))
      return tag + "accumulated set differs from the union of blocks";
    if (m == 0) {
      if (!stream.empty())
        for (int id : st.block)
          if (static_cast<double>(length_of.at(id)) > st.r) return tag + "initial block exceeds r_0";
      continue;
    }
    const auto& prev = schedule.stages[m - 1];
    if (st.eps != prev.eps_prime) return tag + "eps_m differs from eps'_{m-1}";
    if (st.graph_index) {
      if (!st.girth || !(static_cast<double>(*st.girth) > schedule.gap * prev.t))
        return tag + "selected girth does not exceed gap * t_{m-1}";
      if (prev.graph_index && *st.graph_index <= *prev.graph_index) return tag + "graph indices not increasing";
    } else if (st.r < schedule.gap * prev.t) {
      return tag + "r_m below gap * t_{m-1}";
    }
    if (!stream.empty()) {
      for (int id : st.block) {
        const double len = static_cast<double>(length_of.at(id));
        if (!(len > prev.t && len <= st.r)) return tag + "block length outside (t_{m-1}, r_m]";
      }
      for (int id : st.skipped) {
        const double len = static_cast<double>(length_of.at(id));
        if (!(len > prev.r && len <= prev.t)) return tag + "skipped length outside (r_{m-1}, t_{m-1}]";
      }
    }
  }
  if (!stream.empty()) {
    std::set<int> skipped;
    for (const auto& st : schedule.stages) skipped.insert(st.skipped.begin(), st.skipped.end());
    const double last_r = schedule.stages.back().r;
    for (const auto& it : stream) {
      if (static_cast<double>(it.length) > last_r) continue;
      const bool in = seen.count(it.id) > 0, out = skipped.count(it.id) > 0;
      if (in == out) return "relator " + std::to_string(it.id) + " neither scheduled nor skipped exactly once";
    }
  }
  return std::nullopt;
}

LacunarityReport lacunarity_check(const std::vector<double>& r, const std::vector<double>& delta,
                                  const std::vector<double>& length_profile) {
  if (r.size() != delta.size()) throw InputError("scale and hyperbolicity profiles differ in length");
  LacunarityReport out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0) || delta[i] < 0.0) throw InputError("lacunarity needs r > 0 and delta >= 0");
    out.ratios.push_back(delta[i] / r[i]);
  }
  std::vector<double> lengths(length_profile);
  std::sort(lengths.begin(), lengths.end());
  for (std::size_t i = 0; i + 1 < lengths.size(); ++i)
    if (lengths[i] > 0.0) out.gaps.push_back(lengths[i + 1] / lengths[i]);
  if (out.ratios.size() < 2) {
    out.verdict = "insufficient data";
    return out;
  }
  bool nonincreasing = true;
  for (std::size_t i = 0; i + 1 < out.ratios.size(); ++i)
    nonincreasing = nonincreasing && out.ratios[i + 1] <= out.ratios[i];
  out.verdict = nonincreasing && out.ratios.back() < out.ratios.front()
                    ? "ratios decreasing (window evidence)"
                    : "ratios not decreasing";
  return out;
}

std::vector<CyclicWord> parse_presentation(const std::string& text) {
  std::vector<CyclicWord> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string compact;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
    if (compact.empty()) continue;
    Word w;
    try {
      w = word_from_string(compact);
    } catch (const InputError& e) {
      throw InputError("presentation line " + std::to_string(lineno) + ": " + e.what());
    }
    if (w.empty()) throw InputError("presentation line " + std::to_string(lineno) + ": empty relator");
    out.push_back(std::move(w));
  }
  return out;
}

std::string format_presentation(const std::vector<CyclicWord>& relators) {
  std::string out;
  for (const auto& r : relators) out += word_to_string(r) + "\n";
  return out;
}

}  // namespace coarse
