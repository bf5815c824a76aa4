#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarse/groups.hpp"

namespace coarse {

/// A relator read cyclically; letters as in groups.hpp (+i generator, -i inverse).
using CyclicWord = Word;

bool is_reduced(std::span<const Letter> word);
/// Reduced, and the last letter is not inverse to the first.
bool is_cyclically_reduced(std::span<const Letter> word);
CyclicWord cyclic_reduce(std::span<const Letter> word);
/// Lexicographically least rotation of the word or of its inverse (order a < A < b < B ...).
CyclicWord canonical_form(std::span<const Letter> word);

struct LabelledEdge {
  int from = 0;
  int to = 0;
  /// Read as `label` from `from` to `to` and as -label in the other direction.
  Letter label = 1;
};

struct LabelledGraph {
  int vertices = 0;
  std::vector<LabelledEdge> edges;

  void validate() const;
  /// Girth of the underlying multigraph; nullopt for forests.
  std::optional<int> girth() const;
};

struct RelatorList {
  std::vector<CyclicWord> relators;
  std::string note;
};

/**
 * \brief Cyclically reduced labels of simple cycles of length <= cap.
 *
 * Each cycle is read from its least vertex; words that reduce to the empty
 * word are dropped, and the rest are deduplicated by canonical_form. Output
 * is sorted by length, then canonically.
 */
RelatorList relators_from_graph(const LabelledGraph& graph, int cap);

/// True when the word can be read along a closed path of the graph (any start, either direction).
bool traces_cycle(const LabelledGraph& graph, std::span<const Letter> word);

struct PieceOccurrence {
  int relator = 0;
  int position = 0;
  int other_relator = 0;
  int other_position = 0;
  bool inverse = false;
  int length = 0;
};

struct PieceTable {
  /// Longest piece starting anywhere in relator i.
  std::vector<int> max_piece;
  /// piece_at[i][p]: longest piece starting at position p of relator i.
  std::vector<std::vector<int>> piece_at;
  /// pair_max[i][j]: longest common subword between readings of i and j (distinct positions if i == j).
  std::vector<std::vector<int>> pair_max;
  /// One best occurrence per relator position.
  std::vector<PieceOccurrence> occurrences;
  int overall_max = 0;
};

/**
 * \brief Piece lengths by comparing every cyclic reading with every other.
 *
 * Readings of the same relator at another position or in the inverse
 * direction count as other occurrences; such pieces are capped at |r| - 1.
 * Pieces between different relators are capped at the shorter length.
 */
PieceTable compute_pieces(const std::vector<CyclicWord>& relators);

struct ConditionResult {
  std::string condition;
  bool passed = true;
  /// Offending relator and the value that failed (piece length or piece count).
  std::optional<int> witness_relator;
  int witness_value = 0;
  std::string detail;
  /// Least piece count per relator (C(p) only); -1 when not a product of pieces.
  std::vector<int> piece_counts;
};

/// C'(lambda): every piece strictly shorter than lambda |r|.
ConditionResult check_metric_condition(const std::vector<CyclicWord>& relators, double lambda);
/// C(p): no relator is a product of fewer than p pieces.
ConditionResult check_piece_condition(const std::vector<CyclicWord>& relators, int p);

/// Relator stream item for the general scheduler.
struct StreamItem {
  int id = 0;
  long long length = 0;
};

/// (r, eps) -> (t, eps'): the scale and tolerance certified at stage input (r, eps).
using ScheduleOracle = std::function<std::pair<double, double>(double r, double eps)>;

struct ScheduleStage {
  int m = 0;
  double r = 0.0;
  double eps = 0.0;
  double t = 0.0;
  double eps_prime = 0.0;
  /// Ids added at this stage and the cumulative set.
  std::vector<int> block;
  std::vector<int> accumulated;
  /// Ids whose length fell between r_{m-1} and t_{m-1} and were left out.
  std::vector<int> skipped;
  /// (shortest later relator)/2 - 1, conditional on the small cancellation assumption.
  std::optional<double> injectivity_lower_bound;
  /// Graph scheduler only: index of the selected graph.
  std::optional<int> graph_index;
  std::optional<int> girth;
};

struct Schedule {
  std::vector<ScheduleStage> stages;
  double gap = 4.0;
  std::string oracle_inputs = "r and eps";
  std::string assumption =
      "injectivity bounds assume the presentation satisfies a small cancellation condition";
  /// Graph scheduler: threshold that no remaining graph met.
  std::optional<double> shortfall_threshold;
  std::optional<int> shortfall_best_girth;
};

/**
 * \brief Stage-by-stage partition of a sorted relator length stream.
 *
 * Stage 0 takes lengths <= r0. Stage m picks r_m as the first remaining
 * length >= gap * t_{m-1} and adds the block of lengths in (t_{m-1}, r_m];
 * eps_m = eps'_{m-1}. Stops when the stream is exhausted; throws if fewer
 * than `required_stages` stages were formed or the oracle leaves (0, 1/4).
 */
Schedule schedule_general(std::vector<StreamItem> stream, const ScheduleOracle& oracle, double r0,
                          double eps0, double gap = 4.0, int required_stages = 0);

/**
 * \brief Stages from a graph sequence: graph m_n is selected when its girth exceeds gap * t_{n-1}.
 *
 * Stage 0 uses graph 0 with r_0 its longest relator. Relators are cycle labels
 * up to the graph's girth times `cap_factor`. A window without a suitable
 * graph ends the schedule with the shortfall recorded.
 */
Schedule schedule_from_graphs(const std::vector<LabelledGraph>& graphs, const ScheduleOracle& oracle,
                              double eps0, double gap = 4.0, int cap_factor = 1);

/// Independent re-check of stage invariants; returns the first violation, if any.
std::optional<std::string> verify_schedule(const Schedule& schedule,
                                           const std::vector<StreamItem>& stream = {});

struct LacunarityReport {
  std::vector<double> ratios;  // delta_m / r_m
  std::vector<double> gaps;    // consecutive length ratios of the profile
  /// "ratios decreasing (window evidence)", "ratios not decreasing" or "insufficient data".
  std::string verdict;
};

LacunarityReport lacunarity_check(const std::vector<double>& r, const std::vector<double>& delta,
                                  const std::vector<double>& length_profile = {});

/// Text presentation: one relator per line over a-z, capitals as inverses, '#' comments.
std::vector<CyclicWord> parse_presentation(const std::string& text);
std::string format_presentation(const std::vector<CyclicWord>& relators);

}  // namespace coarse
