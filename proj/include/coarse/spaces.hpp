#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace coarse {

/// Sorted list of point indices.
using PointSet = std::vector<int>;
using Edge = std::pair<int, int>;

/**
 * \brief A finite connected metric space with integer (graph) distances.
 *
 * The full distance table is stored; distances are exact. The distance-1
 * pairs form the adjacency graph used by girth and serialization.
 */
class FiniteSpace {
 public:
  FiniteSpace() = default;

  /// Graph metric of an undirected graph. Loops and duplicate edges are ignored.
  static FiniteSpace from_edges(int points, std::span<const Edge> edges, int basepoint = 0);

  /// Explicit integer metric; validated (zero diagonal, symmetry, triangle inequality).
  static FiniteSpace from_distances(int points, std::vector<int> table, int basepoint = 0);

  int size() const { return n_; }
  int dist(int x, int y) const { return dist_[static_cast<std::size_t>(x) * n_ + y]; }
  int basepoint() const { return basepoint_; }
  int diameter() const { return diameter_; }
  /// Maximum number of neighbours at distance exactly 1.
  int generator_degree() const { return degree_; }

  const std::vector<std::vector<int>>& neighbors() const { return adjacency_; }
  std::vector<Edge> edges() const;

  /// Closed ball, ascending.
  PointSet ball(int center, int radius) const;
  int set_diameter(std::span<const int> set) const;
  /// Minimum distance between two nonempty sets.
  int set_distance(std::span<const int> a, std::span<const int> b) const;

  FiniteSpace with_basepoint(int basepoint) const;
  /// Relabel points: new index of old point x is perm[x].
  FiniteSpace relabeled(std::span<const int> perm) const;

  /// FNV-1a over size, basepoint and distance table, as 16 hex digits.
  std::string hash() const;

  bool operator==(const FiniteSpace& other) const {
    return n_ == other.n_ && basepoint_ == other.basepoint_ && dist_ == other.dist_;
  }

 private:
  void finish();

  int n_ = 0;
  int basepoint_ = 0;
  int diameter_ = 0;
  int degree_ = 0;
  std::vector<int> dist_;
  std::vector<std::vector<int>> adjacency_;
};

/// A finite group given by its full multiplication table.
class FiniteGroup {
 public:
  using Mat2 = std::array<int, 4>;  // row-major 2x2 matrix

  /// table[i][j] = i*j. Validates closure, identity, inverses and associativity.
  static FiniteGroup from_table(const std::vector<std::vector<int>>& table);
  static FiniteGroup cyclic(int n);
  /// Direct product of cyclic groups; element index is mixed radix, first factor most significant.
  static FiniteGroup product(std::span<const int> orders);
  /// Subgroup of GL(2, Z/p) generated by the given matrices (closure by BFS).
  static FiniteGroup matrix_mod_p(int p, std::span<const Mat2> generators);

  int order() const { return n_; }
  int identity() const { return identity_; }
  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a) * n_ + b]; }
  int inverse(int a) const { return inverse_[a]; }
  const std::string& label(int a) const { return labels_[a]; }
  /// Index of the element with the given label, if any.
  std::optional<int> find(const std::string& label) const;

  /// Index of a product-group element from its coordinates.
  static int product_index(std::span<const int> orders, std::span<const int> coords);
  /// Index of a matrix in a group built by matrix_mod_p.
  std::optional<int> find_matrix(const Mat2& m) const;

 private:
  int n_ = 0;
  int identity_ = 0;
  std::vector<int> table_;
  std::vector<int> inverse_;
  std::vector<std::string> labels_;
  std::vector<Mat2> matrices_;
};

/**
 * \brief Word metric of a finite group as a graph metric.
 *
 * Identity entries in `generators` are ignored. The set must be closed under
 * inverses and generate the group. Basepoint is the identity.
 */
FiniteSpace build_cayley_space(const FiniteGroup& group, std::span<const int> generators);

/// Shortest cycle length of the distance-1 graph; nullopt for forests.
std::optional<int> girth(const FiniteSpace& space);

/// Girth of an undirected multigraph (loops count 1, parallel edges 2).
std::optional<int> multigraph_girth(int vertices, std::span<const Edge> edges);

struct HyperbolicityResult {
  double delta = 0.0;
  /// Names the delta convention so downstream constants can cite it.
  std::string convention;
  std::array<int, 4> witness{0, 0, 0, 0};
};

/// Largest point count accepted by hyperbolicity_delta unless overridden.
inline constexpr int kDefaultHyperbolicityLimit = 200;

/**
 * \brief Exhaustive four-point delta.
 *
 * Minimal delta with d(x,y)+d(z,w) <= max(d(x,z)+d(y,w), d(x,w)+d(y,z)) + 2 delta
 * over all quadruples. Cost is O(n^4); spaces above `max_points` are refused.
 */
HyperbolicityResult hyperbolicity_delta(const FiniteSpace& space,
                                        int max_points = kDefaultHyperbolicityLimit);

struct AnnularDecomposition {
  int width = 1;
  /// parts[k] = { x : d(x, x0) in [k*width, (k+1)*width) }, trailing empties trimmed.
  std::vector<PointSet> parts;
};

AnnularDecomposition annular_decomposition(const FiniteSpace& space, int width);

/// Index of the annulus of width `width` containing x.
inline int annulus_index(const FiniteSpace& space, int x, int width) {
  return space.dist(space.basepoint(), x) / width;
}

struct Cover {
  std::vector<PointSet> members;
  int diameter_bound = 0;

  /// Sorts members, computes the diameter bound and checks the union is everything.
  static Cover make(const FiniteSpace& space, std::vector<PointSet> members);
};

/// Max over x of the number of members meeting the closed ball B_r(x).
int cover_multiplicity(const FiniteSpace& space, std::span<const PointSet> members, int r);
inline int cover_multiplicity(const FiniteSpace& space, const Cover& cover, int r) {
  return cover_multiplicity(space, cover.members, r);
}

/// A cover split along the annuli of width 2r: every piece lies in one annulus.
struct AnnularCover {
  int r = 1;
  std::vector<PointSet> pieces;
  std::vector<int> annulus_of;
  std::vector<int> parent;  // index of the original member
};

AnnularCover annular_refine(const FiniteSpace& space, const Cover& cover, int r);

struct Coloring {
  std::vector<int> color_of;
  int color_count = 0;
  int gap = 0;                 // same-colour pieces are more than `gap` apart
  int multiplicity_bound = 0;  // the k supplied by the caller
  int palette_per_parity = 0;  // k + 1
  int max_net_ball_count = 0;  // largest |E_j| seen
  bool within_2k = false;
  bool within_2k_plus_2 = false;
};

/**
 * \brief Colours an annular cover into r-disjoint families.
 *
 * Per annulus A_i (width 2r) a maximal 2r-separated net is chosen in ascending
 * point order; pieces are grouped into E_j by the 2r-ball around each net point
 * they meet and coloured first-fit in that order. A colour is excluded when an
 * already coloured piece of the same parity lies within distance r. Even and
 * odd annuli use disjoint palettes {0..k} and {k+1..2k+1}.
 *
 * Throws PreconditionError naming the witness ball when some E_j has more than
 * k+1 members or the palette is exhausted.
 */
Coloring greedy_color_cover(const FiniteSpace& space, const AnnularCover& cover, int r, int k);

struct ColoringDefect {
  int first = -1;
  int second = -1;
  int distance = 0;
};

/// Exhaustive pairwise check; returns the first same-colour pair within `gap`.
std::optional<ColoringDefect> find_coloring_defect(const FiniteSpace& space,
                                                   std::span<const PointSet> pieces,
                                                   const Coloring& coloring);

}  // namespace coarse
