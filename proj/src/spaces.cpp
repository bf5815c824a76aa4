#include "coarse/spaces.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "coarse/errors.hpp"

namespace coarse {

namespace {

constexpr int kUnreached = -1;

std::vector<int> bfs(const std::vector<std::vector<int>>& adjacency, int source) {
  std::vector<int> dist(adjacency.size(), kUnreached);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adjacency[u]) {
      if (dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

void check_point(int n, int x, const char* what) {
  if (x < 0 || x >= n) {
    throw InputError(std::string(what) + " " + std::to_string(x) + " out of range [0," +
                     std::to_string(n) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteSpace

FiniteSpace FiniteSpace::from_edges(int points, std::span<const Edge> edges, int basepoint) {
  if (points < 1) throw InputError("a space needs at least one point");
  check_point(points, basepoint, "basepoint");
  std::vector<std::set<int>> nbrs(points);
  for (auto [a, b] : edges) {
    check_point(points, a, "edge endpoint");
    check_point(points, b, "edge endpoint");
    if (a == b) continue;
    nbrs[a].insert(b);
    nbrs[b].insert(a);
  }
  std::vector<std::vector<int>> adjacency(points);
  for (int x = 0; x < points; ++x) adjacency[x].assign(nbrs[x].begin(), nbrs[x].end());

  FiniteSpace space;
  space.n_ = points;
  space.basepoint_ = basepoint;
  space.dist_.resize(static_cast<std::size_t>(points) * points);
  for (int x = 0; x < points; ++x) {
    auto row = bfs(adjacency, x);
    for (int y = 0; y < points; ++y) {
      if (row[y] == kUnreached) {
        throw InputError("space is disconnected: no path from " + std::to_string(x) + " to " +
                         std::to_string(y));
      }
      space.dist_[static_cast<std::size_t>(x) * points + y] = row[y];
    }
  }
  space.finish();
  return space;
}

FiniteSpace FiniteSpace::from_distances(int points, std::vector<int> table, int basepoint) {
  if (points < 1) throw InputError("a space needs at least one point");
  check_point(points, basepoint, "basepoint");
  if (table.size() != static_cast<std::size_t>(points) * points) {
    throw InputError("distance table has wrong size");
  }
  auto at = [&](int x, int y) { return table[static_cast<std::size_t>(x) * points + y]; };
  for (int x = 0; x < points; ++x) {
    if (at(x, x) != 0) throw InputError("distance table: nonzero diagonal");
    for (int y = 0; y < points; ++y) {
      if (at(x, y) < 0) throw InputError("distance table: negative entry");
      if (x != y && at(x, y) == 0) throw InputError("distance table: distinct points at distance 0");
      if (at(x, y) != at(y, x)) throw InputError("distance table: not symmetric");
    }
  }
  for (int x = 0; x < points; ++x)
    for (int y = 0; y < points; ++y)
      for (int z = 0; z < points; ++z)
        if (at(x, z) > at(x, y) + at(y, z)) {
          throw InputError("distance table violates the triangle inequality at (" +
                           std::to_string(x) + "," + std::to_string(y) + "," +
                           std::to_string(z) + ")");
        }
  FiniteSpace space;
  space.n_ = points;
  space.basepoint_ = basepoint;
  space.dist_ = std::move(table);
  space.adjacency_.assign(points, {});
  for (int x = 0; x < points; ++x)
    for (int y = 0; y < points; ++y)
      if (space.dist(x, y) == 1) space.adjacency_[x].push_back(y);
  space.finish();
  return space;
}

void FiniteSpace::finish() {
  if (adjacency_.empty()) {
    adjacency_.assign(n_, {});
    for (int x = 0; x < n_; ++x)
      for (int y = 0; y < n_; ++y)
        if (dist(x, y) == 1) adjacency_[x].push_back(y);
  }
  diameter_ = dist_.empty() ? 0 : *std::max_element(dist_.begin(), dist_.end());
  degree_ = 0;
  for (const auto& row : adjacency_) degree_ = std::max<int>(degree_, static_cast<int>(row.size()));
}

std::vector<Edge> FiniteSpace::edges() const {
  std::vector<Edge> out;
  for (int x = 0; x < n_; ++x)
    for (int y : adjacency_[x])
      if (x < y) out.emplace_back(x, y);
  return out;
}

PointSet FiniteSpace::ball(int center, int radius) const {
  PointSet out;
  for (int y = 0; y < n_; ++y)
    if (dist(center, y) <= radius) out.push_back(y);
  return out;
}

int FiniteSpace::set_diameter(std::span<const int> set) const {
  int d = 0;
  for (int x : set)
    for (int y : set) d = std::max(d, dist(x, y));
  return d;
}

int FiniteSpace::set_distance(std::span<const int> a, std::span<const int> b) const {
  if (a.empty() || b.empty()) throw PreconditionError("set_distance of an empty set");
  int d = std::numeric_limits<int>::max();
  for (int x : a)
    for (int y : b) d = std::min(d, dist(x, y));
  return d;
}

FiniteSpace FiniteSpace::with_basepoint(int basepoint) const {
  check_point(n_, basepoint, "basepoint");
  FiniteSpace copy = *this;
  copy.basepoint_ = basepoint;
  return copy;
}

FiniteSpace FiniteSpace::relabeled(std::span<const int> perm) const {
  if (perm.size() != static_cast<std::size_t>(n_)) throw InputError("permutation has wrong size");
  std::vector<bool> seen(n_, false);
  for (int p : perm) {
    check_point(n_, p, "permutation entry");
    if (seen[p]) throw InputError("relabeling is not a permutation");
    seen[p] = true;
  }
  std::vector<int> table(dist_.size());
  for (int x = 0; x < n_; ++x)
    for (int y = 0; y < n_; ++y) table[static_cast<std::size_t>(perm[x]) * n_ + perm[y]] = dist(x, y);
  FiniteSpace out;
  out.n_ = n_;
  out.basepoint_ = perm[basepoint_];
  out.dist_ = std::move(table);
  out.finish();
  return out;
}

std::string FiniteSpace::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(n_));
  mix(static_cast<std::uint64_t>(basepoint_));
  for (int d : dist_) mix(static_cast<std::uint64_t>(d));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// FiniteGroup

FiniteGroup FiniteGroup::from_table(const std::vector<std::vector<int>>& table) {
  const int n = static_cast<int>(table.size());
  if (n < 1) throw InputError("group table is empty");
  FiniteGroup g;
  g.n_ = n;
  g.table_.resize(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    if (table[a].size() != static_cast<std::size_t>(n)) throw InputError("group table is not square");
    for (int b = 0; b < n; ++b) {
      check_point(n, table[a][b], "group table entry");
      g.table_[static_cast<std::size_t>(a) * n + b] = table[a][b];
    }
  }
  int identity = -1;
  for (int e = 0; e < n && identity < 0; ++e) {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) ok = g.mul(e, a) == a && g.mul(a, e) == a;
    if (ok) identity = e;
  }
  if (identity < 0) throw InputError("group table has no identity");
  g.identity_ = identity;
  g.inverse_.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b)
      if (g.mul(a, b) == identity && g.mul(b, a) == identity) {
        g.inverse_[a] = b;
        break;
      }
    if (g.inverse_[a] < 0) throw InputError("element " + std::to_string(a) + " has no inverse");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c))) {
          throw InputError("group table is not associative");
        }
  g.labels_.resize(n);
  for (int a = 0; a < n; ++a) g.labels_[a] = std::to_string(a);
  return g;
}

FiniteGroup FiniteGroup::cyclic(int n) {
  const int orders[] = {n};
  return product(orders);
}

int FiniteGroup::product_index(std::span<const int> orders, std::span<const int> coords) {
  if (coords.size() != orders.size()) throw InputError("coordinate count does not match factor count");
  int index = 0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    int c = coords[i] % orders[i];
    if (c < 0) c += orders[i];
    index = index * orders[i] + c;
  }
  return index;
}

FiniteGroup FiniteGroup::product(std::span<const int> orders) {
  if (orders.empty()) throw InputError("product group needs at least one factor");
  long long total = 1;
  for (int o : orders) {
    if (o < 1) throw InputError("cyclic factor order must be positive");
    total *= o;
    if (total > 20000) throw InputError("product group too large");
  }
  const int n = static_cast<int>(total);
  const std::size_t k = orders.size();
  std::vector<std::vector<int>> coords(n, std::vector<int>(k));
  for (int idx = 0; idx < n; ++idx) {
    int rest = idx;
    for (std::size_t i = k; i-- > 0;) {
      coords[idx][i] = rest % orders[i];
      rest /= orders[i];
    }
  }
  FiniteGroup g;
  g.n_ = n;
  g.identity_ = 0;
  g.table_.resize(static_cast<std::size_t>(n) * n);
  g.inverse_.resize(n);
  g.labels_.resize(n);
  std::vector<int> tmp(k);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (std::size_t i = 0; i < k; ++i) tmp[i] = coords[a][i] + coords[b][i];
      g.table_[static_cast<std::size_t>(a) * n + b] = product_index(orders, tmp);
    }
    for (std::size_t i = 0; i < k; ++i) tmp[i] = -coords[a][i];
    g.inverse_[a] = product_index(orders, tmp);
    std::string label;
    for (std::size_t i = 0; i < k; ++i) label += (i ? "," : "") + std::to_string(coords[a][i]);
    g.labels_[a] = k == 1 ? label : "(" + label + ")";
  }
  return g;
}

FiniteGroup FiniteGroup::matrix_mod_p(int p, std::span<const Mat2> generators) {
  if (p < 2) throw InputError("matrix_mod_p needs a modulus >= 2");
  auto norm = [p](Mat2 m) {
    for (int& v : m) v = ((v % p) + p) % p;
    return m;
  };
  auto mult = [p](const Mat2& a, const Mat2& b) {
    return Mat2{(a[0] * b[0] + a[1] * b[2]) % p, (a[0] * b[1] + a[1] * b[3]) % p,
                (a[2] * b[0] + a[3] * b[2]) % p, (a[2] * b[1] + a[3] * b[3]) % p};
  };
  std::vector<Mat2> gens;
  for (const auto& m : generators) {
    Mat2 g = norm(m);
    int det = ((g[0] * g[3] - g[1] * g[2]) % p + p) % p;
    if (std::gcd(det, p) != 1) throw InputError("matrix generator is not invertible mod p");
    gens.push_back(g);
  }
  std::map<Mat2, int> index;
  std::vector<Mat2> elements{Mat2{1, 0, 0, 1}};
  index[elements[0]] = 0;
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (const auto& s : gens) {
      Mat2 next = mult(elements[head], s);
      if (!index.count(next)) {
        if (elements.size() >= 20000) throw InputError("matrix group too large");
        index[next] = static_cast<int>(elements.size());
        elements.push_back(next);
      }
    }
  }
  const int n = static_cast<int>(elements.size());
  FiniteGroup g;
  g.n_ = n;
  g.identity_ = 0;
  g.table_.resize(static_cast<std::size_t>(n) * n);
  g.inverse_.resize(n);
  g.labels_.resize(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      g.table_[static_cast<std::size_t>(a) * n + b] = index.at(mult(elements[a], elements[b]));
      if (g.table_[static_cast<std::size_t>(a) * n + b] == 0) g.inverse_[a] = b;
    }
    const auto& m = elements[a];
    g.labels_[a] = "[[" + std::to_string(m[0]) + "," + std::to_string(m[1]) + "],[" +
                   std::to_string(m[2]) + "," + std::to_string(m[3]) + "]]";
  }
  g.matrices_ = std::move(elements);
  // The modulus is needed to normalise lookups.
  g.matrices_.push_back(Mat2{p, 0, 0, 0});
  return g;
}

std::optional<int> FiniteGroup::find(const std::string& label) const {
  for (int a = 0; a < n_; ++a)
    if (labels_[a] == label) return a;
  return std::nullopt;
}

std::optional<int> FiniteGroup::find_matrix(const Mat2& m) const {
  if (matrices_.empty()) return std::nullopt;
  const int p = matrices_.back()[0];
  Mat2 key = m;
  for (int& v : key) v = ((v % p) + p) % p;
  for (int a = 0; a < n_; ++a)
    if (matrices_[a] == key) return a;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Cayley spaces, girth, hyperbolicity

FiniteSpace build_cayley_space(const FiniteGroup& group, std::span<const int> generators) {
  std::set<int> gens;
  for (int s : generators) {
    check_point(group.order(), s, "generator");
    if (s != group.identity()) gens.insert(s);
  }
  for (int s : gens) {
    if (!gens.count(group.inverse(s))) {
      throw InputError("generating set is not symmetric: inverse of " + group.label(s) +
                       " is missing");
    }
  }
  std::vector<Edge> edges;
  for (int x = 0; x < group.order(); ++x)
    for (int s : gens) edges.emplace_back(x, group.mul(x, s));
  try {
    return FiniteSpace::from_edges(group.order(), edges, group.identity());
  } catch (const InputError&) {
    throw InputError("generators do not generate the group (Cayley graph is disconnected)");
  }
}

std::optional<int> girth(const FiniteSpace& space) {
  return multigraph_girth(space.size(), space.edges());
}

std::optional<int> multigraph_girth(int vertices, std::span<const Edge> edges) {
  std::map<Edge, int> multiplicity;
  for (auto [a, b] : edges) {
    check_point(vertices, a, "edge endpoint");
    check_point(vertices, b, "edge endpoint");
    if (a == b) return 1;
    ++multiplicity[{std::min(a, b), std::max(a, b)}];
  }
  for (const auto& [e, m] : multiplicity)
    if (m > 1) return 2;

  std::vector<std::vector<int>> adjacency(vertices);
  for (const auto& [e, m] : multiplicity) {
    adjacency[e.first].push_back(e.second);
    adjacency[e.second].push_back(e.first);
  }
  int best = std::numeric_limits<int>::max();
  for (int root = 0; root < vertices; ++root) {
    std::vector<int> dist(vertices, kUnreached), parent(vertices, -1);
    std::deque<int> queue{root};
    dist[root] = 0;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      if (2 * dist[u] + 1 >= best) break;
      for (int v : adjacency[u]) {
        if (dist[v] == kUnreached) {
          dist[v] = dist[u] + 1;
          parent[v] = u;
          queue.push_back(v);
        } else if (parent[u] != v) {
          best = std::min(best, dist[u] + dist[v] + 1);
        }
      }
    }
  }
  if (best == std::numeric_limits<int>::max()) return std::nullopt;
  return best;
}

HyperbolicityResult hyperbolicity_delta(const FiniteSpace& space, int max_points) {
  const int n = space.size();
  if (n > max_points) {
    throw PreconditionError("hyperbolicity_delta: " + std::to_string(n) +
                            " points exceeds the O(n^4) limit of " + std::to_string(max_points));
  }
  HyperbolicityResult result;
  result.convention =
      "four-point: d(x,y)+d(z,w) <= max(d(x,z)+d(y,w), d(x,w)+d(y,z)) + 2*delta";
  int best_twice = 0;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      for (int z = y + 1; z < n; ++z)
        for (int w = z + 1; w < n; ++w) {
          int s[3] = {space.dist(x, y) + space.dist(z, w), space.dist(x, z) + space.dist(y, w),
                      space.dist(x, w) + space.dist(y, z)};
          std::sort(s, s + 3);
          if (s[2] - s[1] > best_twice) {
            best_twice = s[2] - s[1];
            result.witness = {x, y, z, w};
          }
        }
  result.delta = best_twice / 2.0;
  return result;
}

// ---------------------------------------------------------------------------
// Annuli, covers, colouring

AnnularDecomposition annular_decomposition(const FiniteSpace& space, int width) {
  if (width < 1) throw PreconditionError("annulus width must be >= 1");
  AnnularDecomposition out;
  out.width = width;
  for (int x = 0; x < space.size(); ++x) {
    std::size_t k = static_cast<std::size_t>(annulus_index(space, x, width));
    if (out.parts.size() <= k) out.parts.resize(k + 1);
    out.parts[k].push_back(x);
  }
  while (!out.parts.empty() && out.parts.back().empty()) out.parts.pop_back();
  return out;
}

Cover Cover::make(const FiniteSpace& space, std::vector<PointSet> members) {
  Cover cover;
  std::vector<bool> covered(space.size(), false);
  for (auto& m : members) {
    if (m.empty()) throw InputError("cover member is empty");
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    for (int x : m) {
      check_point(space.size(), x, "cover point");
      covered[x] = true;
    }
    cover.diameter_bound = std::max(cover.diameter_bound, space.set_diameter(m));
  }
  for (int x = 0; x < space.size(); ++x)
    if (!covered[x]) throw InputError("cover misses point " + std::to_string(x));
  cover.members = std::move(members);
  return cover;
}

int cover_multiplicity(const FiniteSpace& space, std::span<const PointSet> members, int r) {
  std::vector<int> count(space.size(), 0);
  for (const auto& m : members) {
    for (int x = 0; x < space.size(); ++x) {
      for (int u : m)
        if (space.dist(x, u) <= r) {
          ++count[x];
          break;
        }
    }
  }
  return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

AnnularCover annular_refine(const FiniteSpace& space, const Cover& cover, int r) {
  if (r < 1) throw PreconditionError("annular_refine needs r >= 1");
  AnnularCover out;
  out.r = r;
  for (std::size_t m = 0; m < cover.members.size(); ++m) {
    std::map<int, PointSet> split;
    for (int x : cover.members[m]) split[annulus_index(space, x, 2 * r)].push_back(x);
    for (auto& [annulus, piece] : split) {
      out.pieces.push_back(std::move(piece));
      out.annulus_of.push_back(annulus);
      out.parent.push_back(static_cast<int>(m));
    }
  }
  return out;
}

Coloring greedy_color_cover(const FiniteSpace& space, const AnnularCover& cover, int r, int k) {
  if (r < 1) throw PreconditionError("greedy_color_cover needs r >= 1");
  if (k < 0) throw PreconditionError("greedy_color_cover needs k >= 0");
  const int width = 2 * r;
  const std::size_t count = cover.pieces.size();
  if (cover.annulus_of.size() != count) throw InputError("annular cover is inconsistent");
  for (std::size_t i = 0; i < count; ++i) {
    if (cover.pieces[i].empty()) throw InputError("annular cover has an empty piece");
    for (int x : cover.pieces[i])
      if (annulus_index(space, x, width) != cover.annulus_of[i]) {
        throw InputError("piece " + std::to_string(i) + " leaves its annulus");
      }
  }

  Coloring coloring;
  coloring.color_of.assign(count, -1);
  coloring.gap = r;
  coloring.multiplicity_bound = k;
  coloring.palette_per_parity = k + 1;

  auto annuli = annular_decomposition(space, width);
  for (std::size_t a = 0; a < annuli.parts.size(); ++a) {
    std::vector<int> members;
    for (std::size_t i = 0; i < count; ++i)
      if (cover.annulus_of[i] == static_cast<int>(a)) members.push_back(static_cast<int>(i));
    if (members.empty()) continue;

    PointSet net;
    for (int x : annuli.parts[a]) {
      bool separated = true;
      for (int y : net)
        if (space.dist(x, y) <= width) {
          separated = false;
          break;
        }
      if (separated) net.push_back(x);
    }

    const int offset = (a % 2 == 0) ? 0 : k + 1;
    for (int y : net) {
      std::vector<int> e_set;
      for (int i : members) {
        for (int x : cover.pieces[i])
          if (space.dist(x, y) <= width) {
            e_set.push_back(i);
            break;
          }
      }
      coloring.max_net_ball_count = std::max<int>(coloring.max_net_ball_count,
                                                  static_cast<int>(e_set.size()));
      if (static_cast<int>(e_set.size()) > k + 1) {
        throw PreconditionError("multiplicity bound violated: ball B_" + std::to_string(width) +
                                "(" + std::to_string(y) + ") meets " +
                                std::to_string(e_set.size()) + " pieces, bound k+1 = " +
                                std::to_string(k + 1));
      }
      for (int i : e_set) {
        if (coloring.color_of[i] >= 0) continue;
        std::vector<bool> used(k + 1, false);
        for (std::size_t j = 0; j < count; ++j) {
          int c = coloring.color_of[j];
          if (c < 0 || c < offset || c > offset + k) continue;
          if (space.set_distance(cover.pieces[i], cover.pieces[j]) <= r) used[c - offset] = true;
        }
        int choice = -1;
        for (int c = 0; c <= k; ++c)
          if (!used[c]) {
            choice = c;
            break;
          }
        if (choice < 0) {
          throw PreconditionError("multiplicity bound violated: palette of " +
                                  std::to_string(k + 1) + " colours exhausted for piece " +
                                  std::to_string(i) + " near ball B_" + std::to_string(width) +
                                  "(" + std::to_string(y) + ")");
        }
        coloring.color_of[i] = offset + choice;
      }
    }
  }
  for (std::size_t i = 0; i < count; ++i)
    if (coloring.color_of[i] < 0) throw Error("internal: piece left uncoloured");

  std::set<int> used(coloring.color_of.begin(), coloring.color_of.end());
  coloring.color_count = static_cast<int>(used.size());
  coloring.within_2k = coloring.color_count <= 2 * k;
  coloring.within_2k_plus_2 = coloring.color_count <= 2 * (k + 1);
  return coloring;
}

std::optional<ColoringDefect> find_coloring_defect(const FiniteSpace& space,
                                                   std::span<const PointSet> pieces,
                                                   const Coloring& coloring) {
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      if (coloring.color_of[i] != coloring.color_of[j]) continue;
      int d = space.set_distance(pieces[i], pieces[j]);
      if (d <= coloring.gap) return ColoringDefect{static_cast<int>(i), static_cast<int>(j), d};
    }
  return std::nullopt;
}

}  // namespace coarse
