#pragma once

// Shared fixtures, seeded generators and brute-force oracles for the tests.
// Oracles deliberately avoid the library code paths they check.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <memory>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "coarse/bandops.hpp"
#include "coarse/coverings.hpp"
#include "coarse/groups.hpp"
#include "coarse/spaces.hpp"

namespace testing {

using coarse::Edge;
using coarse::FiniteSpace;

inline std::vector<Edge> cycle_edges(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return e;
}

inline std::vector<Edge> path_edges(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return e;
}

inline std::vector<Edge> torus_edges(int a, int b) {
  std::vector<Edge> e;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) {
      e.emplace_back(i * b + j, ((i + 1) % a) * b + j);
      e.emplace_back(i * b + j, i * b + (j + 1) % b);
    }
  return e;
}

inline std::shared_ptr<const FiniteSpace> cycle(int n) {
  return std::make_shared<const FiniteSpace>(FiniteSpace::from_edges(n, cycle_edges(n)));
}

inline std::shared_ptr<const FiniteSpace> path(int n) {
  return std::make_shared<const FiniteSpace>(FiniteSpace::from_edges(n, path_edges(n)));
}

/// All-pairs BFS distances of an undirected graph; -1 for unreachable.
inline std::vector<std::vector<int>> bfs_table(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    if (a == b) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::vector<int>> d(n, std::vector<int>(n, -1));
  for (int s = 0; s < n; ++s) {
    std::queue<int> q;
    q.push(s);
    d[s][s] = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w : adj[v])
        if (d[s][w] < 0) {
          d[s][w] = d[s][v] + 1;
          q.push(w);
        }
    }
  }
  return d;
}

/// Cycle-metric distance on Z/n.
inline int cyclic_dist(int a, int b, int n) {
  int d = ((a - b) % n + n) % n;
  return std::min(d, n - d);
}

/**
 * Independent injectivity radius: largest R such that for every y with
 * reach(y) >= R', R' <= R, the ball maps bijectively and isometrically onto the
 * target ball. Uses only the two distance functions and the point map.
 */
inline int brute_injectivity_radius(const coarse::CoveringMap& c) {
  const auto& s = *c.source();
  const auto& t = *c.target();
  auto ok = [&](int R) {
    for (int y = 0; y < s.size(); ++y) {
      if (c.reach(y) < R) continue;
      std::vector<int> ball;
      for (int z = 0; z < s.size(); ++z)
        if (s.dist(y, z) <= R) ball.push_back(z);
      std::set<int> image;
      for (int z : ball) image.insert(c(z));
      if (image.size() != ball.size()) return false;
      int target_ball = 0;
      for (int u = 0; u < t.size(); ++u)
        if (t.dist(c(y), u) <= R) ++target_ball;
      if (target_ball != static_cast<int>(ball.size())) return false;
      for (int a : ball)
        for (int b : ball)
          if (s.dist(a, b) != t.dist(c(a), c(b))) return false;
    }
    return true;
  };
  int R = 0;
  while (R < c.max_reach() && ok(R + 1)) ++R;
  return R;
}

/// Dense matrix product and helpers written without the library.
inline coarse::Matrix naive_product(const coarse::Matrix& a, const coarse::Matrix& b) {
  coarse::Matrix out = coarse::Matrix::Zero(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      for (int k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

inline double max_abs_diff(const coarse::Matrix& a, const coarse::Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Largest singular value via the self-adjoint eigenvalues of A*A.
inline double eig_norm(const coarse::Matrix& a) {
  Eigen::SelfAdjointEigenSolver<coarse::Matrix> es(a.adjoint() * a);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::complex<double> complex() { return {real(-1.0, 1.0), real(-1.0, 1.0)}; }
  bool coin() { return uniform(0, 1) == 1; }
  std::mt19937_64& engine() { return rng_; }

  /// Random element of the group ring supported in the ball of radius r around e.
  coarse::GroupRingElement element(const coarse::MarkedGroupPtr& g, int r, int terms) {
    std::vector<int> pool;
    for (int h = 0; h < g->size(); ++h)
      if (g->word_length(h) <= r) pool.push_back(h);
    coarse::GroupRingElement::Coefficients c;
    for (int i = 0; i < terms; ++i) c[pool[uniform(0, static_cast<int>(pool.size()) - 1)]] += complex();
    return coarse::GroupRingElement(g, c);
  }

  /// Element on Z (or Z/n) with prescribed extreme offsets, as exponent -> coefficient.
  coarse::GroupRingElement exponent_element(const coarse::MarkedGroupPtr& g,
                                            const std::vector<std::pair<int, std::complex<double>>>& terms) {
    std::vector<std::pair<coarse::Word, std::complex<double>>> words;
    for (auto [k, c] : terms) words.emplace_back(coarse::Word(std::abs(k), k >= 0 ? 1 : -1), c);
    return coarse::GroupRingElement::from_words(g, words);
  }

  /// Random band operator with propagation <= R.
  coarse::BandOperator band(const std::shared_ptr<const FiniteSpace>& s, int R) {
    coarse::Matrix m = coarse::Matrix::Zero(s->size(), s->size());
    for (int x = 0; x < s->size(); ++x)
      for (int y = 0; y < s->size(); ++y)
        if (s->dist(x, y) <= R && coin()) m(x, y) = complex();
    return coarse::BandOperator(s, m);
  }

  /// Random permutation matrix times diagonal phases.
  coarse::BandOperator permutation_unitary(const std::shared_ptr<const FiniteSpace>& s) {
    const int n = s->size();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng_);
    coarse::Matrix m = coarse::Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x) m(perm[x], x) = std::polar(1.0, real(0.0, 6.283185307179586));
    return coarse::BandOperator(s, m);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testing
