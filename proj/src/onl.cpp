#include "coarse/onl.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <boost/multiprecision/cpp_int.hpp>

#include "coarse/errors.hpp"

namespace coarse {

namespace {

constexpr double kSlack = 1e-12;

std::vector<PointSet> ball_supports(const FiniteSpace& space, int d) {
  std::set<PointSet> seen;
  std::vector<PointSet> out;
  for (int c = 0; c < space.size(); ++c) {
    PointSet best{c};
    for (int rho = 1; rho <= space.diameter(); ++rho) {
      PointSet ball = space.ball(c, rho);
      if (space.set_diameter(ball) > d) break;
      best = std::move(ball);
      if (static_cast<int>(best.size()) == space.size()) break;
    }
    if (seen.insert(best).second) out.push_back(std::move(best));
  }
  return out;
}

/// Bron-Kerbosch with pivoting on the graph "distance <= d".
void maximal_sets(const FiniteSpace& space, int d, PointSet& current, PointSet candidates,
                  PointSet excluded, std::vector<PointSet>& out) {
  if (candidates.empty() && excluded.empty()) {
    out.push_back(current);
    std::sort(out.back().begin(), out.back().end());
    if (out.size() > 200000) throw PreconditionError("too many maximal supports to enumerate");
    return;
  }
  auto close = [&](int a, int b) { return a != b && space.dist(a, b) <= d; };
  int pivot = candidates.empty() ? excluded[0] : candidates[0];
  std::size_t best = 0;
  for (const auto* set : {&candidates, &excluded})
    for (int u : *set) {
      std::size_t count = 0;
      for (int v : candidates) count += close(u, v);
      if (count > best) best = count, pivot = u;
    }
  PointSet todo;
  for (int v : candidates)
    if (!close(pivot, v)) todo.push_back(v);
  for (int v : todo) {
    PointSet nc, nx;
    for (int u : candidates)
      if (close(u, v)) nc.push_back(u);
    for (int u : excluded)
      if (close(u, v)) nx.push_back(u);
    current.push_back(v);
    maximal_sets(space, d, current, nc, nx, out);
    current.pop_back();
    candidates.erase(std::find(candidates.begin(), candidates.end(), v));
    excluded.push_back(v);
  }
}

std::vector<int> support_columns(const PointSet& support, int points, int blocks) {
  std::vector<int> cols;
  for (int b = 0; b < blocks; ++b)
    for (int x : support) cols.push_back(b * points + x);
  return cols;
}

}  // namespace

Localization localization_search(const BandOperator& t, int support_diameter, SupportMode mode) {
  if (support_diameter < 0) throw PreconditionError("support diameter must be >= 0");
  const auto& space = *t.space();
  Localization out;
  out.norm = spectral_norm(t.entries());
  if (out.norm <= kEntryTolerance) {
    out.zero_operator = true;
    out.ratio = 1.0;
    out.eta = Vector::Zero(t.dim());
    out.eta(space.basepoint()) = 1.0;
    out.support = {space.basepoint()};
    return out;
  }
  std::vector<PointSet> supports;
  if (mode == SupportMode::kBalls) {
    supports = ball_supports(space, support_diameter);
  } else {
    if (space.size() > kMaximalSubsetLimit) {
      throw PreconditionError("maximal-subset search is limited to " +
                              std::to_string(kMaximalSubsetLimit) + " points");
    }
    PointSet current, candidates(space.size());
    for (int x = 0; x < space.size(); ++x) candidates[x] = x;
    maximal_sets(space, support_diameter, current, candidates, {}, supports);
    std::sort(supports.begin(), supports.end());
  }

  out.ratio = -1.0;
  for (const auto& support : supports) {
    auto cols = support_columns(support, space.size(), t.blocks());
    Matrix sub(t.dim(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = t.entries().col(cols[j]);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sub.adjoint() * sub);
    const Eigen::Index top = eig.eigenvalues().size() - 1;
    Vector local = eig.eigenvectors().col(top);
    double ratio = std::min(1.0, (sub * local).norm() / out.norm);
    if (ratio > out.ratio) {
      out.ratio = ratio;
      out.eta = Vector::Zero(t.dim());
      for (std::size_t j = 0; j < cols.size(); ++j) out.eta(cols[j]) = local(static_cast<Eigen::Index>(j));
      out.support = support;
    }
  }
  out.support_diameter = space.set_diameter(out.support);
  return out;
}

MinimalLocalization minimal_localization_diameter(const BandOperator& t, double c, SupportMode mode) {
  int lo = 0, hi = t.space()->diameter();
  Localization at_hi = localization_search(t, hi, mode);
  while (lo < hi) {
    int mid = lo + (hi - lo) / 2;
    Localization probe = localization_search(t, mid, mode);
    if (probe.ratio >= c - kSlack) {
      hi = mid;
      at_hi = std::move(probe);
    } else {
      lo = mid + 1;
    }
  }
  return {hi, std::move(at_hi)};
}

std::vector<BandOperator> sample_ensemble(const SpacePtr& space, int R, const EnsembleSpec& spec) {
  if (spec.size < 1) throw PreconditionError("ensemble size must be >= 1");
  if (R < 0) throw PreconditionError("propagation scale must be >= 0");
  static const std::vector<std::string> kinds{"gaussian", "adjacency", "permutation"};
  if (spec.kind != "mixed" && std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end()) {
    throw InputError("unknown ensemble kind '" + spec.kind + "'");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  const int n = space->size();
  const BandOperator adjacency = BandOperator::adjacency(space);
  std::vector<BandOperator> out;
  for (int i = 0; i < spec.size; ++i) {
    const std::string& kind = spec.kind == "mixed" ? kinds[i % kinds.size()] : spec.kind;
    Matrix m = Matrix::Zero(n, n);
    if (kind == "gaussian") {
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          if (space->dist(x, y) <= R) m(x, y) = {normal(rng), normal(rng)};
    } else if (kind == "adjacency") {
      const int power = R == 0 ? 0 : 1 + (i / static_cast<int>(spec.kind == "mixed" ? kinds.size() : 1)) % R;
      m = Matrix::Identity(n, n);
      for (int k = 0; k < power; ++k) m = m * adjacency.entries();
      m *= std::polar(1.0, angle(rng));
    } else {
      std::vector<int> order(n), partner(n, -1);
      for (int x = 0; x < n; ++x) order[x] = x;
      std::shuffle(order.begin(), order.end(), rng);
      for (int x : order) {
        if (partner[x] >= 0) continue;
        std::vector<int> options;
        for (int y = 0; y < n; ++y)
          if (y != x && partner[y] < 0 && space->dist(x, y) <= R) options.push_back(y);
        if (options.empty()) {
          partner[x] = x;
        } else {
          int y = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
          partner[x] = y;
          partner[y] = x;
        }
      }
      for (int x = 0; x < n; ++x) m(x, partner[x]) = std::polar(1.0, angle(rng));
    }
    out.emplace_back(space, std::move(m));
  }
  return out;
}

OnlResult onl_estimate(const SpacePtr& space, int R, double c, const EnsembleSpec& ensemble,
                       std::optional<int> f_cap, SupportMode mode) {
  if (!(c > 0.0 && c < 1.0)) throw PreconditionError("ONL constant c must lie in (0,1)");
  OnlResult result;
  result.space_hash = space->hash();
  result.R = R;
  result.c = c;
  result.ensemble = ensemble;
  result.cap = f_cap;
  auto ops = sample_ensemble(space, R, ensemble);

  std::vector<MinimalLocalization> minimal;
  for (const auto& op : ops) {
    minimal.push_back(minimal_localization_diameter(op, c, mode));
    result.f_R = std::max(result.f_R, minimal.back().diameter);
  }
  result.certified = !f_cap || result.f_R <= *f_cap;
  const int scale = result.certified ? result.f_R : *f_cap;
  result.min_ratio = 1.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    Localization loc = localization_search(ops[i], scale, mode);
    result.min_ratio = std::min(result.min_ratio, loc.ratio);
    if (loc.ratio >= c - kSlack) {
      result.witnesses.push_back({static_cast<int>(i), loc.support_diameter, loc.ratio,
                                  loc.support, loc.eta});
    } else if (!result.hardest_index || loc.ratio < result.hardest_ratio) {
      result.hardest_index = static_cast<int>(i);
      result.hardest_ratio = loc.ratio;
    }
  }
  if (result.certified) result.hardest_ratio = result.min_ratio;
  return result;
}

bool verify_witness(const BandOperator& t, const OnlWitness& witness, int f_R, double c,
                    const FiniteSpace& space) {
  if (std::abs(witness.eta.norm() - 1.0) > 1e-12) return false;
  if (space.set_diameter(witness.support) > f_R) return false;
  std::vector<bool> allowed(space.size(), false);
  for (int x : witness.support) allowed[x] = true;
  for (Eigen::Index i = 0; i < witness.eta.size(); ++i)
    if (witness.eta(i) != std::complex<double>(0.0) && !allowed[i % space.size()]) return false;
  const double norm = spectral_norm(t.entries());
  if (norm <= kEntryTolerance) return true;
  return (t.entries() * witness.eta).norm() / norm >= c - 1e-9;
}

// ---------------------------------------------------------------------------

ControlFunction ControlFunction::identity() { return {[](double k) { return k; }, "f(k)=k"}; }

ControlFunction ControlFunction::constant(double value) {
  return {[value](double) { return value; }, "f(k)=" + std::to_string(value)};
}

ControlFunction ControlFunction::linear(double slope, double intercept) {
  if (slope < 0) throw PreconditionError("control functions must be nondecreasing");
  return {[slope, intercept](double k) { return slope * k + intercept; },
          "f(k)=" + std::to_string(slope) + "k+" + std::to_string(intercept)};
}

ControlFunction ControlFunction::tabulated(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw InputError("tabulated control function needs points");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].first <= points[i - 1].first) throw InputError("abscissae must be strictly increasing");
    if (points[i].second < points[i - 1].second) throw InputError("control function must be nondecreasing");
  }
  auto table = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(points));
  return {[table](double k) {
            if (k < table->front().first) {
              throw PreconditionError("control function evaluated below its domain");
            }
            auto it = std::upper_bound(table->begin(), table->end(), k,
                                       [](double v, const auto& p) { return v < p.first; });
            return std::prev(it)->second;
          },
          "tabulated step function (" + std::to_string(table->size()) + " points)"};
}

std::string amplification_formula(int n) {
  if (n == 1) return "g(k)=f(k)";
  const std::string lead = n == 2 ? "k" : std::to_string(n - 1) + "k";
  return "g(k)=" + lead + "+f(" + std::to_string(n) + "k)";
}

Amplification amplify_constant(double c, const ControlFunction& f, double c_target, AmplifyMode mode) {
  if (!(c > 0.0 && c < 1.0) || !(c_target > 0.0 && c_target < 1.0)) {
    throw PreconditionError("amplify_constant needs c and c_target in (0,1)");
  }
  int n = 1;
  if (mode == AmplifyMode::kRoot) {
    while (std::pow(c, 1.0 / n) < c_target * (1.0 - kSlack)) {
      if (++n > 1000000) throw PreconditionError("no n <= 10^6 reaches the target constant");
    }
  } else {
    if (c < c_target * (1.0 - kSlack)) {
      throw PreconditionError("verbatim mode: c^n >= c_target has no solution n >= 1 when c_target > c");
    }
    while (std::pow(c, n + 1) >= c_target * (1.0 - kSlack)) ++n;
  }
  Amplification out;
  out.n = n;
  out.formula = amplification_formula(n);
  auto inner = f.f;
  out.g = {[inner, n](double k) { return (n - 1) * k + inner(n * k); }, out.formula};
  return out;
}

RoeCoverBound roe_cover_bound(int degree, double delta, double R) {
  if (degree < 2) throw PreconditionError("roe_cover_bound needs |S| >= 2");
  if (delta < 0 || R < 0) throw PreconditionError("roe_cover_bound needs delta >= 0 and R >= 0");
  RoeCoverBound out;
  out.diameter = 2.0 * R + 2.0 * delta;
  out.exponent = static_cast<int>(std::ceil(6.0 * delta - 1e-9));
  boost::multiprecision::cpp_int colours = boost::multiprecision::pow(
      boost::multiprecision::cpp_int(degree), static_cast<unsigned>(out.exponent));
  out.colours = colours.str();
  return out;
}

long long lacunary_radius(double delta, double r) {
  if (!(delta > 0.0) || !(r > 0.0)) throw PreconditionError("delta_m and r_m must be positive");
  double x = (r / delta - 2.0) / 18.0;
  if (x <= 0.0) return 0;
  long long R = static_cast<long long>(std::floor(x));
  const double bound = r * (1.0 + kSlack);
  while (18.0 * delta * (R + 1) + 2.0 * delta <= bound) ++R;
  while (R > 0 && 18.0 * delta * R + 2.0 * delta > bound) --R;
  return R;
}

LacunaryControls lacunary_control_radius(const std::vector<double>& delta, const std::vector<double>& r,
                                         const std::vector<ControlFunction>& controls) {
  if (delta.size() != r.size()) throw PreconditionError("delta_m and r_m have different lengths");
  if (!controls.empty() && controls.size() != r.size()) {
    throw PreconditionError("one control function per term is required");
  }
  LacunaryControls out;
  out.delta = delta;
  out.r = r;
  for (std::size_t m = 0; m < r.size(); ++m) {
    out.R.push_back(lacunary_radius(delta[m], r[m]));
    if (!controls.empty()) {
      const auto& f = controls[m];
      long long lo = -1, hi = static_cast<long long>(std::floor(r[m]));
      while (lo < hi) {
        long long mid = lo + (hi - lo + 1) / 2;
        if (mid + f(static_cast<double>(mid)) <= r[m]) lo = mid; else hi = mid - 1;
      }
      out.sup_form.push_back(lo);
    }
  }
  if (out.R.size() < 2) {
    out.verdict = "insufficient data";
  } else {
    bool nondecreasing = std::is_sorted(out.R.begin(), out.R.end());
    out.verdict = nondecreasing && out.R.back() > out.R.front() ? "increasing (window evidence)"
                                                                : "not increasing";
  }
  out.note =
      "R_m solves 18*delta*R + 2*delta <= r_m; the same argument also states the constraint "
      "18*delta*R + 12*delta <= r_m, which gives smaller radii";
  return out;
}

double onl_constant_floor(int degree) {
  if (degree < 1) throw PreconditionError("onl_constant_floor needs |S| >= 1");
  return 1.0 / (2.0 * degree);
}

}  // namespace coarse
