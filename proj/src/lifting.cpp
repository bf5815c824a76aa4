#include "coarse/lifting.hpp"

#include <algorithm>
#include <cmath>

#include "coarse/errors.hpp"

namespace coarse {

namespace {

bool is_push(const GroupRingElement& a, const CoveringMap& cover) {
  if (cover.source_group() == a.group()) return true;
  if (cover.target_group() == a.group()) return false;
  throw PreconditionError("element lives on neither side of the covering " + cover.description());
}

/// Image of a in the other group of the covering, or nullopt when the support does not fit.
std::optional<GroupRingElement> transfer(const GroupRingElement& a, const CoveringMap& cover) {
  if (a.support_radius() > cover.injectivity_radius()) return std::nullopt;
  auto window = LiftWindow::make(cover, a.support_radius());
  return is_push(a, cover) ? pushforward_group_ring(a, window) : lift_group_ring(a, window);
}

/// Maps points of B_radius(e) of a's group to the other side of the covering.
std::vector<int> transfer_points(const PointSet& points, bool push, const CoveringMap& cover,
                                 int radius) {
  std::vector<int> out;
  if (push) {
    for (int y : points) out.push_back(cover(y));
  } else {
    auto pre = short_preimages(cover, radius);
    for (int u : points) out.push_back(pre[u]);
  }
  return out;
}

Matrix columns(const Matrix& m, const PointSet& cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
  return out;
}

}  // namespace

LiftWindow LiftWindow::make(const CoveringMap& cover, int R) {
  if (R < 0) throw PreconditionError("lift window radius must be >= 0");
  if (R > cover.injectivity_radius()) {
    throw PreconditionError("lift window R=" + std::to_string(R) +
                            " exceeds the injectivity radius " +
                            std::to_string(cover.injectivity_radius()));
  }
  return LiftWindow{&cover, R};
}

BandOperator lift_entries(const BandOperator& t, const CoveringMap& cover, int cutoff) {
  if (!(*t.space() == *cover.target())) {
    throw PreconditionError("operator does not live on the covering's target");
  }
  const auto& src = *cover.source();
  const int ns = src.size(), nt = t.points(), b = t.blocks();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(ns) * b, static_cast<Eigen::Index>(ns) * b);
  for (int y = 0; y < ns; ++y)
    for (int z = 0; z < ns; ++z) {
      if (src.dist(y, z) > cutoff) continue;
      const int py = cover(y), pz = cover(z);
      for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j) m(i * ns + y, j * ns + z) = t(i * nt + py, j * nt + pz);
    }
  return BandOperator(cover.source(), std::move(m), b);
}

BandOperator lift_operator(const BandOperator& t, const LiftWindow& window) {
  if (t.propagation() > window.R) {
    throw PreconditionError("operator propagation " + std::to_string(t.propagation()) +
                            " exceeds the lift window R=" + std::to_string(window.R));
  }
  return lift_entries(t, *window.cover, window.R);
}

BandOperator pushforward_operator(const BandOperator& t, const LiftWindow& window) {
  const CoveringMap& cover = *window.cover;
  if (!(*t.space() == *cover.source())) {
    throw PreconditionError("operator does not live on the covering's source");
  }
  if (t.propagation() > window.R) {
    throw PreconditionError("operator propagation " + std::to_string(t.propagation()) +
                            " exceeds the window R=" + std::to_string(window.R));
  }
  const auto& src = *cover.source();
  const int ns = src.size(), nt = cover.target()->size(), b = t.blocks();
  std::vector<int> chosen(nt, -1);
  for (int y = 0; y < ns; ++y) {
    int u = cover(y);
    if (cover.reach(y) >= window.R && (chosen[u] < 0 || cover.reach(y) > cover.reach(chosen[u]))) {
      chosen[u] = y;
    }
  }
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(nt) * b, static_cast<Eigen::Index>(nt) * b);
  for (int u = 0; u < nt; ++u) {
    const int y = chosen[u];
    if (y < 0) {
      throw PreconditionError("target point " + std::to_string(u) +
                              " has no preimage whose R-ball lies in the source");
    }
    for (int z : src.ball(y, window.R))
      for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j) m(i * nt + u, j * nt + cover(z)) = t(i * ns + y, j * ns + z);
  }
  return BandOperator(cover.target(), std::move(m), b);
}

std::vector<int> short_preimages(const CoveringMap& cover, int radius) {
  const auto& src = *cover.source();
  const auto& tgt = *cover.target();
  std::vector<int> pre(tgt.size(), -1);
  for (int y = 0; y < src.size(); ++y) {
    if (src.dist(src.basepoint(), y) > radius) continue;
    const int u = cover(y);
    if (pre[u] >= 0) {
      throw PreconditionError("ball of radius " + std::to_string(radius) +
                              " does not map injectively (points " + std::to_string(pre[u]) +
                              " and " + std::to_string(y) + ")");
    }
    pre[u] = y;
  }
  return pre;
}

GroupRingElement lift_group_ring(const GroupRingElement& a, const LiftWindow& window) {
  const CoveringMap& cover = *window.cover;
  if (!cover.source_group() || cover.target_group() != a.group()) {
    throw PreconditionError("element does not live on the covering's target group");
  }
  if (a.support_radius() > window.R) {
    throw PreconditionError("support radius " + std::to_string(a.support_radius()) +
                            " exceeds the lift window R=" + std::to_string(window.R));
  }
  auto pre = short_preimages(cover, window.R);
  GroupRingElement::Coefficients c;
  for (const auto& [g, v] : a.coefficients()) c[pre[g]] = v;
  return GroupRingElement(cover.source_group(), std::move(c));
}

GroupRingElement pushforward_group_ring(const GroupRingElement& a, const LiftWindow& window) {
  const CoveringMap& cover = *window.cover;
  if (!cover.target_group() || cover.source_group() != a.group()) {
    throw PreconditionError("element does not live on the covering's source group");
  }
  if (a.support_radius() > window.R) {
    throw PreconditionError("support radius " + std::to_string(a.support_radius()) +
                            " exceeds the window R=" + std::to_string(window.R));
  }
  GroupRingElement::Coefficients c;
  for (const auto& [g, v] : a.coefficients()) c[cover(g)] += v;
  return GroupRingElement(cover.target_group(), std::move(c));
}

MultiplicativityReport local_multiplicativity_check(const BandOperator& s, const BandOperator& t,
                                                    const LiftWindow& window) {
  require_same_space(s, t, "local_multiplicativity_check");
  const CoveringMap& cover = *window.cover;
  MultiplicativityReport report;
  report.prop_s = s.propagation();
  report.prop_t = t.propagation();
  report.window_R = window.R;
  const int total = report.prop_s + report.prop_t;
  report.expected_equal = total <= window.R;

  BandOperator lhs = lift_entries(multiply(s, t), cover, total);
  BandOperator rhs = multiply(lift_entries(s, cover, report.prop_s),
                              lift_entries(t, cover, report.prop_t));
  const int ns = cover.source()->size();
  for (int row = 0; row < lhs.dim(); ++row) {
    if (cover.reach(row % ns) < total) continue;
    ++report.rows_compared;
    for (int col = 0; col < lhs.dim(); ++col) {
      double diff = std::abs(lhs(row, col) - rhs(row, col));
      if (diff > report.max_difference) report.max_difference = diff;
      if (diff > kEntryTolerance && !report.witness) {
        report.witness = EntryWitness{row, col, lhs(row, col), rhs(row, col)};
      }
    }
  }
  report.equal = !report.witness.has_value();
  return report;
}

GroupRingMultiplicativity group_ring_multiplicativity_check(const GroupRingElement& a,
                                                            const GroupRingElement& b,
                                                            const LiftWindow& window) {
  if (a.support_radius() + b.support_radius() > window.R) {
    throw PreconditionError("support radii " + std::to_string(a.support_radius()) + " + " +
                            std::to_string(b.support_radius()) + " exceed the window R=" +
                            std::to_string(window.R));
  }
  auto lhs = lift_group_ring(multiply(a, b), window);
  auto rhs = multiply(lift_group_ring(a, window), lift_group_ring(b, window));
  GroupRingMultiplicativity out;
  out.max_difference = max_coefficient_difference(lhs, rhs);
  out.equal = out.max_difference <= kEntryTolerance;
  return out;
}

double symbol_sup_norm(const std::vector<std::pair<int, std::complex<double>>>& terms) {
  if (terms.empty()) return 0.0;
  int span = 1;
  for (const auto& [k, c] : terms) span = std::max(span, std::abs(k));
  auto value = [&](double theta) {
    std::complex<double> z = 0.0;
    for (const auto& [k, c] : terms) z += c * std::polar(1.0, k * theta);
    return std::abs(z);
  };
  // Dense grid, then golden-section refinement around the best few cells.
  const int grid = std::max(4096, 64 * (span + 1));
  const double h = 2.0 * M_PI / grid;
  std::vector<std::pair<double, int>> samples(grid);
  for (int i = 0; i < grid; ++i) samples[i] = {value(i * h), i};
  std::partial_sort(samples.begin(), samples.begin() + std::min(8, grid), samples.end(),
                    [](const auto& x, const auto& y) { return x.first > y.first; });
  double best = samples[0].first;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int s = 0; s < std::min(8, grid); ++s) {
    double lo = (samples[s].second - 1) * h, hi = (samples[s].second + 1) * h;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = value(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = value(x1);
      }
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

RegularNorm regular_representation_norm(const GroupRingElement& a) {
  const auto& group = *a.group();
  RegularNorm out;
  if (group.is_finite_group()) {
    out.method = "finite group";
    out.interior.resize(group.size());
    for (int g = 0; g < group.size(); ++g) out.interior[g] = g;
  } else {
    const int inner = group.radius() - a.support_radius();
    if (inner < 0) throw PreconditionError("support radius exceeds the ball radius");
    out.interior = group.space()->ball(group.identity(), inner);
  }
  out.interior_size = static_cast<int>(out.interior.size());
  if (!group.is_finite_group() && group.rank() == 1) {
    out.method = "fourier symbol";
    std::vector<std::pair<int, std::complex<double>>> terms;
    for (const auto& [g, c] : a.coefficients()) {
      int k = 0;
      for (Letter l : group.word(g)) k += l > 0 ? 1 : -1;
      terms.emplace_back(k, c);
    }
    out.norm = symbol_sup_norm(terms);
    return out;
  }
  if (!group.is_finite_group()) out.method = "interior columns (lower bound)";
  if (a.is_zero()) return out;
  out.norm = spectral_norm(columns(to_band_operator(a).entries(), out.interior));
  return out;
}

NormProfile limsup_norm_profile(const GroupRingElement& a, const std::vector<CoveringMap>& family,
                                double tol, double c) {
  if (family.empty()) throw PreconditionError("limsup_norm_profile needs a nonempty family");
  if (!(c > 0.0 && c <= 1.0)) throw PreconditionError("continuity constant c must lie in (0,1]");
  NormProfile profile;
  profile.element = a.to_string();
  profile.c = c;
  auto base = regular_representation_norm(a);
  profile.base_norm = base.norm;
  profile.interior_size = base.interior_size;

  std::vector<std::size_t> admissible;
  std::vector<GroupRingElement> images;
  for (std::size_t m = 0; m < family.size(); ++m) {
    ProfileTerm term;
    term.m = static_cast<int>(m);
    term.r_m = family[m].injectivity_radius();
    profile.orientation = is_push(a, family[m]) ? "pushforward to quotients" : "lift to covers";
    auto image = transfer(a, family[m]);
    if (image) {
      term.admissible = true;
      term.norm_lift = regular_representation_norm(*image).norm;
      term.norm_base = base.norm;
      term.ratio = base.norm > 0.0 ? term.norm_lift / base.norm : (term.norm_lift == 0.0 ? 1.0 : INFINITY);
      admissible.push_back(m);
      images.push_back(*image);
    } else {
      images.push_back(a);
    }
    profile.terms.push_back(term);
  }
  if (admissible.empty()) {
    throw PreconditionError("support radius " + std::to_string(a.support_radius()) +
                            " exceeds every injectivity radius of the family");
  }

  const std::size_t tail = admissible.size() / 2;
  profile.window_length = static_cast<int>(admissible.size() - tail);
  for (std::size_t k = tail; k < admissible.size(); ++k)
    profile.limsup = std::max(profile.limsup, profile.terms[admissible[k]].norm_lift);
  profile.continuity_bound_holds = profile.limsup <= profile.base_norm / c * (1.0 + tol) + tol;

  // Witness vector v supported in B_rho(e) with rho + radius(a) <= every admissible r_m.
  const auto& group = *a.group();
  int min_r = family[admissible[0]].injectivity_radius();
  for (auto m : admissible) min_r = std::min(min_r, family[m].injectivity_radius());
  int rho = std::max(0, min_r - a.support_radius());
  if (!group.is_finite_group()) rho = std::min(rho, group.radius() - a.support_radius());
  profile.witness_radius = rho;
  if (!a.is_zero()) {
    PointSet support = group.space()->ball(group.identity(), rho);
    Matrix t = to_band_operator(a).entries();
    Eigen::JacobiSVD<Matrix> svd(columns(t, support), Eigen::ComputeThinV);
    Vector v = svd.matrixV().col(0);
    Vector full = Vector::Zero(group.size());
    for (std::size_t i = 0; i < support.size(); ++i) full(support[i]) = v(static_cast<Eigen::Index>(i));
    profile.witness_norm = (t * full).norm();
    profile.witness_constant = base.norm > 0.0 ? profile.witness_norm / base.norm : 1.0;
    for (std::size_t k = 0; k < admissible.size(); ++k) {
      const auto& cover = family[admissible[k]];
      const auto& image = images[admissible[k]];
      auto mapped = transfer_points(support, is_push(a, cover), cover, rho);
      Vector w = Vector::Zero(image.group()->size());
      for (std::size_t i = 0; i < support.size(); ++i) w(mapped[i]) += v(static_cast<Eigen::Index>(i));
      double lifted = (to_band_operator(image).entries() * w).norm();
      profile.terms[admissible[k]].witness_residual = std::abs(lifted - profile.witness_norm);
    }
  }
  profile.verdict = profile.continuity_bound_holds
                        ? "limsup within (1/c)||a|| (window evidence)"
                        : "limsup exceeds (1/c)||a|| (window evidence)";
  return profile;
}

ContinuityReport continuity_classification(const std::vector<CoveringMap>& family,
                                           const std::vector<GroupRingElement>& samples, double tol,
                                           double c) {
  if (samples.empty()) throw PreconditionError("continuity_classification needs samples");
  if (!(c > 0.0 && c <= 1.0)) throw PreconditionError("continuity constant c must lie in (0,1]");
  ContinuityReport report;
  report.tol = tol;
  report.c = c;
  bool any_admissible = false, all_iso = true, all_cont = true, all_relaxed = true;
  for (const auto& a : samples) {
    SampleContinuity sample;
    sample.element = a.to_string();
    const double base = regular_representation_norm(a).norm;
    struct Flags {
      bool cont, iso, relaxed;
    };
    std::vector<std::pair<int, Flags>> terms;
    for (std::size_t m = 0; m < family.size(); ++m) {
      auto image = transfer(a, family[m]);
      if (!image) {
        sample.ratios.push_back(NAN);
        continue;
      }
      const double norm = regular_representation_norm(*image).norm;
      const double ratio = base > 0.0 ? norm / base : (norm == 0.0 ? 1.0 : INFINITY);
      sample.ratios.push_back(ratio);
      terms.push_back({static_cast<int>(m),
                       {ratio <= 1.0 + tol, std::abs(ratio - 1.0) <= tol, ratio <= (1.0 + tol) / c}});
    }
    sample.admissible = !terms.empty();
    if (sample.admissible) {
      any_admissible = true;
      auto first_from = [&terms](auto pick) -> std::optional<int> {
        std::optional<int> from;
        for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
          if (!pick(it->second)) break;
          from = it->first;
        }
        return from;
      };
      sample.continuous_from = first_from([](const Flags& f) { return f.cont; });
      sample.isometric_from = first_from([](const Flags& f) { return f.iso; });
      sample.relaxed_from = first_from([](const Flags& f) { return f.relaxed; });
      all_iso = all_iso && sample.isometric_from.has_value();
      all_cont = all_cont && sample.continuous_from.has_value();
      all_relaxed = all_relaxed && sample.relaxed_from.has_value();
    }
    report.samples.push_back(std::move(sample));
  }
  if (!any_admissible) {
    report.verdict = report.relaxed_verdict = "inadmissible";
    return report;
  }
  report.verdict = all_iso    ? "isometric (window evidence)"
                   : all_cont ? "continuous (window evidence)"
                              : "not continuous (window evidence)";
  report.relaxed_verdict = all_relaxed ? "(1/c)-continuous (window evidence)"
                                       : "not (1/c)-continuous (window evidence)";
  return report;
}

}  // namespace coarse
