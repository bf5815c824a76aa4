#include "coarse/coverings.hpp"

#include <algorithm>

#include "coarse/errors.hpp"

namespace coarse {

std::string to_string(CoverOrientation orientation) {
  return orientation == CoverOrientation::kFromFixedSource ? "from-fixed-source"
                                                           : "onto-fixed-target";
}

CoveringMap CoveringMap::make(std::shared_ptr<const FiniteSpace> source,
                              std::shared_ptr<const FiniteSpace> target, std::vector<int> point_map,
                              std::vector<int> reach) {
  if (!source || !target) throw PreconditionError("covering map needs both spaces");
  if (static_cast<int>(point_map.size()) != source->size()) {
    throw InputError("point map size does not match the source");
  }
  if (reach.empty()) reach.assign(source->size(), source->diameter());
  if (reach.size() != point_map.size()) throw InputError("reach size does not match the source");
  std::vector<bool> hit(target->size(), false);
  for (int v : point_map) {
    if (v < 0 || v >= target->size()) throw InputError("point map leaves the target");
    hit[v] = true;
  }
  for (int u = 0; u < target->size(); ++u)
    if (!hit[u]) throw InputError("point map is not surjective: target point " + std::to_string(u) +
                                  " has no preimage");
  CoveringMap cover;
  cover.source_ = std::move(source);
  cover.target_ = std::move(target);
  cover.point_map_ = std::move(point_map);
  cover.reach_ = std::move(reach);
  cover.max_reach_ = *std::max_element(cover.reach_.begin(), cover.reach_.end());
  cover.radius_ = coarse::injectivity_radius(cover);
  if (cover.radius_ < cover.max_reach_) cover.failure_ = check_ball_isometry(cover, cover.radius_ + 1);
  return cover;
}

std::string CoveringMap::description() const {
  if (source_group_ && target_group_) {
    return source_group_->description() + " -> " + target_group_->description();
  }
  return std::to_string(source_->size()) + " points -> " + std::to_string(target_->size()) +
         " points";
}

CoveringMap CoveringMap::with_groups(MarkedGroupPtr source, MarkedGroupPtr target,
                                     CoverOrientation orientation) const {
  CoveringMap copy = *this;
  copy.source_group_ = std::move(source);
  copy.target_group_ = std::move(target);
  copy.orientation_ = orientation;
  return copy;
}

std::optional<RadiusWitness> check_ball_isometry(const CoveringMap& cover, int radius) {
  const auto& src = *cover.source();
  const auto& tgt = *cover.target();
  for (int y = 0; y < src.size(); ++y) {
    if (cover.reach(y) < radius) continue;
    PointSet up = src.ball(y, radius);
    const int py = cover(y);
    PointSet down = tgt.ball(py, radius);
    for (std::size_t i = 0; i < up.size(); ++i) {
      for (std::size_t j = i + 1; j < up.size(); ++j) {
        const int a = up[i], b = up[j];
        const int ds = src.dist(a, b), dt = tgt.dist(cover(a), cover(b));
        if (ds != dt) {
          return RadiusWitness{radius, y, a, b, ds, dt,
                               ds > dt && dt == 0 ? "two points of the ball share an image"
                                                  : "distance not preserved"};
        }
      }
    }
    if (up.size() != down.size()) {
      return RadiusWitness{radius, y, -1, -1, 0, 0,
                           "image misses " + std::to_string(down.size() - up.size()) +
                               " points of the target ball"};
    }
  }
  return std::nullopt;
}

int injectivity_radius(const CoveringMap& cover) {
  int r = 0;
  while (r < cover.max_reach() && !check_ball_isometry(cover, r + 1)) ++r;
  return r;
}

CoveringMap quotient_covering(MarkedGroupPtr source, MarkedGroupPtr target,
                              CoverOrientation orientation) {
  if (!source || !target) throw PreconditionError("quotient_covering needs two groups");
  if (!target->is_finite_group()) throw PreconditionError("quotient target must be a finite group");
  if (source->rank() != target->rank()) {
    throw InputError("generator image count mismatch: source has " +
                     std::to_string(source->rank()) + " generators, target marking has " +
                     std::to_string(target->rank()));
  }
  const int n = source->size();
  std::vector<int> point_map(n), reach(n);
  for (int y = 0; y < n; ++y) {
    point_map[y] = target->evaluate(source->word(y));
    reach[y] = source->is_finite_group() ? source->space()->diameter()
                                         : source->radius() - source->word_length(y);
  }
  if (source->is_finite_group()) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (point_map[source->mul(a, b)] != target->mul(point_map[a], point_map[b])) {
          throw InputError("generator images do not define a homomorphism: " + source->name(a) +
                           "*" + source->name(b));
        }
  }
  try {
    return CoveringMap::make(source->space(), target->space(), std::move(point_map),
                             std::move(reach))
        .with_groups(source, target, orientation);
  } catch (const InputError& e) {
    throw PreconditionError(std::string("source ball too small for a covering: ") + e.what());
  }
}

FaithfulnessReport faithfulness_report(const std::vector<CoveringMap>& family) {
  FaithfulnessReport report;
  for (std::size_t m = 0; m < family.size(); ++m) {
    report.terms.push_back({static_cast<int>(m), family[m].description(),
                            family[m].injectivity_radius()});
  }
  if (report.terms.size() < 2) {
    report.verdict = "insufficient data";
    return report;
  }
  bool increasing = true;
  for (std::size_t m = 1; m < report.terms.size(); ++m)
    if (report.terms[m].radius <= report.terms[m - 1].radius) increasing = false;
  report.verdict = increasing ? "increasing (window evidence)" : "not increasing";
  return report;
}

int BoxSpace::component_of(int point) const {
  auto it = std::upper_bound(offsets.begin(), offsets.end(), point);
  return static_cast<int>(it - offsets.begin()) - 1;
}

BoxSpace assemble_box_space(std::vector<std::shared_ptr<const FiniteSpace>> components,
                            std::vector<int> schedule) {
  if (components.empty()) throw InputError("box space needs at least one component");
  if (schedule.size() + 1 < components.size()) {
    throw InputError("schedule has " + std::to_string(schedule.size()) + " separations for " +
                     std::to_string(components.size()) + " components");
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 1) throw InputError("separations must be positive");
    if (i > 0 && schedule[i] <= schedule[i - 1]) {
      throw InputError("separation schedule must be strictly increasing");
    }
  }
  BoxSpace box;
  int total = 0;
  for (const auto& c : components) {
    if (!c) throw InputError("null component");
    box.offsets.push_back(total);
    total += c->size();
  }
  std::vector<int> table(static_cast<std::size_t>(total) * total);
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& ci = *components[i];
    for (std::size_t j = 0; j < components.size(); ++j) {
      const auto& cj = *components[j];
      const int sep = i == j ? 0 : schedule[std::max(i, j) - 1];
      for (int x = 0; x < ci.size(); ++x)
        for (int y = 0; y < cj.size(); ++y) {
          int d = i == j ? ci.dist(x, y)
                         : ci.dist(x, ci.basepoint()) + sep + cj.dist(cj.basepoint(), y);
          table[static_cast<std::size_t>(box.offsets[i] + x) * total + box.offsets[j] + y] = d;
        }
    }
  }
  box.space = std::make_shared<const FiniteSpace>(
      FiniteSpace::from_distances(total, std::move(table), components[0]->basepoint()));
  box.components = std::move(components);
  box.schedule = std::move(schedule);
  return box;
}

}  // namespace coarse
