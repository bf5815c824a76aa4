#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coarse/groups.hpp"
#include "coarse/spaces.hpp"

namespace coarse {

/// Which side of the map carries the fixed group of a family.
enum class CoverOrientation {
  kFromFixedSource,  // one group G mapping onto quotients G_m
  kOntoFixedTarget,  // groups G_m mapping onto one group G
};

std::string to_string(CoverOrientation orientation);

/// Evidence that balls of a given radius do not map isometrically.
struct RadiusWitness {
  int radius = 0;
  int center = -1;
  /// Two source points whose distance is not preserved, or -1 when the defect is surjectivity.
  int first = -1;
  int second = -1;
  int source_distance = 0;
  int target_distance = 0;
  std::string reason;
};

/**
 * \brief A surjection between finite spaces with its injectivity radius.
 *
 * `reach[y]` is how far the source is known to extend around y: for a ball of
 * radius R_big in an infinite group it is R_big - |y|; for a finite source it
 * is the source diameter. Only balls B_R(y) with R <= reach[y] are examined.
 */
class CoveringMap {
 public:
  static CoveringMap make(std::shared_ptr<const FiniteSpace> source,
                          std::shared_ptr<const FiniteSpace> target, std::vector<int> point_map,
                          std::vector<int> reach);

  const std::shared_ptr<const FiniteSpace>& source() const { return source_; }
  const std::shared_ptr<const FiniteSpace>& target() const { return target_; }
  const std::vector<int>& point_map() const { return point_map_; }
  int operator()(int y) const { return point_map_[y]; }
  int reach(int y) const { return reach_[y]; }
  int max_reach() const { return max_reach_; }
  int injectivity_radius() const { return radius_; }
  /// Failure at injectivity_radius()+1, absent when the radius hit max_reach().
  const std::optional<RadiusWitness>& failure() const { return failure_; }

  const MarkedGroupPtr& source_group() const { return source_group_; }
  const MarkedGroupPtr& target_group() const { return target_group_; }
  CoverOrientation orientation() const { return orientation_; }
  std::string description() const;

  CoveringMap with_groups(MarkedGroupPtr source, MarkedGroupPtr target,
                          CoverOrientation orientation) const;

 private:
  std::shared_ptr<const FiniteSpace> source_;
  std::shared_ptr<const FiniteSpace> target_;
  std::vector<int> point_map_;
  std::vector<int> reach_;
  int max_reach_ = 0;
  int radius_ = 0;
  std::optional<RadiusWitness> failure_;
  MarkedGroupPtr source_group_;
  MarkedGroupPtr target_group_;
  CoverOrientation orientation_ = CoverOrientation::kFromFixedSource;
};

/**
 * \brief Checks that every B_R(y) with reach(y) >= R maps bijectively and isometrically
 * onto B_R(pi(y)). Returns the first defect found, or nullopt.
 */
std::optional<RadiusWitness> check_ball_isometry(const CoveringMap& cover, int radius);

/// Largest R with no defect for all radii <= R, capped at max_reach.
int injectivity_radius(const CoveringMap& cover);

/**
 * \brief The quotient map from a marked group onto a finite marked group.
 *
 * Each source element is sent to the evaluation of its word in the target.
 * Ranks must agree. For a finite source the homomorphism property is checked.
 */
CoveringMap quotient_covering(MarkedGroupPtr source, MarkedGroupPtr target,
                              CoverOrientation orientation = CoverOrientation::kFromFixedSource);

struct FaithfulnessTerm {
  int index = 0;
  std::string description;
  int radius = 0;
};

struct FaithfulnessReport {
  std::vector<FaithfulnessTerm> terms;
  /// "increasing (window evidence)", "not increasing" or "insufficient data".
  std::string verdict;
};

FaithfulnessReport faithfulness_report(const std::vector<CoveringMap>& family);

struct BoxSpace {
  std::vector<std::shared_ptr<const FiniteSpace>> components;
  /// schedule[j-1] = distance from component j to every earlier component.
  std::vector<int> schedule;
  /// First point index of each component in `space`.
  std::vector<int> offsets;
  std::shared_ptr<const FiniteSpace> space;

  int component_of(int point) const;
};

/**
 * \brief Disjoint union with basepoint-to-basepoint separations from the schedule.
 *
 * Cross distance between x in component i and y in component j (i < j) is
 * d_i(x, b_i) + schedule[j-1] + d_j(b_j, y). The schedule must be strictly
 * increasing and have at least (components - 1) entries; extra entries
 * describe components that are not materialised.
 */
BoxSpace assemble_box_space(std::vector<std::shared_ptr<const FiniteSpace>> components,
                            std::vector<int> schedule);

}  // namespace coarse
