#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coarse/bandops.hpp"
#include "coarse/coverings.hpp"
#include "coarse/groups.hpp"

namespace coarse {

/**
 * \brief A covering together with a lifting scale R <= injectivity radius.
 *
 * Holds a pointer to the covering; the covering must outlive the window.
 */
struct LiftWindow {
  const CoveringMap* cover = nullptr;
  int R = 0;

  static LiftWindow make(const CoveringMap& cover, int R);
};

/// Raw lift: entry (y, y') = T(pi y, pi y') when d(y, y') <= cutoff, else 0.
BandOperator lift_entries(const BandOperator& t, const CoveringMap& cover, int cutoff);

/// Lift of an operator on the target; requires propagation(T) <= window.R.
BandOperator lift_operator(const BandOperator& t, const LiftWindow& window);

/**
 * \brief Inverse of lift_operator on the grade of propagation <= R.
 *
 * Entry (u, v) is read at a preimage y of u with reach(y) >= R and the unique
 * preimage of v in B_R(y). Throws when some target point has no such preimage.
 */
BandOperator pushforward_operator(const BandOperator& t, const LiftWindow& window);

/// For every target element u with |u| <= radius, its unique preimage in B_radius(e).
std::vector<int> short_preimages(const CoveringMap& cover, int radius);

/// Lift of a group ring element on the target group; support radius must be <= window.R.
GroupRingElement lift_group_ring(const GroupRingElement& a, const LiftWindow& window);

/// Image of a source group ring element in the target group; support radius must be <= window.R.
GroupRingElement pushforward_group_ring(const GroupRingElement& a, const LiftWindow& window);

struct EntryWitness {
  int row = -1;
  int col = -1;
  std::complex<double> lhs;
  std::complex<double> rhs;
};

struct MultiplicativityReport {
  int prop_s = 0;
  int prop_t = 0;
  int window_R = 0;
  /// True when prop(S) + prop(T) <= R, where the identity is guaranteed.
  bool expected_equal = false;
  bool equal = false;
  double max_difference = 0.0;
  int rows_compared = 0;
  std::optional<EntryWitness> witness;
};

/**
 * \brief Compares lift(ST) with lift(S) lift(T) at tolerance 1e-12.
 *
 * Each factor is lifted at its own propagation (so the check also runs when
 * the window is exceeded); rows whose reach is below prop(S)+prop(T) are
 * excluded since the truncated source cannot see the whole product there.
 */
MultiplicativityReport local_multiplicativity_check(const BandOperator& s, const BandOperator& t,
                                                    const LiftWindow& window);

struct GroupRingMultiplicativity {
  double max_difference = 0.0;
  bool equal = false;
};

/// phi(ab) against phi(a) phi(b) for elements of the target group with radii summing <= window.R.
GroupRingMultiplicativity group_ring_multiplicativity_check(const GroupRingElement& a,
                                                            const GroupRingElement& b,
                                                            const LiftWindow& window);

/**
 * \brief Norm of the left regular representation of a.
 *
 * Finite groups: exact. Balls in Z: sup of the Fourier symbol, exact to
 * about 1e-13. Balls in free groups of rank >= 2: the norm restricted to
 * interior columns, which is a lower bound.
 */
struct RegularNorm {
  double norm = 0.0;
  /// "finite group", "fourier symbol" or "interior columns (lower bound)".
  std::string method;
  int interior_size = 0;
  /// Points of the group used as columns.
  PointSet interior;
};

RegularNorm regular_representation_norm(const GroupRingElement& a);

/// sup over theta of |sum_k c_k e^{i k theta}| for a Laurent polynomial given as (k, c_k).
double symbol_sup_norm(const std::vector<std::pair<int, std::complex<double>>>& terms);

struct ProfileTerm {
  int m = 0;
  int r_m = 0;
  bool admissible = false;
  double norm_lift = 0.0;
  double norm_base = 0.0;
  double ratio = 0.0;
  /// | ||phi_m(a) phi_m(v)|| - ||a v|| | for the witness vector v.
  double witness_residual = 0.0;
};

struct NormProfile {
  std::string element;
  std::string orientation;
  std::vector<ProfileTerm> terms;
  double base_norm = 0.0;
  int interior_size = 0;
  double limsup = 0.0;
  int window_length = 0;
  double c = 1.0;
  /// limsup <= (1/c) base_norm (1 + tol).
  bool continuity_bound_holds = false;
  /// Radius of the ball carrying the witness vector v and c_a = ||a v|| / ||a||.
  int witness_radius = 0;
  double witness_constant = 0.0;
  double witness_norm = 0.0;
  std::string verdict;
};

/**
 * \brief Norms of the images of a along a family of coverings.
 *
 * If a lives on the common source group, its image is the pushforward into
 * each quotient; if it lives on the common target, it is lifted into each
 * source. Terms whose injectivity radius is below the support radius are
 * skipped and flagged. The limsup is the maximum over the later half of the
 * admissible terms.
 */
NormProfile limsup_norm_profile(const GroupRingElement& a, const std::vector<CoveringMap>& family,
                                double tol, double c = 1.0);

struct SampleContinuity {
  std::string element;
  bool admissible = false;
  /// Least admissible term index from which every later admissible term satisfies the bound.
  std::optional<int> continuous_from;
  std::optional<int> isometric_from;
  std::optional<int> relaxed_from;
  std::vector<double> ratios;
};

struct ContinuityReport {
  std::vector<SampleContinuity> samples;
  double tol = 0.0;
  double c = 1.0;
  /// "isometric (window evidence)", "continuous (window evidence)", "not continuous" or "inadmissible".
  std::string verdict;
  std::string relaxed_verdict;
};

ContinuityReport continuity_classification(const std::vector<CoveringMap>& family,
                                           const std::vector<GroupRingElement>& samples, double tol,
                                           double c = 1.0);

}  // namespace coarse
