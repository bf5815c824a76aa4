#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarse/bandops.hpp"

namespace coarse {

/// How supports of candidate vectors are enumerated.
enum class SupportMode {
  kBalls,          // closed balls of diameter <= d around every point
  kMaximalSubsets  // maximal point sets of diameter <= d (exhaustive, small spaces only)
};

struct Localization {
  Vector eta;
  double ratio = 1.0;
  double norm = 0.0;  // ||T||
  PointSet support;
  int support_diameter = 0;
  /// True for the zero operator, where the ratio is 1 by convention.
  bool zero_operator = false;
};

/// Largest point count accepted by the maximal-subset search.
inline constexpr int kMaximalSubsetLimit = 40;

/**
 * \brief Best unit vector supported in a set of diameter <= d.
 *
 * For each candidate support B the top right-singular vector of T restricted
 * to the columns over B is taken; ratio = ||T eta|| / ||T||. The zero operator
 * gets ratio 1 and a unit vector at the basepoint.
 */
Localization localization_search(const BandOperator& t, int support_diameter,
                                 SupportMode mode = SupportMode::kBalls);

/// Largest d in [0, diameter] kept by the binary search of minimal_localization_diameter.
struct MinimalLocalization {
  int diameter = 0;
  Localization best;
};

/// Least support diameter with ratio >= c - 1e-12 (ratios are monotone in d).
MinimalLocalization minimal_localization_diameter(const BandOperator& t, double c,
                                                  SupportMode mode = SupportMode::kBalls);

struct EnsembleSpec {
  /// "gaussian", "adjacency", "permutation" or "mixed".
  std::string kind = "mixed";
  int size = 8;
  std::uint64_t seed = 1;
};

/// Reproducible propagation-<=R operators on the space.
std::vector<BandOperator> sample_ensemble(const SpacePtr& space, int R, const EnsembleSpec& spec);

struct OnlWitness {
  int operator_index = 0;
  int support_diameter = 0;
  double ratio = 0.0;
  PointSet support;
  Vector eta;
};

struct OnlResult {
  std::string space_hash;
  int R = 0;
  double c = 0.0;
  EnsembleSpec ensemble;
  /// True when every operator localises within the cap (or no cap was given).
  bool certified = false;
  int f_R = 0;
  std::vector<OnlWitness> witnesses;
  double min_ratio = 1.0;
  /// For counterexamples: the operator with the worst ratio at the cap.
  std::optional<int> hardest_index;
  double hardest_ratio = 1.0;
  std::optional<int> cap;
  std::string label = "empirical: sampled ensemble, not a universal statement";
};

OnlResult onl_estimate(const SpacePtr& space, int R, double c, const EnsembleSpec& ensemble,
                       std::optional<int> f_cap = std::nullopt,
                       SupportMode mode = SupportMode::kBalls);

/// Re-checks a witness: unit norm within 1e-12, support diameter, ratio >= c - 1e-9.
bool verify_witness(const BandOperator& t, const OnlWitness& witness, int f_R, double c,
                    const FiniteSpace& space);

/// A nondecreasing function on lengths with a printable description.
struct ControlFunction {
  std::function<double(double)> f;
  std::string description = "f";

  double operator()(double k) const { return f(k); }

  static ControlFunction identity();
  static ControlFunction constant(double value);
  static ControlFunction linear(double slope, double intercept);
  /**
   * \brief Right-continuous step function through (x_i, y_i), x ascending.
   *
   * Constant y_last beyond the last abscissa; evaluation below x_0 throws.
   */
  static ControlFunction tabulated(std::vector<std::pair<double, double>> points);
};

enum class AmplifyMode {
  kRoot,      // smallest n with c^(1/n) >= c_target
  kVerbatim,  // from the literal "smallest n such that c^n >= c'" (see notes)
};

struct Amplification {
  int n = 1;
  ControlFunction g;
  std::string formula;
};

/**
 * \brief Constant amplification g(k) = (n-1)k + f(nk).
 *
 * kRoot picks the smallest n with c^(1/n) >= c_target. kVerbatim picks the
 * largest n >= 1 with c^n >= c_target and throws when c_target > c.
 */
Amplification amplify_constant(double c, const ControlFunction& f, double c_target,
                               AmplifyMode mode = AmplifyMode::kRoot);

/// Prints "g(k)=f(k)" for n = 1 and "g(k)=(n-1)k+f(nk)" otherwise.
std::string amplification_formula(int n);

struct RoeCoverBound {
  double diameter = 0.0;
  /// |S|^ceil(6 delta) as a decimal string.
  std::string colours;
  int exponent = 0;
};

RoeCoverBound roe_cover_bound(int degree, double delta, double R);

struct LacunaryControls {
  std::vector<double> delta;
  std::vector<double> r;
  std::vector<long long> R;
  /// sup{R : R + f_m(R) <= r_m} when control functions are supplied; -1 when empty.
  std::vector<long long> sup_form;
  /// "increasing (window evidence)", "not increasing" or "insufficient data".
  std::string verdict;
  std::string note;
};

/// Closed form R_m = floor((r_m/delta_m - 2)/18), clamped at 0.
long long lacunary_radius(double delta, double r);

LacunaryControls lacunary_control_radius(const std::vector<double>& delta,
                                         const std::vector<double>& r,
                                         const std::vector<ControlFunction>& controls = {});

/// 1 / (2|S|).
double onl_constant_floor(int degree);

}  // namespace coarse
