#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarse/bandops.hpp"
#include "coarse/lifting.hpp"

namespace coarse {

/// Propagation scale r >= 0 and tolerance eps in (0, 1/4).
struct QuantParams {
  double r = 0.0;
  double eps = 0.1;

  static QuantParams make(double r, double eps);
};

/// Self-adjointness threshold used by the quasi-projection check.
inline constexpr double kSelfAdjointTolerance = 1e-12;

struct ProjectionCheck {
  double self_adjoint_residual = 0.0;  // ||p - p*||
  double idempotent_residual = 0.0;    // ||p^2 - p||
  int propagation = 0;
  double propagation_excess = 0.0;  // max(0, prop - r)
  bool passed = false;
};

/// Passes iff ||p - p*|| <= 1e-12, ||p^2 - p|| <= eps and prop(p) <= r.
ProjectionCheck check_quasi_projection(const BandOperator& p, const QuantParams& params);

struct UnitaryCheck {
  double left_residual = 0.0;   // ||u u* - 1||
  double right_residual = 0.0;  // ||u* u - 1||
  int propagation = 0;
  double propagation_excess = 0.0;
  bool passed = false;
};

/// Passes iff both residuals are strictly below eps and prop(u) <= r.
UnitaryCheck check_quasi_unitary(const BandOperator& u, const QuantParams& params);

/**
 * \brief Spectral projection of (p + p*)/2 onto eigenvalues above 1/2.
 *
 * Requires ||p^2 - p|| < 1/4 and ||p - p*|| <= 1e-12; throws when an
 * eigenvalue lies within 1e-9 of 1/2.
 */
BandOperator round_to_projection(const BandOperator& p);

struct PartitionOfUnity {
  std::vector<PointSet> members;
  /// weights[i][x] = eta_i(x).
  std::vector<std::vector<double>> weights;

  /// Validates support inclusion, nonnegativity and sum 1 within 1e-12.
  static PartitionOfUnity make(const FiniteSpace& space, std::vector<PointSet> members,
                               std::vector<std::vector<double>> weights);
  /// eta_i(x) = 1 / #{members containing x}.
  static PartitionOfUnity uniform(const FiniteSpace& space, const Cover& cover);
  static PartitionOfUnity trivial(const FiniteSpace& space);
};

/// F~_{xy} = F_{xy} sum_i sqrt(eta_i(x) eta_i(y)).
BandOperator smooth_cycle(const BandOperator& f, const PartitionOfUnity& pou);

/**
 * \brief The 2x2 block operator
 *   [ FF* + (1-FF*)FF*    F(1-F*F) + (1-F*F)F(1-F*F) ]
 *   [ (1-F*F)F            1-F*F                      ]
 * returned with blocks = 2.
 */
BandOperator index_form(const BandOperator& f);

/// diag(1, 0) on two blocks.
BandOperator unit_corner(const SpacePtr& space);

struct IndexClassReport {
  BandOperator form;               // I(F~)
  ProjectionCheck at_params;       // quasi-projection check at the supplied (r, eps)
  int derived_r = 0;               // propagation of I(F~)
  double derived_eps = 0.0;        // ||I^2 - I||
  double difference_norm = 0.0;    // ||I(F~) - diag(1,0)||
  bool class_data_zero = false;    // difference_norm <= 1e-10
  /// Constant row sums of the four blocks of I(F), or nullopt when some block has varying row sums.
  std::optional<std::array<std::complex<double>, 4>> scalar_evaluation;
  bool evaluation_matches_unit_corner = false;
  /// rank(round(I(F~))) - rank(diag(1,0)); nullopt when rounding is impossible.
  std::optional<int> rank_signature;
};

IndexClassReport index_class_check(const BandOperator& f, const PartitionOfUnity& pou,
                                   const QuantParams& params);

/// Finite sample of an operator-valued path with decreasing propagation.
struct LocalisationPath {
  std::vector<double> times;
  std::vector<BandOperator> samples;
  std::optional<int> target_propagation;

  /// Validates strictly increasing nonnegative times, common space, nonincreasing propagation.
  static LocalisationPath make(std::vector<double> times, std::vector<BandOperator> samples,
                               std::optional<int> target_propagation = std::nullopt);
  double sup_norm() const;
};

/// The sample at time 0; throws for an empty path or t_0 != 0.
BandOperator path_evaluate(const LocalisationPath& path);

struct PathLift {
  LocalisationPath lifted;
  double square_residual = 0.0;
  bool commuting_square = false;
  double sup_norm_path = 0.0;
  double sup_norm_lifted = 0.0;
  double continuity_constant = 1.0;
  bool bound_holds = false;
};

/// Samplewise lift; reports the evaluate/lift commuting square and the sup-norm bound.
PathLift lift_path(const LocalisationPath& path, const LiftWindow& window,
                   double continuity_constant = 1.0);

using OperatorMap = std::function<BandOperator(const BandOperator&)>;

struct QuasiHomReport {
  int admissible_pairs = 0;
  int control_pairs = 0;
  int controls_differing = 0;
  double admissible_max_difference = 0.0;
  bool multiplicative = false;
  double linearity_residual = 0.0;
  bool linear = false;
  double norm_estimate = 0.0;  // max ||f(a)|| / ||a||
  std::optional<std::pair<int, int>> witness_pair;
  std::optional<EntryWitness> witness;
  bool verdict = false;
};

/**
 * \brief Checks f(ab) = f(a) f(b) on pairs with prop(a) + prop(b) <= R.
 *
 * Pairs with larger propagation sum are counted as negative controls. Only
 * rows accepted by `rows` (all rows when empty) are compared.
 */
QuasiHomReport check_quasi_homomorphism(const OperatorMap& f, int R,
                                        const std::vector<BandOperator>& samples, double tol,
                                        const std::function<bool(int)>& rows = {});

/// (d, r, eps) -> (r', eps') for QS and (d, r, eps) -> (d', r') for QI.
using ControlOracle = std::function<std::pair<double, double>(double d, double r, double eps)>;

struct ControlRow {
  int m = 0;
  double d = 0.0;
  double r = 0.0;
  double eps = 0.0;
  /// k_m(d_m, R_m, eps): the oracle's r' at the chosen R_m.
  double k = 0.0;
  double eps_prime = 0.0;
  /// sup{R : k_m(d_m, R, eps) <= r_m}; -1 when no R qualifies.
  long long R = -1;
  /// sup{R : max(d', r') <= r_m} for the QI oracle; -1 when absent or none.
  long long L = -1;
  double d_prime = 0.0;
  bool monotone = true;
};

struct ControlTable {
  std::vector<ControlRow> rows;
  bool oracle_monotone = true;
  /// "divergent (window evidence)", "not divergent" or "invalid oracle (not monotone)".
  std::string verdict;
};

ControlTable qs_qi_records(const ControlOracle& qs, const std::vector<std::pair<double, double>>& d_r,
                           double eps, const ControlOracle& qi = {});

}  // namespace coarse
