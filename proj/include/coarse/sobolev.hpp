#pragma once

#include <functional>
#include <string>
#include <vector>

#include "coarse/groups.hpp"
#include "coarse/lifting.hpp"

namespace coarse {

/// A length on group elements; word length by default.
struct LengthFunction {
  std::function<double(const MarkedGroup&, int)> length;
  std::string description = "word length";

  double operator()(const MarkedGroup& group, int g) const {
    return length ? length(group, g) : group.word_length(g);
  }

  static LengthFunction word_length() { return {}; }
};

/// Element pairs (g, g^-1) whose lengths differ, for a non-symmetric length.
std::vector<int> length_asymmetries(const MarkedGroup& group, const LengthFunction& l);

/// sqrt(sum_g |a_g|^2 (1 + l(g))^(2s)).
double sobolev_norm(const GroupRingElement& a, double s,
                    const LengthFunction& l = LengthFunction::word_length());

struct RdSample {
  int id = 0;
  double op_norm = 0.0;
  double sobolev = 0.0;
  double ratio = 0.0;
};

struct RdEstimate {
  std::vector<RdSample> samples;
  double constant = 0.0;  // max ratio, an empirical lower bound
  int skipped_zero = 0;
  std::string label = "empirical lower bound for the rapid decay constant";
};

/// Max over samples of ||a||_op / ||a||_{2,s}; zero samples are skipped; empty input throws.
RdEstimate rd_constant_estimate(const std::vector<GroupRingElement>& samples, double s,
                                const LengthFunction& l = LengthFunction::word_length());

struct LiftIsometry {
  double base = 0.0;
  double lifted = 0.0;
  double residual = 0.0;
  bool equal = false;  // residual <= 1e-12
};

/// Compares the Sobolev norm of a on the target with that of its lift.
LiftIsometry lift_isometry_check(const GroupRingElement& a, const LiftWindow& window, double s);

struct RdChainTerm {
  int m = 0;
  bool admissible = false;
  double image_norm = 0.0;      // ||phi_m(a)||
  double image_sobolev = 0.0;   // ||phi_m(a)||_{2,s}
  bool term_bound = false;      // ||phi_m(a)|| <= C ||phi_m(a)||_{2,s}
  bool sobolev_preserved = false;
};

struct RdChain {
  double base_norm = 0.0;
  double base_sobolev = 0.0;
  double limsup = 0.0;
  std::vector<RdChainTerm> terms;
  bool base_below_limsup = false;  // ||a|| <= limsup ||phi_m(a)||
  bool base_bound = false;         // ||a|| <= C ||a||_{2,s}
  bool holds = false;
};

/**
 * \brief Termwise check of ||a|| <= limsup ||phi_m(a)|| <= C ||phi_m(a)||_{2,s} = C ||a||_{2,s}.
 *
 * a lives on the common source group of the family; images are pushforwards.
 */
RdChain rd_chain_check(const GroupRingElement& a, const std::vector<CoveringMap>& family, double C,
                       double s);

}  // namespace coarse
