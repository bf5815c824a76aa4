#include "coarse/sobolev.hpp"

#include <algorithm>
#include <cmath>

#include "coarse/errors.hpp"

namespace coarse {

std::vector<int> length_asymmetries(const MarkedGroup& group, const LengthFunction& l) {
  std::vector<int> out;
  for (int g = 0; g < group.size(); ++g)
    if (std::abs(l(group, g) - l(group, group.inverse(g))) > 1e-12) out.push_back(g);
  return out;
}

double sobolev_norm(const GroupRingElement& a, double s, const LengthFunction& l) {
  if (s < 0.0) throw PreconditionError("Sobolev exponent s must be >= 0");
  double sum = 0.0;
  for (const auto& [g, v] : a.coefficients()) {
    const double len = l(*a.group(), g);
    if (len < 0.0) throw InputError("length function must be nonnegative");
    sum += std::norm(v) * std::pow(1.0 + len, 2.0 * s);
  }
  return std::sqrt(sum);
}

RdEstimate rd_constant_estimate(const std::vector<GroupRingElement>& samples, double s,
                                const LengthFunction& l) {
  if (samples.empty()) throw PreconditionError("rd_constant_estimate needs a nonempty ensemble");
  RdEstimate out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& a = samples[i];
    if (a.is_zero()) {
      ++out.skipped_zero;
      continue;
    }
    RdSample row;
    row.id = static_cast<int>(i);
    row.op_norm = regular_representation_norm(a).norm;
    row.sobolev = sobolev_norm(a, s, l);
    row.ratio = row.op_norm / row.sobolev;
    out.constant = std::max(out.constant, row.ratio);
    out.samples.push_back(row);
  }
  return out;
}

LiftIsometry lift_isometry_check(const GroupRingElement& a, const LiftWindow& window, double s) {
  LiftIsometry out;
  GroupRingElement lifted = lift_group_ring(a, window);
  out.base = sobolev_norm(a, s);
  out.lifted = sobolev_norm(lifted, s);
  out.residual = std::abs(out.base - out.lifted);
  out.equal = out.residual <= 1e-12;
  return out;
}

RdChain rd_chain_check(const GroupRingElement& a, const std::vector<CoveringMap>& family, double C,
                       double s) {
  if (family.empty()) throw PreconditionError("rd_chain_check needs a nonempty family");
  RdChain chain;
  chain.base_norm = regular_representation_norm(a).norm;
  chain.base_sobolev = sobolev_norm(a, s);
  bool all_terms = true, any = false;
  for (std::size_t m = 0; m < family.size(); ++m) {
    RdChainTerm term;
    term.m = static_cast<int>(m);
    if (a.support_radius() <= family[m].injectivity_radius()) {
      auto image = pushforward_group_ring(a, LiftWindow::make(family[m], a.support_radius()));
      term.admissible = true;
      any = true;
      term.image_norm = regular_representation_norm(image).norm;
      term.image_sobolev = sobolev_norm(image, s);
      term.term_bound = term.image_norm <= C * term.image_sobolev * (1.0 + 1e-12);
      term.sobolev_preserved = std::abs(term.image_sobolev - chain.base_sobolev) <= 1e-12;
      chain.limsup = std::max(chain.limsup, term.image_norm);
      all_terms = all_terms && term.term_bound && term.sobolev_preserved;
    }
    chain.terms.push_back(term);
  }
  if (!any) throw PreconditionError("no term of the family admits the element");
  chain.base_below_limsup = chain.base_norm <= chain.limsup * (1.0 + 1e-12);
  chain.base_bound = chain.base_norm <= C * chain.base_sobolev * (1.0 + 1e-12);
  chain.holds = all_terms && chain.base_below_limsup && chain.base_bound;
  return chain;
}

}  // namespace coarse
