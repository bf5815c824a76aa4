#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "coarse/groups.hpp"
#include "coarse/spaces.hpp"

namespace coarse {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SpacePtr = std::shared_ptr<const FiniteSpace>;

/// Entries with modulus at or below this are treated as zero for propagation.
inline constexpr double kEntryTolerance = 1e-12;

/**
 * \brief A matrix indexed by the points of a finite space, with tight propagation.
 *
 * With `blocks` = b > 1 the operator lives on C^b (x) l2(X): row index i*n + x
 * refers to block i at point x. Propagation only looks at the point part.
 */
class BandOperator {
 public:
  BandOperator() = default;
  BandOperator(SpacePtr space, Matrix entries, int blocks = 1);

  static BandOperator identity(SpacePtr space, int blocks = 1);
  static BandOperator zero(SpacePtr space, int blocks = 1);
  /// Adjacency matrix of the distance-1 graph.
  static BandOperator adjacency(SpacePtr space);
  /// Assembles a b x b block operator from operators on the same space (blocks = 1 each).
  static BandOperator from_blocks(const std::vector<std::vector<BandOperator>>& blocks);

  const SpacePtr& space() const { return space_; }
  const Matrix& entries() const { return entries_; }
  std::complex<double> operator()(int i, int j) const { return entries_(i, j); }
  int propagation() const { return propagation_; }
  int blocks() const { return blocks_; }
  int points() const { return space_->size(); }
  int dim() const { return static_cast<int>(entries_.rows()); }
  int point_of(int index) const { return index % points(); }
  /// Block (i, j) as a single-block operator.
  BandOperator block(int i, int j) const;

 private:
  SpacePtr space_;
  Matrix entries_;
  int blocks_ = 1;
  int propagation_ = 0;
};

/// Tight propagation of an arbitrary matrix over the given space and block count.
int propagation_of(const FiniteSpace& space, const Matrix& entries, int blocks = 1);
inline int propagation_of(const BandOperator& t) { return t.propagation(); }

BandOperator multiply(const BandOperator& s, const BandOperator& t);
BandOperator add_scale(std::complex<double> alpha, const BandOperator& s,
                       std::complex<double> beta, const BandOperator& t);
BandOperator adjoint(const BandOperator& t);
/// Copy of t with every entry mapped by f (propagation recomputed).
BandOperator map_entries(const BandOperator& t,
                         const std::function<std::complex<double>(std::complex<double>)>& f);

/// Largest singular value by a full SVD.
double spectral_norm(const Matrix& m);

struct NormOptions {
  int max_iterations = 20000;
  std::uint64_t seed = 0x5eed;
  /// Cross-check against a full SVD when dim <= this.
  int svd_check_dim = 64;
};

/**
 * \brief Operator norm by power iteration on T*T.
 *
 * The start vector is drawn from a fixed-seed generator. Iteration stops when
 * the Rayleigh quotient's relative change and the relative eigen-residual are
 * below `tol`; exhausting the iteration cap raises ConvergenceError carrying
 * the last residual. Small operators are cross-checked by SVD and the SVD value
 * is returned if the two disagree by more than tol.
 */
double operator_norm(const BandOperator& t, double tol = 1e-9, const NormOptions& options = {});

/// Largest entrywise modulus of the difference; operators must have equal dimension.
double max_entry_difference(const BandOperator& a, const BandOperator& b);

/// Checks that both operators live on the same space and block count.
void require_same_space(const BandOperator& a, const BandOperator& b, const char* operation);

/**
 * \brief Regular representation: T_{x,y} = a_{x^-1 y} on the group's own Cayley space.
 *
 * For a truncated free ball the entry is dropped when x^-1 y leaves the ball.
 */
BandOperator to_band_operator(const GroupRingElement& a);

/**
 * \brief Image of a in a finite marked target group as an operator on the target.
 *
 * Words of the support are evaluated in the target. Throws when the support
 * radius exceeds the target diameter or two support elements alias.
 */
BandOperator to_band_operator(const GroupRingElement& a, const MarkedGroup& target,
                              SpacePtr target_space = nullptr);

/// Text format: header line then "x y re im" per nonzero entry.
void write_operator(std::ostream& out, const BandOperator& t);
BandOperator read_operator(std::istream& in, SpacePtr space);

}  // namespace coarse
