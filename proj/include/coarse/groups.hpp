#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coarse/spaces.hpp"

namespace coarse {

/// A letter is a signed generator index: +(i+1) for s_i, -(i+1) for its inverse.
using Letter = int;
using Word = std::vector<Letter>;

/// Free reduction of a word.
Word reduce_word(std::span<const Letter> word);
Word inverse_word(std::span<const Letter> word);
/// a..z for generators, A..Z for inverses, "e" for the empty word; larger ranks use s12/S12.
std::string word_to_string(std::span<const Letter> word);
/// Inverse of word_to_string for ranks up to 26 ("e" and "" are the empty word).
Word word_from_string(const std::string& text);

/// Number of reduced words of length <= radius in the free group of the given rank.
long long free_ball_size(int rank, int radius);

/**
 * \brief A group with a marking by free generators, realised on finitely many elements.
 *
 * Either a finite group (all products defined) or the ball of radius R in a
 * free group (products defined only when they stay in the ball). Element 0 is
 * the identity. The word metric is the graph metric of the Cayley graph with
 * right multiplication by the marked generators and their inverses.
 */
class MarkedGroup {
 public:
  static std::shared_ptr<const MarkedGroup> from_finite(FiniteGroup group,
                                                        std::vector<int> generator_images,
                                                        std::string description = {});
  /// Ball of radius `radius` in the free group of rank `rank` (rank 1 is Z).
  static std::shared_ptr<const MarkedGroup> free_ball(int rank, int radius,
                                                      long long max_elements = 6000);

  int size() const { return static_cast<int>(length_.size()); }
  int rank() const { return rank_; }
  int identity() const { return 0; }
  bool is_finite_group() const { return finite_.has_value(); }
  /// Ball radius for free balls; diameter of the word metric for finite groups.
  int radius() const { return radius_; }
  const std::string& description() const { return description_; }

  int word_length(int g) const { return length_[g]; }
  const Word& word(int g) const { return words_[g]; }
  std::string name(int g) const { return word_to_string(words_[g]); }
  int inverse(int g) const { return inverse_[g]; }
  /// Product, or -1 when it falls outside a truncated ball.
  int mul(int a, int b) const;
  /// Evaluates a word letter by letter; -1 when it leaves the ball.
  int evaluate(std::span<const Letter> word) const;
  /// Element reached from g by one letter, or -1.
  int step(int g, Letter letter) const;

  const std::shared_ptr<const FiniteSpace>& space() const { return space_; }
  const std::optional<FiniteGroup>& finite_group() const { return finite_; }

 private:
  MarkedGroup() = default;
  void build_space();

  int rank_ = 0;
  int radius_ = 0;
  std::string description_;
  std::optional<FiniteGroup> finite_;
  std::vector<int> generators_;  // finite case: image of s_i
  std::vector<int> length_;
  std::vector<Word> words_;
  std::vector<int> inverse_;
  std::vector<std::vector<int>> steps_;  // steps_[g][2i] = g s_i, steps_[g][2i+1] = g s_i^-1
  std::map<Word, int> index_;            // free case: reduced word -> element
  std::shared_ptr<const FiniteSpace> space_;
};

using MarkedGroupPtr = std::shared_ptr<const MarkedGroup>;

/// Finitely supported complex function on a marked group.
class GroupRingElement {
 public:
  using Coefficients = std::map<int, std::complex<double>>;

  GroupRingElement() = default;
  GroupRingElement(MarkedGroupPtr group, Coefficients coefficients);

  static GroupRingElement delta(MarkedGroupPtr group, int g, std::complex<double> value = 1.0);
  /// Terms given as (word, coefficient); words are evaluated in the group.
  static GroupRingElement from_words(MarkedGroupPtr group,
                                     const std::vector<std::pair<Word, std::complex<double>>>& terms);
  /// Parses "2*a + e - 0.5*aB" style sums with real coefficients.
  static GroupRingElement parse(MarkedGroupPtr group, const std::string& text);

  const MarkedGroupPtr& group() const { return group_; }
  const Coefficients& coefficients() const { return coefficients_; }
  std::complex<double> at(int g) const;
  /// Largest word length in the support; 0 for the zero element.
  int support_radius() const { return radius_; }
  bool is_zero() const { return coefficients_.empty(); }
  /// l2 norm of the coefficients.
  double l2_norm() const;
  std::string to_string() const;

  GroupRingElement operator+(const GroupRingElement& other) const;
  GroupRingElement operator*(std::complex<double> scalar) const;

 private:
  MarkedGroupPtr group_;
  Coefficients coefficients_;
  int radius_ = 0;
};

/// Convolution product; throws when a product leaves a truncated ball.
GroupRingElement multiply(const GroupRingElement& a, const GroupRingElement& b);
/// Largest coefficient difference after matching supports.
double max_coefficient_difference(const GroupRingElement& a, const GroupRingElement& b);

/// Parses target descriptions such as "cyclic:12", "product:5,5" or "z".
MarkedGroupPtr marked_group_from_spec(const std::string& spec, int ball_radius = -1);

}  // namespace coarse
