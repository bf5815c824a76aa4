#include "coarse/groups.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <sstream>

#include "coarse/errors.hpp"

namespace coarse {

namespace {

int letter_slot(Letter letter) {
  const int g = std::abs(letter) - 1;
  return 2 * g + (letter < 0 ? 1 : 0);
}

double norm_sq(std::complex<double> z) { return std::norm(z); }

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InputError("not an integer: '" + item + "'");
    }
  }
  if (out.empty()) throw InputError("empty parameter list");
  return out;
}

}  // namespace

Word reduce_word(std::span<const Letter> word) {
  Word out;
  for (Letter l : word) {
    if (l == 0) throw InputError("letter 0 is not a generator");
    if (!out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

Word inverse_word(std::span<const Letter> word) {
  Word out(word.rbegin(), word.rend());
  for (Letter& l : out) l = -l;
  return out;
}

std::string word_to_string(std::span<const Letter> word) {
  if (word.empty()) return "e";
  std::string out;
  for (Letter l : word) {
    const int g = std::abs(l) - 1;
    if (g < 26) {
      out += static_cast<char>((l > 0 ? 'a' : 'A') + g);
    } else {
      out += (l > 0 ? "s" : "S") + std::to_string(g + 1) + ".";
    }
  }
  return out;
}

Word word_from_string(const std::string& text) {
  Word out;
  if (text == "e") return out;
  for (char c : text) {
    if (c >= 'a' && c <= 'z') {
      out.push_back(c - 'a' + 1);
    } else if (c >= 'A' && c <= 'Z') {
      out.push_back(-(c - 'A' + 1));
    } else {
      throw InputError(std::string("invalid letter '") + c + "' in word '" + text + "'");
    }
  }
  return out;
}

long long free_ball_size(int rank, int radius) {
  if (rank < 1 || radius < 0) throw PreconditionError("free_ball_size needs rank >= 1, radius >= 0");
  long long total = 1, sphere = 2LL * rank;
  for (int k = 1; k <= radius; ++k) {
    total += sphere;
    sphere *= 2LL * rank - 1;
    if (total > (1LL << 40)) return total;
  }
  return total;
}

// ---------------------------------------------------------------------------

MarkedGroupPtr MarkedGroup::from_finite(FiniteGroup group, std::vector<int> generator_images,
                                        std::string description) {
  if (generator_images.empty()) throw InputError("marking needs at least one generator");
  for (int s : generator_images) {
    if (s < 0 || s >= group.order()) throw InputError("generator image out of range");
  }
  std::shared_ptr<MarkedGroup> g(new MarkedGroup());
  g->rank_ = static_cast<int>(generator_images.size());
  g->description_ = std::move(description);
  g->generators_ = generator_images;
  const int n = group.order();
  const int e = group.identity();

  // Relabel so that the identity is element 0, then order by BFS over letters.
  std::vector<int> to_new(n, -1), to_old;
  std::vector<Word> words;
  std::deque<int> queue{e};
  to_new[e] = 0;
  to_old.push_back(e);
  words.push_back({});
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int i = 0; i < g->rank_; ++i) {
      for (int sign : {1, -1}) {
        int s = sign > 0 ? generator_images[i] : group.inverse(generator_images[i]);
        int y = group.mul(x, s);
        if (to_new[y] < 0) {
          to_new[y] = static_cast<int>(to_old.size());
          to_old.push_back(y);
          Word w = words[to_new[x]];
          w.push_back(sign * (i + 1));
          words.push_back(std::move(w));
          queue.push_back(y);
        }
      }
    }
  }
  if (static_cast<int>(to_old.size()) != n) {
    throw InputError("generator images do not generate the group (" +
                     std::to_string(to_old.size()) + " of " + std::to_string(n) +
                     " elements reached)");
  }
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) table[a][b] = to_new[group.mul(to_old[a], to_old[b])];
  FiniteGroup relabeled = FiniteGroup::from_table(table);
  for (int& s : g->generators_) s = to_new[s];

  g->words_ = std::move(words);
  g->length_.resize(n);
  for (int a = 0; a < n; ++a) g->length_[a] = static_cast<int>(g->words_[a].size());
  g->inverse_.resize(n);
  for (int a = 0; a < n; ++a) g->inverse_[a] = relabeled.inverse(a);
  g->steps_.assign(n, std::vector<int>(2 * g->rank_));
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < g->rank_; ++i) {
      g->steps_[a][2 * i] = relabeled.mul(a, g->generators_[i]);
      g->steps_[a][2 * i + 1] = relabeled.mul(a, relabeled.inverse(g->generators_[i]));
    }
  g->finite_ = std::move(relabeled);
  g->build_space();
  g->radius_ = g->space_->diameter();
  return g;
}

MarkedGroupPtr MarkedGroup::free_ball(int rank, int radius, long long max_elements) {
  if (rank < 1) throw PreconditionError("free group rank must be >= 1");
  if (radius < 0) throw PreconditionError("ball radius must be >= 0");
  const long long count = free_ball_size(rank, radius);
  if (count > max_elements) {
    throw PreconditionError("free ball of rank " + std::to_string(rank) + " and radius " +
                            std::to_string(radius) + " has " + std::to_string(count) +
                            " elements, above the limit " + std::to_string(max_elements));
  }
  std::shared_ptr<MarkedGroup> g(new MarkedGroup());
  g->rank_ = rank;
  g->radius_ = radius;
  g->description_ = rank == 1 ? "Z ball radius " + std::to_string(radius)
                              : "F" + std::to_string(rank) + " ball radius " + std::to_string(radius);
  g->words_.push_back({});
  g->index_[{}] = 0;
  for (std::size_t head = 0; head < g->words_.size(); ++head) {
    if (static_cast<int>(g->words_[head].size()) == radius) continue;
    for (int i = 1; i <= rank; ++i) {
      for (int sign : {1, -1}) {
        Letter l = sign * i;
        if (!g->words_[head].empty() && g->words_[head].back() == -l) continue;
        Word w = g->words_[head];
        w.push_back(l);
        g->index_[w] = static_cast<int>(g->words_.size());
        g->words_.push_back(std::move(w));
      }
    }
  }
  const int n = static_cast<int>(g->words_.size());
  g->length_.resize(n);
  g->inverse_.resize(n);
  g->steps_.assign(n, std::vector<int>(2 * rank, -1));
  for (int a = 0; a < n; ++a) {
    g->length_[a] = static_cast<int>(g->words_[a].size());
    g->inverse_[a] = g->index_.at(inverse_word(g->words_[a]));
    for (int i = 1; i <= rank; ++i)
      for (int sign : {1, -1}) {
        Word w = g->words_[a];
        w.push_back(sign * i);
        auto it = g->index_.find(reduce_word(w));
        g->steps_[a][letter_slot(sign * i)] = it == g->index_.end() ? -1 : it->second;
      }
  }
  g->build_space();
  return g;
}

void MarkedGroup::build_space() {
  std::vector<Edge> edges;
  for (int a = 0; a < size(); ++a)
    for (int t : steps_[a])
      if (t >= 0) edges.emplace_back(a, t);
  space_ = std::make_shared<const FiniteSpace>(FiniteSpace::from_edges(size(), edges, 0));
}

int MarkedGroup::step(int g, Letter letter) const {
  if (g < 0) return -1;
  const int slot = letter_slot(letter);
  if (letter == 0 || slot >= 2 * rank_) {
    throw InputError("letter " + std::to_string(letter) + " exceeds the rank " +
                     std::to_string(rank_));
  }
  return steps_[g][slot];
}

int MarkedGroup::evaluate(std::span<const Letter> word) const {
  if (finite_) {
    int g = 0;
    for (Letter l : word) g = step(g, l);
    return g;
  }
  for (Letter l : word) {
    if (l == 0 || std::abs(l) > rank_) {
      throw InputError("letter " + std::to_string(l) + " exceeds the rank " + std::to_string(rank_));
    }
  }
  auto it = index_.find(reduce_word(word));
  return it == index_.end() ? -1 : it->second;
}

int MarkedGroup::mul(int a, int b) const {
  if (finite_) return finite_->mul(a, b);
  Word w = words_[a];
  w.insert(w.end(), words_[b].begin(), words_[b].end());
  auto it = index_.find(reduce_word(w));
  return it == index_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------

GroupRingElement::GroupRingElement(MarkedGroupPtr group, Coefficients coefficients)
    : group_(std::move(group)) {
  if (!group_) throw PreconditionError("group ring element needs a group");
  for (const auto& [g, v] : coefficients) {
    if (g < 0 || g >= group_->size()) throw InputError("group element index out of range");
    if (v == std::complex<double>(0.0)) continue;
    coefficients_[g] = v;
    radius_ = std::max(radius_, group_->word_length(g));
  }
}

GroupRingElement GroupRingElement::delta(MarkedGroupPtr group, int g, std::complex<double> value) {
  return GroupRingElement(std::move(group), {{g, value}});
}

GroupRingElement GroupRingElement::from_words(
    MarkedGroupPtr group, const std::vector<std::pair<Word, std::complex<double>>>& terms) {
  Coefficients c;
  for (const auto& [w, v] : terms) {
    int g = group->evaluate(w);
    if (g < 0) throw InputError("word " + word_to_string(w) + " lies outside the group ball");
    c[g] += v;
  }
  return GroupRingElement(std::move(group), std::move(c));
}

GroupRingElement GroupRingElement::parse(MarkedGroupPtr group, const std::string& text) {
  std::vector<std::pair<Word, std::complex<double>>> terms;
  std::string compact;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) compact += ch;
  if (compact.empty()) throw InputError("empty group ring element");
  std::size_t pos = 0;
  while (pos < compact.size()) {
    double sign = 1.0;
    if (compact[pos] == '+' || compact[pos] == '-') {
      if (compact[pos] == '-') sign = -1.0;
      ++pos;
    }
    std::size_t end = compact.find_first_of("+-", pos);
    // A '-' or '+' directly after 'e' or a digit may be an exponent, as in 1e-3*a.
    while (end != std::string::npos && end > pos &&
           (compact[end - 1] == 'e' || compact[end - 1] == 'E') && end >= 2 &&
           std::isdigit(static_cast<unsigned char>(compact[end - 2]))) {
      end = compact.find_first_of("+-", end + 1);
    }
    std::string term = compact.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    if (term.empty()) throw InputError("malformed group ring element '" + text + "'");
    double coeff = 1.0;
    std::string word = term;
    auto star = term.find('*');
    if (star != std::string::npos) {
      try {
        std::size_t used = 0;
        coeff = std::stod(term.substr(0, star), &used);
        if (used != star) throw std::invalid_argument(term);
      } catch (const std::exception&) {
        throw InputError("bad coefficient in term '" + term + "'");
      }
      word = term.substr(star + 1);
    }
    terms.emplace_back(word_from_string(word), sign * coeff);
    pos = end == std::string::npos ? compact.size() : end;
  }
  return from_words(std::move(group), terms);
}

std::complex<double> GroupRingElement::at(int g) const {
  auto it = coefficients_.find(g);
  return it == coefficients_.end() ? std::complex<double>(0.0) : it->second;
}

double GroupRingElement::l2_norm() const {
  double s = 0.0;
  for (const auto& [g, v] : coefficients_) s += norm_sq(v);
  return std::sqrt(s);
}

std::string GroupRingElement::to_string() const {
  if (coefficients_.empty()) return "0";
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const auto& [g, v] : coefficients_) {
    if (!first) out << " + ";
    first = false;
    if (v.imag() == 0.0) {
      out << v.real();
    } else {
      out << "(" << v.real() << (v.imag() < 0 ? "" : "+") << v.imag() << "i)";
    }
    out << "*" << group_->name(g);
  }
  return out.str();
}

GroupRingElement GroupRingElement::operator+(const GroupRingElement& other) const {
  if (group_ != other.group_) throw PreconditionError("group ring elements over different groups");
  Coefficients c = coefficients_;
  for (const auto& [g, v] : other.coefficients_) c[g] += v;
  return GroupRingElement(group_, std::move(c));
}

GroupRingElement GroupRingElement::operator*(std::complex<double> scalar) const {
  Coefficients c;
  for (const auto& [g, v] : coefficients_) c[g] = v * scalar;
  return GroupRingElement(group_, std::move(c));
}

GroupRingElement multiply(const GroupRingElement& a, const GroupRingElement& b) {
  if (a.group() != b.group()) throw PreconditionError("group ring elements over different groups");
  const auto& group = *a.group();
  GroupRingElement::Coefficients c;
  for (const auto& [g, u] : a.coefficients())
    for (const auto& [h, v] : b.coefficients()) {
      int gh = group.mul(g, h);
      if (gh < 0) {
        throw PreconditionError("product " + group.name(g) + "*" + group.name(h) +
                                " leaves the ball of radius " + std::to_string(group.radius()));
      }
      c[gh] += u * v;
    }
  return GroupRingElement(a.group(), std::move(c));
}

double max_coefficient_difference(const GroupRingElement& a, const GroupRingElement& b) {
  double worst = 0.0;
  for (const auto& [g, v] : a.coefficients()) worst = std::max(worst, std::abs(v - b.at(g)));
  for (const auto& [g, v] : b.coefficients()) worst = std::max(worst, std::abs(v - a.at(g)));
  return worst;
}

MarkedGroupPtr marked_group_from_spec(const std::string& spec, int ball_radius) {
  auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string params = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "z" || kind == "free") {
    int rank = kind == "z" ? 1 : (params.empty() ? 2 : parse_int_list(params).at(0));
    if (ball_radius < 0) throw PreconditionError("a ball radius is required for " + spec);
    return MarkedGroup::free_ball(rank, ball_radius);
  }
  if (kind == "cyclic") {
    auto n = parse_int_list(params);
    if (n.size() != 1 || n[0] < 1) throw InputError("cyclic:<n> needs one positive order");
    return MarkedGroup::from_finite(FiniteGroup::cyclic(n[0]), {n[0] == 1 ? 0 : 1}, spec);
  }
  if (kind == "product") {
    auto orders = parse_int_list(params);
    auto group = FiniteGroup::product(orders);
    std::vector<int> gens;
    for (std::size_t i = 0; i < orders.size(); ++i) {
      std::vector<int> coords(orders.size(), 0);
      coords[i] = 1;
      gens.push_back(FiniteGroup::product_index(orders, coords));
    }
    return MarkedGroup::from_finite(std::move(group), gens, spec);
  }
  throw InputError("unknown group description '" + spec +
                   "' (expected z, free:<k>, cyclic:<n> or product:<n1,n2,...>)");
}

}  // namespace coarse
