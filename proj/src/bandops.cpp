#include "coarse/bandops.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "coarse/errors.hpp"

namespace coarse {

BandOperator::BandOperator(SpacePtr space, Matrix entries, int blocks)
    : space_(std::move(space)), entries_(std::move(entries)), blocks_(blocks) {
  if (!space_) throw PreconditionError("operator needs a space");
  if (blocks_ < 1) throw PreconditionError("block count must be >= 1");
  const long long n = static_cast<long long>(space_->size()) * blocks_;
  if (entries_.rows() != n || entries_.cols() != n) {
    throw InputError("operator dimension " + std::to_string(entries_.rows()) + "x" +
                     std::to_string(entries_.cols()) + " does not match space size " +
                     std::to_string(space_->size()) + " times " + std::to_string(blocks_) +
                     " blocks");
  }
  propagation_ = propagation_of(*space_, entries_, blocks_);
}

BandOperator BandOperator::identity(SpacePtr space, int blocks) {
  const int n = space->size() * blocks;
  return BandOperator(std::move(space), Matrix::Identity(n, n), blocks);
}

BandOperator BandOperator::zero(SpacePtr space, int blocks) {
  const int n = space->size() * blocks;
  return BandOperator(std::move(space), Matrix::Zero(n, n), blocks);
}

BandOperator BandOperator::adjacency(SpacePtr space) {
  const int n = space->size();
  Matrix m = Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int y : space->neighbors()[x]) m(x, y) = 1.0;
  return BandOperator(std::move(space), std::move(m));
}

BandOperator BandOperator::from_blocks(const std::vector<std::vector<BandOperator>>& blocks) {
  const int b = static_cast<int>(blocks.size());
  if (b == 0) throw PreconditionError("from_blocks needs at least one block");
  const SpacePtr& space = blocks[0][0].space();
  const int n = space->size();
  Matrix m(static_cast<Eigen::Index>(b) * n, static_cast<Eigen::Index>(b) * n);
  for (int i = 0; i < b; ++i) {
    if (static_cast<int>(blocks[i].size()) != b) throw PreconditionError("block layout is not square");
    for (int j = 0; j < b; ++j) {
      const auto& op = blocks[i][j];
      if (op.blocks() != 1 || *op.space() != *space) {
        throw PreconditionError("from_blocks needs single-block operators on one space");
      }
      m.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(j) * n, n, n) =
          op.entries();
    }
  }
  return BandOperator(space, std::move(m), b);
}

BandOperator BandOperator::block(int i, int j) const {
  if (i < 0 || j < 0 || i >= blocks_ || j >= blocks_) throw PreconditionError("block index out of range");
  const int n = points();
  return BandOperator(space_, entries_.block(static_cast<Eigen::Index>(i) * n,
                                             static_cast<Eigen::Index>(j) * n, n, n));
}

int propagation_of(const FiniteSpace& space, const Matrix& entries, int blocks) {
  const int n = space.size();
  int prop = 0;
  for (Eigen::Index j = 0; j < entries.cols(); ++j)
    for (Eigen::Index i = 0; i < entries.rows(); ++i) {
      if (std::abs(entries(i, j)) <= kEntryTolerance) continue;
      prop = std::max(prop, space.dist(static_cast<int>(i % n), static_cast<int>(j % n)));
    }
  (void)blocks;
  return prop;
}

void require_same_space(const BandOperator& a, const BandOperator& b, const char* operation) {
  if (a.space() != b.space() && !(*a.space() == *b.space())) {
    throw PreconditionError(std::string(operation) + ": operators live on different spaces");
  }
  if (a.blocks() != b.blocks()) {
    throw PreconditionError(std::string(operation) + ": block counts differ (" +
                            std::to_string(a.blocks()) + " vs " + std::to_string(b.blocks()) + ")");
  }
}

BandOperator multiply(const BandOperator& s, const BandOperator& t) {
  require_same_space(s, t, "multiply");
  return BandOperator(s.space(), s.entries() * t.entries(), s.blocks());
}

BandOperator add_scale(std::complex<double> alpha, const BandOperator& s,
                       std::complex<double> beta, const BandOperator& t) {
  require_same_space(s, t, "add_scale");
  return BandOperator(s.space(), alpha * s.entries() + beta * t.entries(), s.blocks());
}

BandOperator adjoint(const BandOperator& t) {
  return BandOperator(t.space(), t.entries().adjoint(), t.blocks());
}

BandOperator map_entries(const BandOperator& t,
                         const std::function<std::complex<double>(std::complex<double>)>& f) {
  Matrix m = t.entries().unaryExpr(f);
  return BandOperator(t.space(), std::move(m), t.blocks());
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double operator_norm(const BandOperator& t, double tol, const NormOptions& options) {
  if (!(tol > 0.0 && tol <= 1e-6)) {
    throw PreconditionError("operator_norm tolerance must lie in (0, 1e-6]");
  }
  const Matrix& a = t.entries();
  const Eigen::Index n = a.cols();
  if (n == 0 || a.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = {normal(rng), normal(rng)};
  v.normalize();

  double lambda = 0.0, residual = 1.0;
  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    Vector w = a.adjoint() * (a * v);
    double next = v.dot(w).real();
    residual = (w - next * v).norm() / std::max(next, 1e-300);
    double change = std::abs(next - lambda) / std::max(next, 1e-300);
    lambda = next;
    double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (it > 0 && change < tol * tol && residual < tol) {
      converged = true;
      break;
    }
  }
  double estimate = std::sqrt(std::max(lambda, 0.0));
  if (n <= options.svd_check_dim) {
    double exact = spectral_norm(a);
    if (std::abs(exact - estimate) > tol * std::max(exact, 1.0)) return exact;
    return estimate;
  }
  if (!converged) {
    // Clustered top singular values slow the power method; settle with a full SVD
    // only when the iteration stagnated rather than diverged.
    if (residual < std::sqrt(tol)) return spectral_norm(a);
    throw ConvergenceError("operator_norm: power iteration did not converge in " +
                               std::to_string(options.max_iterations) + " iterations",
                           residual);
  }
  return estimate;
}

double max_entry_difference(const BandOperator& a, const BandOperator& b) {
  if (a.dim() != b.dim()) throw PreconditionError("operators have different dimensions");
  if (a.dim() == 0) return 0.0;
  return (a.entries() - b.entries()).cwiseAbs().maxCoeff();
}

BandOperator to_band_operator(const GroupRingElement& a) {
  const auto& group = *a.group();
  const int n = group.size();
  Matrix m = Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (const auto& [g, v] : a.coefficients()) {
      int y = group.mul(x, g);
      if (y >= 0) m(x, y) += v;
    }
  return BandOperator(group.space(), std::move(m));
}

BandOperator to_band_operator(const GroupRingElement& a, const MarkedGroup& target,
                              SpacePtr target_space) {
  if (!target.is_finite_group()) throw PreconditionError("target must be a finite marked group");
  if (a.group()->rank() != target.rank()) {
    throw PreconditionError("source rank " + std::to_string(a.group()->rank()) +
                            " differs from target rank " + std::to_string(target.rank()));
  }
  if (a.support_radius() > target.space()->diameter()) {
    throw PreconditionError("support radius " + std::to_string(a.support_radius()) +
                            " exceeds the target diameter " +
                            std::to_string(target.space()->diameter()));
  }
  std::map<int, std::complex<double>> image;
  std::map<int, int> origin;
  for (const auto& [g, v] : a.coefficients()) {
    int h = target.evaluate(a.group()->word(g));
    if (origin.count(h)) {
      throw PreconditionError("support elements " + a.group()->name(origin[h]) + " and " +
                              a.group()->name(g) + " alias in the target");
    }
    origin[h] = g;
    image[h] = v;
  }
  const int n = target.size();
  Matrix m = Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (const auto& [h, v] : image) m(x, target.mul(x, h)) += v;
  return BandOperator(target_space ? std::move(target_space) : target.space(), std::move(m));
}

void write_operator(std::ostream& out, const BandOperator& t) {
  out << "# band-operator space=" << t.space()->hash() << " propagation=" << t.propagation()
      << " blocks=" << t.blocks() << " dim=" << t.dim() << "\n";
  char buf[128];
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) {
      auto v = t(i, j);
      if (v == std::complex<double>(0.0)) continue;
      std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", i, j, v.real(), v.imag());
      out << buf;
    }
}

BandOperator read_operator(std::istream& in, SpacePtr space) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# band-operator", 0) != 0) {
    throw InputError("operator file must start with '# band-operator'");
  }
  std::string hash;
  int blocks = 1, dim = -1, declared_prop = -1;
  std::istringstream header(line.substr(15));
  std::string field;
  while (header >> field) {
    auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    std::string key = field.substr(0, eq), value = field.substr(eq + 1);
    try {
      if (key == "space") hash = value;
      if (key == "blocks") blocks = std::stoi(value);
      if (key == "dim") dim = std::stoi(value);
      if (key == "propagation") declared_prop = std::stoi(value);
    } catch (const std::exception&) {
      throw InputError("malformed operator header field '" + field + "'");
    }
  }
  if (!hash.empty() && hash != space->hash()) {
    throw InputError("operator was written for space " + hash + ", not " + space->hash());
  }
  if (blocks < 1) throw InputError("operator header: blocks must be >= 1");
  const int n = space->size() * blocks;
  if (dim >= 0 && dim != n) throw InputError("operator header dimension does not match the space");
  Matrix m = Matrix::Zero(n, n);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    int x, y;
    double re, im;
    if (!(row >> x >> y >> re >> im) || x < 0 || y < 0 || x >= n || y >= n) {
      throw InputError("malformed operator entry on line " + std::to_string(lineno));
    }
    m(x, y) = {re, im};
  }
  BandOperator t(std::move(space), std::move(m), blocks);
  if (declared_prop >= 0 && declared_prop != t.propagation()) {
    throw InputError("declared propagation " + std::to_string(declared_prop) +
                     " does not match the entries (" + std::to_string(t.propagation()) + ")");
  }
  return t;
}

}  // namespace coarse
