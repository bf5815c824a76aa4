#include "coarse/quantk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coarse/errors.hpp"

namespace coarse {

namespace {

constexpr double kGapTolerance = 1e-9;

Matrix identity_like(const BandOperator& t) { return Matrix::Identity(t.dim(), t.dim()); }

double excess(int propagation, double r) { return std::max(0.0, propagation - r); }

/// Constant row sum of a square matrix, or nullopt.
std::optional<std::complex<double>> constant_row_sum(const Matrix& m) {
  if (m.rows() == 0) return std::complex<double>(0.0);
  Vector sums = m.rowwise().sum();
  for (Eigen::Index i = 1; i < sums.size(); ++i)
    if (std::abs(sums(i) - sums(0)) > kGapTolerance) return std::nullopt;
  return sums(0);
}

}  // namespace

QuantParams QuantParams::make(double r, double eps) {
  if (!(eps > 0.0 && eps < 0.25)) throw PreconditionError("eps must lie in (0, 1/4)");
  if (r < 0.0) throw PreconditionError("propagation scale r must be >= 0");
  return {r, eps};
}

ProjectionCheck check_quasi_projection(const BandOperator& p, const QuantParams& params) {
  ProjectionCheck out;
  const Matrix& m = p.entries();
  out.self_adjoint_residual = spectral_norm(m - m.adjoint());
  out.idempotent_residual = spectral_norm(m * m - m);
  out.propagation = p.propagation();
  out.propagation_excess = excess(out.propagation, params.r);
  out.passed = out.self_adjoint_residual <= kSelfAdjointTolerance &&
               out.idempotent_residual <= params.eps && out.propagation_excess == 0.0;
  return out;
}

UnitaryCheck check_quasi_unitary(const BandOperator& u, const QuantParams& params) {
  UnitaryCheck out;
  const Matrix& m = u.entries();
  const Matrix one = identity_like(u);
  out.left_residual = spectral_norm(m * m.adjoint() - one);
  out.right_residual = spectral_norm(m.adjoint() * m - one);
  out.propagation = u.propagation();
  out.propagation_excess = excess(out.propagation, params.r);
  out.passed = out.left_residual < params.eps && out.right_residual < params.eps &&
               out.propagation_excess == 0.0;
  return out;
}

BandOperator round_to_projection(const BandOperator& p) {
  const Matrix& m = p.entries();
  if (spectral_norm(m - m.adjoint()) > kSelfAdjointTolerance) {
    throw PreconditionError("round_to_projection needs a self-adjoint input");
  }
  const double idem = spectral_norm(m * m - m);
  if (!(idem < 0.25)) {
    throw PreconditionError("round_to_projection needs ||p^2 - p|| < 1/4 (got " +
                            std::to_string(idem) + ")");
  }
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const auto& values = eig.eigenvalues();
  Matrix q = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::abs(values(i) - 0.5) <= kGapTolerance) {
      throw PreconditionError("spectral gap at 1/2 violated: eigenvalue " + std::to_string(values(i)));
    }
    if (values(i) > 0.5) q += eig.eigenvectors().col(i) * eig.eigenvectors().col(i).adjoint();
  }
  return BandOperator(p.space(), std::move(q), p.blocks());
}

PartitionOfUnity PartitionOfUnity::make(const FiniteSpace& space, std::vector<PointSet> members,
                                        std::vector<std::vector<double>> weights) {
  if (members.empty()) throw InputError("partition of unity needs at least one member");
  if (members.size() != weights.size()) throw InputError("one weight vector per member is required");
  const int n = space.size();
  std::vector<double> total(n, 0.0);
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (static_cast<int>(weights[i].size()) != n) throw InputError("weight vector has the wrong size");
    std::vector<bool> inside(n, false);
    for (int x : members[i]) {
      if (x < 0 || x >= n) throw InputError("member point out of range");
      inside[x] = true;
    }
    for (int x = 0; x < n; ++x) {
      const double w = weights[i][x];
      if (w < 0.0) throw InputError("partition of unity weights must be nonnegative");
      if (w != 0.0 && !inside[x]) {
        throw InputError("weight of member " + std::to_string(i) + " is nonzero outside it at point " +
                         std::to_string(x));
      }
      total[x] += w;
    }
  }
  for (int x = 0; x < n; ++x)
    if (std::abs(total[x] - 1.0) > 1e-12) {
      throw InputError("partition of unity normalisation violated at point " + std::to_string(x) +
                       " (sum " + std::to_string(total[x]) + ")");
    }
  return PartitionOfUnity{std::move(members), std::move(weights)};
}

PartitionOfUnity PartitionOfUnity::uniform(const FiniteSpace& space, const Cover& cover) {
  const int n = space.size();
  std::vector<int> count(n, 0);
  for (const auto& m : cover.members)
    for (int x : m) ++count[x];
  std::vector<std::vector<double>> weights;
  for (const auto& m : cover.members) {
    std::vector<double> w(n, 0.0);
    for (int x : m) w[x] = 1.0 / count[x];
    weights.push_back(std::move(w));
  }
  return make(space, cover.members, std::move(weights));
}

PartitionOfUnity PartitionOfUnity::trivial(const FiniteSpace& space) {
  PointSet all(space.size());
  for (int x = 0; x < space.size(); ++x) all[x] = x;
  return make(space, {all}, {std::vector<double>(space.size(), 1.0)});
}

BandOperator smooth_cycle(const BandOperator& f, const PartitionOfUnity& pou) {
  const int n = f.points();
  for (const auto& w : pou.weights)
    if (static_cast<int>(w.size()) != n) {
      throw PreconditionError("partition of unity lives on a different space");
    }
  Matrix factor = Matrix::Zero(n, n);
  for (const auto& w : pou.weights)
    for (int x = 0; x < n; ++x) {
      if (w[x] == 0.0) continue;
      for (int y = 0; y < n; ++y)
        if (w[y] != 0.0) factor(x, y) += std::sqrt(w[x] * w[y]);
    }
  Matrix m = f.entries();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) *= factor(i % n, j % n);
  return BandOperator(f.space(), std::move(m), f.blocks());
}

BandOperator index_form(const BandOperator& f) {
  if (f.blocks() != 1) throw PreconditionError("index_form expects a single-block operator");
  const Matrix& F = f.entries();
  const Matrix one = identity_like(f);
  const Matrix ffs = F * F.adjoint();
  const Matrix a = one - F.adjoint() * F;  // 1 - F*F
  const Matrix b = one - ffs;              // 1 - FF*
  const Eigen::Index n = F.rows();
  Matrix m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = ffs + b * ffs;
  m.topRightCorner(n, n) = F * a + a * F * a;
  m.bottomLeftCorner(n, n) = a * F;
  m.bottomRightCorner(n, n) = a;
  return BandOperator(f.space(), std::move(m), 2);
}

BandOperator unit_corner(const SpacePtr& space) {
  const int n = space->size();
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n).setIdentity();
  return BandOperator(space, std::move(m), 2);
}

IndexClassReport index_class_check(const BandOperator& f, const PartitionOfUnity& pou,
                                   const QuantParams& params) {
  IndexClassReport report;
  report.form = index_form(smooth_cycle(f, pou));
  report.at_params = check_quasi_projection(report.form, params);
  report.derived_r = report.form.propagation();
  report.derived_eps = report.at_params.idempotent_residual;
  const BandOperator corner = unit_corner(f.space());
  report.difference_norm = spectral_norm(report.form.entries() - corner.entries());
  report.class_data_zero = report.difference_norm <= 1e-10;

  const BandOperator plain = index_form(f);
  std::array<std::complex<double>, 4> scalars;
  bool scalar = true;
  for (int k = 0; k < 4 && scalar; ++k) {
    auto s = constant_row_sum(plain.block(k / 2, k % 2).entries());
    if (s) scalars[k] = *s; else scalar = false;
  }
  if (scalar) {
    report.scalar_evaluation = scalars;
    const std::array<double, 4> expected{1.0, 0.0, 0.0, 0.0};
    report.evaluation_matches_unit_corner = true;
    for (int k = 0; k < 4; ++k)
      if (std::abs(scalars[k] - expected[k]) > kGapTolerance) report.evaluation_matches_unit_corner = false;
  }

  if (report.at_params.self_adjoint_residual <= kSelfAdjointTolerance &&
      report.at_params.idempotent_residual < 0.25) {
    try {
      BandOperator q = round_to_projection(report.form);
      const double trace = q.entries().trace().real();
      report.rank_signature = static_cast<int>(std::lround(trace)) - f.points();
    } catch (const PreconditionError&) {
      report.rank_signature.reset();
    }
  }
  return report;
}

LocalisationPath LocalisationPath::make(std::vector<double> times, std::vector<BandOperator> samples,
                                        std::optional<int> target_propagation) {
  if (times.size() != samples.size()) throw InputError("one time per sample is required");
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (times[j] < 0.0) throw InputError("sample times must be nonnegative");
    if (j > 0 && times[j] <= times[j - 1]) throw InputError("sample times must be strictly increasing");
    if (j > 0) {
      require_same_space(samples[0], samples[j], "localisation path");
      if (samples[j].propagation() > samples[j - 1].propagation()) {
        throw InputError("propagation increases at sample " + std::to_string(j));
      }
    }
  }
  if (target_propagation && !samples.empty() && samples.back().propagation() > *target_propagation) {
    throw InputError("final propagation " + std::to_string(samples.back().propagation()) +
                     " exceeds the declared target " + std::to_string(*target_propagation));
  }
  return LocalisationPath{std::move(times), std::move(samples), target_propagation};
}

double LocalisationPath::sup_norm() const {
  double s = 0.0;
  for (const auto& t : samples) s = std::max(s, spectral_norm(t.entries()));
  return s;
}

BandOperator path_evaluate(const LocalisationPath& path) {
  if (path.samples.empty()) throw PreconditionError("cannot evaluate an empty path");
  if (path.times[0] != 0.0) {
    throw PreconditionError("first sample time is " + std::to_string(path.times[0]) + ", not 0");
  }
  return path.samples[0];
}

PathLift lift_path(const LocalisationPath& path, const LiftWindow& window, double continuity_constant) {
  std::vector<BandOperator> lifted;
  for (std::size_t j = 0; j < path.samples.size(); ++j) {
    if (path.samples[j].propagation() > window.R) {
      throw PreconditionError("sample " + std::to_string(j) + " has propagation " +
                              std::to_string(path.samples[j].propagation()) +
                              " above the window R=" + std::to_string(window.R));
    }
    lifted.push_back(lift_operator(path.samples[j], window));
  }
  PathLift out;
  out.lifted = LocalisationPath::make(path.times, std::move(lifted), path.target_propagation);
  out.square_residual =
      max_entry_difference(path_evaluate(out.lifted), lift_operator(path_evaluate(path), window));
  out.commuting_square = out.square_residual <= kEntryTolerance;
  out.sup_norm_path = path.sup_norm();
  out.sup_norm_lifted = out.lifted.sup_norm();
  out.continuity_constant = continuity_constant;
  out.bound_holds = out.sup_norm_lifted <= continuity_constant * out.sup_norm_path * (1.0 + 1e-9) + 1e-12;
  return out;
}

QuasiHomReport check_quasi_homomorphism(const OperatorMap& f, int R,
                                        const std::vector<BandOperator>& samples, double tol,
                                        const std::function<bool(int)>& rows) {
  if (samples.empty()) throw PreconditionError("check_quasi_homomorphism needs samples");
  QuasiHomReport report;
  auto compare = [&](const BandOperator& lhs, const BandOperator& rhs,
                     std::optional<EntryWitness>* witness) {
    double worst = 0.0;
    if (lhs.dim() != rhs.dim()) return std::numeric_limits<double>::infinity();
    for (int i = 0; i < lhs.dim(); ++i) {
      if (rows && !rows(i)) continue;
      for (int j = 0; j < lhs.dim(); ++j) {
        double d = std::abs(lhs(i, j) - rhs(i, j));
        if (d > tol && witness && !*witness) *witness = EntryWitness{i, j, lhs(i, j), rhs(i, j)};
        worst = std::max(worst, d);
      }
    }
    return worst;
  };
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const auto& a = samples[i];
      const auto& b = samples[j];
      const bool admissible = a.propagation() + b.propagation() <= R;
      std::optional<EntryWitness> witness;
      double d = compare(f(multiply(a, b)), multiply(f(a), f(b)), admissible ? &witness : nullptr);
      if (admissible) {
        ++report.admissible_pairs;
        report.admissible_max_difference = std::max(report.admissible_max_difference, d);
        if (witness && !report.witness) {
          report.witness = witness;
          report.witness_pair = {static_cast<int>(i), static_cast<int>(j)};
        }
      } else {
        ++report.control_pairs;
        if (d > tol) ++report.controls_differing;
      }
    }
  report.multiplicative = report.admissible_max_difference <= tol;

  const std::complex<double> alpha(0.7, -0.3), beta(-1.1, 0.4);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& a = samples[i];
    const auto& b = samples[(i + 1) % samples.size()];
    BandOperator combined = f(add_scale(alpha, a, beta, b));
    BandOperator separate = add_scale(alpha, f(a), beta, f(b));
    report.linearity_residual = std::max(report.linearity_residual, compare(combined, separate, nullptr));
    const double na = spectral_norm(a.entries());
    if (na > 0.0) report.norm_estimate = std::max(report.norm_estimate, spectral_norm(f(a).entries()) / na);
  }
  report.linear = report.linearity_residual <= tol;
  report.verdict = report.multiplicative && report.linear;
  return report;
}

ControlTable qs_qi_records(const ControlOracle& qs, const std::vector<std::pair<double, double>>& d_r,
                           double eps, const ControlOracle& qi) {
  if (!qs) throw PreconditionError("qs_qi_records needs a QS oracle");
  if (!(eps > 0.0 && eps < 0.25)) throw PreconditionError("eps must lie in (0, 1/4)");
  ControlTable table;
  for (std::size_t m = 0; m < d_r.size(); ++m) {
    ControlRow row;
    row.m = static_cast<int>(m) + 1;
    row.d = d_r[m].first;
    row.r = d_r[m].second;
    row.eps = eps;
    const long long top = static_cast<long long>(std::floor(row.r));
    auto k = [&](long long R) { return qs(row.d, static_cast<double>(R), eps).first; };

    std::vector<long long> grid;
    for (long long R = 0; R <= std::min<long long>(top, 64); ++R) grid.push_back(R);
    for (long long R = 128; R < top; R *= 2) grid.push_back(R);
    if (top > 64) grid.push_back(top);
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (k(grid[i]) < k(grid[i - 1])) row.monotone = false;
    table.oracle_monotone = table.oracle_monotone && row.monotone;

    auto sup = [top](const std::function<bool(long long)>& ok) {
      long long lo = -1, hi = top;
      while (lo < hi) {
        long long mid = lo + (hi - lo + 1) / 2;
        if (ok(mid)) lo = mid; else hi = mid - 1;
      }
      return lo;
    };
    row.R = sup([&](long long R) { return k(R) <= row.r; });
    if (row.R >= 0) {
      auto v = qs(row.d, static_cast<double>(row.R), eps);
      row.k = v.first;
      row.eps_prime = v.second;
    }
    if (qi) {
      row.L = sup([&](long long R) {
        auto v = qi(row.d, static_cast<double>(R), eps);
        return std::max(v.first, v.second) <= row.r;
      });
      if (row.L >= 0) row.d_prime = qi(row.d, static_cast<double>(row.L), eps).first;
    }
    table.rows.push_back(row);
  }
  if (!table.oracle_monotone) {
    table.verdict = "invalid oracle (not monotone)";
  } else {
    bool increasing = table.rows.size() >= 2;
    for (std::size_t m = 1; m < table.rows.size(); ++m)
      if (table.rows[m].R <= table.rows[m - 1].R) increasing = false;
    table.verdict = increasing ? "divergent (window evidence)" : "not divergent";
  }
  return table;
}

}  // namespace coarse
