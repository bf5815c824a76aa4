// Batch front end for the coarse library: one subcommand per module.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coarse/bandops.hpp"
#include "coarse/coverings.hpp"
#include "coarse/errors.hpp"
#include "coarse/groups.hpp"
#include "coarse/io.hpp"
#include "coarse/lifting.hpp"
#include "coarse/onl.hpp"
#include "coarse/quantk.hpp"
#include "coarse/report.hpp"
#include "coarse/smallcancel.hpp"
#include "coarse/sobolev.hpp"
#include "coarse/spaces.hpp"

namespace {

using namespace coarse;

enum ExitCode { kOk = 0, kConfig = 2, kInput = 3, kPrecondition = 4, kConvergence = 5 };

/// Missing or inconsistent configuration (as opposed to an out-of-range value).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct Globals {
  std::string output_dir;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string command;
  std::string config_hash;
};

Globals g;

std::optional<std::uint64_t> seed_if_given() {
  if (g.seed_opt && g.seed_opt->count() > 0) return g.seed;
  return std::nullopt;
}

std::uint64_t require_seed() {
  auto s = seed_if_given();
  if (!s) throw ConfigError("--seed is mandatory for ensemble commands");
  return *s;
}

/// Writer for the configured output directory, or nullptr when reports are off.
std::unique_ptr<ReportWriter> open_writer(bool required) {
  std::string dir = g.output_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("COARSE_OUTPUT_DIR"); env && *env) dir = env;
  }
  if (dir.empty()) {
    if (!required) return nullptr;
    dir = "coarse-out";
  }
  return std::make_unique<ReportWriter>(dir, ReportMeta{g.command, g.config_hash, seed_if_given()});
}

void require(bool ok, const std::string& message) {
  if (!ok) throw PreconditionError(message);
}

std::string num(double v) { return format_number(v); }

int ball_size(int rank, int radius) {
  const long long s = free_ball_size(rank, radius);
  return s > (1LL << 30) ? (1 << 30) : static_cast<int>(s);
}

int source_rank(const std::string& spec) {
  if (spec == "z") return 1;
  if (spec.rfind("free", 0) == 0) {
    const auto colon = spec.find(':');
    return colon == std::string::npos ? 2 : std::stoi(spec.substr(colon + 1));
  }
  return 0;
}

/// Largest radius <= diameter + 1 whose free ball has at most 5000 elements.
int default_ball_radius(int rank, int diameter) {
  int R = 0;
  while (R + 1 <= diameter + 1 && ball_size(rank, R + 1) <= 5000) ++R;
  return R;
}

MarkedGroupPtr load_target(const std::string& spec, const std::string& quotient_file) {
  if (!quotient_file.empty()) return load_quotient(quotient_file);
  return marked_group_from_spec(spec);
}

MarkedGroupPtr load_source(const std::string& spec, int ball_radius, int target_diameter) {
  const int rank = source_rank(spec);
  if (rank == 0) return marked_group_from_spec(spec);
  const int R = ball_radius >= 0 ? ball_radius : default_ball_radius(rank, target_diameter);
  return marked_group_from_spec(spec, R);
}

/// Stable digest of every parsed option except output location and config path.
std::string config_digest(const CLI::App& app) {
  std::ostringstream out;
  std::function<void(const CLI::App*)> visit = [&](const CLI::App* a) {
    out << '[' << a->get_name() << ']';
    for (const CLI::Option* opt : a->get_options()) {
      const std::string name = opt->get_name();
      if (name == "--output-dir" || name == "--config" || name == "--help" || opt->count() == 0) continue;
      out << name << '=';
      for (const auto& r : opt->results()) out << r << ';';
    }
    for (const CLI::App* sub : a->get_subcommands()) visit(sub);
  };
  visit(&app);
  return fnv1a_hex(out.str());
}

ControlFunction parse_control(const std::string& text) {
  if (text == "identity") return ControlFunction::identity();
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (kind == "const") return ControlFunction::constant(std::stod(rest));
    if (kind == "linear") {
      const auto comma = rest.find(',');
      if (comma == std::string::npos) throw InputError("linear:<slope>,<intercept>");
      return ControlFunction::linear(std::stod(rest.substr(0, comma)), std::stod(rest.substr(comma + 1)));
    }
  } catch (const std::logic_error&) {
    throw InputError("malformed control function '" + text + "'");
  }
  throw InputError("unknown control function '" + text + "' (identity, const:<v>, linear:<a>,<b>)");
}

/// Permutation times diagonal phases: an exact unitary of propagation <= the permutation's displacement.
BandOperator random_permutation_unitary(const SpacePtr& space, std::mt19937_64& rng) {
  const int n = space->size();
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  Matrix m = Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x) m(perm[x], x) = std::polar(1.0, angle(rng));
  return BandOperator(space, m);
}

GroupRingElement random_element(const MarkedGroupPtr& group, int radius, int terms, std::mt19937_64& rng) {
  std::vector<int> pool;
  for (int h = 0; h < group->size(); ++h)
    if (group->word_length(h) <= radius) pool.push_back(h);
  std::normal_distribution<double> normal(0.0, 1.0);
  GroupRingElement::Coefficients c;
  for (int i = 0; i < terms; ++i) {
    const int h = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    c[h] += std::complex<double>(normal(rng), normal(rng));
  }
  return GroupRingElement(group, c);
}

// ---------------------------------------------------------------- space

void add_space(CLI::App& app, std::function<int()>& run) {
  auto* space = app.add_subcommand("space", "girth, hyperbolicity and annuli of a finite space");
  space->require_subcommand(1);
  static std::string input;
  static int width = 1, r = 1, k = -1, ball = 1, limit = kDefaultHyperbolicityLimit;

  auto* delta = space->add_subcommand("delta", "four-point hyperbolicity constant");
  delta->add_option("--input", input, "space JSON")->required();
  delta->add_option("--max-points", limit, "refuse larger spaces");
  delta->callback([&run] {
    run = [] {
      const FiniteSpace s = load_space(input);
      const auto h = hyperbolicity_delta(s, limit);
      std::cout << num(h.delta) << "\n";
      if (auto w = open_writer(false)) {
        Json j;
        j["space_hash"] = s.hash();
        j["delta"] = h.delta;
        j["convention"] = h.convention;
        j["witness"] = h.witness;
        w->write_json("delta.json", j);
        w->finish({{"delta", h.delta}});
      }
      return kOk;
    };
  });

  auto* gir = space->add_subcommand("girth", "shortest cycle of the distance-1 graph");
  gir->add_option("--input", input, "space JSON")->required();
  gir->callback([&run] {
    run = [] {
      const FiniteSpace s = load_space(input);
      const auto gi = girth(s);
      std::cout << (gi ? std::to_string(*gi) : std::string("none")) << "\n";
      if (auto w = open_writer(false)) {
        Json j;
        j["space_hash"] = s.hash();
        j["girth"] = gi ? Json(*gi) : Json(nullptr);
        j["diameter"] = s.diameter();
        w->write_json("girth.json", j);
        w->finish({{"girth", j["girth"]}});
      }
      return kOk;
    };
  });

  auto* ann = space->add_subcommand("annuli", "annular decomposition around the basepoint");
  ann->add_option("--input", input, "space JSON")->required();
  ann->add_option("--width", width, "annulus width");
  ann->callback([&run] {
    run = [] {
      require(width >= 1, "--width must be >= 1");
      const FiniteSpace s = load_space(input);
      const auto d = annular_decomposition(s, width);
      std::vector<std::vector<std::string>> rows;
      for (std::size_t i = 0; i < d.parts.size(); ++i) {
        std::cout << i << " " << d.parts[i].size() << "\n";
        rows.push_back({std::to_string(i), std::to_string(d.parts[i].size())});
      }
      if (auto w = open_writer(false)) {
        w->write_csv("annuli.csv", {"index", "size"}, rows);
        w->finish({{"annuli", d.parts.size()}});
      }
      return kOk;
    };
  });

  auto* col = space->add_subcommand("color", "colour the ball cover into r-disjoint families");
  col->add_option("--input", input, "space JSON")->required();
  col->add_option("--r", r, "separation scale");
  col->add_option("--ball", ball, "radius of the covering balls");
  col->add_option("--k", k, "multiplicity bound (default: measured 2r-multiplicity minus 1)");
  col->callback([&run] {
    run = [] {
      require(r >= 1, "--r must be >= 1");
      require(ball >= 0, "--ball must be >= 0");
      const FiniteSpace s = load_space(input);
      std::vector<PointSet> members;
      for (int x = 0; x < s.size(); ++x) members.push_back(s.ball(x, ball));
      const Cover cover = Cover::make(s, members);
      const AnnularCover refined = annular_refine(s, cover, r);
      const int kk = k >= 0 ? k : cover_multiplicity(s, refined.pieces, 2 * r) - 1;
      const Coloring c = greedy_color_cover(s, refined, r, kk);
      const auto defect = find_coloring_defect(s, refined.pieces, c);
      std::cout << "colors=" << c.color_count << " k=" << kk << " defect=" << (defect ? "yes" : "none") << "\n";
      if (auto w = open_writer(false)) {
        Json j;
        j["colors"] = c.color_count;
        j["k"] = kk;
        j["within_2k_plus_2"] = c.within_2k_plus_2;
        j["color_of"] = c.color_of;
        w->write_json("coloring.json", j);
        w->finish({{"colors", c.color_count}, {"defect", defect.has_value()}});
      }
      return defect ? kPrecondition : kOk;
    };
  });
}

// ---------------------------------------------------------------- cover

void add_cover(CLI::App& app, std::function<int()>& run) {
  auto* cover = app.add_subcommand("cover", "covering maps, injectivity radii and faithfulness");
  cover->require_subcommand(1);
  static std::string source = "z", quotient;
  static std::vector<std::string> targets;
  static int ball = -1;

  auto* rad = cover->add_subcommand("radius", "injectivity radius of a quotient map");
  rad->add_option("--source", source, "z, free:<k>, cyclic:<n> or product:<...>");
  rad->add_option("--target", targets, "target group description")->expected(1);
  rad->add_option("--quotient", quotient, "quotient JSON (instead of --target)");
  rad->add_option("--ball-radius", ball, "ball radius for infinite sources");
  rad->callback([&run] {
    run = [] {
      if (targets.empty() && quotient.empty()) throw ConfigError("--target or --quotient is required");
      const auto tgt = load_target(targets.empty() ? "" : targets[0], quotient);
      const auto src = load_source(source, ball, tgt->space()->diameter());
      const CoveringMap c = quotient_covering(src, tgt);
      std::cout << c.injectivity_radius() << "\n";
      if (auto w = open_writer(false)) {
        Json j;
        j["cover"] = c.description();
        j["injectivity_radius"] = c.injectivity_radius();
        j["max_reach"] = c.max_reach();
        if (const auto& f = c.failure()) {
          j["failure"] = {{"radius", f->radius}, {"center", f->center}, {"first", f->first},
                          {"second", f->second}, {"reason", f->reason}};
        }
        w->write_json("radius.json", j);
        w->finish({{"injectivity_radius", c.injectivity_radius()}});
      }
      return kOk;
    };
  });

  auto* fa = cover->add_subcommand("faithful", "injectivity radii along a family of quotients");
  fa->add_option("--source", source, "common source group");
  fa->add_option("--target", targets, "target groups, in order")->required();
  fa->add_option("--ball-radius", ball, "ball radius for infinite sources");
  fa->callback([&run] {
    run = [] {
      std::vector<MarkedGroupPtr> tg;
      int diam = 0;
      for (const auto& t : targets) {
        tg.push_back(marked_group_from_spec(t));
        diam = std::max(diam, tg.back()->space()->diameter());
      }
      const auto src = load_source(source, ball, diam);
      std::vector<CoveringMap> family;
      for (const auto& t : tg) family.push_back(quotient_covering(src, t));
      const auto rep = faithfulness_report(family);
      std::vector<std::vector<std::string>> rows;
      for (const auto& term : rep.terms) {
        std::cout << term.index << " " << term.description << " " << term.radius << "\n";
        rows.push_back({std::to_string(term.index), term.description, std::to_string(term.radius)});
      }
      std::cout << rep.verdict << "\n";
      if (auto w = open_writer(false)) {
        w->write_csv("faithfulness.csv", {"m", "cover", "radius"}, rows);
        w->finish({{"verdict", rep.verdict}});
      }
      return kOk;
    };
  });
}

// ---------------------------------------------------------------- lift

void add_lift(CLI::App& app, std::function<int()>& run) {
  auto* lift = app.add_subcommand("lift", "norm profiles and multiplicativity of lifts");
  lift->require_subcommand(1);
  static std::string source = "z", element = "a + A", a_text = "a", b_text = "a";
  static std::vector<std::string> targets;
  static int ball = -1, window = -1;
  static double tol = 1e-9, c = 1.0;

  auto* prof = lift->add_subcommand("profile", "norms of the images of an element along a family");
  prof->add_option("--source", source, "common source group");
  prof->add_option("--target", targets, "target groups, in order")->required();
  prof->add_option("--element", element, "element of the source group ring, e.g. \"a + A\"");
  prof->add_option("--ball-radius", ball, "ball radius for infinite sources");
  prof->add_option("--tol", tol, "relative tolerance");
  prof->add_option("--c", c, "continuity constant");
  prof->callback([&run] {
    run = [] {
      require(tol > 0.0, "--tol must be > 0");
      require(c > 0.0 && c <= 1.0, "--c must lie in (0, 1]");
      std::vector<MarkedGroupPtr> tg;
      int diam = 0;
      for (const auto& t : targets) {
        tg.push_back(marked_group_from_spec(t));
        diam = std::max(diam, tg.back()->space()->diameter());
      }
      const auto src = load_source(source, ball, diam);
      std::vector<CoveringMap> family;
      for (const auto& t : tg) family.push_back(quotient_covering(src, t));
      const auto a = GroupRingElement::parse(src, element);
      const auto p = limsup_norm_profile(a, family, tol, c);
      std::vector<std::vector<std::string>> rows;
      std::vector<std::vector<double>> dat;
      for (const auto& t : p.terms) {
        if (!t.admissible) continue;
        rows.push_back({std::to_string(t.m), std::to_string(t.r_m), num(t.norm_lift), num(t.norm_base), num(t.ratio)});
        dat.push_back({double(t.m), double(t.r_m), t.norm_lift, t.norm_base, t.ratio});
        std::cout << t.m << " " << t.r_m << " " << num(t.norm_lift) << " " << num(t.norm_base) << " "
                  << num(t.ratio) << "\n";
      }
      std::cout << p.verdict << "\n";
      auto w = open_writer(true);
      w->write_csv("profile.csv", {"m", "r_m", "norm_lift", "norm_base", "ratio"}, rows);
      w->write_dat("profile.dat", {"m", "r_m", "norm_lift", "norm_base", "ratio"}, dat);
      Json verdict;
      verdict["element"] = p.element;
      verdict["orientation"] = p.orientation;
      verdict["base_norm"] = p.base_norm;
      verdict["limsup"] = p.limsup;
      verdict["window_length"] = p.window_length;
      verdict["continuity_bound_holds"] = p.continuity_bound_holds;
      verdict["witness_constant"] = p.witness_constant;
      verdict["verdict"] = p.verdict;
      w->write_json("profile.json", verdict);
      w->finish({{"verdict", p.verdict}});
      return kOk;
    };
  });

  auto* mult = lift->add_subcommand("mult", "lift(ab) against lift(a) lift(b) for elements of the target");
  mult->add_option("--source", source, "source group");
  mult->add_option("--target", targets, "target group")->expected(1)->required();
  mult->add_option("--a", a_text, "first element of the target group ring");
  mult->add_option("--b", b_text, "second element of the target group ring");
  mult->add_option("--window", window, "lifting window R (default: injectivity radius)");
  mult->add_option("--ball-radius", ball, "ball radius for infinite sources");
  mult->callback([&run] {
    run = [] {
      const auto tgt = marked_group_from_spec(targets[0]);
      const auto src = load_source(source, ball, tgt->space()->diameter());
      const CoveringMap cov = quotient_covering(src, tgt);
      const int R = window >= 0 ? window : cov.injectivity_radius();
      const LiftWindow lw = LiftWindow::make(cov, R);
      const auto a = GroupRingElement::parse(tgt, a_text);
      const auto b = GroupRingElement::parse(tgt, b_text);
      const auto rep = local_multiplicativity_check(to_band_operator(a), to_band_operator(b), lw);
      std::cout << (rep.equal ? "equal" : "differ") << " max_difference=" << num(rep.max_difference);
      if (rep.witness) std::cout << " witness=(" << rep.witness->row << "," << rep.witness->col << ")";
      std::cout << "\n";
      if (auto w = open_writer(false)) {
        Json j;
        j["window_R"] = rep.window_R;
        j["prop_a"] = rep.prop_s;
        j["prop_b"] = rep.prop_t;
        j["expected_equal"] = rep.expected_equal;
        j["equal"] = rep.equal;
        j["max_difference"] = rep.max_difference;
        if (rep.witness) j["witness"] = {rep.witness->row, rep.witness->col};
        w->write_json("multiplicativity.json", j);
        w->finish({{"equal", rep.equal}});
      }
      return kOk;
    };
  });
}

// ---------------------------------------------------------------- onl

void add_onl(CLI::App& app, std::function<int()>& run) {
  auto* onl = app.add_subcommand("onl", "localisation certificates, amplification and lacunary controls");
  onl->require_subcommand(1);
  static double c = 0.5, target = 0.25, delta = 1.0, roe_R = 1.0;
  static std::string mode = "root", f_text = "identity", input, kind = "mixed";
  static int degree = 2, R = 1, size = 8, cap = -1, sweep = 0;
  static std::vector<double> deltas, rs;

  auto* amp = onl->add_subcommand("amplify", "constant amplification of a localisation function");
  amp->add_option("--c", c, "current constant");
  amp->add_option("--target", target, "target constant");
  amp->add_option("--mode", mode, "root or verbatim");
  amp->add_option("--f", f_text, "control function: identity, const:<v>, linear:<a>,<b>");
  amp->callback([&run] {
    run = [] {
      if (mode != "root" && mode != "verbatim") throw ConfigError("--mode must be root or verbatim");
      require(c > 0.0 && c <= 1.0 && target > 0.0 && target <= 1.0, "constants must lie in (0, 1]");
      const auto res = amplify_constant(c, parse_control(f_text), target,
                                        mode == "root" ? AmplifyMode::kRoot : AmplifyMode::kVerbatim);
      std::cout << "n=" << res.n << ", " << res.formula << "\n";
      if (auto w = open_writer(false)) {
        w->write_json("amplify.json", {{"c", c}, {"target", target}, {"mode", mode}, {"n", res.n},
                                       {"formula", res.formula}});
        w->finish({{"n", res.n}});
      }
      return kOk;
    };
  });

  auto* fl = onl->add_subcommand("floor", "constant 1/(2|S|) for a generating set of size |S|");
  fl->add_option("--degree", degree, "|S|")->required();
  fl->callback([&run] {
    run = [] {
      require(degree >= 1, "--degree must be >= 1");
      std::cout << num(onl_constant_floor(degree)) << "\n";
      return kOk;
    };
  });

  auto* roe = onl->add_subcommand("roe", "diameter and colour bound for hyperbolic covers");
  roe->add_option("--degree", degree, "|S|")->required();
  roe->add_option("--delta", delta, "hyperbolicity constant")->required();
  roe->add_option("--R", roe_R, "scale");
  roe->callback([&run] {
    run = [] {
      require(degree >= 1 && delta >= 0.0 && roe_R >= 0.0, "--degree >= 1, --delta >= 0, --R >= 0");
      const auto b = roe_cover_bound(degree, delta, roe_R);
      std::cout << "diameter=" << num(b.diameter) << " colours=" << b.colours << "\n";
      return kOk;
    };
  });

  auto* lac = onl->add_subcommand("lacunary", "scales R_m = floor((r_m/delta_m - 2)/18)");
  lac->add_option("--delta", deltas, "delta_m values");
  lac->add_option("--r", rs, "r_m values");
  lac->add_option("--sweep", sweep, "use delta_m = m, r_m = m^2 for m = 1..sweep");
  lac->callback([&run] {
    run = [] {
      std::vector<double> d = deltas, r = rs;
      if (sweep > 0) {
        d.clear();
        r.clear();
        for (int m = 1; m <= sweep; ++m) {
          d.push_back(m);
          r.push_back(double(m) * m);
        }
      }
      if (d.empty()) throw ConfigError("give --delta/--r lists or --sweep");
      require(d.size() == r.size(), "--delta and --r need the same length");
      const auto res = lacunary_control_radius(d, r);
      std::vector<std::vector<std::string>> rows;
      for (std::size_t m = 0; m < res.R.size(); ++m)
        rows.push_back({std::to_string(m), num(res.delta[m]), num(res.r[m]), std::to_string(res.R[m])});
      if (sweep == 0)
        for (auto v : res.R) std::cout << v << "\n";
      std::cout << res.verdict << "\n";
      if (auto w = open_writer(false)) {
        w->write_csv("lacunary.csv", {"m", "delta_m", "r_m", "R_m"}, rows);
        w->finish({{"verdict", res.verdict}, {"note", res.note}});
      }
      return kOk;
    };
  });

  auto* cert = onl->add_subcommand("certificate", "sampled localisation certificate");
  cert->add_option("--input", input, "space JSON")->required();
  cert->add_option("--R", R, "propagation bound");
  cert->add_option("--c", c, "localisation constant");
  cert->add_option("--kind", kind, "gaussian, adjacency, permutation or mixed");
  cert->add_option("--size", size, "ensemble size");
  cert->add_option("--cap", cap, "largest support diameter allowed");
  cert->callback([&run] {
    run = [] {
      const std::uint64_t seed = require_seed();
      require(R >= 0, "--R must be >= 0");
      require(c > 0.0 && c <= 1.0, "--c must lie in (0, 1]");
      require(size >= 1, "--size must be >= 1");
      const auto space = std::make_shared<const FiniteSpace>(load_space(input));
      const EnsembleSpec spec{kind, size, seed};
      const auto res = onl_estimate(space, R, c, spec, cap >= 0 ? std::optional<int>(cap) : std::nullopt);
      std::cout << "f_R=" << res.f_R << " min_ratio=" << num(res.min_ratio)
                << " certified=" << (res.certified ? "yes" : "no") << "\n";
      auto w = open_writer(true);
      Json j;
      j["space_hash"] = res.space_hash;
      j["R"] = res.R;
      j["c"] = res.c;
      j["f_R"] = res.f_R;
      j["ensemble"] = {{"kind", kind}, {"size", size}, {"seed", seed}};
      j["witnesses"] = res.witnesses.size();
      j["min_ratio"] = res.min_ratio;
      j["certified"] = res.certified;
      j["label"] = res.label;
      w->write_json("certificate.json", j);
      std::vector<std::vector<std::string>> rows;
      for (const auto& wi : res.witnesses)
        rows.push_back({std::to_string(wi.operator_index), std::to_string(wi.support_diameter), num(wi.ratio)});
      w->write_csv("witnesses.csv", {"operator", "support_diameter", "ratio"}, rows);
      w->finish({{"certified", res.certified}, {"f_R", res.f_R}});
      return kOk;
    };
  });
}

// ---------------------------------------------------------------- quantk

void add_quantk(CLI::App& app, std::function<int()>& run) {
  auto* qk = app.add_subcommand("quantk", "quasi-projection, quasi-unitary, index and path checks");
  qk->require_subcommand(1);
  static std::string input, op_file, source = "z", target = "cyclic:12";
  static double r = 1.0, eps = 0.1;
  static int count = 10, samples = 4, ball = -1;
  static bool round = false;

  auto load_op = [] {
    const auto space = std::make_shared<const FiniteSpace>(load_space(input));
    std::ifstream in(op_file);
    if (!in) throw InputError("cannot read " + op_file);
    return read_operator(in, space);
  };

  auto* proj = qk->add_subcommand("projection", "(r, eps) quasi-projection check");
  proj->add_option("--input", input, "space JSON")->required();
  proj->add_option("--operator", op_file, "operator file")->required();
  proj->add_option("--r", r, "propagation scale");
  proj->add_option("--eps", eps, "tolerance in (0, 1/4)");
  proj->add_flag("--round", round, "also round to a projection and report its rank");
  proj->callback([&run, load_op] {
    run = [load_op] {
      const auto params = QuantParams::make(r, eps);
      const auto p = load_op();
      const auto chk = check_quasi_projection(p, params);
      std::cout << (chk.passed ? "pass" : "fail") << " sa=" << num(chk.self_adjoint_residual)
                << " idem=" << num(chk.idempotent_residual) << " prop=" << chk.propagation;
      if (round) {
        const auto q = round_to_projection(p);
        std::cout << " rank=" << std::lround(q.entries().trace().real());
      }
      std::cout << "\n";
      if (auto w = open_writer(false)) {
        w->write_json("projection.json", {{"passed", chk.passed}, {"self_adjoint_residual", chk.self_adjoint_residual},
                                          {"idempotent_residual", chk.idempotent_residual},
                                          {"propagation", chk.propagation}});
        w->finish({{"passed", chk.passed}});
      }
      return chk.passed ? kOk : kPrecondition;
    };
  });

  auto* uni = qk->add_subcommand("unitary", "(r, eps) quasi-unitary check");
  uni->add_option("--input", input, "space JSON")->required();
  uni->add_option("--operator", op_file, "operator file")->required();
  uni->add_option("--r", r, "propagation scale");
  uni->add_option("--eps", eps, "tolerance in (0, 1/4)");
  uni->callback([&run, load_op] {
    run = [load_op] {
      const auto params = QuantParams::make(r, eps);
      const auto chk = check_quasi_unitary(load_op(), params);
      std::cout << (chk.passed ? "pass" : "fail") << " left=" << num(chk.left_residual)
                << " right=" << num(chk.right_residual) << " prop=" << chk.propagation << "\n";
      if (auto w = open_writer(false)) {
        w->write_json("unitary.json", {{"passed", chk.passed}, {"left_residual", chk.left_residual},
                                       {"right_residual", chk.right_residual}, {"propagation", chk.propagation}});
        w->finish({{"passed", chk.passed}});
      }
      return chk.passed ? kOk : kPrecondition;
    };
  });

  auto* idx = qk->add_subcommand("index", "index form of random exact unitaries against diag(1,0)");
  idx->add_option("--input", input, "space JSON")->required();
  idx->add_option("--count", count, "number of random unitaries");
  idx->add_option("--eps", eps, "tolerance in (0, 1/4)");
  idx->callback([&run] {
    run = [] {
      const std::uint64_t seed = require_seed();
      require(count >= 1, "--count must be >= 1");
      const auto space = std::make_shared<const FiniteSpace>(load_space(input));
      std::mt19937_64 rng(seed);
      const auto pou = PartitionOfUnity::trivial(*space);
      std::vector<std::vector<std::string>> rows;
      double worst = 0.0;
      for (int i = 0; i < count; ++i) {
        const auto f = random_permutation_unitary(space, rng);
        const auto rep = index_class_check(f, pou, QuantParams::make(std::max(1, 3 * f.propagation()), eps));
        worst = std::max(worst, rep.difference_norm);
        rows.push_back({std::to_string(i), std::to_string(f.propagation()), num(rep.difference_norm),
                        rep.rank_signature ? std::to_string(*rep.rank_signature) : "none"});
      }
      std::cout << "max_difference=" << num(worst) << "\n";
      auto w = open_writer(true);
      w->write_csv("index.csv", {"sample_id", "propagation", "difference_norm", "rank_signature"}, rows);
      w->finish({{"max_difference", worst}, {"class_data_zero", worst <= 1e-10}});
      return kOk;
    };
  });

  auto* path = qk->add_subcommand("path", "lift random localisation paths and test the evaluation square");
  path->add_option("--source", source, "source group");
  path->add_option("--target", target, "target group");
  path->add_option("--ball-radius", ball, "ball radius for infinite sources");
  path->add_option("--count", count, "number of paths");
  path->add_option("--samples", samples, "time samples per path");
  path->callback([&run] {
    run = [] {
      const std::uint64_t seed = require_seed();
      require(count >= 1 && samples >= 1, "--count and --samples must be >= 1");
      const auto tgt = marked_group_from_spec(target);
      const auto src = load_source(source, ball, tgt->space()->diameter());
      const CoveringMap cov = quotient_covering(src, tgt);
      const LiftWindow lw = LiftWindow::make(cov, cov.injectivity_radius());
      std::vector<std::vector<std::string>> rows;
      int passed = 0;
      for (int i = 0; i < count; ++i) {
        std::vector<double> times;
        std::vector<BandOperator> ops;
        for (int j = 0; j < samples; ++j) {
          const int prop = std::max(0, lw.R - j);
          times.push_back(double(j) / samples);
          ops.push_back(sample_ensemble(tgt->space(), prop, {"gaussian", 1, seed + 7919ULL * i + j})[0]);
        }
        const auto p = LocalisationPath::make(times, ops);
        const auto res = lift_path(p, lw);
        passed += res.commuting_square ? 1 : 0;
        rows.push_back({std::to_string(i), num(res.square_residual), res.commuting_square ? "1" : "0",
                        num(res.sup_norm_path), num(res.sup_norm_lifted)});
      }
      std::cout << "commuting=" << passed << "/" << count << "\n";
      auto w = open_writer(true);
      w->write_csv("paths.csv", {"path_id", "square_residual", "commuting", "sup_norm_path", "sup_norm_lifted"}, rows);
      w->finish({{"commuting", passed}, {"paths", count}});
      return passed == count ? kOk : kPrecondition;
    };
  });
}

// ---------------------------------------------------------------- rd

void add_rd(CLI::App& app, std::function<int()>& run) {
  auto* rd = app.add_subcommand("rd", "Sobolev norms and rapid-decay constant estimates");
  rd->require_subcommand(1);
  static std::string group = "z", element = "a";
  static double s = 2.0;
  static int ball = 12, radius = 3, count = 20, terms = 4;

  auto* sob = rd->add_subcommand("sobolev", "Sobolev (2,s) norm of one element");
  sob->add_option("--group", group, "group description");
  sob->add_option("--ball-radius", ball, "ball radius for infinite groups");
  sob->add_option("--element", element, "element, e.g. \"2*a + e\"");
  sob->add_option("--s", s, "exponent");
  sob->callback([&run] {
    run = [] {
      require(s >= 0.0, "--s must be >= 0");
      const auto grp = marked_group_from_spec(group, ball);
      std::cout << num(sobolev_norm(GroupRingElement::parse(grp, element), s)) << "\n";
      return kOk;
    };
  });

  auto* est = rd->add_subcommand("report", "empirical rapid-decay constant over random elements");
  est->add_option("--group", group, "group description");
  est->add_option("--ball-radius", ball, "ball radius for infinite groups");
  est->add_option("--radius", radius, "support radius of the samples");
  est->add_option("--count", count, "number of samples");
  est->add_option("--terms", terms, "support terms per sample");
  est->add_option("--s", s, "exponent");
  est->callback([&run] {
    run = [] {
      const std::uint64_t seed = require_seed();
      require(s >= 0.0, "--s must be >= 0");
      require(count >= 1 && terms >= 1 && radius >= 0, "--count, --terms >= 1 and --radius >= 0");
      const auto grp = marked_group_from_spec(group, ball);
      std::mt19937_64 rng(seed);
      std::vector<GroupRingElement> sample;
      for (int i = 0; i < count; ++i) sample.push_back(random_element(grp, radius, terms, rng));
      const auto est_res = rd_constant_estimate(sample, s);
      std::vector<std::vector<std::string>> rows;
      for (const auto& row : est_res.samples)
        rows.push_back({std::to_string(row.id), num(row.op_norm), num(row.sobolev), num(row.ratio)});
      std::cout << "constant=" << num(est_res.constant) << " (" << est_res.label << ")\n";
      auto w = open_writer(true);
      w->write_csv("rd.csv", {"sample_id", "op_norm", "sobolev_norm", "ratio"}, rows);
      w->write_json("rd.json", {{"group", group}, {"s", s}, {"constant", est_res.constant},
                                {"skipped_zero", est_res.skipped_zero}, {"label", est_res.label}});
      w->finish({{"constant", est_res.constant}});
      return kOk;
    };
  });
}

// ---------------------------------------------------------------- sc

Json stages_json(const Schedule& sched) {
  Json arr = Json::array();
  for (const auto& st : sched.stages) {
    Json j;
    j["m"] = st.m;
    j["r"] = st.r;
    j["eps"] = st.eps;
    j["t"] = st.t;
    j["eps_prime"] = st.eps_prime;
    j["block"] = st.block;
    j["skipped"] = st.skipped;
    j["accumulated_size"] = st.accumulated.size();
    j["injectivity_lower_bound"] = st.injectivity_lower_bound ? Json(*st.injectivity_lower_bound) : Json(nullptr);
    if (st.graph_index) j["graph_index"] = *st.graph_index;
    if (st.girth) j["girth"] = *st.girth;
    arr.push_back(j);
  }
  return arr;
}

void add_sc(CLI::App& app, std::function<int()>& run) {
  auto* sc = app.add_subcommand("sc", "small cancellation pieces, conditions and schedules");
  sc->require_subcommand(1);
  static std::string input;
  static double lambda = -1.0, r0 = 1.0, eps0 = 0.2, gap = 4.0, t_factor = 2.0, eps_factor = 0.5;
  static int p = -1, cap = 8, stages = 0;

  auto* pc = sc->add_subcommand("pieces", "longest piece per relator");
  pc->add_option("--input", input, "presentation file")->required();
  pc->callback([&run] {
    run = [] {
      const auto rels = load_presentation(input);
      const auto t = compute_pieces(rels);
      std::vector<std::vector<std::string>> rows;
      for (std::size_t i = 0; i < rels.size(); ++i) {
        std::cout << word_to_string(rels[i]) << " " << t.max_piece[i] << "\n";
        rows.push_back({std::to_string(i), word_to_string(rels[i]), std::to_string(rels[i].size()),
                        std::to_string(t.max_piece[i])});
      }
      if (auto w = open_writer(false)) {
        w->write_csv("pieces.csv", {"relator", "word", "length", "max_piece"}, rows);
        w->finish({{"overall_max", t.overall_max}});
      }
      return kOk;
    };
  });

  auto* cond = sc->add_subcommand("condition", "C'(lambda) and/or C(p)");
  cond->add_option("--input", input, "presentation file")->required();
  cond->add_option("--lambda", lambda, "metric condition parameter");
  cond->add_option("--p", p, "piece-count condition parameter");
  cond->callback([&run] {
    run = [] {
      if (lambda < 0.0 && p < 0) throw ConfigError("give --lambda and/or --p");
      const auto rels = load_presentation(input);
      std::vector<ConditionResult> results;
      if (lambda >= 0.0) {
        require(lambda > 0.0, "--lambda must be > 0");
        results.push_back(check_metric_condition(rels, lambda));
      }
      if (p >= 0) {
        require(p >= 1, "--p must be >= 1");
        results.push_back(check_piece_condition(rels, p));
      }
      Json arr = Json::array();
      bool all = true;
      for (const auto& r : results) {
        std::cout << r.condition << " " << (r.passed ? "holds" : "fails") << (r.detail.empty() ? "" : ": ")
                  << r.detail << "\n";
        all = all && r.passed;
        arr.push_back({{"condition", r.condition}, {"passed", r.passed}, {"detail", r.detail}});
      }
      if (auto w = open_writer(false)) {
        w->write_json("conditions.json", {{"results", arr}});
        w->finish({{"all_hold", all}});
      }
      return kOk;
    };
  });

  auto* rel = sc->add_subcommand("relators", "relators read off a labelled graph");
  rel->add_option("--graph", input, "labelled graph JSON")->required();
  rel->add_option("--cap", cap, "longest cycle to read");
  rel->callback([&run] {
    run = [] {
      require(cap >= 1, "--cap must be >= 1");
      const auto graphs = load_graphs(input);
      const auto list = relators_from_graph(graphs.at(0), cap);
      std::cout << format_presentation(list.relators);
      if (!list.note.empty()) std::cerr << list.note << "\n";
      return kOk;
    };
  });

  auto oracle = [] {
    require(t_factor > 0.0, "--t-factor must be > 0");
    require(eps_factor > 0.0 && eps_factor <= 1.0, "--eps-factor must lie in (0, 1]");
    return ScheduleOracle([](double r, double eps) { return std::pair{t_factor * r, eps * eps_factor}; });
  };

  auto* sch = sc->add_subcommand("schedule", "stage schedule over a relator length stream");
  sch->add_option("--stream", input, "length stream JSON")->required();
  sch->add_option("--r0", r0, "initial scale");
  sch->add_option("--eps0", eps0, "initial tolerance in (0, 1/4)");
  sch->add_option("--gap", gap, "scale gap between stages");
  sch->add_option("--t-factor", t_factor, "stub oracle: t = factor * r");
  sch->add_option("--eps-factor", eps_factor, "stub oracle: eps' = factor * eps");
  sch->add_option("--stages", stages, "minimum number of stages required");
  sch->callback([&run, oracle] {
    run = [oracle] {
      const auto o = oracle();
      const auto stream = load_stream(input);
      const auto sched = schedule_general(stream, o, r0, eps0, gap, stages);
      if (auto bad = verify_schedule(sched, stream)) throw Error("schedule invariant violated: " + *bad);
      for (const auto& st : sched.stages)
        std::cout << st.m << " r=" << num(st.r) << " t=" << num(st.t) << " eps=" << num(st.eps)
                  << " block=" << st.block.size() << "\n";
      auto w = open_writer(true);
      w->write_json("stages.json", stages_json(sched));
      w->finish({{"stages", sched.stages.size()}, {"oracle_inputs", sched.oracle_inputs},
                 {"assumption", sched.assumption}});
      return kOk;
    };
  });

  auto* gs = sc->add_subcommand("graph-schedule", "stage schedule over a graph sequence");
  gs->add_option("--graphs", input, "graph list JSON")->required();
  gs->add_option("--eps0", eps0, "initial tolerance in (0, 1/4)");
  gs->add_option("--gap", gap, "girth gap between stages");
  gs->add_option("--t-factor", t_factor, "stub oracle: t = factor * r");
  gs->add_option("--eps-factor", eps_factor, "stub oracle: eps' = factor * eps");
  gs->callback([&run, oracle] {
    run = [oracle] {
      const auto o = oracle();
      const auto sched = schedule_from_graphs(load_graphs(input), o, eps0, gap);
      if (auto bad = verify_schedule(sched)) throw Error("schedule invariant violated: " + *bad);
      for (const auto& st : sched.stages)
        std::cout << st.m << " graph=" << st.graph_index.value_or(-1) << " girth=" << st.girth.value_or(-1)
                  << " r=" << num(st.r) << " t=" << num(st.t) << "\n";
      if (sched.shortfall_threshold) std::cout << "shortfall: no graph with girth > " << num(*sched.shortfall_threshold) << "\n";
      auto w = open_writer(true);
      w->write_json("stages.json", stages_json(sched));
      Json verdict{{"stages", sched.stages.size()}};
      if (sched.shortfall_threshold) verdict["shortfall_threshold"] = *sched.shortfall_threshold;
      w->finish(verdict);
      return kOk;
    };
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarse: finite-scale experiments in coarse geometry and quantitative K-theory"};
  app.set_config("--config", "", "TOML key/value file; flags on the command line override it");
  app.add_option("--output-dir", g.output_dir, "report directory (default: $COARSE_OUTPUT_DIR)");
  g.seed_opt = app.add_option("--seed", g.seed, "seed for ensemble commands");
  app.require_subcommand(1);

  std::function<int()> run;
  add_space(app, run);
  add_cover(app, run);
  add_lift(app, run);
  add_onl(app, run);
  add_quantk(app, run);
  add_rd(app, run);
  add_sc(app, run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  for (const CLI::App* a = &app; !a->get_subcommands().empty();) {
    a = a->get_subcommands().front();
    g.command += (g.command.empty() ? "" : " ") + a->get_name();
  }
  g.config_hash = config_digest(app);

  try {
    return run ? run() : kConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const OutputError& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kConfig;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kPrecondition;
  } catch (const ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << " (residual " << e.residual() << ")\n";
    return kConvergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPrecondition;
  }
}
