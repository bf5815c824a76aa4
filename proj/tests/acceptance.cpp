// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.
//
// Usage: acceptance <path-to-coarse-cli> <fixture-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "coarse/lifting.hpp"
#include "coarse/onl.hpp"
#include "coarse/quantk.hpp"
#include "coarse/smallcancel.hpp"
#include "coarse/sobolev.hpp"
#include "support.hpp"

using namespace coarse;
using testing::Gen;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d (%s): %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CoveringMap z_to_cyclic(int n, int ball) {
  return quotient_covering(marked_group_from_spec("z", ball), marked_group_from_spec("cyclic:" + std::to_string(n)));
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// 1. Local multiplicativity of lifts inside the window, witnesses outside it.
Outcome lifting_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  Gen gen(1001);
  const int orders[] = {8, 12, 16, 24};
  double worst_ring = 0.0, worst_op = 0.0;
  int good = 0, witnessed = 0;
  for (int i = 0; i < 500; ++i) {
    const int n = orders[i % 4];
    const auto c = z_to_cyclic(n, 2 * n);
    const int r = c.injectivity_radius();
    const auto w = LiftWindow::make(c, r);
    const auto tgt = c.target_group();
    const int ra = gen.uniform(0, r), rb = gen.uniform(0, r - ra);
    const auto a = gen.element(tgt, ra, gen.uniform(1, 5)), b = gen.element(tgt, rb, gen.uniform(1, 5));
    const auto ring = group_ring_multiplicativity_check(a, b, w);
    const auto op = local_multiplicativity_check(to_band_operator(a), to_band_operator(b), w);
    worst_ring = std::max(worst_ring, ring.max_difference);
    worst_op = std::max(worst_op, op.max_difference);
    if (ring.max_difference <= 1e-12 && op.max_difference <= 1e-12 && op.expected_equal) ++good;
  }
  // Violating pairs: same-sign extreme terms whose offsets sum past n/2 wrap around the cycle.
  // Each factor stays below n/2, where its own lift is still the unique short preimage.
  for (int i = 0; i < 100; ++i) {
    const int n = orders[i % 4], half = n / 2;
    const auto c = z_to_cyclic(n, 2 * n);
    const auto w = LiftWindow::make(c, c.injectivity_radius());
    const auto tgt = c.target_group();
    const int ra = gen.uniform(2, half - 1), rb = gen.uniform(half + 1 - ra, half - 1);
    std::vector<std::pair<int, std::complex<double>>> ta{{ra, gen.complex() + 2.0}}, tb{{rb, gen.complex() + 2.0}};
    for (int k = gen.uniform(0, 3); k > 0; --k) ta.emplace_back(gen.uniform(-ra + 1, ra - 1), gen.complex());
    for (int k = gen.uniform(0, 3); k > 0; --k) tb.emplace_back(gen.uniform(-rb + 1, rb - 1), gen.complex());
    const auto op = local_multiplicativity_check(to_band_operator(gen.exponent_element(tgt, ta)),
                                                 to_band_operator(gen.exponent_element(tgt, tb)), w);
    if (!op.expected_equal && op.witness) ++witnessed;
  }
  const double secs = elapsed_since(t0);
  return {good == 500 && witnessed == 100 && secs < 10.0,
          std::to_string(good) + "/500 within window (ring " + fmt("%.1e, operator %.1e", worst_ring, worst_op) +
              " <= 1e-12), " + std::to_string(witnessed) + "/100 violating pairs witnessed" + fmt(", %.2fs < 10s", secs)};
}

// 2. Sobolev norms are preserved by the lift.
Outcome sobolev_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  Gen gen(2002);
  struct Family {
    std::string name;
    std::vector<CoveringMap> covers;
  };
  std::vector<Family> families(3);
  families[0].name = "Z->Z/n";
  for (int n : {8, 12, 16, 24}) families[0].covers.push_back(z_to_cyclic(n, n));
  families[1].name = "F2->(Z/n)^2";
  for (int n : {5, 7}) {
    const auto tgt = marked_group_from_spec("product:" + std::to_string(n) + "," + std::to_string(n));
    families[1].covers.push_back(quotient_covering(marked_group_from_spec("free:2", tgt->radius()), tgt));
  }
  families[2].name = "Z->Z/n odd";
  for (int n : {9, 15, 21, 33}) families[2].covers.push_back(z_to_cyclic(n, n));
  double worst = 0.0;
  int checked = 0;
  std::string radii;
  for (const auto& fam : families) {
    radii += " " + fam.name + ":";
    for (std::size_t i = 0; i < fam.covers.size(); ++i)
      radii += (i ? "," : "") + std::to_string(fam.covers[i].injectivity_radius());
    for (int i = 0; i < 1000; ++i) {
      const auto& c = fam.covers[i % fam.covers.size()];
      const int r = c.injectivity_radius();
      if (r < 1) return {false, fam.name + " has injectivity radius 0"};
      const auto w = LiftWindow::make(c, r);
      const auto a = gen.element(c.target_group(), gen.uniform(0, r), gen.uniform(1, 6));
      worst = std::max(worst, lift_isometry_check(a, w, gen.real(0.0, 3.0)).residual);
      ++checked;
    }
  }
  const double secs = elapsed_since(t0);
  return {worst <= 1e-12 && checked == 3000 && secs < 5.0,
          std::to_string(checked) + " elements in 3 families, max residual " + fmt("%.1e <= 1e-12, %.2fs < 5s;", worst, secs) +
              " radii" + radii};
}

// 3. Greedy colouring of annular refinements.
Outcome colouring_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  Gen gen(3003);
  int accepted = 0, attempts = 0, within = 0, separated = 0, max_k = 0;
  while (accepted < 200 && attempts < 2000) {
    ++attempts;
    const bool torus = gen.coin();
    const int a = gen.uniform(4, 9), b = gen.uniform(4, 9);
    const auto s = torus ? std::make_shared<const FiniteSpace>(FiniteSpace::from_edges(a * b, testing::torus_edges(a, b)))
                         : testing::cycle(gen.uniform(8, 60));
    const int rho = gen.uniform(0, 2), r = gen.uniform(1, 2);
    std::vector<PointSet> members;
    for (int x = 0; x < s->size(); ++x)
      if (gen.uniform(0, 2) == 0 || x == 0) members.push_back(s->ball(x, rho));
    std::vector<int> covered(s->size(), 0);
    for (const auto& m : members)
      for (int x : m) covered[x] = 1;
    for (int x = 0; x < s->size(); ++x)
      if (!covered[x]) members.push_back({x});
    const auto refined = annular_refine(*s, Cover::make(*s, members), r);
    const int k = cover_multiplicity(*s, refined.pieces, 2 * r) - 1;
    if (k > 5) continue;
    ++accepted;
    max_k = std::max(max_k, k);
    const auto col = greedy_color_cover(*s, refined, r, k);
    if (col.color_count <= 2 * (k + 1)) ++within;
    bool ok = true;
    for (std::size_t i = 0; i < refined.pieces.size() && ok; ++i)
      for (std::size_t j = i + 1; j < refined.pieces.size() && ok; ++j)
        if (col.color_of[i] == col.color_of[j] && s->set_distance(refined.pieces[i], refined.pieces[j]) <= r) ok = false;
    if (ok) ++separated;
  }
  const double secs = elapsed_since(t0);
  return {accepted == 200 && within == 200 && separated == 200 && secs < 30.0,
          std::to_string(accepted) + " covers (k <= " + std::to_string(max_k) + "), " + std::to_string(within) +
              " within 2(k+1) colours, " + std::to_string(separated) + " with same-colour distance > r" +
              fmt(", %.2fs < 30s", secs)};
}

// 4. Index form of exact unitaries.
Outcome index_criterion() {
  Gen gen(4004);
  double worst = 0.0;
  int smooth_exact = 0;
  for (int i = 0; i < 100; ++i) {
    std::shared_ptr<const FiniteSpace> s;
    switch (i % 3) {
      case 0: s = testing::cycle(gen.uniform(2, 64)); break;
      case 1: s = testing::path(gen.uniform(1, 64)); break;
      default: {
        const int a = gen.uniform(2, 8), b = gen.uniform(2, 8);
        s = std::make_shared<const FiniteSpace>(FiniteSpace::from_edges(a * b, testing::torus_edges(a, b)));
      }
    }
    const auto f = gen.permutation_unitary(s);
    const Matrix diff = index_form(f).entries() - unit_corner(s).entries();
    worst = std::max(worst, testing::eig_norm(diff));
    if (max_entry_difference(smooth_cycle(f, PartitionOfUnity::trivial(*s)), f) == 0.0) ++smooth_exact;
  }
  return {worst <= 1e-10 && smooth_exact == 100,
          "max ||I(F) - diag(1,0)|| = " + fmt("%.1e <= 1e-10", worst) + ", trivial smoothing exact " +
              std::to_string(smooth_exact) + "/100"};
}

// 5. Injectivity radius of Z -> Z/n.
Outcome injectivity_criterion() {
  int agree = 0, quarter = 0;
  for (int n = 4; n <= 40; ++n) {
    const auto c = z_to_cyclic(n, 2 * n);
    const int r = injectivity_radius(c);
    if (r == testing::brute_injectivity_radius(c)) ++agree;
    if (r == n / 4) ++quarter;
  }
  const int r12 = injectivity_radius(z_to_cyclic(12, 24));
  return {agree == 37 && quarter == 37 && r12 == 3,
          std::to_string(agree) + "/37 match the brute oracle, " + std::to_string(quarter) +
              "/37 equal floor(n/4), Z/12 gives " + std::to_string(r12)};
}

// 6. Constant floor, amplification, lacunary radii.
Outcome onl_arithmetic_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  int exact = 0;
  for (int s = 1; s <= 64; ++s)
    if (onl_constant_floor(s) == 1.0 / (2.0 * s)) ++exact;
  const auto v = amplify_constant(0.5, ControlFunction::identity(), 0.25, AmplifyMode::kVerbatim);
  const long long lac = lacunary_radius(2, 400);
  std::vector<double> d, r;
  for (int m = 1; m <= 10000; ++m) {
    d.push_back(m);
    r.push_back(static_cast<double>(m) * m);
  }
  const auto sweep = lacunary_control_radius(d, r);
  const double secs = elapsed_since(t0);
  return {exact == 64 && v.n == 2 && v.formula == "g(k)=k+f(2k)" && lac == 11 &&
              sweep.verdict == "increasing (window evidence)" && secs < 1.0,
          "floor exact " + std::to_string(exact) + "/64, amplify n=" + std::to_string(v.n) + " " + v.formula +
              ", lacunary(2,400)=" + std::to_string(lac) + ", sweep to 1e4: " + sweep.verdict + fmt(", %.3fs < 1s", secs)};
}

// 7. Localisation of the adjacency operator of the 100-cycle.
Outcome localisation_criterion() {
  const auto c100 = testing::cycle(100);
  const auto adj = BandOperator::adjacency(c100);
  const Matrix& m = adj.entries();
  // Column oracle at d = 0: largest column norm over the operator norm.
  double col = 0.0;
  for (int j = 0; j < m.cols(); ++j) col = std::max(col, m.col(j).norm());
  const double oracle0 = col / testing::eig_norm(m);
  double prev = -1.0, at0 = 0.0, last = 0.0;
  bool monotone = true;
  for (int d = 0; d <= c100->diameter(); ++d) {
    const double v = localization_search(adj, d).ratio;
    if (d == 0) at0 = v;
    if (v < prev - 1e-12) monotone = false;
    prev = last = v;
  }
  const double half_root2 = std::sqrt(2.0) / 2.0;
  const bool ok = monotone && last >= 1.0 - 1e-9 && std::abs(at0 - half_root2) <= 1e-9 && std::abs(at0 - oracle0) <= 1e-9;
  return {ok, std::string(monotone ? "monotone" : "not monotone") + fmt(" in d, d=0 ratio %.12f, full diameter %.12f", at0, last) +
                  fmt(", column oracle %.12f", oracle0)};
}

// 8. Evaluation commutes with lifting for localisation paths.
Outcome path_criterion() {
  Gen gen(8008);
  const int orders[] = {8, 12, 16, 24};
  int exact = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = orders[i % 4];
    const auto c = z_to_cyclic(n, 2 * n);
    const int R = c.injectivity_radius();
    const auto w = LiftWindow::make(c, R);
    const int count = gen.uniform(1, 5);
    std::vector<double> times;
    std::vector<BandOperator> samples;
    int prop = R;
    double t = 0.0;
    for (int j = 0; j < count; ++j) {
      prop = gen.uniform(0, prop);
      times.push_back(t);
      t += gen.real(0.1, 2.0);
      samples.push_back(gen.band(c.target(), prop));
    }
    const auto path = LocalisationPath::make(times, samples);
    const auto lp = lift_path(path, w);
    const double independent = max_entry_difference(path_evaluate(lp.lifted), lift_operator(path_evaluate(path), w));
    if (lp.commuting_square && lp.square_residual == 0.0 && independent == 0.0) ++exact;
  }
  return {exact == 100, std::to_string(exact) + "/100 paths with an exactly commuting square"};
}

// 9. Stage schedules over {2^k} and over cycles of length 2^k.
Outcome schedule_criterion() {
  const ScheduleOracle doubling = [](double r, double eps) { return std::pair{2.0 * r, eps / 2.0}; };
  std::vector<StreamItem> stream;
  for (int k = 0; k < 24; ++k) stream.push_back({k, 1LL << k});
  const auto s = schedule_general(stream, doubling, 4, 0.2);
  bool ok = s.stages.size() >= 3 && !verify_schedule(s, stream).has_value();
  for (std::size_t m = 0; m < s.stages.size(); ++m) {
    const auto& st = s.stages[m];
    ok = ok && st.eps > 0.0 && st.eps < 0.25 && st.t == 2.0 * st.r && st.eps_prime == st.eps / 2.0;
    if (m == 0) continue;
    const auto& prev = s.stages[m - 1];
    ok = ok && st.r >= 4.0 * prev.t && st.eps == prev.eps_prime;
    const std::set<int> now(st.accumulated.begin(), st.accumulated.end());
    for (int id : prev.accumulated) ok = ok && now.count(id) == 1;
  }
  std::vector<LabelledGraph> cycles;
  for (int k = 2; k <= 12; ++k) {
    LabelledGraph g;
    g.vertices = 1 << k;
    for (int i = 0; i < g.vertices; ++i) g.edges.push_back({i, (i + 1) % g.vertices, 1});
    cycles.push_back(g);
  }
  const auto gs = schedule_from_graphs(cycles, doubling, 0.2);
  bool girths = gs.stages.size() >= 2 && !verify_schedule(gs).has_value();
  for (std::size_t m = 1; m < gs.stages.size(); ++m) girths = girths && *gs.stages[m].girth > *gs.stages[m - 1].girth;
  return {ok && girths, std::to_string(s.stages.size()) + " stages on {2^k}" + (ok ? " satisfy" : " violate") +
                            " eps in (0,1/4), r_m >= 4 t_{m-1}, nesting; graph schedule " +
                            std::to_string(gs.stages.size()) + " stages, girths " +
                            (girths ? "strictly increasing" : "not strictly increasing")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 10. Seeded reports are byte-identical across runs.
Outcome determinism_criterion(const std::string& cli, const std::string& data) {
  if (cli.empty()) return {false, "no CLI path given"};
  const std::string cycle = data + "/cycle24.json";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"cert", "onl certificate --input " + cycle + " --R 1 --c 0.5 --kind mixed --size 8"},
      {"index", "quantk index --input " + cycle + " --count 20"},
      {"path", "quantk path --source z --target cyclic:12 --ball-radius 12 --count 10 --samples 3"},
      {"rd", "rd report --group cyclic:12 --radius 3 --count 50 --terms 4 --s 1"},
  };
  const fs::path root = fs::temp_directory_path() / "coarse-acceptance";
  fs::remove_all(root);
  for (const char* run : {"a", "b"})
    for (const auto& [name, args] : commands) {
      const auto dir = root / run / name;
      const std::string cmd = "\"" + cli + "\" --seed 17 --output-dir \"" + dir.string() + "\" " + args + " > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + args};
    }
  int files = 0, identical = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    ++files;
    const auto twin = root / "b" / fs::relative(entry.path(), root / "a");
    if (fs::exists(twin) && slurp(entry.path()) == slurp(twin)) ++identical;
  }
  fs::remove_all(root);
  return {files > 0 && identical == files,
          std::to_string(identical) + "/" + std::to_string(files) + " report files byte-identical over " +
              std::to_string(commands.size()) + " seeded commands"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::string data = argc > 2 ? argv[2] : "tests/data";
  report(1, "lift multiplicativity", lifting_criterion);
  report(2, "Sobolev lift isometry", sobolev_criterion);
  report(3, "cover colouring", colouring_criterion);
  report(4, "index form", index_criterion);
  report(5, "injectivity radius", injectivity_criterion);
  report(6, "ONL arithmetic", onl_arithmetic_criterion);
  report(7, "C100 localisation", localisation_criterion);
  report(8, "path lifting", path_criterion);
  report(9, "stage schedules", schedule_criterion);
  report(10, "report determinism", [&] { return determinism_criterion(cli, data); });
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
