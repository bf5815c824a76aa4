#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "coarse/errors.hpp"
#include "coarse/io.hpp"
#include "coarse/report.hpp"
#include "support.hpp"

using namespace coarse;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("coarse-unit-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("space JSON round trip") {
  const auto torus = FiniteSpace::from_edges(16, testing::torus_edges(4, 4), 5);
  const auto j = space_to_json(torus);
  CHECK(j["points"] == 16);
  CHECK(j["basepoint"] == 5);
  CHECK_FALSE(j.contains("distances"));
  CHECK(space_from_json(j) == torus);
  CHECK_THROWS_AS(space_from_json(Json::parse(R"({"points": 3, "edges": [[0, 1]]})")), InputError);
  CHECK_THROWS_AS(space_from_json(Json::parse(R"({"points": 2, "edges": [[0, 5]]})")), InputError);
  CHECK_THROWS_AS(space_from_json(Json::parse(R"({"edges": []})")), InputError);
  CHECK_THROWS_AS(load_space("/nonexistent/space.json"), InputError);
}

TEST_CASE("quotient descriptions") {
  const auto cyc = quotient_from_json(Json::parse(R"({"rank": 1, "generator_images": [1],
      "group": {"type": "cyclic", "params": {"n": 12}}})"));
  CHECK(cyc->size() == 12);
  const auto prod = quotient_from_json(Json::parse(R"({"rank": 2, "generator_images": [[1, 0], [0, 1]],
      "group": {"type": "product", "params": {"orders": [5, 5]}}})"));
  CHECK(prod->size() == 25);
  CHECK(prod->space()->diameter() == 4);
  const auto table = quotient_from_json(Json::parse(R"({"rank": 1, "generator_images": [1],
      "group": {"type": "table", "params": {"table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]}}})"));
  CHECK(table->size() == 3);
  // SL(2, Z/3) has order 24 and is generated by the two elementary matrices.
  const auto sl = quotient_from_json(Json::parse(R"({"rank": 2, "generator_images": [[1, 1, 0, 1], [[1, 0], [1, 1]]],
      "group": {"type": "matrix_mod_p", "params": {"p": 3}}})"));
  CHECK(sl->size() == 24);

  CHECK_THROWS_AS(quotient_from_json(Json::parse(R"({"rank": 2, "generator_images": [1],
      "group": {"type": "cyclic", "params": {"n": 12}}})")),
                  InputError);
  CHECK_THROWS_AS(quotient_from_json(Json::parse(R"({"rank": 1, "generator_images": [1],
      "group": {"type": "braid", "params": {}}})")),
                  InputError);
  CHECK_THROWS_AS(quotient_from_json(Json::parse(R"({"rank": 1, "generator_images": [2],
      "group": {"type": "cyclic", "params": {"n": 12}}})")),
                  InputError);
}

TEST_CASE("graphs and streams") {
  const auto g = graph_from_json(Json::parse(R"({"vertices": 3, "edges": [[0, 1, "a"], {"from": 1, "to": 2, "label": "B"}, [2, 0, 1]]})"));
  REQUIRE(g.edges.size() == 3);
  CHECK(g.edges[1].label == -2);
  CHECK(g.edges[2].label == 1);
  const auto back = graph_from_json(graph_to_json(g));
  CHECK(back.vertices == 3);
  CHECK(back.edges[1].label == -2);
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"vertices": 2, "edges": [[0, 3, "a"]]})")), InputError);

  const auto s = stream_from_json(Json::parse(R"({"lengths": [3, 9, 27]})"));
  REQUIRE(s.size() == 3);
  CHECK(s[2].id == 2);
  CHECK(s[2].length == 27);
  const auto ids = stream_from_json(Json::parse(R"([{"id": 7, "length": 4}, {"id": 2, "length": 10}])"));
  CHECK(ids[0].id == 7);
  CHECK_THROWS_AS(stream_from_json(Json::parse(R"({"sizes": [1]})")), InputError);
}

TEST_CASE("hashing and number formatting") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
  CHECK(std::stod(format_number(std::sqrt(2.0))) == std::sqrt(2.0));
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("report writer") {
  const auto dir = scratch_dir("report");
  ReportWriter w(dir, ReportMeta{"test cmd", "0123456789abcdef", 42});
  w.write_json("result.json", Json{{"value", 1.5}});
  w.write_json("stages.json", Json::array({Json{{"m", 0}}}));
  w.write_csv("table.csv", {"m", "r"}, {{"0", "4"}, {"1", "32"}});
  w.write_dat("table.dat", {"m", "r"}, {{0, 4}, {1, 32}});
  w.finish(Json{{"ok", true}});

  const auto result = Json::parse(slurp(dir / "result.json"));
  CHECK(result.begin().key() == "meta");
  CHECK(result["meta"]["seed"] == 42);
  CHECK(result["meta"]["tool"] == "coarse");
  CHECK(result["value"] == 1.5);
  CHECK(Json::parse(slurp(dir / "stages.json")).is_array());
  CHECK(slurp(dir / "table.csv") == "m,r\n0,4\n1,32\n");
  CHECK(slurp(dir / "table.dat").rfind("# coarse", 0) == 0);
  const auto summary = Json::parse(slurp(dir / "summary.json"));
  CHECK(summary["files"].size() == 4);
  CHECK(summary["verdict"]["ok"] == true);
  for (const auto& entry : fs::directory_iterator(dir)) CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);

  CHECK_THROWS_AS(w.write_csv("empty.csv", {"a"}, {}), PreconditionError);
  CHECK_THROWS_AS(w.write_json("empty.json", Json::object()), PreconditionError);

  // A regular file where a directory should be.
  std::ofstream(dir / "blocker") << "x";
  CHECK_THROWS_AS(ReportWriter(dir / "blocker" / "sub", ReportMeta{"x", "y", std::nullopt}), OutputError);
  fs::remove_all(dir);
}
