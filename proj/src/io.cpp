#include "coarse/io.hpp"

#include <fstream>
#include <sstream>

#include "coarse/errors.hpp"

namespace coarse {

namespace {

template <typename T>
T get_field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string(what) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

Letter parse_label(const Json& j) {
  if (j.is_number_integer()) {
    const int v = j.get<int>();
    if (v == 0) throw InputError("edge label 0 is not a letter");
    return v;
  }
  if (j.is_string()) {
    const Word w = word_from_string(j.get<std::string>());
    if (w.size() != 1) throw InputError("edge label must be a single letter");
    return w[0];
  }
  throw InputError("edge label must be a letter or a signed integer");
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

Json space_to_json(const FiniteSpace& space) {
  Json j;
  j["points"] = space.size();
  Json edges = Json::array();
  for (const auto& [a, b] : space.edges()) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  j["basepoint"] = space.basepoint();
  return j;
}

FiniteSpace space_from_json(const Json& j) {
  const int n = get_field<int>(j, "points", "space");
  const int base = j.contains("basepoint") ? get_field<int>(j, "basepoint", "space") : 0;
  std::vector<Edge> edges;
  const Json empty = Json::array();
  const Json& arr = j.contains("edges") ? j.at("edges") : empty;
  if (!arr.is_array()) throw InputError("space: 'edges' must be an array");
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw InputError("space: each edge must be a pair of integers");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return FiniteSpace::from_edges(n, edges, base);
}

FiniteSpace load_space(const std::filesystem::path& path) { return space_from_json(read_json_file(path)); }

MarkedGroupPtr quotient_from_json(const Json& j) {
  const int rank = get_field<int>(j, "rank", "quotient");
  if (rank < 1) throw InputError("quotient: rank must be >= 1");
  if (!j.contains("generator_images") || !j.at("generator_images").is_array())
    throw InputError("quotient: missing array 'generator_images'");
  const Json& images = j.at("generator_images");
  if (static_cast<int>(images.size()) != rank) throw InputError("generator image count mismatch");
  if (!j.contains("group") || !j.at("group").is_object()) throw InputError("quotient: missing object 'group'");
  const Json& g = j.at("group");
  const std::string type = get_field<std::string>(g, "type", "quotient group");
  const Json params = g.contains("params") ? g.at("params") : Json::object();

  try {
    std::vector<int> gens;
    if (type == "cyclic") {
      const int n = get_field<int>(params, "n", "cyclic params");
      FiniteGroup grp = FiniteGroup::cyclic(n);
      for (const auto& im : images) gens.push_back(((im.get<int>() % n) + n) % n);
      return MarkedGroup::from_finite(std::move(grp), gens, "cyclic:" + std::to_string(n));
    }
    if (type == "product") {
      const auto orders = get_field<std::vector<int>>(params, "orders", "product params");
      FiniteGroup grp = FiniteGroup::product(orders);
      std::string desc = "product:";
      for (std::size_t i = 0; i < orders.size(); ++i) desc += (i ? "," : "") + std::to_string(orders[i]);
      for (const auto& im : images) {
        auto coords = im.get<std::vector<int>>();
        if (coords.size() != orders.size()) throw InputError("product image has the wrong number of coordinates");
        for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = ((coords[i] % orders[i]) + orders[i]) % orders[i];
        gens.push_back(FiniteGroup::product_index(orders, coords));
      }
      return MarkedGroup::from_finite(std::move(grp), gens, desc);
    }
    if (type == "table") {
      const auto table = get_field<std::vector<std::vector<int>>>(params, "table", "table params");
      FiniteGroup grp = FiniteGroup::from_table(table);
      for (const auto& im : images) {
        const int v = im.get<int>();
        if (v < 0 || v >= grp.order()) throw InputError("table image out of range");
        gens.push_back(v);
      }
      return MarkedGroup::from_finite(std::move(grp), gens, "table:" + std::to_string(table.size()));
    }
    if (type == "matrix_mod_p") {
      const int p = get_field<int>(params, "p", "matrix_mod_p params");
      std::vector<FiniteGroup::Mat2> mats;
      for (const auto& im : images) {
        std::vector<int> flat;
        if (im.is_array() && im.size() == 2 && im[0].is_array()) {
          for (const auto& row : im)
            for (const auto& v : row) flat.push_back(v.get<int>());
        } else {
          flat = im.get<std::vector<int>>();
        }
        if (flat.size() != 4) throw InputError("matrix image must have 4 entries");
        FiniteGroup::Mat2 m{};
        for (int i = 0; i < 4; ++i) m[i] = ((flat[i] % p) + p) % p;
        mats.push_back(m);
      }
      FiniteGroup grp = FiniteGroup::matrix_mod_p(p, mats);
      for (const auto& m : mats) gens.push_back(*grp.find_matrix(m));
      return MarkedGroup::from_finite(std::move(grp), gens, "matrix_mod_p:" + std::to_string(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("quotient: malformed generator image: ") + e.what());
  }
  throw InputError("quotient: unknown group type '" + type + "'");
}

MarkedGroupPtr load_quotient(const std::filesystem::path& path) {
  return quotient_from_json(read_json_file(path));
}

LabelledGraph graph_from_json(const Json& j) {
  LabelledGraph g;
  g.vertices = get_field<int>(j, "vertices", "graph");
  if (!j.contains("edges") || !j.at("edges").is_array()) throw InputError("graph: missing array 'edges'");
  for (const auto& e : j.at("edges")) {
    LabelledEdge edge;
    if (e.is_array() && e.size() == 3 && e[0].is_number_integer() && e[1].is_number_integer()) {
      edge = {e[0].get<int>(), e[1].get<int>(), parse_label(e[2])};
    } else if (e.is_object()) {
      edge.from = get_field<int>(e, "from", "graph edge");
      edge.to = get_field<int>(e, "to", "graph edge");
      if (!e.contains("label")) throw InputError("graph edge: missing field 'label'");
      edge.label = parse_label(e.at("label"));
    } else {
      throw InputError("graph: each edge must be [from, to, label] or {from, to, label}");
    }
    g.edges.push_back(edge);
  }
  g.validate();
  return g;
}

Json graph_to_json(const LabelledGraph& g) {
  Json j;
  j["vertices"] = g.vertices;
  Json edges = Json::array();
  for (const auto& e : g.edges) edges.push_back({e.from, e.to, word_to_string(Word{e.label})});
  j["edges"] = std::move(edges);
  return j;
}

std::vector<LabelledGraph> load_graphs(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  std::vector<LabelledGraph> out;
  const Json* list = nullptr;
  if (j.is_array()) list = &j;
  else if (j.is_object() && j.contains("graphs")) list = &j.at("graphs");
  if (list) {
    if (!list->is_array()) throw InputError("graphs: 'graphs' must be an array");
    for (const auto& g : *list) out.push_back(graph_from_json(g));
  } else {
    out.push_back(graph_from_json(j));
  }
  return out;
}

std::vector<CyclicWord> load_presentation(const std::filesystem::path& path) {
  return parse_presentation(read_text_file(path));
}

std::vector<StreamItem> stream_from_json(const Json& j) {
  std::vector<StreamItem> out;
  if (j.is_object() && j.contains("lengths")) {
    const auto lengths = get_field<std::vector<long long>>(j, "lengths", "stream");
    for (std::size_t i = 0; i < lengths.size(); ++i) out.push_back({static_cast<int>(i), lengths[i]});
  } else if (j.is_array()) {
    for (const auto& it : j) out.push_back({get_field<int>(it, "id", "stream item"),
                                            get_field<long long>(it, "length", "stream item")});
  } else {
    throw InputError("stream: expected {lengths: [...]} or an array of {id, length}");
  }
  return out;
}

std::vector<StreamItem> load_stream(const std::filesystem::path& path) {
  return stream_from_json(read_json_file(path));
}

}  // namespace coarse
