#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "coarse/groups.hpp"
#include "coarse/smallcancel.hpp"
#include "coarse/spaces.hpp"

namespace coarse {

using Json = nlohmann::ordered_json;

/// Whole file as a string; InputError if unreadable.
std::string read_text_file(const std::filesystem::path& path);
/// Parsed JSON; InputError on syntax errors.
Json read_json_file(const std::filesystem::path& path);

/// {points, edges: [[i, j], ...], basepoint}; distances are never stored.
Json space_to_json(const FiniteSpace& space);
FiniteSpace space_from_json(const Json& j);
FiniteSpace load_space(const std::filesystem::path& path);

/**
 * \brief Quotient group from {rank, generator_images, group: {type, params}}.
 *
 * Types and image formats:
 *   cyclic        params {n}              images: residues
 *   product       params {orders: [...]}  images: coordinate arrays
 *   table         params {table: [[...]]} images: element indices
 *   matrix_mod_p  params {p}              images: [a, b, c, d] row-major matrices
 */
MarkedGroupPtr quotient_from_json(const Json& j);
MarkedGroupPtr load_quotient(const std::filesystem::path& path);

/// {vertices, edges: [[from, to, label], ...]}; labels are letters ("a", "B") or signed integers.
LabelledGraph graph_from_json(const Json& j);
Json graph_to_json(const LabelledGraph& g);
/// A single graph object, an array of them, or {graphs: [...]}.
std::vector<LabelledGraph> load_graphs(const std::filesystem::path& path);

std::vector<CyclicWord> load_presentation(const std::filesystem::path& path);

/// {lengths: [...]} (ids are positions) or [{id, length}, ...].
std::vector<StreamItem> stream_from_json(const Json& j);
std::vector<StreamItem> load_stream(const std::filesystem::path& path);

}  // namespace coarse
