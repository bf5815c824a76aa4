#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coarse/io.hpp"

namespace coarse {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit digest as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// Shortest round-trip decimal form used in every CSV and .dat cell.
std::string format_number(double value);

struct ReportMeta {
  std::string command;
  std::string config_hash;
  std::optional<std::uint64_t> seed;

  Json to_json() const;
};

/**
 * \brief Writes report files into one directory; each file appears atomically.
 *
 * JSON objects get a leading "meta" block. CSV files keep their column header
 * on the first line; .dat files carry the metadata as '#' comments. A
 * summary listing every written file is emitted by finish().
 */
class ReportWriter {
 public:
  /// Creates the directory if needed; throws OutputError when it is not writable.
  ReportWriter(std::filesystem::path dir, ReportMeta meta);

  void write_json(const std::string& name, Json body);
  /// Throws PreconditionError when rows is empty.
  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);
  /// gnuplot-ready whitespace-separated columns.
  void write_dat(const std::string& name, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows);
  /// summary.json with meta, the verdict block and the list of files.
  void finish(Json verdict);

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  void write_atomic(const std::string& name, const std::string& content);

  std::filesystem::path dir_;
  ReportMeta meta_;
  std::vector<std::string> files_;
};

}  // namespace coarse
