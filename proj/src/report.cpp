#include "coarse/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "coarse/errors.hpp"

namespace coarse {

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, end);
}

Json ReportMeta::to_json() const {
  Json j;
  j["tool"] = "coarse";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config_hash"] = config_hash;
  if (seed)
    j["seed"] = *seed;
  else
    j["seed"] = nullptr;
  return j;
}

ReportWriter::ReportWriter(std::filesystem::path dir, ReportMeta meta)
    : dir_(std::move(dir)), meta_(std::move(meta)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_))
    throw OutputError("unwritable output directory: " + dir_.string());
  const auto probe = dir_ / ".coarse-write-probe";
  {
    std::ofstream out(probe);
    if (!out) throw OutputError("unwritable output directory: " + dir_.string());
  }
  std::filesystem::remove(probe, ec);
}

void ReportWriter::write_atomic(const std::string& name, const std::string& content) {
  const auto target = dir_ / name;
  const auto tmp = dir_ / ("." + name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw OutputError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw OutputError("cannot move report into place: " + target.string());
  }
  files_.push_back(name);
}

void ReportWriter::write_json(const std::string& name, Json body) {
  if (body.is_null() || (body.is_array() && body.empty()) || (body.is_object() && body.empty()))
    throw PreconditionError("empty results: nothing to write to " + name);
  std::string text;
  if (body.is_object()) {
    Json out;
    out["meta"] = meta_.to_json();
    for (auto& [k, v] : body.items()) out[k] = v;
    text = out.dump(2);
  } else {
    // Arrays keep their shape; the metadata lives in summary.json.
    text = body.dump(2);
  }
  write_atomic(name, text + "\n");
}

void ReportWriter::write_csv(const std::string& name, const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) throw PreconditionError("empty results: nothing to write to " + name);
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw Error("CSV row width differs from header in " + name);
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  write_atomic(name, out.str());
}

void ReportWriter::write_dat(const std::string& name, const std::vector<std::string>& columns,
                             const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw PreconditionError("empty results: nothing to write to " + name);
  std::ostringstream out;
  out << "# coarse " << kToolVersion << " command=" << meta_.command << " config=" << meta_.config_hash
      << " seed=" << (meta_.seed ? std::to_string(*meta_.seed) : std::string("none")) << '\n';
  out << "#";
  for (const auto& c : columns) out << ' ' << c;
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << format_number(row[i]);
    out << '\n';
  }
  write_atomic(name, out.str());
}

void ReportWriter::finish(Json verdict) {
  Json out;
  out["meta"] = meta_.to_json();
  out["verdict"] = std::move(verdict);
  out["files"] = files_;
  write_atomic("summary.json", out.dump(2) + "\n");
}

}  // namespace coarse
