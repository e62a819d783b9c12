#include "mktlab/manifest.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "mktlab/error.hpp"

namespace mktlab {

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

PanelManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  PanelManifest m;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = strip(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, fmt::format("manifest line lacks '=': '{}'", line));
    }
    const auto key = strip(line.substr(0, eq));
    const auto value = strip(line.substr(eq + 1));
    if (key.starts_with("series.")) {
      const auto id = key.substr(7);
      if (id.empty()) throw ParseError(line_no, "empty series id");
      for (const auto& e : m.series) {
        if (e.id == id) throw Error(ErrorKind::integrity, fmt::format("series '{}' listed twice", id));
      }
      std::filesystem::path p{std::string(value)};
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      m.series.push_back({std::string(id), p});
    } else if (key == "target") {
      m.target = value;
    } else if (key == "date_column") {
      m.schema.date_column = value;
    } else if (key == "close_column") {
      m.schema.close_column = value;
    } else if (key == "date_format") {
      m.schema.date_format = value;
    } else if (key == "delimiter") {
      if (value.size() != 1) throw ParseError(line_no, "delimiter must be one character");
      m.schema.delimiter = value.front();
    } else if (key == "fill_policy") {
      m.fill_policy = fill_policy_from_string(value);
    } else {
      throw ParseError(line_no, fmt::format("unknown manifest key '{}'", key));
    }
  }
  if (m.series.empty()) throw Error(ErrorKind::parse, "manifest lists no series");
  if (m.target.empty()) m.target = m.series.front().id;
  bool found = false;
  for (const auto& e : m.series) found = found || e.id == m.target;
  if (!found) {
    throw Error(ErrorKind::integrity, fmt::format("target '{}' is not a listed series", m.target));
  }
  return m;
}

PanelManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, fmt::format("cannot open manifest '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest(buffer.str(), path.parent_path());
}

AlignedPanel load_panel(const PanelManifest& manifest) {
  std::vector<PriceSeries> series;
  series.reserve(manifest.series.size());
  for (const auto& e : manifest.series) series.push_back(load_csv(e.path, manifest.schema, e.id));
  return align(series, manifest.fill_policy);
}

}  // namespace mktlab
