#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mktlab/ingest.hpp"

namespace mktlab {

/// Plain-text `key = value` file describing a panel:
///
///     # comments start with '#'
///     target = IBOV_FUT
///     series.IBOV_FUT = ibov_fut.csv
///     series.SP500 = sp500.csv
///     date_column = date          (optional, default "date")
///     close_column = close        (optional, default "close")
///     date_format = %Y-%m-%d      (optional)
///     delimiter = ,               (optional)
///     fill_policy = intersection  (optional, or forward_fill)
///
/// Relative paths resolve against the manifest's directory. Series keep the
/// order in which they are listed.
struct PanelManifest {
  struct Entry {
    std::string id;
    std::filesystem::path path;
  };

  std::string target;
  std::vector<Entry> series;
  CsvSchema schema;
  FillPolicy fill_policy = FillPolicy::intersection;
};

[[nodiscard]] PanelManifest parse_manifest(std::string_view text,
                                           const std::filesystem::path& base_dir = {});
[[nodiscard]] PanelManifest load_manifest(const std::filesystem::path& path);

/// Load every listed file and align them with the manifest's fill policy.
[[nodiscard]] AlignedPanel load_panel(const PanelManifest& manifest);

}  // namespace mktlab
