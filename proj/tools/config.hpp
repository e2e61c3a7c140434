#pragma once

// Pipeline configuration: a TOML (or JSON) file, JSON merge-patch overrides
// and command-line flags folded into one JSON document, then decoded into
// the typed per-stage configs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "tactile/flow.hpp"
#include "tactile/fitting.hpp"
#include "tactile/labeling.hpp"
#include "tactile/learning.hpp"
#include "tactile/synth.hpp"

namespace tactile::cli {

// Parses by extension: .json as JSON, anything else as TOML.
nlohmann::json load_config_file(const std::filesystem::path& path);
nlohmann::json parse_toml(std::string_view text, const std::string& source = "<memory>");

// Sets a dotted key path ("train.epochs") to a value, creating objects on the way.
void set_path(nlohmann::json& doc, std::string_view dotted, nlohmann::json value);

// 16 hex digits of FNV-1a over the compact dump.
std::string config_hash(const nlohmann::json& doc);

struct PipelineConfig {
  nlohmann::json doc = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> material;
  std::optional<BinGrid> grid;
  RegionGrid regions{};
  DisConfig flow{};
  TrainConfig train{};
  SynthConfig synth{};
  FitConfig fit{};
  std::size_t fit_order = 2;

  // One seed drives every stage; stage streams are split by label.
  static PipelineConfig from_json(const nlohmann::json& doc);
  std::string hash() const { return config_hash(doc); }
};

}  // namespace tactile::cli
