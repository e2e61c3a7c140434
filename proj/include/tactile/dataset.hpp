#pragma once

// Training data container: a JSON manifest plus one CSV of records
//   indentation_id,feat_0..feat_{2m-1},label_0..label_{3n-1}
// Labels are packed axis-interleaved: (fx_0, fy_0, fz_0, fx_1, ...).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "tactile/flow.hpp"
#include "tactile/labeling.hpp"

namespace tactile {

struct DatasetRecord {
  std::int64_t indentation_id = 0;
  std::vector<double> features;  // 2m
  std::vector<double> label;     // 3n [N]
};

struct DatasetManifest {
  static constexpr int kSchemaVersion = 1;

  RegionGrid regions;                 // m = regions.size()
  std::optional<BinGrid> grid;        // n = grid->size() when known
  std::size_t label_bins = 0;         // n
  std::size_t record_count = 0;
  std::string records_file = "records.csv";
  nlohmann::json extra = nlohmann::json::object();

  std::size_t feature_dim() const { return 2 * regions.size(); }
  std::size_t label_dim() const { return 3 * label_bins; }

  nlohmann::json to_json() const;
  static DatasetManifest from_json(const nlohmann::json& j);
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<DatasetRecord> records;

  // Throws InputError on length mismatch or non-finite values.
  void validate() const;
};

// Label vector of a binned force distribution in axis-interleaved order.
std::vector<double> pack_label(const ForceDistributionLabel& label);

std::string format_records_csv(const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& dir);
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);

}  // namespace tactile
