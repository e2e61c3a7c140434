#include "tactile/dataset.hpp"

#include <cmath>

#include "tactile/csv.hpp"
#include "tactile/errors.hpp"
#include "tactile/io.hpp"

namespace tactile {

nlohmann::json DatasetManifest::to_json() const {
  nlohmann::json j{{"schema_version", kSchemaVersion},
                   {"m", regions.size()},
                   {"n", label_bins},
                   {"regions", {{"rows", regions.rows}, {"cols", regions.cols}}},
                   {"record_count", record_count},
                   {"records_file", records_file}};
  if (grid) j["grid"] = grid->to_json();
  if (!extra.empty()) j["extra"] = extra;
  return j;
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j) {
  try {
    DatasetManifest m;
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw InputError("unsupported dataset schema_version");
    m.regions = {j.at("regions").at("rows").get<std::size_t>(), j.at("regions").at("cols").get<std::size_t>()};
    m.label_bins = j.at("n").get<std::size_t>();
    if (j.at("m").get<std::size_t>() != m.regions.size()) throw InputError("manifest m does not match its region grid");
    if (j.contains("grid")) {
      m.grid = BinGrid::from_json(j.at("grid"));
      if (m.grid->size() != m.label_bins) throw InputError("manifest n does not match its bin grid");
    }
    m.record_count = j.at("record_count").get<std::size_t>();
    m.records_file = j.value("records_file", std::string("records.csv"));
    if (j.contains("extra")) m.extra = j.at("extra");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid dataset manifest: ") + e.what());
  }
}

void Dataset::validate() const {
  if (records.size() != manifest.record_count) {
    throw InputError("manifest declares " + std::to_string(manifest.record_count) + " records, found " +
                     std::to_string(records.size()));
  }
  for (const auto& r : records) {
    if (r.features.size() != manifest.feature_dim() || r.label.size() != manifest.label_dim()) {
      throw InputError("record " + std::to_string(r.indentation_id) + " does not match the manifest dimensions");
    }
    for (double v : r.features) {
      if (!std::isfinite(v)) throw InputError("record " + std::to_string(r.indentation_id) + " has non-finite features");
    }
    for (double v : r.label) {
      if (!std::isfinite(v)) throw InputError("record " + std::to_string(r.indentation_id) + " has a non-finite label");
    }
  }
}

std::vector<double> pack_label(const ForceDistributionLabel& label) {
  std::vector<double> out;
  out.reserve(3 * label.values.size());
  for (const auto& v : label.values) {
    out.push_back(v.x);
    out.push_back(v.y);
    out.push_back(v.z);
  }
  return out;
}

std::string format_records_csv(const Dataset& dataset) {
  std::string s = "indentation_id";
  for (std::size_t i = 0; i < dataset.manifest.feature_dim(); ++i) s += ",feat_" + std::to_string(i);
  for (std::size_t i = 0; i < dataset.manifest.label_dim(); ++i) s += ",label_" + std::to_string(i);
  s += '\n';
  for (const auto& r : dataset.records) {
    s += std::to_string(r.indentation_id);
    for (double v : r.features) {
      s += ',';
      s += csv::format_exact(v);
    }
    for (double v : r.label) {
      s += ',';
      s += csv::format_exact(v);
    }
    s += '\n';
  }
  return s;
}

Dataset read_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) throw InputError("missing dataset manifest " + manifest_path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(manifest_path.string() + ": " + e.what());
  }
  Dataset ds{DatasetManifest::from_json(j), {}};
  const auto table = csv::Table::read(dir / ds.manifest.records_file);
  const std::size_t fdim = ds.manifest.feature_dim(), ldim = ds.manifest.label_dim();
  std::vector<std::string> header{"indentation_id"};
  for (std::size_t i = 0; i < fdim; ++i) header.push_back("feat_" + std::to_string(i));
  for (std::size_t i = 0; i < ldim; ++i) header.push_back("label_" + std::to_string(i));
  table.require_header(header);
  ds.records.reserve(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    DatasetRecord rec{table.integer(r, 0), std::vector<double>(fdim), std::vector<double>(ldim)};
    for (std::size_t i = 0; i < fdim; ++i) rec.features[i] = table.number(r, 1 + i);
    for (std::size_t i = 0; i < ldim; ++i) rec.label[i] = table.number(r, 1 + fdim + i);
    ds.records.push_back(std::move(rec));
  }
  ds.validate();
  return ds;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  dataset.validate();
  io::write_atomic(dir / dataset.manifest.records_file, format_records_csv(dataset));
  io::write_atomic(dir / "manifest.json", dataset.manifest.to_json().dump(2) + "\n");
}

}  // namespace tactile
