#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>

#include <omp.h>

#include <CLI11.hpp>

#include "config.hpp"
#include "tactile/characterization.hpp"
#include "tactile/constitutive.hpp"
#include "tactile/csv.hpp"
#include "tactile/dataset.hpp"
#include "tactile/errors.hpp"
#include "tactile/fitting.hpp"
#include "tactile/flow.hpp"
#include "tactile/image.hpp"
#include "tactile/io.hpp"
#include "tactile/labeling.hpp"
#include "tactile/learning.hpp"
#include "tactile/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tactile::cli {

namespace {

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out = ".";
};

// Effective configuration: file, then --override patches, then command flags.
struct Invocation {
  Globals globals;
  json flags = json::object();

  PipelineConfig config() const {
    json doc = globals.config_path.empty() ? json::object() : load_config_file(globals.config_path);
    // Paths inside a config file are relative to that file.
    if (doc.contains("material") && doc["material"].is_string()) {
      const fs::path m = doc["material"].get<std::string>();
      if (m.is_relative()) doc["material"] = (fs::path(globals.config_path).parent_path() / m).lexically_normal().string();
    }
    for (const auto& o : globals.overrides) {
      try {
        doc.merge_patch(json::parse(o));
      } catch (const json::exception& e) {
        throw InputError("--override is not valid JSON: " + std::string(e.what()));
      }
    }
    if (globals.seed) doc["seed"] = *globals.seed;
    doc.merge_patch(flags);
    return PipelineConfig::from_json(doc);
  }
};

void write_report(const fs::path& path, const std::string& command, const PipelineConfig& cfg, json body) {
  json report{{"schema_version", kReportSchemaVersion},
              {"command", command},
              {"config_hash", cfg.hash()},
              {"seed", cfg.seed}};
  report.update(body);
  io::write_atomic(path, report.dump(2) + "\n");
}

std::pair<std::size_t, std::size_t> parse_rxc(const std::string& text, const std::string& what) {
  const auto x = text.find_first_of("xX");
  std::size_t r = 0, c = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument("");
    std::size_t used = 0;
    r = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("");
    c = std::stoul(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw InputError(what + " must look like ROWSxCOLS, got '" + text + "'");
  }
  if (r == 0 || c == 0) throw InputError(what + " must be at least 1x1");
  return {r, c};
}

Extent parse_extent(const std::string& text) {
  std::vector<double> v;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw InputError("--extent must be X0,Y0,WIDTH,HEIGHT in mm, got '" + text + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (v.size() != 4) throw InputError("--extent must be X0,Y0,WIDTH,HEIGHT in mm, got '" + text + "'");
  return {v[0], v[1], v[2], v[3]};
}

std::string format_vec3_csv(const std::string& header, const std::vector<std::pair<std::int64_t, Vec3>>& rows) {
  std::string s = header + "\n";
  for (const auto& [id, v] : rows) {
    s += std::to_string(id) + "," + csv::format_exact(v.x) + "," + csv::format_exact(v.y) + "," +
         csv::format_exact(v.z) + "\n";
  }
  return s;
}

json vec_json(const Vec3& v) { return json{v.x, v.y, v.z}; }

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::vector<std::string> curves;
};

int cmd_fit(const Invocation& inv, const FitArgs& args) {
  const auto cfg = inv.config();
  if (args.curves.empty()) throw InputError("fit needs at least one CASE:path curve argument");
  FitProblem problem;
  problem.order = cfg.fit_order;
  for (const auto& spec : args.curves) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw InputError("curve argument must be CASE:path, got '" + spec + "'");
    const LoadCase lc = parse_load_case(spec.substr(0, colon));
    const fs::path path = spec.substr(colon + 1);
    if (!fs::exists(path)) throw InputError("curve file not found: " + path.string());
    problem.curves.push_back(read_curve_csv(path, lc));
  }
  problem.validate();

  const FitResult result = fit(problem, cfg.fit);
  const fs::path out = inv.globals.out;
  const auto models = model_curves(result.params, problem);
  json curves = json::array();
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string name = "model_" + std::to_string(i) + "_" + std::string(to_string(models[i].load_case())) + ".csv";
    io::write_atomic(out / name, format_curve_csv(models[i]));
    curves.push_back({{"input", args.curves[i]},
                      {"model_csv", name},
                      {"rms_kpa", result.per_curve_rms[i]},
                      {"relative_rms", relative_rms(models[i], problem.curves[i])}});
  }
  io::write_atomic(out / "material.json", result.params.to_json().dump(2) + "\n");
  write_report(out / "fit_result.json", "fit", cfg,
               {{"order", problem.order}, {"fit_config", cfg.fit.to_json()}, {"result", result.to_json()},
                {"curves", curves}});
  std::cout << "fit: objective " << result.objective << " kPa^2, E = " << young_modulus(result.params) << " kPa, "
            << (result.converged ? "converged" : "NOT converged") << "\n";
  if (!result.converged) {
    std::cerr << "error: optimization did not converge\n";
    return static_cast<int>(ExitCode::numerical);
  }
  return 0;
}

// ---------------------------------------------------------------- characterize

struct CharacterizeArgs {
  std::string load_case;
  std::vector<std::string> raw;
  std::optional<double> tilt_deg;
  std::string points;
};

int cmd_characterize(const Invocation& inv, const CharacterizeArgs& args) {
  const auto cfg = inv.config();
  if (args.raw.empty() && !args.tilt_deg && args.points.empty()) {
    throw InputError("characterize needs raw curve files, --tilt-deg or --points");
  }
  const fs::path out = inv.globals.out;
  json body = json::object();
  if (!args.raw.empty()) {
    if (args.load_case.empty()) throw InputError("--case is required with raw measurement files");
    const LoadCase lc = parse_load_case(args.load_case);
    std::vector<StressStretchCurve> specimens;
    std::vector<std::string> warnings;
    for (const auto& f : args.raw) {
      if (!fs::exists(f)) throw InputError("measurement file not found: " + f);
      if (lc == LoadCase::EB) {
        const auto recs = read_inflation_csv(f);
        specimens.push_back(curve_from_inflation(recs, &warnings));
      } else {
        const auto recs = read_tension_csv(f);
        specimens.push_back(curve_from_tension(lc, recs));
      }
    }
    const auto curve = specimens.size() == 1 ? specimens.front() : average_curves(specimens);
    const std::string name = "curve_" + std::string(to_string(lc)) + ".csv";
    io::write_atomic(out / name, format_curve_csv(curve));
    body["curve"] = {{"case", to_string(lc)}, {"specimens", specimens.size()}, {"samples", curve.size()},
                     {"csv", name}};
    body["warnings"] = warnings;
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  }
  if (args.tilt_deg) {
    const auto fm = friction_from_tilt(*args.tilt_deg * std::numbers::pi / 180.0);
    body["friction"] = {{"theta_rad", fm.theta_rad}, {"mu0", fm.mu0}};
    std::cout << "friction coefficient: " << fm.mu0 << "\n";
  }
  if (!args.points.empty()) {
    if (!fs::exists(args.points)) throw InputError("points file not found: " + args.points);
    const auto pairs = read_points_csv(args.points);
    const auto s = principal_stretches_from_points(pairs);
    body["principal_stretches"] = {s[0], s[1]};
    body["thickness_stretch"] = thickness_stretch(s[0], s[1]);
  }
  write_report(out / "characterize_report.json", "characterize", cfg, body);
  return 0;
}

// ---------------------------------------------------------------- label

struct LabelArgs {
  std::string mesh, forces, metadata, grid, extent, ft;
};

int cmd_label(const Invocation& inv, const LabelArgs& args) {
  const auto cfg = inv.config();
  for (const auto* p : {&args.mesh, &args.forces, &args.metadata}) {
    if (!fs::exists(*p)) throw InputError("input file not found: " + *p);
  }
  Extent extent = cfg.grid ? cfg.grid->extent() : Extent{};
  if (!args.extent.empty()) extent = parse_extent(args.extent);
  std::size_t rows = cfg.grid ? cfg.grid->rows() : 20, cols = cfg.grid ? cfg.grid->cols() : 20;
  if (!args.grid.empty()) std::tie(rows, cols) = parse_rxc(args.grid, "--grid");
  const BinGrid grid(extent, rows, cols);

  const auto mesh = read_mesh_csv(args.mesh, extent);
  const auto fields = read_force_fields(args.forces, args.metadata);
  const auto labels = bin_forces_batch(fields, mesh, grid);

  double max_diff = 0.0;
  std::vector<std::pair<std::int64_t, Vec3>> totals;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const Vec3 a = total_force(labels[i]), b = total_force(fields[i]);
    for (std::size_t k = 0; k < 3; ++k) max_diff = std::max(max_diff, std::abs(a[k] - b[k]));
    totals.emplace_back(labels[i].indentation_id, a);
  }

  const fs::path out = inv.globals.out;
  io::write_atomic(out / "labels.csv", format_labels_csv(labels));
  io::write_atomic(out / "totals.csv", format_vec3_csv("indentation_id,fx_n,fy_n,fz_n", totals));
  json body{{"grid", grid.to_json()},
            {"indentations", fields.size()},
            {"mesh_nodes", mesh.size()},
            {"conservation", {{"max_abs_diff_n", max_diff}, {"passed", max_diff <= 1e-9}}}};
  if (!args.ft.empty()) {
    if (!fs::exists(args.ft)) throw InputError("F/T readings file not found: " + args.ft);
    const auto readings = read_ft_csv(args.ft);
    body["rmse_gt_n"] = vec_json(ground_truth_rmse(labels, readings));
  }
  write_report(out / "label_report.json", "label", cfg, body);
  std::cout << "label: " << fields.size() << " indentations into " << rows << "x" << cols << " bins\n";
  return 0;
}

// ---------------------------------------------------------------- features

struct FeaturesArgs {
  std::string ref, cur, regions, dump_flow;
};

int cmd_features(const Invocation& inv, const FeaturesArgs& args) {
  const auto cfg = inv.config();
  RegionGrid regions = cfg.regions;
  if (!args.regions.empty()) {
    const auto [r, c] = parse_rxc(args.regions, "--regions");
    regions = {r, c};
  }
  for (const auto* p : {&args.ref, &args.cur}) {
    if (!fs::exists(*p)) throw InputError("image not found: " + *p);
  }
  const auto ref = read_image(args.ref);
  const auto cur = read_image(args.cur);
  const auto flow = dense_flow(ref, cur, cfg.flow);
  const auto features = pool_features(flow, regions);
  const fs::path out = inv.globals.out;
  io::write_atomic(out / "features.csv", format_features_csv(features));
  if (!args.dump_flow.empty()) io::write_atomic(args.dump_flow, encode_flow(flow));
  write_report(out / "features_report.json", "features", cfg,
               {{"image", {{"width", ref.width()}, {"height", ref.height()}}},
                {"regions", {{"rows", regions.rows}, {"cols", regions.cols}}},
                {"flow", to_json(cfg.flow)}});
  return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  bool curves = false;
  std::string material;
  double noise = 0.0;
  std::size_t points = 40;
};

int cmd_synth(const Invocation& inv, const SynthArgs& args) {
  const auto cfg = inv.config();
  const fs::path out = inv.globals.out;
  if (args.curves) {
    fs::path material = args.material;
    if (material.empty() && cfg.material) material = *cfg.material;
    if (material.empty()) throw InputError("synth --curves needs --material or a config material");
    if (!fs::exists(material)) throw InputError("material file not found: " + material.string());
    const auto params = OgdenParameters::load(material);
    const auto curves = synth_curves(params, args.points, args.noise, derive_seed(cfg.seed, "synth/curves"));
    json files = json::array();
    for (const auto& c : curves) {
      const std::string name = "curve_" + std::string(to_string(c.load_case())) + ".csv";
      io::write_atomic(out / name, format_curve_csv(c));
      files.push_back(name);
    }
    write_report(out / "synth_report.json", "synth", cfg,
                 {{"mode", "curves"}, {"material", params.to_json()}, {"noise", args.noise}, {"points", args.points},
                  {"files", files}});
    return 0;
  }
  const auto output = generate_synthetic(cfg.synth);
  write_synthetic(out, output);
  write_report(out / "synth_report.json", "synth", cfg,
               {{"mode", "dataset"}, {"records", output.dataset.records.size()}, {"synth", cfg.synth.to_json()}});
  std::cout << "synth: " << output.dataset.records.size() << " records written to " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- train / eval

void check_manifest(const PipelineConfig& cfg, const DatasetManifest& m) {
  if (cfg.doc.contains("regions") && (cfg.regions.rows != m.regions.rows || cfg.regions.cols != m.regions.cols)) {
    throw InputError("config regions " + std::to_string(cfg.regions.rows) + "x" + std::to_string(cfg.regions.cols) +
                     " do not match the dataset manifest " + std::to_string(m.regions.rows) + "x" +
                     std::to_string(m.regions.cols));
  }
  if (cfg.grid && cfg.grid->size() != m.label_bins) {
    throw InputError("config grid has " + std::to_string(cfg.grid->size()) + " bins, dataset manifest has " +
                     std::to_string(m.label_bins));
  }
}

struct TrainArgs {
  std::string dataset;
};

int cmd_train(const Invocation& inv, const TrainArgs& args) {
  const auto cfg = inv.config();
  const auto ds = read_dataset(args.dataset);
  check_manifest(cfg, ds.manifest);
  const auto result = train(ds, cfg.train);

  const fs::path out = inv.globals.out;
  io::write_atomic(out / "model.mlp", encode_checkpoint(result.model));
  std::vector<std::int64_t> test_ids;
  for (auto r : result.test_rows) test_ids.push_back(ds.records[r].indentation_id);
  const json sidecar{{"schema_version", kReportSchemaVersion},
                     {"format", "MLP1"},
                     {"sizes", result.model.params.sizes},
                     {"train_config", cfg.train.to_json()},
                     {"seed", cfg.seed},
                     {"config_hash", cfg.hash()},
                     {"test_ids", test_ids}};
  io::write_atomic(out / "model.json", sidecar.dump(2) + "\n");

  std::string hist = "epoch,train_loss,test_loss\n";
  for (std::size_t e = 0; e < result.train_loss.size(); ++e) {
    hist += std::to_string(e + 1) + "," + csv::format_exact(result.train_loss[e]) + "," +
            (e < result.test_loss.size() ? csv::format_exact(result.test_loss[e]) : std::string()) + "\n";
  }
  io::write_atomic(out / "loss_history.csv", hist);

  json body{{"records", ds.records.size()},
            {"train_records", result.train_rows.size()},
            {"test_records", result.test_rows.size()},
            {"sizes", result.model.params.sizes},
            {"train_config", cfg.train.to_json()}};
  if (!result.train_loss.empty()) body["final_train_loss"] = result.train_loss.back();
  if (!result.test_loss.empty()) {
    body["final_test_loss"] = result.test_loss.back();
    std::vector<DatasetRecord> test;
    for (auto r : result.test_rows) test.push_back(ds.records[r]);
    body["test_metrics"] = evaluate(result.model, test).to_json();
  }
  write_report(out / "train_report.json", "train", cfg, body);
  std::cout << "train: " << result.train_loss.size() << " epochs";
  if (!result.train_loss.empty()) std::cout << ", final train loss " << result.train_loss.back();
  std::cout << "\n";
  return 0;
}

struct EvalArgs {
  std::string dataset, model, split = "test", ft;
};

int cmd_eval(const Invocation& inv, const EvalArgs& args) {
  const auto cfg = inv.config();
  const fs::path out = inv.globals.out;
  const fs::path model_path = args.model.empty() ? out / "model.mlp" : fs::path(args.model);
  if (!fs::exists(model_path)) throw InputError("checkpoint not found: " + model_path.string());
  const Model model = decode_checkpoint(io::read_file(model_path));
  const auto ds = read_dataset(args.dataset);
  check_manifest(cfg, ds.manifest);
  if (model.params.input_dim() != ds.manifest.feature_dim() || model.params.output_dim() != ds.manifest.label_dim()) {
    throw InputError("checkpoint shape does not match the dataset manifest");
  }

  std::vector<DatasetRecord> records;
  if (args.split == "all") {
    records = ds.records;
  } else if (args.split == "test") {
    auto sidecar_path = model_path;
    sidecar_path.replace_extension(".json");
    if (!fs::exists(sidecar_path)) throw InputError("--split test needs the checkpoint sidecar " + sidecar_path.string());
    std::set<std::int64_t> ids;
    try {
      const auto sidecar = json::parse(io::read_file(sidecar_path));
      for (const auto& id : sidecar.at("test_ids")) ids.insert(id.get<std::int64_t>());
    } catch (const json::exception& e) {
      throw InputError(sidecar_path.string() + ": " + e.what());
    }
    for (const auto& r : ds.records) {
      if (ids.contains(r.indentation_id)) records.push_back(r);
    }
  } else {
    throw InputError("--split must be 'test' or 'all'");
  }
  if (records.empty()) throw InputError("no records selected for evaluation");

  std::vector<FtReading> readings;
  if (!args.ft.empty()) {
    if (!fs::exists(args.ft)) throw InputError("F/T readings file not found: " + args.ft);
    std::set<std::int64_t> wanted;
    for (const auto& r : records) wanted.insert(r.indentation_id);
    for (const auto& r : read_ft_csv(args.ft)) {
      if (wanted.contains(r.indentation_id)) readings.push_back(r);
    }
  }
  const auto report = evaluate(model, records, readings);
  write_report(out / "eval_report.json", "eval", cfg, {{"split", args.split}, {"metrics", report.to_json()}});
  std::cout << "eval: RMSE (" << report.rmse.x << ", " << report.rmse.y << ", " << report.rmse.z << ") N over "
            << records.size() << " records\n";
  return 0;
}

int exit_code(const Error& e) { return static_cast<int>(e.code()); }

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Tactile force-distribution pipeline", "tactile"};
  app.require_subcommand(1);
  app.fallthrough();

  Invocation inv;
  app.add_option("--config", inv.globals.config_path, "TOML or JSON pipeline config");
  app.add_option("--override", inv.globals.overrides, "JSON merge patch applied after the config file");
  app.add_option("--seed", inv.globals.seed, "Master seed for every stage");
  app.add_option("--threads", inv.globals.threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", inv.globals.out, "Output directory");

  std::function<int()> action;

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Fit Ogden parameters to stress-stretch curves");
  fit_cmd->add_option("curves", fa.curves, "Curve CSVs as CASE:path (CASE = UA, PS or EB)");
  fit_cmd->add_option_function<std::size_t>("--order", [&](std::size_t k) { inv.flags["fit"]["order"] = k; },
                                            "Number of Ogden terms (1-3)");
  fit_cmd->add_option_function<std::size_t>("--starts", [&](std::size_t n) { inv.flags["fit"]["starts"] = n; },
                                            "Multistart count");
  fit_cmd->add_option_function<std::size_t>("--max-iters", [&](std::size_t n) { inv.flags["fit"]["max_iters"] = n; },
                                            "Iteration budget per phase");
  fit_cmd->add_option_function<double>("--tol", [&](double t) { inv.flags["fit"]["tol"] = t; },
                                       "Relative convergence tolerance");
  fit_cmd->callback([&] { action = [&] { return cmd_fit(inv, fa); }; });

  CharacterizeArgs ca;
  auto* ch_cmd = app.add_subcommand("characterize", "Stress-stretch curves, friction and stretches from raw data");
  ch_cmd->add_option("--case", ca.load_case, "Load case of the raw files (UA, PS or EB)");
  ch_cmd->add_option("raw", ca.raw, "Raw measurement CSVs; repeat specimens are averaged");
  ch_cmd->add_option("--tilt-deg", ca.tilt_deg, "Maximum tilt angle before sliding [deg]");
  ch_cmd->add_option("--points", ca.points, "Tracked point pairs CSV");
  ch_cmd->callback([&] { action = [&] { return cmd_characterize(inv, ca); }; });

  LabelArgs la;
  auto* label_cmd = app.add_subcommand("label", "Bin nodal contact forces into force-distribution labels");
  label_cmd->add_option("--mesh", la.mesh, "Surface mesh CSV")->required();
  label_cmd->add_option("--forces", la.forces, "Nodal forces CSV (long format)")->required();
  label_cmd->add_option("--metadata", la.metadata, "Indentation metadata CSV")->required();
  label_cmd->add_option("--grid", la.grid, "Bin grid ROWSxCOLS");
  label_cmd->add_option("--extent", la.extent, "Surface extent X0,Y0,WIDTH,HEIGHT [mm]");
  label_cmd->add_option("--ft", la.ft, "F/T sensor readings CSV for the agreement report");
  label_cmd->callback([&] { action = [&] { return cmd_label(inv, la); }; });

  FeaturesArgs fe;
  auto* feat_cmd = app.add_subcommand("features", "Optical-flow features from a reference/current image pair");
  feat_cmd->add_option("ref", fe.ref, "Reference image (PNG or PGM)")->required();
  feat_cmd->add_option("cur", fe.cur, "Current image (PNG or PGM)")->required();
  feat_cmd->add_option("--regions", fe.regions, "Region grid ROWSxCOLS");
  feat_cmd->add_option("--dump-flow", fe.dump_flow, "Write the dense flow field to this file");
  feat_cmd->callback([&] { action = [&] { return cmd_features(inv, fe); }; });

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset (or synthetic material curves)");
  synth_cmd->add_flag("--curves", sa.curves, "Generate UA/PS/EB curves from a material file instead");
  synth_cmd->add_option("--material", sa.material, "Ogden material JSON for --curves");
  synth_cmd->add_option("--noise", sa.noise, "Relative multiplicative noise for --curves")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--points", sa.points, "Samples per curve for --curves");
  synth_cmd->callback([&] { action = [&] { return cmd_synth(inv, sa); }; });

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train the network on a dataset");
  train_cmd->add_option("dataset", ta.dataset, "Dataset directory")->required();
  train_cmd->add_option_function<std::size_t>("--epochs", [&](std::size_t n) { inv.flags["train"]["epochs"] = n; },
                                              "Epoch budget");
  train_cmd->add_option_function<double>("--lr", [&](double v) { inv.flags["train"]["learning_rate"] = v; },
                                          "Adam learning rate");
  train_cmd->add_option_function<std::size_t>(
      "--batch-size", [&](std::size_t n) { inv.flags["train"]["batch_size"] = n; }, "Mini-batch size");
  train_cmd->add_option_function<double>("--dropout", [&](double v) { inv.flags["train"]["dropout_rate"] = v; },
                                         "Dropout rate after hidden layers");
  train_cmd->add_option_function<std::vector<std::size_t>>(
                "--hidden", [&](const std::vector<std::size_t>& h) { inv.flags["train"]["hidden"] = h; },
                "Hidden layer sizes")
      ->delimiter(',');
  train_cmd->add_flag_function("--standardize", [&](std::int64_t) { inv.flags["train"]["standardize"] = true; },
                               "Standardize features and scale labels per axis");
  train_cmd->callback([&] { action = [&] { return cmd_train(inv, ta); }; });

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  eval_cmd->add_option("dataset", ea.dataset, "Dataset directory")->required();
  eval_cmd->add_option("--model", ea.model, "Checkpoint (default: <out>/model.mlp)");
  eval_cmd->add_option("--split", ea.split, "Records to evaluate: test (from the sidecar) or all");
  eval_cmd->add_option("--ft", ea.ft, "F/T readings CSV for RMSET_FT");
  eval_cmd->callback([&] { action = [&] { return cmd_eval(inv, ea); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::input);
  }

  try {
    if (inv.globals.threads > 0) omp_set_num_threads(inv.globals.threads);
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::io);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tactile::cli
