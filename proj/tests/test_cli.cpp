#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "commands.hpp"
#include "support.hpp"
#include "tactile/characterization.hpp"
#include "tactile/csv.hpp"
#include "tactile/image.hpp"
#include "tactile/io.hpp"
#include "tactile/learning.hpp"
#include "tactile/render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kSource = TACTILE_SOURCE_DIR;

int cli(std::vector<std::string> args) { return tactile::cli::run(args); }

json read_json(const fs::path& p) { return json::parse(tactile::io::read_file(p)); }

// A small synthetic dataset shared by the label/train/eval cases.
const fs::path& small_dataset() {
  static const fs::path dir = [] {
    const auto d = testing::scratch_dir("cli_ds");
    std::ofstream(d / "cfg.json") << R"({"seed": 3, "synth": {"center_spacing_mm": 10.0, "center_margin_mm": 6.0,
        "depths_mm": [0.8, 1.6], "image_px": {"width": 64, "height": 64}, "regions": {"rows": 4, "cols": 4},
        "particles": {"count": 300}}})";
    REQUIRE(cli({"--config", (d / "cfg.json").string(), "--out", (d / "ds").string(), "synth"}) == 0);
    return d / "ds";
  }();
  return dir;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(cli({}) == 2);
  CHECK(cli({"--help"}) == 0);
  CHECK(cli({"bogus"}) == 2);
  CHECK(cli({"fit", "--no-such-flag"}) == 2);
  CHECK(cli({"--config", "/nonexistent/cfg.toml", "fit", "UA:x.csv"}) == 2);
  CHECK(cli({"--override", "{not json", "fit", "UA:x.csv"}) == 2);
}

TEST_CASE("fit command") {
  const auto out = testing::scratch_dir("cli_fit");
  const auto curves = kSource / "data" / "curves";
  CHECK(cli({"--out", out.string(), "fit"}) == 2);
  const std::vector<std::string> inputs{"UA:" + (curves / "curve_UA.csv").string(),
                                        "PS:" + (curves / "curve_PS.csv").string(),
                                        "EB:" + (curves / "curve_EB.csv").string()};
  auto args = std::vector<std::string>{"--out", out.string(), "fit", "--order", "4"};
  args.insert(args.end(), inputs.begin(), inputs.end());
  CHECK(cli(args) == 2);

  args = {"--out", out.string(), "--seed", "1", "fit"};
  args.insert(args.end(), inputs.begin(), inputs.end());
  REQUIRE(cli(args) == 0);
  const auto rep = read_json(out / "fit_result.json");
  CHECK(rep["schema_version"] == 1);
  CHECK(rep["seed"] == 1);
  CHECK(rep["config_hash"].get<std::string>().size() == 16);
  CHECK(rep["result"]["converged"] == true);
  REQUIRE(rep["curves"].size() == 3);
  for (const auto& c : rep["curves"]) CHECK(c["relative_rms"].get<double>() < 0.02);
  CHECK(fs::exists(out / "material.json"));
  CHECK(fs::exists(out / "model_0_UA.csv"));

  std::ofstream(out / "bad.csv") << "lambda,sigma_kpa\n1.0,0\n1.5,abc\n";
  CHECK(cli({"--out", out.string(), "fit", "UA:" + (out / "bad.csv").string()}) == 2);
  CHECK(cli({"--out", out.string(), "fit", "XX:" + (curves / "curve_UA.csv").string()}) == 2);
  CHECK(cli({"--out", out.string(), "fit", "UA:" + (out / "missing.csv").string()}) == 2);
}

TEST_CASE("characterize command") {
  const auto out = testing::scratch_dir("cli_char");
  std::ofstream(out / "ua.csv") << "lambda,force_n,w0_mm,h0_mm\n1.0,0,10,0.5\n1.5,0.5,10,0.5\n2.0,1.0,10,0.5\n";
  REQUIRE(cli({"--out", out.string(), "characterize", "--case", "UA", (out / "ua.csv").string(), "--tilt-deg",
               "45"}) == 0);
  const auto rep = read_json(out / "characterize_report.json");
  CHECK(rep["friction"]["mu0"].get<double>() == doctest::Approx(1.0));
  const auto curve = tactile::read_curve_csv(out / "curve_UA.csv", tactile::LoadCase::UA);
  CHECK(curve.samples()[2].sigma_kpa == doctest::Approx(400.0));
}

TEST_CASE("synth command is deterministic and validates") {
  const auto& ds = small_dataset();
  const auto again = testing::scratch_dir("cli_ds_again");
  const auto cfg = ds.parent_path() / "cfg.json";
  REQUIRE(cli({"--config", cfg.string(), "--out", again.string(), "synth"}) == 0);
  for (const char* f : {"records.csv", "labels.csv", "ft_readings.csv", "manifest.json", "images/cur_00003.png"}) {
    CHECK(tactile::io::read_file(ds / f) == tactile::io::read_file(again / f));
  }
  const auto empty = testing::scratch_dir("cli_ds_empty");
  CHECK(cli({"--config", cfg.string(), "--override", R"({"synth": {"center_margin_mm": 17}})", "--out",
             empty.string(), "synth"}) == 2);
  CHECK(cli({"--config", cfg.string(), "--override", R"({"synth": {"regions": {"rows": 5, "cols": 5}}})", "--out",
             empty.string(), "synth"}) == 2);
}

TEST_CASE("label command") {
  const auto& ds = small_dataset();
  const auto out = testing::scratch_dir("cli_label");
  const std::vector<std::string> base{"--out", out.string(), "label", "--mesh", (ds / "mesh.csv").string(),
                                      "--forces", (ds / "forces.csv").string(), "--metadata",
                                      (ds / "metadata.csv").string()};
  auto args = base;
  args.insert(args.end(), {"--grid", "4x4", "--ft", (ds / "ft_readings.csv").string()});
  REQUIRE(cli(args) == 0);
  CHECK(tactile::io::read_file(out / "labels.csv") == tactile::io::read_file(ds / "labels.csv"));
  const auto rep = read_json(out / "label_report.json");
  CHECK(rep["conservation"]["passed"] == true);
  for (const auto& v : rep["rmse_gt_n"]) CHECK(v.get<double>() < 0.1);

  args = base;
  args.insert(args.end(), {"--grid", "4x5"});
  CHECK(cli(args) == 2);

  std::ofstream(out / "ft_extra.csv") << tactile::io::read_file(ds / "ft_readings.csv") << "999,0,0,0\n";
  args = base;
  args.insert(args.end(), {"--grid", "4x4", "--ft", (out / "ft_extra.csv").string()});
  CHECK(cli(args) == 2);
}

TEST_CASE("features command") {
  const auto out = testing::scratch_dir("cli_features");
  const auto scene = tactile::ParticleScene::random(64, 64, 300, 2.0, 6.0, 4);
  const auto [ref, cur] = tactile::render_scene(scene);
  tactile::io::write_atomic(out / "ref.png", tactile::encode_png(ref));
  tactile::io::write_atomic(out / "small.png", tactile::encode_png(tactile::GrayImage(48, 64)));
  REQUIRE(cli({"--out", out.string(), "features", (out / "ref.png").string(), (out / "ref.png").string(), "--regions",
               "4x4", "--dump-flow", (out / "flow.bin").string()}) == 0);
  const auto table = tactile::csv::Table::read(out / "features.csv");
  CHECK(table.rows() == 16);
  for (std::size_t r = 0; r < table.rows(); ++r) CHECK(table.number(r, 1) == 0.0);
  CHECK(fs::file_size(out / "flow.bin") == 16 + 8 * 64 * 64);

  CHECK(cli({"--out", out.string(), "features", (out / "ref.png").string(), (out / "ref.png").string(), "--regions",
             "5x5"}) == 2);
  CHECK(cli({"--out", out.string(), "features", (out / "ref.png").string(), (out / "small.png").string()}) == 2);
}

TEST_CASE("train and eval commands") {
  const auto& ds = small_dataset();
  const auto out = testing::scratch_dir("cli_train");
  REQUIRE(cli({"--out", out.string(), "--seed", "5", "train", ds.string(), "--epochs", "3", "--lr", "0", "--hidden",
               "8,6", "--batch-size", "4"}) == 0);
  const auto sidecar = read_json(out / "model.json");
  CHECK(sidecar["sizes"] == json::array({32, 8, 6, 48}));
  CHECK(sidecar["train_config"]["learning_rate"] == 0.0);
  const auto model = tactile::decode_checkpoint(tactile::io::read_file(out / "model.mlp"));
  tactile::Rng init(tactile::derive_seed(5, "train/init"));
  CHECK(model.params == tactile::MlpParameters::xavier({32, 8, 6, 48}, init));
  const auto hist = tactile::csv::Table::read(out / "loss_history.csv");
  CHECK(hist.rows() == 3);

  REQUIRE(cli({"--out", out.string(), "eval", ds.string(), "--ft", (ds / "ft_readings.csv").string()}) == 0);
  const auto rep = read_json(out / "eval_report.json");
  CHECK(rep["split"] == "test");
  CHECK(rep["metrics"]["records"] == sidecar["test_ids"].size());
  CHECK(rep["metrics"].contains("rmset_ft"));
  CHECK(cli({"--out", out.string(), "eval", ds.string(), "--split", "all"}) == 0);
  CHECK(read_json(out / "eval_report.json")["metrics"]["records"] == 18);

  CHECK(cli({"--out", out.string(), "eval", ds.string(), "--model", (out / "missing.mlp").string()}) == 2);
  CHECK(cli({"--out", out.string(), "--override", R"({"regions": {"rows": 8, "cols": 8}})", "train", ds.string(),
             "--epochs", "1"}) == 2);
  CHECK(cli({"--out", out.string(), "train", (out / "nowhere").string()}) == 2);
}
