#pragma once

// Fully connected regression network from flow features to force-distribution
// labels: sigmoid hidden layers with inverted dropout, identity output, MSE
// loss, mini-batch Adam, and the force-distribution error metrics.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tactile/dataset.hpp"
#include "tactile/labeling.hpp"
#include "tactile/rng.hpp"
#include "tactile/vec3.hpp"

namespace tactile {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

// Layer sizes [in, h1, ..., out]; weights[l] is sizes[l+1] x sizes[l] row-major.
struct MlpParameters {
  std::vector<std::size_t> sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static MlpParameters zeros(std::vector<std::size_t> sizes);
  // Xavier-uniform weights, limit sqrt(6 / (fan_in + fan_out)); zero biases.
  static MlpParameters xavier(std::vector<std::size_t> sizes, Rng& rng);

  std::size_t layers() const { return weights.size(); }
  std::size_t input_dim() const { return sizes.front(); }
  std::size_t output_dim() const { return sizes.back(); }
  void validate() const;

  friend bool operator==(const MlpParameters&, const MlpParameters&) = default;
};

enum class Mode { train, eval };

// Everything backward() needs from one forward pass over a batch.
struct ForwardCache {
  std::vector<Matrix> inputs;     // input to layer l (post-dropout for l > 0)
  std::vector<Matrix> sigmoid;    // hidden activations before dropout
  std::vector<std::vector<std::uint8_t>> masks;  // per hidden layer; empty in eval mode
  double keep = 1.0;
  Matrix output;
};

ForwardCache forward_batch(const MlpParameters& params, const Matrix& x, Mode mode, double dropout, Rng* rng,
                           bool parallel = true);

std::vector<double> forward(const MlpParameters& params, std::span<const double> features, Mode mode,
                            double dropout, Rng& rng);

// Mean over all components of the squared error.
double mse_loss(std::span<const double> pred, std::span<const double> label);

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

// Exact gradients of the batch-mean MSE under the masks stored in `cache`.
Gradients backward(const MlpParameters& params, const ForwardCache& cache, const Matrix& labels,
                   bool parallel = true);

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Gradients m;
  Gradients v;
  std::uint64_t step = 0;

  static AdamState for_params(const MlpParameters& params);
};

void adam_step(MlpParameters& params, AdamState& state, const Gradients& grads, const AdamConfig& config);

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 400;
  double dropout_rate = 0.1;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<std::size_t> hidden{800, 600, 400};
  double test_fraction = 0.2;
  // Per-feature z-scoring and per-axis label scaling, fitted on the training
  // split; predictions are mapped back to Newtons.
  bool standardize = false;

  void validate() const;
  AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon}; }
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;
  std::array<double, 3> label_scale{1.0, 1.0, 1.0};

  static Standardizer fit(std::span<const DatasetRecord> records, std::span<const std::size_t> rows);
  void apply(std::span<double> features) const;
  void scale_label(std::span<double> label) const;
  void unscale_output(std::span<double> output) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

// Network plus the optional input standardization it was trained with.
struct Model {
  MlpParameters params;
  std::optional<Standardizer> standardizer;

  std::vector<double> predict(std::span<const double> features) const;

  friend bool operator==(const Model&, const Model&) = default;
};

struct TrainResult {
  Model model;
  // Per epoch: mean batch MSE in train mode, and eval-mode MSE on the test
  // split (empty without one). In scaled label units when standardizing.
  std::vector<double> train_loss;
  std::vector<double> test_loss;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

// Seeded 80/20 record-level split (fraction from config), deterministic given the seed.
void split_rows(std::size_t count, double test_fraction, std::uint64_t seed, std::vector<std::size_t>& train,
                std::vector<std::size_t>& test);

// Deterministic for a given (dataset, config); parallel and serial execution agree bit-for-bit.
TrainResult train(const Dataset& dataset, const TrainConfig& config, const MlpParameters* initial = nullptr);

struct EvalReport {
  Vec3 rmse;
  std::array<std::optional<double>, 3> rmses;  // absent when an axis has no non-zero ground truth
  Vec3 rmset_fem;
  std::optional<Vec3> rmset_ft;
  std::size_t records = 0;

  nlohmann::json to_json() const;
};

// Root-mean-square error over all components.
double rmse(std::span<const double> truth, std::span<const double> pred);
// Root-mean-square error over components with non-zero ground truth; nullopt if there are none.
std::optional<double> sparse_rmse(std::span<const double> truth, std::span<const double> pred);

EvalReport evaluate(const Model& model, std::span<const DatasetRecord> testset,
                    std::span<const FtReading> readings = {});
// Metrics for precomputed predictions (one per record, same order).
EvalReport evaluate_predictions(std::span<const DatasetRecord> testset, std::span<const std::vector<double>> preds,
                                std::span<const FtReading> readings = {});

// Checkpoint: "MLP1", u32 layer-size count, u32 sizes, then per layer the
// weights (row-major) and biases as little-endian float64. A trailing "STD1"
// block holds the standardizer (feature mean, feature scale, 3 label scales).
std::string encode_checkpoint(const Model& model);
Model decode_checkpoint(std::string_view bytes);

}  // namespace tactile
