#include "tactile/learning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>

#include "tactile/errors.hpp"
#include "tactile/kernels.hpp"

namespace tactile {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

}  // namespace

MlpParameters MlpParameters::zeros(std::vector<std::size_t> sizes) {
  require(sizes.size() >= 2, "a network needs at least input and output sizes");
  for (auto s : sizes) require(s > 0, "layer sizes must be positive");
  MlpParameters p;
  p.sizes = std::move(sizes);
  for (std::size_t l = 0; l + 1 < p.sizes.size(); ++l) {
    p.weights.emplace_back(p.sizes[l + 1] * p.sizes[l], 0.0);
    p.biases.emplace_back(p.sizes[l + 1], 0.0);
  }
  return p;
}

MlpParameters MlpParameters::xavier(std::vector<std::size_t> sizes, Rng& rng) {
  auto p = zeros(std::move(sizes));
  for (std::size_t l = 0; l < p.layers(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(p.sizes[l] + p.sizes[l + 1]));
    for (auto& w : p.weights[l]) w = rng.uniform(-limit, limit);
  }
  return p;
}

void MlpParameters::validate() const {
  require(sizes.size() >= 2 && weights.size() + 1 == sizes.size() && biases.size() == weights.size(),
          "network layer count is inconsistent");
  for (std::size_t l = 0; l < layers(); ++l) {
    require(weights[l].size() == sizes[l] * sizes[l + 1] && biases[l].size() == sizes[l + 1],
            "layer " + std::to_string(l) + " shape does not match its sizes");
    for (double w : weights[l]) require(std::isfinite(w), "non-finite weight in layer " + std::to_string(l));
    for (double b : biases[l]) require(std::isfinite(b), "non-finite bias in layer " + std::to_string(l));
  }
}

ForwardCache forward_batch(const MlpParameters& params, const Matrix& x, Mode mode, double dropout, Rng* rng,
                           bool parallel) {
  require(x.cols == params.input_dim(), "feature length " + std::to_string(x.cols) + " does not match network input " +
                                            std::to_string(params.input_dim()));
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
  const bool drop = mode == Mode::train && dropout > 0.0;
  if (drop && rng == nullptr) throw InputError("train-mode dropout needs a random stream");

  ForwardCache c;
  c.keep = 1.0 - dropout;
  c.inputs.push_back(x);
  const std::size_t rows = x.rows;
  for (std::size_t l = 0; l < params.layers(); ++l) {
    const std::size_t in = params.sizes[l], out = params.sizes[l + 1];
    Matrix z(rows, out);
    kernels::affine_forward(c.inputs[l].data, rows, in, params.weights[l], params.biases[l], out, z.data, parallel);
    if (l + 1 == params.layers()) {
      c.output = std::move(z);
      break;
    }
    for (double& v : z.data) v = sigmoid(v);
    Matrix next = z;
    if (drop) {
      std::vector<std::uint8_t> mask(z.data.size());
      const double scale = 1.0 / c.keep;
      for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = rng->uniform() < c.keep ? 1 : 0;
        next.data[i] = mask[i] ? next.data[i] * scale : 0.0;
      }
      c.masks.push_back(std::move(mask));
    }
    c.sigmoid.push_back(std::move(z));
    c.inputs.push_back(std::move(next));
  }
  return c;
}

std::vector<double> forward(const MlpParameters& params, std::span<const double> features, Mode mode, double dropout,
                            Rng& rng) {
  Matrix x(1, features.size());
  std::copy(features.begin(), features.end(), x.data.begin());
  return forward_batch(params, x, mode, dropout, &rng, false).output.data;
}

double mse_loss(std::span<const double> pred, std::span<const double> label) {
  require(pred.size() == label.size(), "prediction and label lengths differ");
  require(!pred.empty(), "empty prediction");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - label[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

Gradients backward(const MlpParameters& params, const ForwardCache& cache, const Matrix& labels, bool parallel) {
  const std::size_t rows = cache.output.rows, out = params.output_dim();
  require(labels.rows == rows && labels.cols == out, "label batch shape does not match the network output");
  require(rows > 0, "empty batch");

  Gradients g;
  g.weights.resize(params.layers());
  g.biases.resize(params.layers());

  const double norm = 2.0 / static_cast<double>(rows * out);
  std::vector<double> delta(cache.output.data.size());
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = norm * (cache.output.data[i] - labels.data[i]);

  for (std::size_t l = params.layers(); l-- > 0;) {
    const std::size_t in = params.sizes[l], o = params.sizes[l + 1];
    g.weights[l].resize(in * o);
    g.biases[l].resize(o);
    kernels::weight_gradient(delta, cache.inputs[l].data, rows, in, o, g.weights[l], g.biases[l], parallel);
    if (l == 0) break;
    std::vector<double> dx(rows * in);
    kernels::input_gradient(delta, params.weights[l], rows, in, o, dx, parallel);
    const auto& s = cache.sigmoid[l - 1].data;
    const bool masked = !cache.masks.empty();
    const double scale = 1.0 / cache.keep;
    for (std::size_t i = 0; i < dx.size(); ++i) {
      double d = dx[i];
      if (masked) d = cache.masks[l - 1][i] ? d * scale : 0.0;
      dx[i] = d * s[i] * (1.0 - s[i]);
    }
    delta = std::move(dx);
  }
  return g;
}

AdamState AdamState::for_params(const MlpParameters& params) {
  AdamState s;
  for (std::size_t l = 0; l < params.layers(); ++l) {
    s.m.weights.emplace_back(params.weights[l].size(), 0.0);
    s.m.biases.emplace_back(params.biases[l].size(), 0.0);
  }
  s.v = s.m;
  return s;
}

void adam_step(MlpParameters& params, AdamState& state, const Gradients& grads, const AdamConfig& config) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  auto update = [&](std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                    const std::vector<double>& g) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      p[i] -= config.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + config.epsilon);
    }
  };
  for (std::size_t l = 0; l < params.layers(); ++l) {
    update(params.weights[l], state.m.weights[l], state.v.weights[l], grads.weights[l]);
    update(params.biases[l], state.m.biases[l], state.v.biases[l], grads.biases[l]);
  }
}

void TrainConfig::validate() const {
  require(std::isfinite(learning_rate) && learning_rate >= 0.0, "learning_rate must be finite and >= 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0, "dropout_rate must be in [0, 1)");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "Adam betas must be in [0, 1)");
  require(epsilon > 0.0, "Adam epsilon must be positive");
  require(test_fraction >= 0.0 && test_fraction < 1.0, "test_fraction must be in [0, 1)");
  for (auto h : hidden) require(h > 0, "hidden layer sizes must be positive");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"learning_rate", learning_rate},
          {"batch_size", batch_size},
          {"dropout_rate", dropout_rate},
          {"epochs", epochs},
          {"seed", seed},
          {"adam", {{"beta1", beta1}, {"beta2", beta2}, {"epsilon", epsilon}}},
          {"hidden", hidden},
          {"test_fraction", test_fraction},
          {"standardize", standardize}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.dropout_rate = j.value("dropout_rate", c.dropout_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.seed = j.value("seed", c.seed);
    if (j.contains("adam")) {
      const auto& a = j.at("adam");
      c.beta1 = a.value("beta1", c.beta1);
      c.beta2 = a.value("beta2", c.beta2);
      c.epsilon = a.value("epsilon", c.epsilon);
    }
    c.hidden = j.value("hidden", c.hidden);
    c.test_fraction = j.value("test_fraction", c.test_fraction);
    c.standardize = j.value("standardize", c.standardize);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid train config: ") + e.what());
  }
  c.validate();
  return c;
}

Standardizer Standardizer::fit(std::span<const DatasetRecord> records, std::span<const std::size_t> rows) {
  require(!rows.empty(), "cannot standardize over zero records");
  const std::size_t dim = records[rows.front()].features.size();
  Standardizer s{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  for (auto r : rows) {
    for (std::size_t i = 0; i < dim; ++i) s.mean[i] += records[r].features[i];
  }
  for (auto& m : s.mean) m /= static_cast<double>(rows.size());
  for (auto r : rows) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = records[r].features[i] - s.mean[i];
      s.scale[i] += d * d;
    }
  }
  for (auto& v : s.scale) {
    v = std::sqrt(v / static_cast<double>(rows.size()));
    if (v < 1e-12) v = 1.0;
  }
  std::array<double, 3> sum{}, sq{};
  std::array<std::size_t, 3> n{};
  for (auto r : rows) {
    const auto& label = records[r].label;
    for (std::size_t i = 0; i < label.size(); ++i) {
      sum[i % 3] += label[i];
      ++n[i % 3];
    }
  }
  for (auto r : rows) {
    const auto& label = records[r].label;
    for (std::size_t i = 0; i < label.size(); ++i) {
      const double d = label[i] - sum[i % 3] / static_cast<double>(n[i % 3]);
      sq[i % 3] += d * d;
    }
  }
  for (std::size_t a = 0; a < 3; ++a) {
    const double sd = n[a] ? std::sqrt(sq[a] / static_cast<double>(n[a])) : 0.0;
    s.label_scale[a] = sd < 1e-12 ? 1.0 : sd;
  }
  return s;
}

void Standardizer::apply(std::span<double> features) const {
  require(features.size() == mean.size(), "feature length does not match the standardizer");
  for (std::size_t i = 0; i < features.size(); ++i) features[i] = (features[i] - mean[i]) / scale[i];
}

void Standardizer::scale_label(std::span<double> label) const {
  for (std::size_t i = 0; i < label.size(); ++i) label[i] /= label_scale[i % 3];
}

void Standardizer::unscale_output(std::span<double> output) const {
  for (std::size_t i = 0; i < output.size(); ++i) output[i] *= label_scale[i % 3];
}

std::vector<double> Model::predict(std::span<const double> features) const {
  Matrix x(1, features.size());
  std::copy(features.begin(), features.end(), x.data.begin());
  if (standardizer) standardizer->apply(x.data);
  auto out = forward_batch(params, x, Mode::eval, 0.0, nullptr, false).output.data;
  if (standardizer) standardizer->unscale_output(out);
  return out;
}

void split_rows(std::size_t count, double test_fraction, std::uint64_t seed, std::vector<std::size_t>& train,
                std::vector<std::size_t>& test) {
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  Rng rng(derive_seed(seed, "train/split"));
  shuffle(order, rng);
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(count)));
  if (n_test >= count) n_test = count - 1;
  test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
}

namespace {

void gather(const Dataset& ds, std::span<const std::size_t> rows, const Standardizer* std_, Matrix& x, Matrix& y) {
  const std::size_t fdim = ds.manifest.feature_dim(), ldim = ds.manifest.label_dim();
  x = Matrix(rows.size(), fdim);
  y = Matrix(rows.size(), ldim);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& rec = ds.records[rows[k]];
    std::copy(rec.features.begin(), rec.features.end(), x.row(k).begin());
    std::copy(rec.label.begin(), rec.label.end(), y.row(k).begin());
    if (std_) {
      std_->apply(x.row(k));
      std_->scale_label(y.row(k));
    }
  }
}

}  // namespace

TrainResult train(const Dataset& dataset, const TrainConfig& config, const MlpParameters* initial) {
  config.validate();
  require(!dataset.records.empty(), "cannot train on an empty dataset");
  dataset.validate();

  std::vector<std::size_t> sizes{dataset.manifest.feature_dim()};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(dataset.manifest.label_dim());

  TrainResult result;
  if (initial) {
    initial->validate();
    require(initial->sizes == sizes, "initial parameters do not match the dataset and hidden sizes");
    result.model.params = *initial;
  } else {
    Rng init(derive_seed(config.seed, "train/init"));
    result.model.params = MlpParameters::xavier(sizes, init);
  }

  split_rows(dataset.records.size(), config.test_fraction, config.seed, result.train_rows, result.test_rows);
  if (config.standardize) result.model.standardizer = Standardizer::fit(dataset.records, result.train_rows);
  const Standardizer* st = result.model.standardizer ? &*result.model.standardizer : nullptr;

  Matrix test_x, test_y;
  gather(dataset, result.test_rows, st, test_x, test_y);

  auto& params = result.model.params;
  AdamState adam = AdamState::for_params(params);
  const AdamConfig ac = config.adam();
  Rng dropout_rng(derive_seed(config.seed, "train/dropout"));
  std::vector<std::size_t> order = result.train_rows;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(config.seed, "train/epoch/" + std::to_string(epoch)));
    shuffle(order, shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      Matrix x, y;
      gather(dataset, std::span(order).subspan(start, end - start), st, x, y);
      const auto cache = forward_batch(params, x, Mode::train, config.dropout_rate, &dropout_rng);
      loss_sum += mse_loss(cache.output.data, y.data) * static_cast<double>(end - start);
      const auto grads = backward(params, cache, y);
      adam_step(params, adam, grads, ac);
    }
    const double loss = loss_sum / static_cast<double>(order.size());
    if (!std::isfinite(loss)) throw NumericalError("training diverged at epoch " + std::to_string(epoch + 1));
    result.train_loss.push_back(loss);
    if (test_x.rows > 0) {
      const auto out = forward_batch(params, test_x, Mode::eval, 0.0, nullptr);
      result.test_loss.push_back(mse_loss(out.output.data, test_y.data));
    }
  }
  return result;
}

double rmse(std::span<const double> truth, std::span<const double> pred) {
  return std::sqrt(mse_loss(pred, truth));
}

std::optional<double> sparse_rmse(std::span<const double> truth, std::span<const double> pred) {
  require(truth.size() == pred.size(), "prediction and label lengths differ");
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 0.0) continue;
    const double d = pred[i] - truth[i];
    s += d * d;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return std::sqrt(s / static_cast<double>(n));
}

nlohmann::json EvalReport::to_json() const {
  auto vec = [](const Vec3& v) { return nlohmann::json{v.x, v.y, v.z}; };
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rmses) rs.push_back(r ? nlohmann::json(*r) : nlohmann::json(nullptr));
  nlohmann::json j{{"records", records}, {"rmse", vec(rmse)}, {"rmses", rs}, {"rmset_fem", vec(rmset_fem)}};
  if (rmset_ft) j["rmset_ft"] = vec(*rmset_ft);
  return j;
}

EvalReport evaluate_predictions(std::span<const DatasetRecord> testset, std::span<const std::vector<double>> preds,
                                std::span<const FtReading> readings) {
  require(!testset.empty(), "cannot evaluate on an empty test set");
  require(preds.size() == testset.size(), "one prediction per test record is required");

  std::map<std::int64_t, Vec3> ft;
  for (const auto& r : readings) {
    if (!ft.emplace(r.indentation_id, r.total).second) {
      throw InputError("duplicate F/T reading for indentation " + std::to_string(r.indentation_id));
    }
  }
  if (!readings.empty()) {
    std::vector<std::int64_t> missing;
    for (const auto& rec : testset) {
      if (!ft.contains(rec.indentation_id)) missing.push_back(rec.indentation_id);
    }
    if (!missing.empty()) {
      std::string msg = std::to_string(missing.size()) + " test records have no F/T reading:";
      for (std::size_t i = 0; i < std::min<std::size_t>(10, missing.size()); ++i) msg += " " + std::to_string(missing[i]);
      throw InputError(msg);
    }
  }

  std::array<double, 3> sq{}, sq_sparse{}, sq_fem{}, sq_ft{};
  std::array<std::size_t, 3> count{}, count_sparse{};
  for (std::size_t k = 0; k < testset.size(); ++k) {
    const auto& truth = testset[k].label;
    const auto& pred = preds[k];
    require(pred.size() == truth.size(), "prediction length does not match the label length");
    require(truth.size() % 3 == 0, "label length must be a multiple of 3");
    Vec3Sum sum_truth, sum_pred;
    for (std::size_t i = 0; i < truth.size(); i += 3) {
      sum_truth.add({truth[i], truth[i + 1], truth[i + 2]});
      sum_pred.add({pred[i], pred[i + 1], pred[i + 2]});
    }
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const std::size_t axis = i % 3;
      const double d = pred[i] - truth[i];
      sq[axis] += d * d;
      ++count[axis];
      if (truth[i] != 0.0) {
        sq_sparse[axis] += d * d;
        ++count_sparse[axis];
      }
    }
    const Vec3 tp = sum_pred.value();
    const Vec3 dt = tp - sum_truth.value();
    const Vec3 df = readings.empty() ? Vec3{} : tp - ft.at(testset[k].indentation_id);
    for (std::size_t a = 0; a < 3; ++a) {
      sq_fem[a] += dt[a] * dt[a];
      sq_ft[a] += df[a] * df[a];
    }
  }

  EvalReport rep;
  rep.records = testset.size();
  const double n = static_cast<double>(testset.size());
  for (std::size_t a = 0; a < 3; ++a) {
    rep.rmse[a] = std::sqrt(sq[a] / static_cast<double>(count[a]));
    if (count_sparse[a] > 0) rep.rmses[a] = std::sqrt(sq_sparse[a] / static_cast<double>(count_sparse[a]));
    rep.rmset_fem[a] = std::sqrt(sq_fem[a] / n);
  }
  if (!readings.empty()) {
    rep.rmset_ft = Vec3{std::sqrt(sq_ft[0] / n), std::sqrt(sq_ft[1] / n), std::sqrt(sq_ft[2] / n)};
  }
  return rep;
}

EvalReport evaluate(const Model& model, std::span<const DatasetRecord> testset, std::span<const FtReading> readings) {
  require(!testset.empty(), "cannot evaluate on an empty test set");
  std::vector<std::vector<double>> preds(testset.size());
  const auto n = static_cast<long>(testset.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) preds[static_cast<std::size_t>(k)] = model.predict(testset[static_cast<std::size_t>(k)].features);
  return evaluate_predictions(testset, preds, readings);
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw InputError("checkpoint is truncated");
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint64_t uint(std::size_t width) {
    const auto s = take(width);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[i])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint(8)); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const Model& model) {
  model.params.validate();
  std::string out = "MLP1";
  put_u32(out, static_cast<std::uint32_t>(model.params.sizes.size()));
  for (auto s : model.params.sizes) put_u32(out, static_cast<std::uint32_t>(s));
  for (std::size_t l = 0; l < model.params.layers(); ++l) {
    for (double w : model.params.weights[l]) put_f64(out, w);
    for (double b : model.params.biases[l]) put_f64(out, b);
  }
  if (model.standardizer) {
    out += "STD1";
    for (double m : model.standardizer->mean) put_f64(out, m);
    for (double s : model.standardizer->scale) put_f64(out, s);
    for (double s : model.standardizer->label_scale) put_f64(out, s);
  }
  return out;
}

Model decode_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(4) != "MLP1") throw InputError("not a network checkpoint (bad magic)");
  const auto count = r.uint(4);
  if (count < 2 || count > 64) throw InputError("checkpoint has an implausible layer count");
  std::vector<std::size_t> sizes;
  for (std::uint64_t i = 0; i < count; ++i) sizes.push_back(static_cast<std::size_t>(r.uint(4)));
  Model m;
  m.params = MlpParameters::zeros(sizes);
  for (std::size_t l = 0; l < m.params.layers(); ++l) {
    if ((bytes.size() / 8) < m.params.weights[l].size()) throw InputError("checkpoint is truncated");
    for (double& w : m.params.weights[l]) w = r.f64();
    for (double& b : m.params.biases[l]) b = r.f64();
  }
  if (!r.done()) {
    if (r.take(4) != "STD1") throw InputError("checkpoint has trailing bytes");
    Standardizer s{std::vector<double>(sizes.front()), std::vector<double>(sizes.front()), {}};
    for (double& v : s.mean) v = r.f64();
    for (double& v : s.scale) v = r.f64();
    for (double& v : s.label_scale) v = r.f64();
    for (double v : s.mean) require(std::isfinite(v), "checkpoint standardizer has a non-finite mean");
    for (double v : s.scale) require(std::isfinite(v) && v > 0.0, "checkpoint standardizer has invalid scale");
    for (double v : s.label_scale) require(std::isfinite(v) && v > 0.0, "checkpoint standardizer has invalid scale");
    m.standardizer = std::move(s);
    if (!r.done()) throw InputError("checkpoint has trailing bytes");
  }
  m.params.validate();
  return m;
}

}  // namespace tactile
