#include "config.hpp"

#include <cstdio>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "tactile/errors.hpp"
#include "tactile/io.hpp"
#include "tactile/rng.hpp"

namespace tactile::cli {

namespace {

nlohmann::json to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : *t) j[std::string(k.str())] = to_json(v);
    return j;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& v : *a) j.push_back(to_json(v));
    return j;
  }
  if (const auto* s = node.as_string()) return s->get();
  if (const auto* i = node.as_integer()) return i->get();
  if (const auto* f = node.as_floating_point()) return f->get();
  if (const auto* b = node.as_boolean()) return b->get();
  throw InputError("unsupported TOML value (dates and times are not used in configs)");
}

}  // namespace

nlohmann::json parse_toml(std::string_view text, const std::string& source) {
  try {
    return to_json(toml::parse(text, source));
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw InputError(msg.str());
  }
}

nlohmann::json load_config_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("config file not found: " + path.string());
  const std::string text = io::read_file(path);
  if (path.extension() == ".json") {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  }
  return parse_toml(text, path.string());
}

void set_path(nlohmann::json& doc, std::string_view dotted, nlohmann::json value) {
  nlohmann::json* node = &doc;
  while (true) {
    const auto dot = dotted.find('.');
    const std::string key(dotted.substr(0, dot));
    if (key.empty()) throw InputError("empty key in config path");
    if (!node->is_object()) *node = nlohmann::json::object();
    if (dot == std::string_view::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    dotted.remove_prefix(dot + 1);
  }
}

std::string config_hash(const nlohmann::json& doc) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(doc.dump())));
  return buf;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("config must be a table/object");
  PipelineConfig c;
  c.doc = doc;
  try {
    c.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("material")) {
      c.material = doc.at("material").get<std::string>();
      if (!std::filesystem::exists(*c.material)) throw InputError("material file not found: " + c.material->string());
    }
    if (doc.contains("grid")) {
      const auto& g = doc.at("grid");
      Extent e;
      if (g.contains("extent_mm")) {
        const auto& x = g.at("extent_mm");
        e = {x.value("x0", e.x0), x.value("y0", e.y0), x.value("width", e.width), x.value("height", e.height)};
      }
      c.grid = BinGrid(e, g.at("rows").get<std::size_t>(), g.at("cols").get<std::size_t>());
    }
    if (doc.contains("regions")) {
      c.regions = {doc.at("regions").at("rows").get<std::size_t>(), doc.at("regions").at("cols").get<std::size_t>()};
    }
    if (doc.contains("flow")) c.flow = dis_config_from_json(doc.at("flow"));
    if (doc.contains("train")) c.train = TrainConfig::from_json(doc.at("train"));
    if (doc.contains("synth")) c.synth = SynthConfig::from_json(doc.at("synth"));
    if (doc.contains("fit")) {
      const auto& f = doc.at("fit");
      c.fit_order = f.value("order", c.fit_order);
      c.fit.starts = f.value("starts", c.fit.starts);
      c.fit.max_iters = f.value("max_iters", c.fit.max_iters);
      c.fit.tol = f.value("tol", c.fit.tol);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid config: ") + e.what());
  }
  c.train.seed = c.seed;
  c.synth.seed = c.seed;
  c.fit.seed = c.seed;
  return c;
}

}  // namespace tactile::cli
