#include "tactile/constitutive.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

#include "tactile/errors.hpp"

namespace tactile {

OgdenParameters::OgdenParameters(std::vector<OgdenTerm> terms, double nu, std::string material)
    : terms_(std::move(terms)), nu_(nu), material_(std::move(material)) {
  if (terms_.empty()) throw DomainError("Ogden model needs at least one term");
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& t = terms_[k];
    if (!std::isfinite(t.mu_kpa) || !std::isfinite(t.alpha)) {
      throw DomainError("Ogden term " + std::to_string(k + 1) + " is not finite");
    }
    if (!(t.mu_kpa * t.alpha > kMinModulusProduct)) {
      throw DomainError("Ogden term " + std::to_string(k + 1) + " violates mu*alpha > 0 (mu=" +
                        std::to_string(t.mu_kpa) + ", alpha=" + std::to_string(t.alpha) + ")");
    }
  }
  if (!(nu_ > -1.0 && nu_ <= 0.5)) throw DomainError("Poisson ratio must lie in (-1, 0.5]");
}

nlohmann::json OgdenParameters::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : terms_) terms.push_back({{"mu_kpa", t.mu_kpa}, {"alpha", t.alpha}});
  return {{"material", material_}, {"terms", terms}, {"nu", nu_}};
}

OgdenParameters OgdenParameters::from_json(const nlohmann::json& j) {
  try {
    std::vector<OgdenTerm> terms;
    for (const auto& t : j.at("terms")) {
      terms.push_back({t.at("mu_kpa").get<double>(), t.at("alpha").get<double>()});
    }
    return OgdenParameters(std::move(terms), j.value("nu", 0.5), j.value("material", std::string{}));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid Ogden parameter JSON: ") + e.what());
  }
}

OgdenParameters OgdenParameters::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open material file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

PrincipalStretchState::PrincipalStretchState(double lambda1, double lambda2, double lambda3)
    : stretches_{lambda1, lambda2, lambda3} {
  for (double l : stretches_) {
    if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("principal stretches must be positive and finite");
  }
}

PrincipalStretchState PrincipalStretchState::incompressible(double lambda1, double lambda2) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw DomainError("principal stretches must be positive");
  return {lambda1, lambda2, 1.0 / (lambda1 * lambda2)};
}

std::string_view to_string(LoadCase c) {
  switch (c) {
    case LoadCase::UA: return "UA";
    case LoadCase::PS: return "PS";
    case LoadCase::EB: return "EB";
  }
  return "?";
}

LoadCase parse_load_case(std::string_view text) {
  std::string up(text);
  for (auto& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (up == "UA") return LoadCase::UA;
  if (up == "PS") return LoadCase::PS;
  if (up == "EB") return LoadCase::EB;
  throw InputError("unknown load case '" + std::string(text) + "' (expected UA, PS or EB)");
}

double stretch_pow(double lambda, double alpha) { return std::exp(alpha * std::log(lambda)); }

double strain_energy(const OgdenParameters& params, const PrincipalStretchState& state) {
  double w = 0.0;
  for (const auto& t : params.terms()) {
    const double s = stretch_pow(state[0], t.alpha) + stretch_pow(state[1], t.alpha) +
                     stretch_pow(state[2], t.alpha) - 3.0;
    w += t.mu_kpa / t.alpha * s;
  }
  return w;
}

std::array<double, 3> principal_stresses(const OgdenParameters& params,
                                         const PrincipalStretchState& state, double q_kpa) {
  if (!std::isfinite(q_kpa)) throw DomainError("hydrostatic pressure must be finite");
  std::array<double, 3> sigma{};
  for (std::size_t i = 0; i < 3; ++i) {
    double s = 0.0;
    for (const auto& t : params.terms()) s += t.mu_kpa * stretch_pow(state[i], t.alpha);
    sigma[i] = s - q_kpa;
  }
  return sigma;
}

namespace {

PrincipalStretchState load_case_state(LoadCase c, double lambda) {
  switch (c) {
    case LoadCase::UA: return {lambda, 1.0 / std::sqrt(lambda), 1.0 / std::sqrt(lambda)};
    case LoadCase::PS: return {lambda, 1.0, 1.0 / lambda};
    case LoadCase::EB: return {lambda, lambda, 1.0 / (lambda * lambda)};
  }
  throw DomainError("unknown load case");
}

// Exponent multiplier of the traction-free stretch: UA l^-1/2, PS l^-1, EB l^-2.
double free_exponent(LoadCase c) {
  switch (c) {
    case LoadCase::UA: return -0.5;
    case LoadCase::PS: return -1.0;
    case LoadCase::EB: return -2.0;
  }
  return 0.0;
}

}  // namespace

double load_case_sigma1(const OgdenParameters& params, LoadCase load_case, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("stretch must be positive and finite");
  const double ln = std::log(lambda);
  const double e = free_exponent(load_case);
  double s = 0.0;
  for (const auto& t : params.terms()) {
    s += t.mu_kpa * (std::exp(t.alpha * ln) - std::exp(e * t.alpha * ln));
  }
  return s;
}

LoadCaseEvaluation load_case_stress(const OgdenParameters& params, LoadCase load_case, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("stretch must be positive and finite");
  const PrincipalStretchState state = load_case_state(load_case, lambda);

  // Direction 3 is traction-free in every case (and direction 2 as well for UA).
  double q = 0.0;
  for (const auto& t : params.terms()) q += t.mu_kpa * stretch_pow(state[2], t.alpha);

  const double s1 = load_case_sigma1(params, load_case, lambda);
  std::array<double, 3> sigma{};
  switch (load_case) {
    case LoadCase::UA:
      sigma = {s1, 0.0, 0.0};
      break;
    case LoadCase::PS: {
      double s2 = 0.0;
      for (const auto& t : params.terms()) s2 += t.mu_kpa;
      sigma = {s1, s2 - q, 0.0};
      break;
    }
    case LoadCase::EB:
      sigma = {s1, s1, 0.0};
      break;
  }
  return {state, q, sigma, load_case};
}

double young_modulus(const OgdenParameters& params) {
  double s = 0.0;
  for (const auto& t : params.terms()) s += t.mu_kpa * t.alpha;
  return (1.0 + params.nu()) * s;
}

CompositeCorrection eshelby_ratio(double phi) {
  if (!(phi >= 0.0 && phi < 0.4)) throw DomainError("particle volume fraction must lie in [0, 0.4)");
  return {phi, 1.0 / (1.0 - 2.5 * phi)};
}

}  // namespace tactile
