#pragma once

// Incompressible Ogden hyperelasticity in principal stretches.
//
// Units: stresses and moduli in kPa, stretches dimensionless. All types are
// immutable after construction and all functions are pure.

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tactile {

struct OgdenTerm {
  double mu_kpa;
  double alpha;
};

// Coefficients (mu_k, alpha_k), k = 1..K, of the Ogden strain-energy function.
// Every term must satisfy mu_k * alpha_k > kMinModulusProduct.
class OgdenParameters {
 public:
  static constexpr double kMinModulusProduct = 1e-12;

  OgdenParameters(std::vector<OgdenTerm> terms, double nu = 0.5, std::string material = {});

  std::span<const OgdenTerm> terms() const { return terms_; }
  std::size_t order() const { return terms_.size(); }
  double nu() const { return nu_; }
  const std::string& material() const { return material_; }

  // {"material": str, "terms": [{"mu_kpa": f, "alpha": f}], "nu": f}
  nlohmann::json to_json() const;
  static OgdenParameters from_json(const nlohmann::json& j);
  static OgdenParameters load(const std::filesystem::path& path);

 private:
  std::vector<OgdenTerm> terms_;
  double nu_;
  std::string material_;
};

// Principal stretches of a deformation. The incompressible factory fixes
// lambda3 = 1 / (lambda1 * lambda2).
class PrincipalStretchState {
 public:
  PrincipalStretchState(double lambda1, double lambda2, double lambda3);
  static PrincipalStretchState incompressible(double lambda1, double lambda2);

  double operator[](std::size_t i) const { return stretches_[i]; }
  const std::array<double, 3>& stretches() const { return stretches_; }
  double jacobian() const { return stretches_[0] * stretches_[1] * stretches_[2]; }

 private:
  std::array<double, 3> stretches_;
};

// Uniaxial tension, pure shear, equibiaxial tension.
enum class LoadCase { UA, PS, EB };

std::string_view to_string(LoadCase c);
LoadCase parse_load_case(std::string_view text);

struct LoadCaseEvaluation {
  PrincipalStretchState state;
  double q_kpa;                     // hydrostatic pressure fixed by the traction-free condition
  std::array<double, 3> sigma_kpa;  // principal Cauchy stresses
  LoadCase load_case;
};

struct CompositeCorrection {
  double phi;    // particle volume fraction
  double ratio;  // E_c / E
};

// lambda^alpha evaluated as exp(alpha * ln lambda); lambda must be positive.
double stretch_pow(double lambda, double alpha);

// W = sum_k mu_k/alpha_k (l1^a_k + l2^a_k + l3^a_k - 3), per unit reference volume [kPa].
double strain_energy(const OgdenParameters& params, const PrincipalStretchState& state);

// sigma_i = sum_k mu_k l_i^a_k - q.
std::array<double, 3> principal_stresses(const OgdenParameters& params,
                                         const PrincipalStretchState& state, double q_kpa);

// Stress response for a load case at loading-direction stretch `lambda`.
// Stretch states: UA (l, l^-1/2, l^-1/2), PS (l, 1, 1/l), EB (l, l, l^-2).
// The traction-free components are exactly zero.
LoadCaseEvaluation load_case_stress(const OgdenParameters& params, LoadCase load_case, double lambda);

// Loading-direction stress only; the closed form used by the fitter.
double load_case_sigma1(const OgdenParameters& params, LoadCase load_case, double lambda);

// E = (1 + nu) sum_k mu_k alpha_k [kPa].
double young_modulus(const OgdenParameters& params);

// Stiffening by rigid spherical inclusions: E_c/E = 1 / (1 - 5 phi / 2), 0 <= phi < 0.4.
CompositeCorrection eshelby_ratio(double phi);

}  // namespace tactile
