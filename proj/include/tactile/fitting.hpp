#pragma once

// Identification of Ogden parameters from stress-stretch curves by
// squared-error minimization over all load cases at once.

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "tactile/characterization.hpp"
#include "tactile/constitutive.hpp"

namespace tactile {

struct FitProblem {
  std::vector<StressStretchCurve> curves;
  std::size_t order = 2;
  // One weight per curve; empty means all ones.
  std::vector<double> weights;

  void validate() const;
  double weight(std::size_t curve) const { return weights.empty() ? 1.0 : weights[curve]; }
};

struct FitConfig {
  std::size_t starts = 32;
  std::uint64_t seed = 0;
  // Iteration budget for each phase (simplex exploration, then polish) of every start.
  std::size_t max_iters = 2000;
  // Relative objective decrease below which the polish phase counts as converged.
  double tol = 1e-10;

  nlohmann::json to_json() const;
};

struct FitResult {
  OgdenParameters params;
  double objective;                   // kPa^2
  std::vector<double> per_curve_rms;  // kPa, unweighted
  std::size_t iterations;
  bool converged;
  std::size_t starts_used;
  // Objective at each start's initial point, in start order.
  std::vector<double> initial_objectives;

  nlohmann::json to_json() const;
};

// Sum over curves and samples of w_c (sigma_model - sigma_exp)^2.
double objective(const OgdenParameters& params, const FitProblem& problem);

std::vector<double> per_curve_rms(const OgdenParameters& params, const FitProblem& problem);

// Multistart fit; throws NumericalError if no start yields a finite objective.
FitResult fit(const FitProblem& problem, const FitConfig& config);

// Model prediction at each experimental curve's stretches.
std::vector<StressStretchCurve> model_curves(const OgdenParameters& params, const FitProblem& problem);

// rms(model - reference) / rms(reference) over matching samples.
double relative_rms(const StressStretchCurve& model, const StressStretchCurve& reference);

namespace detail {

// Unconstrained coordinates for one sign pattern: theta = (log|mu_k|, log|alpha_k|)_k,
// with mu_k = s_k |mu_k|, alpha_k = s_k |alpha_k|, so mu_k alpha_k > 0 always.
OgdenParameters decode(std::span<const double> theta, std::span<const int> signs);

}  // namespace detail

}  // namespace tactile
