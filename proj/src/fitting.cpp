#include "tactile/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "tactile/errors.hpp"
#include "tactile/rng.hpp"

namespace tactile {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMuLo = 0.1, kMuHi = 100.0;
constexpr double kAlphaLo = 0.5, kAlphaHi = 10.0;
constexpr double kTieTolerance = 1e-12;

struct Evaluator {
  const FitProblem& problem;
  std::vector<int> signs;

  // Residual vector sqrt(w_c) (sigma_model - sigma_exp); empty when theta is infeasible.
  bool residuals(std::span<const double> theta, Eigen::VectorXd& out) const {
    std::optional<OgdenParameters> params;
    try {
      params.emplace(detail::decode(theta, signs));
    } catch (const DomainError&) {
      return false;
    }
    std::size_t n = 0;
    for (const auto& c : problem.curves) n += c.size();
    out.resize(static_cast<Eigen::Index>(n));
    Eigen::Index i = 0;
    for (std::size_t c = 0; c < problem.curves.size(); ++c) {
      const double sw = std::sqrt(problem.weight(c));
      const auto& curve = problem.curves[c];
      for (const auto& s : curve.samples()) {
        const double r = sw * (load_case_sigma1(*params, curve.load_case(), s.lambda) - s.sigma_kpa);
        if (!std::isfinite(r)) return false;
        out(i++) = r;
      }
    }
    return true;
  }

  double value(std::span<const double> theta) const {
    Eigen::VectorXd r;
    if (!residuals(theta, r)) return kInf;
    const double f = r.squaredNorm();
    return std::isfinite(f) ? f : kInf;
  }
};

struct StartOutcome {
  std::vector<double> theta;
  double initial = kInf;
  double objective = kInf;
  std::size_t iterations = 0;
  bool converged = false;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
std::size_t nelder_mead(const Evaluator& ev, std::vector<double>& x, double& fx, std::size_t max_iters) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> simplex(n + 1, x);
  std::vector<double> f(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += 0.5;
  for (std::size_t i = 0; i <= n; ++i) f[i] = ev.value(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  std::size_t it = 0;
  for (; it < max_iters; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double size = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t d = 0; d < n; ++d) size = std::max(size, std::abs(simplex[i][d] - simplex[best][d]));
    }
    if (std::isfinite(f[worst]) && (f[worst] - f[best] <= 1e-14 * (std::abs(f[best]) + 1e-300) || size < 1e-10)) {
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / static_cast<double>(n);
    }
    auto blend = [&](double t, std::vector<double>& out) {
      for (std::size_t d = 0; d < n; ++d) out[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
    };

    blend(-1.0, trial);
    const double fr = ev.value(trial);
    if (fr < f[best]) {
      blend(-2.0, trial2);
      const double fe = ev.value(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        f[worst] = fe;
      } else {
        simplex[worst] = trial;
        f[worst] = fr;
      }
    } else if (fr < f[second]) {
      simplex[worst] = trial;
      f[worst] = fr;
    } else {
      const bool outside = fr < f[worst];
      blend(outside ? -0.5 : 0.5, trial2);
      const double fc = ev.value(trial2);
      if (fc < (outside ? fr : f[worst])) {
        simplex[worst] = trial2;
        f[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t d = 0; d < n; ++d) simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
          f[i] = ev.value(simplex[i]);
        }
      }
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  x = simplex[best];
  fx = f[best];
  return it;
}

// Levenberg-Marquardt on the residual vector with central-difference Jacobian.
// Returns true when the relative objective decrease fell below `tol`.
bool polish(const Evaluator& ev, std::vector<double>& x, double& fx, std::size_t max_iters, double tol,
            std::size_t& iterations) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd r;
  if (!ev.residuals(x, r)) return false;
  fx = r.squaredNorm();
  double damping = 1e-3;
  std::vector<double> probe(x);
  Eigen::MatrixXd jac(r.size(), n);
  Eigen::VectorXd rp, rm;

  for (std::size_t it = 0; it < max_iters; ++it) {
    ++iterations;
    if (fx == 0.0) return true;
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const double h = 1e-6 * std::max(1.0, std::abs(x[ju]));
      probe = x;
      probe[ju] = x[ju] + h;
      const bool ok_p = ev.residuals(probe, rp);
      probe[ju] = x[ju] - h;
      const bool ok_m = ev.residuals(probe, rm);
      if (!ok_p || !ok_m) return false;
      jac.col(j) = (rp - rm) / (2.0 * h);
    }
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = a;
      for (Eigen::Index d = 0; d < n; ++d) damped(d, d) += damping * std::max(a(d, d), 1e-300);
      const Eigen::VectorXd step = damped.ldlt().solve(-g);
      for (Eigen::Index d = 0; d < n; ++d) probe[static_cast<std::size_t>(d)] = x[static_cast<std::size_t>(d)] + step(d);
      Eigen::VectorXd rn;
      const double fn = ev.residuals(probe, rn) ? rn.squaredNorm() : kInf;
      if (std::isfinite(fn) && fn < fx) {
        const double decrease = (fx - fn) / fx;
        x = probe;
        fx = fn;
        r = std::move(rn);
        damping = std::max(damping / 10.0, 1e-15);
        accepted = true;
        if (decrease < tol) return true;
      } else {
        damping *= 10.0;
        // No step decreases the objective any more: stationary to working precision.
        if (damping > 1e12) return true;
      }
    }
  }
  return false;
}

std::vector<std::pair<double, double>> sorted_terms(const OgdenParameters& p) {
  std::vector<std::pair<double, double>> key;
  for (const auto& t : p.terms()) key.emplace_back(t.alpha, t.mu_kpa);
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace

namespace detail {

OgdenParameters decode(std::span<const double> theta, std::span<const int> signs) {
  std::vector<OgdenTerm> terms;
  for (std::size_t k = 0; k < signs.size(); ++k) {
    const double s = signs[k];
    terms.push_back({s * std::exp(theta[2 * k]), s * std::exp(theta[2 * k + 1])});
  }
  return OgdenParameters(std::move(terms));
}

}  // namespace detail

void FitProblem::validate() const {
  if (curves.empty()) throw InputError("fit needs at least one curve");
  if (order < 1 || order > 3) throw InputError("model order must be 1, 2 or 3");
  if (!weights.empty() && weights.size() != curves.size()) throw InputError("one weight per curve required");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("curve weights must be finite and non-negative");
  }
}

nlohmann::json FitConfig::to_json() const {
  return {{"starts", starts}, {"seed", seed}, {"max_iters", max_iters}, {"tol", tol}};
}

nlohmann::json FitResult::to_json() const {
  return {{"params", params.to_json()},
          {"objective_kpa2", objective},
          {"per_curve_rms_kpa", per_curve_rms},
          {"iterations", iterations},
          {"converged", converged},
          {"starts_used", starts_used},
          {"young_modulus_kpa", young_modulus(params)}};
}

double objective(const OgdenParameters& params, const FitProblem& problem) {
  double f = 0.0;
  for (std::size_t c = 0; c < problem.curves.size(); ++c) {
    const auto& curve = problem.curves[c];
    double sum = 0.0;
    for (const auto& s : curve.samples()) {
      const double d = load_case_sigma1(params, curve.load_case(), s.lambda) - s.sigma_kpa;
      sum += d * d;
    }
    f += problem.weight(c) * sum;
  }
  return f;
}

std::vector<double> per_curve_rms(const OgdenParameters& params, const FitProblem& problem) {
  std::vector<double> out;
  for (const auto& curve : problem.curves) {
    double sum = 0.0;
    for (const auto& s : curve.samples()) {
      const double d = load_case_sigma1(params, curve.load_case(), s.lambda) - s.sigma_kpa;
      sum += d * d;
    }
    out.push_back(std::sqrt(sum / static_cast<double>(curve.size())));
  }
  return out;
}

std::vector<StressStretchCurve> model_curves(const OgdenParameters& params, const FitProblem& problem) {
  std::vector<StressStretchCurve> out;
  for (const auto& curve : problem.curves) {
    std::vector<CurveSample> samples;
    for (const auto& s : curve.samples()) {
      samples.push_back({s.lambda, load_case_sigma1(params, curve.load_case(), s.lambda)});
    }
    out.emplace_back(curve.load_case(), std::move(samples), CurveSource::model);
  }
  return out;
}

double relative_rms(const StressStretchCurve& model, const StressStretchCurve& reference) {
  if (model.size() != reference.size()) throw InputError("curves differ in sample count");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double d = model.samples()[i].sigma_kpa - reference.samples()[i].sigma_kpa;
    num += d * d;
    den += reference.samples()[i].sigma_kpa * reference.samples()[i].sigma_kpa;
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
  return std::sqrt(num / den);
}

FitResult fit(const FitProblem& problem, const FitConfig& config) {
  problem.validate();
  if (config.starts == 0) throw InputError("fit needs at least one start");
  const std::size_t k = problem.order;
  const std::size_t patterns = std::size_t{1} << k;

  std::vector<StartOutcome> outcomes(config.starts);
  const auto starts = static_cast<long>(config.starts);
#pragma omp parallel for schedule(dynamic, 1)
  for (long s = 0; s < starts; ++s) {
    const auto su = static_cast<std::size_t>(s);
    Rng rng(derive_seed(config.seed, "fit/start/" + std::to_string(su)));
    Evaluator ev{problem, std::vector<int>(k)};
    for (std::size_t t = 0; t < k; ++t) ev.signs[t] = ((su % patterns) >> t) & 1U ? -1 : 1;

    StartOutcome& out = outcomes[su];
    out.theta.resize(2 * k);
    for (std::size_t t = 0; t < k; ++t) {
      out.theta[2 * t] = std::log(rng.log_uniform(kMuLo, kMuHi));
      out.theta[2 * t + 1] = std::log(rng.log_uniform(kAlphaLo, kAlphaHi));
    }
    out.initial = ev.value(out.theta);
    double f = out.initial;
    out.iterations = nelder_mead(ev, out.theta, f, config.max_iters);
    out.objective = f;
    if (std::isfinite(f)) {
      std::vector<double> theta = out.theta;
      double fp = f;
      std::size_t polish_iters = 0;
      const bool conv = polish(ev, theta, fp, config.max_iters, config.tol, polish_iters);
      out.iterations += polish_iters;
      if (std::isfinite(fp) && fp <= f) {
        out.theta = std::move(theta);
        out.objective = fp;
      }
      out.converged = conv;
    }
  }

  // Deterministic reduction: lowest objective, ties broken by sorted (alpha, mu).
  std::optional<std::size_t> best;
  std::optional<OgdenParameters> best_params;
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    if (!std::isfinite(outcomes[s].objective)) continue;
    std::vector<int> signs(k);
    for (std::size_t t = 0; t < k; ++t) signs[t] = ((s % patterns) >> t) & 1U ? -1 : 1;
    OgdenParameters p = detail::decode(outcomes[s].theta, signs);
    if (!best) {
      best = s;
      best_params.emplace(std::move(p));
      continue;
    }
    const double fb = outcomes[*best].objective;
    const double fs = outcomes[s].objective;
    const double scale = std::max({std::abs(fb), std::abs(fs), 1e-300});
    if (std::abs(fs - fb) <= kTieTolerance * scale) {
      if (sorted_terms(p) < sorted_terms(*best_params)) {
        best = s;
        best_params.emplace(std::move(p));
      }
    } else if (fs < fb) {
      best = s;
      best_params.emplace(std::move(p));
    }
  }
  if (!best) {
    throw NumericalError("all " + std::to_string(config.starts) +
                         " starts produced a non-finite objective; check curve units and stretches");
  }

  std::vector<double> initial;
  for (const auto& o : outcomes) initial.push_back(o.initial);
  const auto& o = outcomes[*best];
  return FitResult{*best_params,    objective(*best_params, problem), per_curve_rms(*best_params, problem),
                   o.iterations,    o.converged,                      config.starts,
                   std::move(initial)};
}

}  // namespace tactile
