#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tactile/errors.hpp"
#include "tactile/fitting.hpp"
#include "tactile/synth.hpp"

using namespace tactile;

namespace {

OgdenParameters ecoflex() { return OgdenParameters({{7.9652, 1.2769}, {0.3093, 3.5676}}); }

// Curves sampled from the closed form, independent of synth_curves.
std::vector<StressStretchCurve> exact_curves(const OgdenParameters& p) {
  std::vector<StressStretchCurve> out;
  for (auto [c, hi] : {std::pair{LoadCase::UA, 3.0}, {LoadCase::PS, 3.0}, {LoadCase::EB, 2.0}}) {
    std::vector<CurveSample> s;
    for (int i = 0; i < 40; ++i) {
      const double l = 1.0 + (hi - 1.0) * i / 39.0;
      double sigma = 0.0;
      for (const auto& t : p.terms()) {
        const double a = t.alpha;
        const double lat = c == LoadCase::UA ? std::pow(l, -a / 2) : c == LoadCase::PS ? std::pow(l, -a) : std::pow(l, -2 * a);
        sigma += t.mu_kpa * (std::pow(l, a) - lat);
      }
      s.push_back({l, sigma});
    }
    out.emplace_back(c, std::move(s));
  }
  return out;
}

double worst_relative_rms(const OgdenParameters& fitted, const std::vector<StressStretchCurve>& truth) {
  FitProblem prob{truth, 2, {}};
  const auto model = model_curves(fitted, prob);
  double worst = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) worst = std::max(worst, relative_rms(model[i], truth[i]));
  return worst;
}

}  // namespace

TEST_CASE("objective") {
  const auto p = ecoflex();
  FitProblem self{exact_curves(p), 2, {}};
  double scale = 0.0;
  for (const auto& c : self.curves)
    for (const auto& s : c.samples()) scale += s.sigma_kpa * s.sigma_kpa;
  CHECK(objective(p, self) <= 1e-18 * scale);

  // sigma_UA(1.5) for mu=1, alpha=2 is 2.25 - 1/1.5.
  const double model = 2.25 - 1.0 / 1.5;
  FitProblem one{{StressStretchCurve(LoadCase::UA, {{1.5, model + 2.0}})}, 1, {}};
  CHECK(objective(OgdenParameters({{1.0, 2.0}}), one) == doctest::Approx(4.0).epsilon(1e-14));
  one.weights = {3.0};
  CHECK(objective(OgdenParameters({{1.0, 2.0}}), one) == doctest::Approx(12.0).epsilon(1e-14));
}

TEST_CASE("problem validation") {
  FitProblem empty;
  CHECK_THROWS_AS(empty.validate(), InputError);
  FitProblem bad_order{exact_curves(ecoflex()), 4, {}};
  CHECK_THROWS_AS(bad_order.validate(), InputError);
  FitProblem bad_weights{exact_curves(ecoflex()), 2, {1.0}};
  CHECK_THROWS_AS(bad_weights.validate(), InputError);
}

TEST_CASE("model curves on the identity grid and against high-precision values") {
  const auto p = ecoflex();
  FitProblem ident{{StressStretchCurve(LoadCase::UA, {{1.0, 5.0}})}, 2, {}};
  CHECK(model_curves(p, ident)[0].samples()[0].sigma_kpa == doctest::Approx(0.0).epsilon(1e-15));

  FitProblem ua{{StressStretchCurve(LoadCase::UA, {{1.0, 0}, {1.5, 0}, {2.0, 0}, {2.5, 0}, {3.0, 0}})}, 2, {}};
  const auto m = model_curves(p, ua)[0];
  CHECK(m.source() == CurveSource::model);
  const double expected[] = {0.0, 8.382853908490585738, 17.76159912675024315, 29.29597882000426647,
                             43.97786897795646716};
  CHECK(std::abs(m.samples()[0].sigma_kpa) < 1e-14);
  for (int i = 1; i < 5; ++i) CHECK(testing::rel_err(m.samples()[i].sigma_kpa, expected[i]) < 1e-13);
}

TEST_CASE("single term recovery") {
  const OgdenParameters truth({{4.0, 2.5}});
  FitProblem prob{exact_curves(truth), 1, {}};
  FitConfig cfg;
  cfg.starts = 8;
  const auto r = fit(prob, cfg);
  CHECK(r.converged);
  CHECK(r.params.terms()[0].mu_kpa == doctest::Approx(4.0).epsilon(1e-5));
  CHECK(r.params.terms()[0].alpha == doctest::Approx(2.5).epsilon(1e-5));
}

TEST_CASE("round trip on noiseless curves") {
  const auto truth = exact_curves(ecoflex());
  FitProblem prob{truth, 2, {}};
  FitConfig cfg;
  cfg.seed = 3;
  const auto r = fit(prob, cfg);
  CHECK(r.converged);
  CHECK(worst_relative_rms(r.params, truth) < 0.005);
  CHECK(r.starts_used == cfg.starts);
  REQUIRE(r.initial_objectives.size() == cfg.starts);
  for (double o : r.initial_objectives) CHECK(r.objective <= o);
  CHECK(r.per_curve_rms.size() == 3);
}

TEST_CASE("noise robustness and determinism") {
  const auto p = ecoflex();
  const auto noisy = synth_curves(p, 40, 0.01, 21);
  FitProblem prob{noisy, 2, {}};
  FitConfig cfg;
  cfg.seed = 5;
  const auto a = fit(prob, cfg);
  const auto b = fit(prob, cfg);
  CHECK(a.objective == b.objective);
  CHECK(a.params.terms()[0].mu_kpa == b.params.terms()[0].mu_kpa);
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(worst_relative_rms(a.params, exact_curves(p)) < 0.02);
}

TEST_CASE("sign-pattern decoding keeps every term admissible") {
  const std::vector<double> theta{0.3, -1.0, 2.0, 0.5};
  const std::vector<int> signs{1, -1};
  const auto p = detail::decode(theta, signs);
  REQUIRE(p.order() == 2);
  CHECK(p.terms()[0].mu_kpa == doctest::Approx(std::exp(0.3)));
  CHECK(p.terms()[1].mu_kpa == doctest::Approx(-std::exp(2.0)));
  CHECK(p.terms()[1].alpha == doctest::Approx(-std::exp(0.5)));
  for (const auto& t : p.terms()) CHECK(t.mu_kpa * t.alpha > 0);
}
