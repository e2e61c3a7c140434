#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "support.hpp"
#include "tactile/constitutive.hpp"
#include "tactile/errors.hpp"

using namespace tactile;
using testing::rel_err;

namespace {

OgdenParameters ecoflex() { return OgdenParameters({{7.9652, 1.2769}, {0.3093, 3.5676}}, 0.5, "Ecoflex GEL"); }

OgdenParameters random_params(Rng& rng) {
  const std::size_t k = 1 + rng.below(3);
  std::vector<OgdenTerm> terms;
  for (std::size_t i = 0; i < k; ++i) {
    const double s = rng.bernoulli(0.5) ? 1.0 : -1.0;
    terms.push_back({s * rng.log_uniform(0.1, 100.0), s * rng.log_uniform(0.5, 10.0)});
  }
  return OgdenParameters(terms);
}

PrincipalStretchState path_state(LoadCase c, double l) {
  switch (c) {
    case LoadCase::UA: return {l, 1.0 / std::sqrt(l), 1.0 / std::sqrt(l)};
    case LoadCase::PS: return {l, 1.0, 1.0 / l};
    case LoadCase::EB: return {l, l, 1.0 / (l * l)};
  }
  return {1, 1, 1};
}

// Number of stretched directions doing work along the path.
double path_factor(LoadCase c) { return c == LoadCase::EB ? 0.5 : 1.0; }

}  // namespace

TEST_CASE("parameter invariants") {
  CHECK_THROWS_AS(OgdenParameters({}), DomainError);
  CHECK_THROWS_AS(OgdenParameters({{1.0, -2.0}}), DomainError);
  CHECK_THROWS_AS(OgdenParameters({{0.0, 2.0}}), DomainError);
  CHECK_THROWS_AS(OgdenParameters({{1.0, 2.0}}, 0.6), DomainError);
  CHECK_NOTHROW(OgdenParameters({{-0.002, -8.2915}}));
  CHECK_THROWS_AS(PrincipalStretchState(1.0, -1.0, 1.0), DomainError);
  const auto s = PrincipalStretchState::incompressible(1.7, 0.6);
  CHECK(std::abs(s.jacobian() - 1.0) <= 1e-12);
}

TEST_CASE("strain energy") {
  const auto p = ecoflex();
  CHECK(strain_energy(p, {1, 1, 1}) == 0.0);
  // 40-digit evaluation of the energy sum at (2, 1/sqrt2, 1/sqrt2).
  const double w = strain_energy(p, {2.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
  CHECK(rel_err(w, 5.234524084945656985862421) < 1e-13);

  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto q = random_params(rng);
    const double l1 = rng.uniform(0.5, 3.0), l2 = rng.uniform(0.5, 3.0);
    const auto a = PrincipalStretchState::incompressible(l1, l2);
    const auto b = PrincipalStretchState(l2, l1, a[2]);
    CHECK(strain_energy(q, a) == doctest::Approx(strain_energy(q, b)).epsilon(1e-14));
    CHECK(strain_energy(q, a) >= -1e-12);
  }
}

TEST_CASE("principal stresses") {
  const auto p = ecoflex();
  const double sum_mu = 7.9652 + 0.3093;
  const auto z = principal_stresses(p, {1, 1, 1}, sum_mu);
  for (double v : z) CHECK(std::abs(v) < 1e-14);

  const PrincipalStretchState s(1.3, 0.9, 1.0 / (1.3 * 0.9));
  const auto a = principal_stresses(p, s, 2.0);
  const auto b = principal_stresses(p, s, 2.0 + 1.5);
  for (int i = 0; i < 3; ++i) CHECK(b[i] == doctest::Approx(a[i] - 1.5).epsilon(1e-14));

  const double l = 1.5;
  const PrincipalStretchState ua(l, 1.0 / std::sqrt(l), 1.0 / std::sqrt(l));
  double q = 0.0;
  for (const auto& t : p.terms()) q += t.mu_kpa * std::pow(1.0 / std::sqrt(l), t.alpha);
  const auto sig = principal_stresses(p, ua, q);
  CHECK(std::abs(sig[1]) < 1e-12);
  CHECK(rel_err(sig[0], load_case_stress(p, LoadCase::UA, l).sigma_kpa[0]) < 1e-12);
}

TEST_CASE("load case stress closed forms and traction-free components") {
  const auto p = ecoflex();
  for (auto c : {LoadCase::UA, LoadCase::PS, LoadCase::EB}) {
    CHECK(load_case_stress(p, c, 1.0).sigma_kpa[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK_THROWS_AS(load_case_stress(p, c, 0.0), DomainError);
    CHECK_THROWS_AS(load_case_stress(p, c, -1.0), DomainError);
    for (double l : {0.7, 1.2, 2.0, 3.0}) {
      const auto ev = load_case_stress(p, c, l);
      CHECK(ev.sigma_kpa[2] == 0.0);
      if (c == LoadCase::UA) CHECK(ev.sigma_kpa[1] == 0.0);
      const auto again = principal_stresses(p, ev.state, ev.q_kpa);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(again[i] - ev.sigma_kpa[i]) <= 1e-12 * std::max(1.0, std::abs(ev.q_kpa)));
      CHECK(ev.sigma_kpa[0] == doctest::Approx(load_case_sigma1(p, c, l)).epsilon(1e-13));
    }
  }
  // 40-digit evaluations of the closed forms on the UA/PS/EB paths.
  struct Row {
    double l, ua, ps, eb;
  };
  const Row rows[] = {{1.5, 8.382853908490585738, 9.862442801357702527, 11.83620662795427092},
                      {2.0, 17.76159912675024315, 19.65511549214448439, 21.60957122205360586},
                      {2.5, 29.29597882000426647, 31.30986915225079149, 33.02604402148469999},
                      {3.0, 43.97786897795646716, 46.00647407752361705, 47.48951733561018565}};
  for (const auto& r : rows) {
    CHECK(rel_err(load_case_sigma1(p, LoadCase::UA, r.l), r.ua) < 1e-13);
    CHECK(rel_err(load_case_sigma1(p, LoadCase::PS, r.l), r.ps) < 1e-13);
    CHECK(rel_err(load_case_sigma1(p, LoadCase::EB, r.l), r.eb) < 1e-13);
  }
}

TEST_CASE("energy consistency along each load path") {
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    const auto p = i == 0 ? ecoflex() : random_params(rng);
    for (auto c : {LoadCase::UA, LoadCase::PS, LoadCase::EB}) {
      for (double l : {1.1, 1.7, 2.4, 3.0}) {
        const double h = 1e-5 * l;
        const double dw = (strain_energy(p, path_state(c, l + h)) - strain_energy(p, path_state(c, l - h))) / (2 * h);
        const double sigma = load_case_sigma1(p, c, l);
        CHECK(rel_err(sigma, path_factor(c) * l * dw) < 1e-6);
      }
    }
  }
}

TEST_CASE("small-strain slopes are E, 4E/3 and 2E") {
  const auto p = ecoflex();
  const double e = young_modulus(p);
  const double h = 1e-6;
  auto slope = [&](LoadCase c) { return (load_case_sigma1(p, c, 1 + h) - load_case_sigma1(p, c, 1 - h)) / (2 * h); };
  CHECK(rel_err(slope(LoadCase::UA), e) < 1e-4);
  CHECK(rel_err(slope(LoadCase::PS), 4.0 / 3.0 * e) < 1e-4);
  CHECK(rel_err(slope(LoadCase::EB), 2.0 * e) < 1e-4);
}

TEST_CASE("uniaxial stress is increasing for the bundled materials") {
  for (const auto& p : {ecoflex(), OgdenParameters({{85.1168, 2.8991}, {-0.0020, -8.2915}})}) {
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
      const double s = load_case_sigma1(p, LoadCase::UA, 1.0 + 2.0 * i / 200.0);
      CHECK(s > prev);
      prev = s;
    }
  }
}

TEST_CASE("young modulus and composite correction") {
  CHECK(young_modulus(OgdenParameters({{1.0, 2.0}})) == doctest::Approx(3.0));
  CHECK(std::abs(young_modulus(ecoflex()) - 16.9) <= 0.05);
  CHECK(eshelby_ratio(0.0).ratio == 1.0);
  CHECK(eshelby_ratio(0.2).ratio == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(eshelby_ratio(0.0196).ratio - 1.0515) <= 0.0005);
  CHECK_THROWS_AS(eshelby_ratio(0.4), DomainError);
  CHECK_THROWS_AS(eshelby_ratio(-0.01), DomainError);
}

TEST_CASE("bundled material files") {
  const std::filesystem::path dir = TACTILE_DATA_DIR;
  const auto eco = OgdenParameters::load(dir / "materials" / "ecoflex_gel.json");
  const auto ela = OgdenParameters::load(dir / "materials" / "elastosil_25_1.json");
  CHECK(eco.material() == "Ecoflex GEL");
  CHECK(std::abs(young_modulus(eco) - 16.9) <= 0.05);
  CHECK(std::abs(young_modulus(ela) - 370.2) <= 0.5);
  const auto back = OgdenParameters::from_json(eco.to_json());
  CHECK(back.order() == 2);
  CHECK(back.terms()[1].alpha == eco.terms()[1].alpha);
}

TEST_CASE("load case names") {
  CHECK(parse_load_case("ua") == LoadCase::UA);
  CHECK(parse_load_case("EB") == LoadCase::EB);
  CHECK(to_string(LoadCase::PS) == "PS");
  CHECK_THROWS_AS(parse_load_case("XX"), InputError);
}
