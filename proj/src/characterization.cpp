#include "tactile/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "tactile/csv.hpp"
#include "tactile/errors.hpp"

namespace tactile {

namespace {

constexpr double kNPerMm2ToKpa = 1000.0;
constexpr double kThinMembraneLimit = 0.1;
constexpr double kMaxNormalCondition = 1e8;

}  // namespace

StressStretchCurve::StressStretchCurve(LoadCase load_case, std::vector<CurveSample> samples,
                                       CurveSource source)
    : load_case_(load_case), samples_(std::move(samples)), source_(source) {
  if (samples_.empty()) throw InputError("stress-stretch curve is empty");
  if (samples_.front().lambda < 1.0) throw InputError("stress-stretch curve must start at lambda >= 1");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i].lambda) || !std::isfinite(samples_[i].sigma_kpa)) {
      throw InputError("stress-stretch curve sample " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(samples_[i].lambda > samples_[i - 1].lambda)) {
      throw InputError("stress-stretch curve stretches must be strictly increasing (sample " +
                       std::to_string(i) + ")");
    }
  }
}

double tension_stress(const TensionRecord& rec) {
  if (!(rec.w0_mm > 0.0) || !(rec.h0_mm > 0.0)) throw DomainError("reference width and thickness must be positive");
  if (!(rec.lambda > 0.0)) throw DomainError("stretch must be positive");
  return rec.force_n * rec.lambda / (rec.w0_mm * rec.h0_mm) * kNPerMm2ToKpa;
}

double thickness_stretch(double lambda1, double lambda2) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw DomainError("in-plane stretches must be positive");
  return 1.0 / (lambda1 * lambda2);
}

InflationStress inflation_stress(const InflationRecord& rec) {
  if (!(rec.pressure_kpa >= 0.0)) throw DomainError("inflation pressure must be non-negative");
  if (!(rec.radius_mm > 0.0) || !(rec.h0_mm > 0.0)) throw DomainError("radius and thickness must be positive");
  const double lambda3 = thickness_stretch(rec.lambda1, rec.lambda2);
  InflationStress out{rec.pressure_kpa * rec.radius_mm / (2.0 * rec.h0_mm * lambda3), std::nullopt};
  if (rec.h0_mm / rec.radius_mm >= kThinMembraneLimit) {
    out.warning = "h0/r = " + std::to_string(rec.h0_mm / rec.radius_mm) +
                  " >= 0.1: thin-membrane approximation is questionable";
  }
  return out;
}

FrictionMeasurement friction_from_tilt(double theta_rad) {
  if (!(theta_rad > 0.0 && theta_rad < std::numbers::pi / 2)) {
    throw DomainError("tilt angle must lie in (0, pi/2) rad");
  }
  return {theta_rad, std::tan(theta_rad)};
}

std::array<double, 2> principal_stretches_from_points(std::span<const TrackedPointPair> pairs) {
  if (pairs.size() < 3) throw DomainError("stretch estimation needs at least 3 tracked points");

  Eigen::Vector2d ref_mean = Eigen::Vector2d::Zero();
  Eigen::Vector2d cur_mean = Eigen::Vector2d::Zero();
  for (const auto& p : pairs) {
    ref_mean += Eigen::Vector2d(p.ref.x, p.ref.y);
    cur_mean += Eigen::Vector2d(p.cur.x, p.cur.y);
  }
  ref_mean /= static_cast<double>(pairs.size());
  cur_mean /= static_cast<double>(pairs.size());

  // Centering removes the translation; G = B N^-1 with N = sum r r^T, B = sum c r^T.
  Eigen::Matrix2d normal = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d cross = Eigen::Matrix2d::Zero();
  for (const auto& p : pairs) {
    const Eigen::Vector2d r = Eigen::Vector2d(p.ref.x, p.ref.y) - ref_mean;
    const Eigen::Vector2d c = Eigen::Vector2d(p.cur.x, p.cur.y) - cur_mean;
    if (!r.allFinite() || !c.allFinite()) throw DomainError("tracked point coordinates must be finite");
    normal += r * r.transpose();
    cross += c * r.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(normal);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(1);
  if (!(lo > 0.0) || hi / lo > kMaxNormalCondition) {
    throw DomainError("degenerate point geometry: reference points are (nearly) collinear");
  }
  const Eigen::Matrix2d gradient = cross * normal.inverse();
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(gradient);
  return {svd.singularValues()(0), svd.singularValues()(1)};
}

StressStretchCurve curve_from_tension(LoadCase load_case, std::span<const TensionRecord> records) {
  if (load_case == LoadCase::EB) throw InputError("EB curves come from inflation records");
  std::vector<CurveSample> samples;
  samples.reserve(records.size());
  for (const auto& r : records) samples.push_back({r.lambda, tension_stress(r)});
  return {load_case, std::move(samples)};
}

StressStretchCurve curve_from_inflation(std::span<const InflationRecord> records,
                                        std::vector<std::string>* warnings) {
  std::vector<CurveSample> samples;
  samples.reserve(records.size());
  for (const auto& r : records) {
    auto s = inflation_stress(r);
    if (s.warning && warnings) warnings->push_back(*s.warning);
    // In-plane stretches are equal for an ideal equibiaxial apex; use their mean.
    samples.push_back({0.5 * (r.lambda1 + r.lambda2), s.sigma_kpa});
  }
  return {LoadCase::EB, std::move(samples)};
}

StressStretchCurve average_curves(std::span<const StressStretchCurve> specimens) {
  if (specimens.empty()) throw InputError("no specimens to average");
  const auto& first = specimens.front();
  for (const auto& s : specimens) {
    if (s.load_case() != first.load_case()) throw InputError("cannot average curves of different load cases");
  }
  std::vector<CurveSample> out;
  for (const auto& grid_point : first.samples()) {
    const double l = grid_point.lambda;
    double sum = 0.0;
    bool inside_all = true;
    for (const auto& spec : specimens) {
      auto s = spec.samples();
      if (l < s.front().lambda || l > s.back().lambda) {
        inside_all = false;
        break;
      }
      auto hi = std::lower_bound(s.begin(), s.end(), l,
                                 [](const CurveSample& a, double v) { return a.lambda < v; });
      if (hi->lambda == l) {
        sum += hi->sigma_kpa;
      } else {
        auto lo = hi - 1;
        const double t = (l - lo->lambda) / (hi->lambda - lo->lambda);
        sum += lo->sigma_kpa + t * (hi->sigma_kpa - lo->sigma_kpa);
      }
    }
    if (inside_all) out.push_back({l, sum / static_cast<double>(specimens.size())});
  }
  return {first.load_case(), std::move(out)};
}

std::vector<TensionRecord> read_tension_csv(const std::filesystem::path& path) {
  const auto t = csv::Table::read(path);
  t.require_header({"lambda", "force_n", "w0_mm", "h0_mm"});
  std::vector<TensionRecord> out;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    out.push_back({t.number(r, 1), t.number(r, 0), t.number(r, 2), t.number(r, 3)});
  }
  return out;
}

std::vector<InflationRecord> read_inflation_csv(const std::filesystem::path& path) {
  const auto t = csv::Table::read(path);
  t.require_header({"pressure_kpa", "radius_mm", "h0_mm", "lambda1", "lambda2"});
  std::vector<InflationRecord> out;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    out.push_back({t.number(r, 0), t.number(r, 1), t.number(r, 2), t.number(r, 3), t.number(r, 4)});
  }
  return out;
}

std::string format_curve_csv(const StressStretchCurve& curve) {
  std::string s = "lambda,sigma_kpa\n";
  for (const auto& p : curve.samples()) {
    s += csv::format_sig(p.lambda, 9);
    s += ',';
    s += csv::format_sig(p.sigma_kpa, 9);
    s += '\n';
  }
  return s;
}

StressStretchCurve parse_curve_csv(std::string_view text, LoadCase load_case, const std::string& source) {
  const auto t = csv::Table::parse(text, source);
  t.require_header({"lambda", "sigma_kpa"});
  std::vector<CurveSample> samples;
  for (std::size_t r = 0; r < t.rows(); ++r) samples.push_back({t.number(r, 0), t.number(r, 1)});
  try {
    return {load_case, std::move(samples)};
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
}

StressStretchCurve read_curve_csv(const std::filesystem::path& path, LoadCase load_case) {
  const auto t = csv::Table::read(path);
  t.require_header({"lambda", "sigma_kpa"});
  std::vector<CurveSample> samples;
  for (std::size_t r = 0; r < t.rows(); ++r) samples.push_back({t.number(r, 0), t.number(r, 1)});
  try {
    return {load_case, std::move(samples)};
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<TrackedPointPair> read_points_csv(const std::filesystem::path& path) {
  const auto t = csv::Table::read(path);
  t.require_header({"ref_x_mm", "ref_y_mm", "cur_x_mm", "cur_y_mm"});
  std::vector<TrackedPointPair> out;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    out.push_back({{t.number(r, 0), t.number(r, 1)}, {t.number(r, 2), t.number(r, 3)}});
  }
  return out;
}

}  // namespace tactile
