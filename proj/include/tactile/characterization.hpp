#pragma once

// Experimental stress analysis for the three characterization tests, stretch
// estimation from tracked points, and friction from an inclined-plane test.

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tactile/constitutive.hpp"

namespace tactile {

// One sample of a UA or PS tension test.
struct TensionRecord {
  double force_n;
  double lambda;
  double w0_mm;
  double h0_mm;
};

// One sample of a membrane inflation (EB) test, measured at the apex.
struct InflationRecord {
  double pressure_kpa;
  double radius_mm;
  double h0_mm;
  double lambda1;
  double lambda2;
};

struct InflationStress {
  double sigma_kpa;
  // Set when h0/r >= 0.1, where the thin-membrane formula loses validity.
  std::optional<std::string> warning;
};

enum class CurveSource { experiment, model };

struct CurveSample {
  double lambda;
  double sigma_kpa;
};

// Load-case tagged stress-stretch samples with strictly increasing stretch,
// starting at lambda >= 1.
class StressStretchCurve {
 public:
  StressStretchCurve(LoadCase load_case, std::vector<CurveSample> samples,
                     CurveSource source = CurveSource::experiment);

  LoadCase load_case() const { return load_case_; }
  CurveSource source() const { return source_; }
  std::span<const CurveSample> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

 private:
  LoadCase load_case_;
  std::vector<CurveSample> samples_;
  CurveSource source_;
};

struct FrictionMeasurement {
  double theta_rad;
  double mu0;
};

struct Point2 {
  double x;
  double y;
};

struct TrackedPointPair {
  Point2 ref;
  Point2 cur;
};

// sigma = F lambda / (w0 h0), returned in kPa.
double tension_stress(const TensionRecord& rec);

// sigma = p r / (2 h0 lambda3) with lambda3 = 1/(lambda1 lambda2).
InflationStress inflation_stress(const InflationRecord& rec);

double thickness_stretch(double lambda1, double lambda2);

// mu0 = tan(theta) for the maximum tilt angle before sliding, 0 < theta < pi/2.
FrictionMeasurement friction_from_tilt(double theta_rad);

// Least-squares affine fit cur ~ G ref + t over >= 3 non-collinear points;
// returns the singular values of G, largest first.
std::array<double, 2> principal_stretches_from_points(std::span<const TrackedPointPair> pairs);

StressStretchCurve curve_from_tension(LoadCase load_case, std::span<const TensionRecord> records);
StressStretchCurve curve_from_inflation(std::span<const InflationRecord> records,
                                        std::vector<std::string>* warnings = nullptr);

// Pointwise mean of repeat specimens after linear interpolation onto the first
// specimen's stretch grid. Grid points outside a specimen's range are dropped.
StressStretchCurve average_curves(std::span<const StressStretchCurve> specimens);

// Raw-measurement CSV ingestion.
//   UA/PS: lambda,force_n,w0_mm,h0_mm
//   EB:    pressure_kpa,radius_mm,h0_mm,lambda1,lambda2
std::vector<TensionRecord> read_tension_csv(const std::filesystem::path& path);
std::vector<InflationRecord> read_inflation_csv(const std::filesystem::path& path);

// Curve CSV: lambda,sigma_kpa with 9 significant digits.
std::string format_curve_csv(const StressStretchCurve& curve);
StressStretchCurve parse_curve_csv(std::string_view text, LoadCase load_case,
                                   const std::string& source = "<memory>");
StressStretchCurve read_curve_csv(const std::filesystem::path& path, LoadCase load_case);

// Tracked points CSV: ref_x_mm,ref_y_mm,cur_x_mm,cur_y_mm
std::vector<TrackedPointPair> read_points_csv(const std::filesystem::path& path);

}  // namespace tactile
