#pragma once

#include <Eigen/Core>
#include <array>
#include <span>
#include <utility>
#include <vector>

namespace sdplan {

using Vec3 = Eigen::Vector3d;
using KnotVector = std::vector<double>;

/// Clamped B-spline definition: degree, control count and knot vector.
/// The parameter domain is [knots[degree], knots[control_count]],
/// normalized to [0, 1] by make_clamped_uniform_knots.
struct SplineSpec {
  int degree = 3;
  int control_count = 8;
  KnotVector knots;

  static SplineSpec clamped_uniform(int degree, int control_count);

  double domain_start() const { return knots[degree]; }
  double domain_end() const { return knots[control_count]; }
  bool operator==(const SplineSpec&) const = default;
};

/// Ordered control points Q[0..N-1] in meters (robot frame for plans).
struct ControlPointSet {
  std::vector<Vec3> points;

  int size() const { return static_cast<int>(points.size()); }
  Vec3& operator[](int i) { return points[static_cast<size_t>(i)]; }
  const Vec3& operator[](int i) const { return points[static_cast<size_t>(i)]; }
};

struct TrajectorySample {
  double arc_length = 0.0;
  Vec3 position = Vec3::Zero();
};

/// Curve discretized equidistantly in arc length. source_param holds the
/// spline parameter of each sample when one exists (empty for polylines).
struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<double> source_param;
  bool degenerate = false;

  int size() const { return static_cast<int>(samples.size()); }
  double total_length() const {
    return samples.empty() ? 0.0 : samples.back().arc_length;
  }
};

/// Knots of length N+p+1: first/last p+1 entries repeated, uniform interior,
/// domain normalized to [0, 1]. Throws std::invalid_argument if N < p+1.
KnotVector make_clamped_uniform_knots(int degree, int control_count);

/// Index k of the knot span containing u, with the convention that the
/// domain end maps into the last non-empty span.
int find_span(const SplineSpec& spec, double u);

/// The p+1 non-vanishing basis values B_{span-p..span,p}(u).
std::array<double, 8> basis_row(const SplineSpec& spec, int span, double u);

/// Single basis value B_{i,p}(u). Throws std::domain_error for u outside
/// the domain and std::out_of_range for a bad index.
double basis(const SplineSpec& spec, int i, double u);

/// Curve point at u (basis-weighted control-point sum).
Vec3 evaluate(const SplineSpec& spec, const ControlPointSet& cps, double u);

/// Analytic curve derivative of the given order (1 or 2).
Vec3 derivative(const SplineSpec& spec, const ControlPointSet& cps, double u,
                int order);

struct FitResult {
  ControlPointSet control_points;
  double rms = 0.0;
};

/// Least-squares clamped-spline fit of ordered samples: chord-length
/// parameterization, hard endpoint equality, Tikhonov fallback for
/// ill-conditioned systems. Throws if fewer than N samples are given.
FitResult fit_least_squares(const SplineSpec& spec,
                            std::span<const Vec3> samples);

/// Same fit at caller-provided sample parameters (non-decreasing, in the
/// spline domain). Least-squares fitting is parameterization-dependent;
/// this overload pins it when the caller knows the right one.
FitResult fit_least_squares(const SplineSpec& spec,
                            std::span<const Vec3> samples,
                            std::span<const double> params);

/// M samples equidistant in arc length over the whole domain. A curve of
/// total length below 1e-9 m comes back flagged degenerate.
Trajectory discretize_arclength(const SplineSpec& spec,
                                const ControlPointSet& cps, int M);

struct DeviationBound {
  double max_path_deviation = 0.0;
  double max_cp_error = 0.0;
};

/// Max curve deviation over dense parameter samples and max control-point
/// displacement between two sets sharing a spec.
DeviationBound deviation_bound(const SplineSpec& spec,
                               const ControlPointSet& clean,
                               const ControlPointSet& perturbed,
                               int dense_samples);

/// Parameter interval [u_i, u_{i+p+1}] ^ domain outside which moving Q_i
/// provably leaves the curve unchanged.
std::pair<double, double> local_support_range(const SplineSpec& spec, int i);

/// Resamples any trajectory's polyline to M points equidistant in arc
/// length (used for waypoint decoding and critic discretization).
Trajectory resample_arclength(const Trajectory& traj, int M);

}  // namespace sdplan
