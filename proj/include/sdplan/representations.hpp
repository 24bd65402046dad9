#pragma once

#include <string>

#include "sdplan/spline.hpp"

namespace sdplan {

/// Output parameterizations compared in the representation study. All of
/// them predict the same 8 anchor points; only the decoder differs.
enum class RepresentationKind { kWaypoints, kInterpolatingCubic, kBSpline };

RepresentationKind representation_from_string(const std::string& name);
std::string to_string(RepresentationKind kind);

constexpr int kAnchorCount = 8;

/// Eight 3D anchors in the robot frame. Interpreted as waypoints,
/// interpolation nodes, or B-spline control points depending on the kind.
struct AnchorSet {
  std::array<Vec3, kAnchorCount> anchors{};

  Vec3& operator[](int i) { return anchors[static_cast<size_t>(i)]; }
  const Vec3& operator[](int i) const { return anchors[static_cast<size_t>(i)]; }

  ControlPointSet as_control_points() const;
  static AnchorSet from_control_points(const ControlPointSet& cps);
};

/// Polyline through the anchors; arc lengths are exact chord sums.
Trajectory decode_waypoints(const AnchorSet& anchors);

/// Natural cubic spline through all 8 anchors (chord-length parameterized),
/// discretized to M arc-length samples. Throws on duplicate consecutive
/// anchors.
Trajectory decode_interpolating_cubic(const AnchorSet& anchors, int M);

/// Anchors as control points of a clamped cubic with N=8.
Trajectory decode_bspline(const AnchorSet& anchors, int M);

/// Decodes by kind to an M-sample arc-length trajectory (waypoint polylines
/// are resampled to M).
Trajectory decode(RepresentationKind kind, const AnchorSet& anchors, int M);

/// Natural-cubic interpolation point at a chord parameter in [0, 1]; exposed
/// for the coupling analysis and tests.
Vec3 natural_cubic_point(const AnchorSet& anchors, double t);

/// Chord parameters of the interpolation nodes.
std::vector<double> natural_cubic_node_params(const AnchorSet& anchors);

/// Dense arc-length-indexed view of a curve. Queries interpolate a dense
/// table, so two curves that agree as point sets produce bit-identical
/// positions at equal arc lengths.
class ArcCurve {
 public:
  static ArcCurve from_bspline(const SplineSpec& spec, const ControlPointSet& cps,
                               int dense = 2000);
  static ArcCurve from_natural_cubic(const AnchorSet& anchors, int dense = 2000);
  static ArcCurve from_polyline(std::vector<Vec3> points);

  double length() const { return cum_.empty() ? 0.0 : cum_.back(); }
  Vec3 at(double arc) const;

 private:
  std::vector<Vec3> pts_;
  std::vector<double> cum_;
};

/// Displacement profile between two curves at equal arc length, sampled
/// every ds up to s_max (clamped to the shorter curve).
std::vector<double> deviation_profile(const ArcCurve& a, const ArcCurve& b,
                                      double ds, double s_max);

}  // namespace sdplan
