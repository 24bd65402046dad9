#include "sdplan/representations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdplan {

namespace {

struct NaturalCubic {
  std::vector<double> t;           // chord parameters, ascending in [0, 1]
  std::vector<Vec3> y;             // nodes
  std::vector<Vec3> second_deriv;  // M_i, natural: zero at both ends
};

NaturalCubic build_natural_cubic(const AnchorSet& anchors) {
  const int n = kAnchorCount;
  NaturalCubic spline;
  spline.t.resize(static_cast<size_t>(n), 0.0);
  spline.y.assign(anchors.anchors.begin(), anchors.anchors.end());
  double total = 0.0;
  for (int i = 1; i < n; ++i) {
    const double d = (anchors[i] - anchors[i - 1]).norm();
    if (d < 1e-12) {
      throw std::invalid_argument(
          "duplicate consecutive anchors make the interpolation node degenerate");
    }
    total += d;
    spline.t[static_cast<size_t>(i)] = total;
  }
  for (auto& v : spline.t) v /= total;

  // Tridiagonal system for interior second derivatives (Thomas algorithm).
  spline.second_deriv.assign(static_cast<size_t>(n), Vec3::Zero());
  const int m = n - 2;
  std::vector<double> diag(static_cast<size_t>(m));
  std::vector<double> upper(static_cast<size_t>(m));
  std::vector<Vec3> rhs(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double h0 = spline.t[static_cast<size_t>(i + 1)] - spline.t[static_cast<size_t>(i)];
    const double h1 = spline.t[static_cast<size_t>(i + 2)] - spline.t[static_cast<size_t>(i + 1)];
    diag[static_cast<size_t>(i)] = 2.0 * (h0 + h1);
    upper[static_cast<size_t>(i)] = h1;
    rhs[static_cast<size_t>(i)] =
        6.0 * ((spline.y[static_cast<size_t>(i + 2)] - spline.y[static_cast<size_t>(i + 1)]) / h1 -
               (spline.y[static_cast<size_t>(i + 1)] - spline.y[static_cast<size_t>(i)]) / h0);
  }
  for (int i = 1; i < m; ++i) {
    const double h0 = spline.t[static_cast<size_t>(i + 1)] - spline.t[static_cast<size_t>(i)];
    const double w = h0 / diag[static_cast<size_t>(i - 1)];
    diag[static_cast<size_t>(i)] -= w * upper[static_cast<size_t>(i - 1)];
    rhs[static_cast<size_t>(i)] -= w * rhs[static_cast<size_t>(i - 1)];
  }
  for (int i = m - 1; i >= 0; --i) {
    Vec3 v = rhs[static_cast<size_t>(i)];
    if (i + 1 < m) {
      v -= upper[static_cast<size_t>(i)] * spline.second_deriv[static_cast<size_t>(i + 2)];
    }
    spline.second_deriv[static_cast<size_t>(i + 1)] = v / diag[static_cast<size_t>(i)];
  }
  return spline;
}

Vec3 eval_natural_cubic(const NaturalCubic& s, double t) {
  const int n = static_cast<int>(s.t.size());
  int i = 0;
  while (i + 2 < n && s.t[static_cast<size_t>(i + 1)] < t) ++i;
  const double h = s.t[static_cast<size_t>(i + 1)] - s.t[static_cast<size_t>(i)];
  const double a = (s.t[static_cast<size_t>(i + 1)] - t) / h;
  const double b = (t - s.t[static_cast<size_t>(i)]) / h;
  return a * s.y[static_cast<size_t>(i)] + b * s.y[static_cast<size_t>(i + 1)] +
         ((a * a * a - a) * s.second_deriv[static_cast<size_t>(i)] +
          (b * b * b - b) * s.second_deriv[static_cast<size_t>(i + 1)]) *
             (h * h) / 6.0;
}

}  // namespace

RepresentationKind representation_from_string(const std::string& name) {
  if (name == "waypoints") return RepresentationKind::kWaypoints;
  if (name == "cubic") return RepresentationKind::kInterpolatingCubic;
  if (name == "bspline") return RepresentationKind::kBSpline;
  throw std::invalid_argument("unknown representation: " + name);
}

std::string to_string(RepresentationKind kind) {
  switch (kind) {
    case RepresentationKind::kWaypoints: return "waypoints";
    case RepresentationKind::kInterpolatingCubic: return "cubic";
    case RepresentationKind::kBSpline: return "bspline";
  }
  return "?";
}

ControlPointSet AnchorSet::as_control_points() const {
  ControlPointSet cps;
  cps.points.assign(anchors.begin(), anchors.end());
  return cps;
}

AnchorSet AnchorSet::from_control_points(const ControlPointSet& cps) {
  if (cps.size() != kAnchorCount) {
    throw std::invalid_argument("anchor sets carry exactly 8 points");
  }
  AnchorSet set;
  for (int i = 0; i < kAnchorCount; ++i) set[i] = cps[i];
  return set;
}

Trajectory decode_waypoints(const AnchorSet& anchors) {
  Trajectory traj;
  traj.samples.resize(kAnchorCount);
  traj.samples[0] = {0.0, anchors[0]};
  for (int i = 1; i < kAnchorCount; ++i) {
    traj.samples[static_cast<size_t>(i)].position = anchors[i];
    traj.samples[static_cast<size_t>(i)].arc_length =
        traj.samples[static_cast<size_t>(i - 1)].arc_length +
        (anchors[i] - anchors[i - 1]).norm();
  }
  traj.degenerate = traj.total_length() < 1e-9;
  return traj;
}

Trajectory decode_interpolating_cubic(const AnchorSet& anchors, int M) {
  if (M < 2) throw std::invalid_argument("need at least 2 samples");
  const NaturalCubic s = build_natural_cubic(anchors);

  // Dense chord-parameter sweep, then arc-length resampling.
  constexpr int kDense = 1000;
  Trajectory dense;
  dense.samples.resize(kDense + 1);
  dense.samples[0] = {0.0, eval_natural_cubic(s, 0.0)};
  for (int k = 1; k <= kDense; ++k) {
    const Vec3 p = eval_natural_cubic(s, static_cast<double>(k) / kDense);
    dense.samples[static_cast<size_t>(k)].position = p;
    dense.samples[static_cast<size_t>(k)].arc_length =
        dense.samples[static_cast<size_t>(k - 1)].arc_length +
        (p - dense.samples[static_cast<size_t>(k - 1)].position).norm();
  }
  return resample_arclength(dense, M);
}

Trajectory decode_bspline(const AnchorSet& anchors, int M) {
  static const SplineSpec spec = SplineSpec::clamped_uniform(3, kAnchorCount);
  return discretize_arclength(spec, anchors.as_control_points(), M);
}

Trajectory decode(RepresentationKind kind, const AnchorSet& anchors, int M) {
  switch (kind) {
    case RepresentationKind::kWaypoints:
      return resample_arclength(decode_waypoints(anchors), M);
    case RepresentationKind::kInterpolatingCubic:
      return decode_interpolating_cubic(anchors, M);
    case RepresentationKind::kBSpline:
      return decode_bspline(anchors, M);
  }
  throw std::logic_error("unreachable");
}

Vec3 natural_cubic_point(const AnchorSet& anchors, double t) {
  return eval_natural_cubic(build_natural_cubic(anchors), t);
}

std::vector<double> natural_cubic_node_params(const AnchorSet& anchors) {
  return build_natural_cubic(anchors).t;
}

ArcCurve ArcCurve::from_bspline(const SplineSpec& spec, const ControlPointSet& cps,
                                int dense) {
  std::vector<Vec3> pts(static_cast<size_t>(dense + 1));
  const double u0 = spec.domain_start();
  const double u1 = spec.domain_end();
  for (int k = 0; k <= dense; ++k) {
    pts[static_cast<size_t>(k)] = evaluate(spec, cps, u0 + (u1 - u0) * k / dense);
  }
  return from_polyline(std::move(pts));
}

ArcCurve ArcCurve::from_natural_cubic(const AnchorSet& anchors, int dense) {
  const NaturalCubic s = build_natural_cubic(anchors);
  std::vector<Vec3> pts(static_cast<size_t>(dense + 1));
  for (int k = 0; k <= dense; ++k) {
    pts[static_cast<size_t>(k)] = eval_natural_cubic(s, static_cast<double>(k) / dense);
  }
  return from_polyline(std::move(pts));
}

ArcCurve ArcCurve::from_polyline(std::vector<Vec3> points) {
  if (points.empty()) throw std::invalid_argument("empty polyline");
  ArcCurve curve;
  curve.pts_ = std::move(points);
  curve.cum_.resize(curve.pts_.size(), 0.0);
  for (size_t k = 1; k < curve.pts_.size(); ++k) {
    curve.cum_[k] = curve.cum_[k - 1] + (curve.pts_[k] - curve.pts_[k - 1]).norm();
  }
  return curve;
}

Vec3 ArcCurve::at(double arc) const {
  if (pts_.size() == 1 || arc <= 0.0) return pts_.front();
  if (arc >= cum_.back()) return pts_.back();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), arc);
  const size_t hi = static_cast<size_t>(it - cum_.begin());
  const size_t lo = hi - 1;
  const double seg = cum_[hi] - cum_[lo];
  const double frac = seg > 0.0 ? (arc - cum_[lo]) / seg : 0.0;
  return pts_[lo] + frac * (pts_[hi] - pts_[lo]);
}

std::vector<double> deviation_profile(const ArcCurve& a, const ArcCurve& b,
                                      double ds, double s_max) {
  const double limit = std::min({s_max, a.length(), b.length()});
  std::vector<double> out;
  for (double s = 0.0; s <= limit + 1e-12; s += ds) {
    out.push_back((a.at(s) - b.at(s)).norm());
  }
  return out;
}

}  // namespace sdplan
