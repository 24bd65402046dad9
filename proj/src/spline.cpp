#include "sdplan/spline.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdplan {

namespace {

constexpr double kDegenerateLength = 1e-9;

void check_domain(const SplineSpec& spec, double u) {
  if (!(u >= spec.domain_start() && u <= spec.domain_end())) {
    throw std::domain_error("spline parameter outside [u_p, u_N]");
  }
}

void check_spec(const SplineSpec& spec) {
  if (spec.degree < 1 || spec.degree > 7) {
    throw std::invalid_argument("spline degree must be in [1, 7]");
  }
  if (spec.control_count < spec.degree + 1) {
    throw std::invalid_argument("control_count must be at least degree+1");
  }
  if (static_cast<int>(spec.knots.size()) != spec.control_count + spec.degree + 1) {
    throw std::invalid_argument("knot count must equal N+p+1");
  }
}

// Basis derivatives up to order n at span k (NURBS-book DersBasisFuns).
// ders[d][j] = d-th derivative of B_{span-p+j,p}(u).
void ders_basis_row(const SplineSpec& spec, int span, double u, int n,
                    double ders[3][8]) {
  const int p = spec.degree;
  const KnotVector& U = spec.knots;
  double ndu[8][8];
  double left[8];
  double right[8];
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - U[span + 1 - j];
    right[j] = U[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];

  double a[2][8];
  for (int r = 0; r <= p; ++r) {
    int s1 = 0;
    int s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= n; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j <= p; ++j) ders[k][j] *= factor;
    factor *= (p - k);
  }
}

}  // namespace

SplineSpec SplineSpec::clamped_uniform(int degree, int control_count) {
  SplineSpec spec;
  spec.degree = degree;
  spec.control_count = control_count;
  spec.knots = make_clamped_uniform_knots(degree, control_count);
  return spec;
}

KnotVector make_clamped_uniform_knots(int degree, int control_count) {
  const int p = degree;
  const int N = control_count;
  if (p < 1) throw std::invalid_argument("degree must be >= 1");
  if (N < p + 1) {
    throw std::invalid_argument("need at least degree+1 control points");
  }
  KnotVector knots(static_cast<size_t>(N + p + 1));
  const int spans = N - p;  // interior spans after clamping
  for (int i = 0; i <= p; ++i) {
    knots[static_cast<size_t>(i)] = 0.0;
    knots[static_cast<size_t>(N + i)] = 1.0;
  }
  for (int i = 1; i < spans; ++i) {
    knots[static_cast<size_t>(p + i)] = static_cast<double>(i) / spans;
  }
  return knots;
}

int find_span(const SplineSpec& spec, double u) {
  const int p = spec.degree;
  const int N = spec.control_count;
  if (u >= spec.domain_end()) return N - 1;
  int lo = p;
  int hi = N;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (u < spec.knots[static_cast<size_t>(mid)]) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

std::array<double, 8> basis_row(const SplineSpec& spec, int span, double u) {
  const int p = spec.degree;
  const KnotVector& U = spec.knots;
  std::array<double, 8> row{};
  double left[8];
  double right[8];
  row[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - U[static_cast<size_t>(span + 1 - j)];
    right[j] = U[static_cast<size_t>(span + j)] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = row[static_cast<size_t>(r)] / (right[r + 1] + left[j - r]);
      row[static_cast<size_t>(r)] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    row[static_cast<size_t>(j)] = saved;
  }
  return row;
}

double basis(const SplineSpec& spec, int i, double u) {
  check_spec(spec);
  if (i < 0 || i >= spec.control_count) {
    throw std::out_of_range("basis index outside [0, N)");
  }
  check_domain(spec, u);
  const int span = find_span(spec, u);
  if (i < span - spec.degree || i > span) return 0.0;
  const auto row = basis_row(spec, span, u);
  return row[static_cast<size_t>(i - (span - spec.degree))];
}

Vec3 evaluate(const SplineSpec& spec, const ControlPointSet& cps, double u) {
  check_spec(spec);
  if (cps.size() != spec.control_count) {
    throw std::invalid_argument("control point count does not match spec");
  }
  check_domain(spec, u);
  const int p = spec.degree;
  const int span = find_span(spec, u);
  const auto row = basis_row(spec, span, u);
  Vec3 out = Vec3::Zero();
  for (int j = 0; j <= p; ++j) {
    out += row[static_cast<size_t>(j)] * cps[span - p + j];
  }
  return out;
}

Vec3 derivative(const SplineSpec& spec, const ControlPointSet& cps, double u,
                int order) {
  check_spec(spec);
  if (order < 1 || order > 2) {
    throw std::invalid_argument("derivative order must be 1 or 2");
  }
  if (cps.size() != spec.control_count) {
    throw std::invalid_argument("control point count does not match spec");
  }
  check_domain(spec, u);
  const int p = spec.degree;
  const int span = find_span(spec, u);
  double ders[3][8] = {};
  ders_basis_row(spec, span, u, order, ders);
  Vec3 out = Vec3::Zero();
  for (int j = 0; j <= p; ++j) {
    out += ders[order][j] * cps[span - p + j];
  }
  return out;
}

FitResult fit_least_squares(const SplineSpec& spec,
                            std::span<const Vec3> samples) {
  const int m = static_cast<int>(samples.size());
  // Chord-length parameters normalized to the spline domain.
  std::vector<double> t(static_cast<size_t>(m), 0.0);
  double total = 0.0;
  for (int j = 1; j < m; ++j) {
    total += (samples[static_cast<size_t>(j)] - samples[static_cast<size_t>(j - 1)]).norm();
    t[static_cast<size_t>(j)] = total;
  }
  if (m >= 1 && total < kDegenerateLength) {
    check_spec(spec);
    if (m < spec.control_count) {
      throw std::invalid_argument("need at least N samples to fit N control points");
    }
    FitResult result;
    result.control_points.points.assign(static_cast<size_t>(spec.control_count), samples[0]);
    return result;  // all samples coincide
  }
  for (auto& v : t) v /= total;
  return fit_least_squares(spec, samples, t);
}

FitResult fit_least_squares(const SplineSpec& spec,
                            std::span<const Vec3> samples,
                            std::span<const double> params) {
  check_spec(spec);
  const int N = spec.control_count;
  const int m = static_cast<int>(samples.size());
  if (m < N) {
    throw std::invalid_argument("need at least N samples to fit N control points");
  }
  if (static_cast<int>(params.size()) != m) {
    throw std::invalid_argument("one parameter per sample required");
  }
  for (double u : params) check_domain(spec, u);
  std::span<const double> t = params;

  FitResult result;
  result.control_points.points.assign(static_cast<size_t>(N), samples[0]);

  // Hard endpoint constraints: Q0 and Q_{N-1} are eliminated, interior
  // control points solve the normal equations per coordinate.
  const int n_free = N - 2;
  const Vec3 first = samples.front();
  const Vec3 last = samples.back();
  result.control_points[0] = first;
  result.control_points[N - 1] = last;

  if (n_free > 0) {
    Eigen::MatrixXd A(m, n_free);
    Eigen::MatrixXd rhs(m, 3);
    for (int j = 0; j < m; ++j) {
      const double u = t[static_cast<size_t>(j)];
      const int span = find_span(spec, u);
      const auto row = basis_row(spec, span, u);
      Eigen::RowVectorXd full = Eigen::RowVectorXd::Zero(N);
      for (int k = 0; k <= spec.degree; ++k) {
        full(span - spec.degree + k) = row[static_cast<size_t>(k)];
      }
      A.row(j) = full.segment(1, n_free);
      rhs.row(j) = (samples[static_cast<size_t>(j)] - full(0) * first -
                    full(N - 1) * last)
                       .transpose();
    }
    Eigen::MatrixXd AtA = A.transpose() * A;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(AtA);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin > 1e10) {
      AtA.diagonal().array() += 1e-8;  // Tikhonov fallback
    }
    const Eigen::MatrixXd sol = AtA.ldlt().solve(A.transpose() * rhs);
    for (int i = 0; i < n_free; ++i) {
      result.control_points[i + 1] = sol.row(i).transpose();
    }
  }

  double sq = 0.0;
  for (int j = 0; j < m; ++j) {
    const Vec3 fitted = evaluate(spec, result.control_points, t[static_cast<size_t>(j)]);
    sq += (fitted - samples[static_cast<size_t>(j)]).squaredNorm();
  }
  result.rms = std::sqrt(sq / m);
  return result;
}

Trajectory discretize_arclength(const SplineSpec& spec,
                                const ControlPointSet& cps, int M) {
  check_spec(spec);
  if (M < 2) throw std::invalid_argument("need at least 2 samples");

  const int dense = 200 * (spec.control_count - spec.degree);
  std::vector<double> us(static_cast<size_t>(dense + 1));
  std::vector<double> lens(static_cast<size_t>(dense + 1), 0.0);
  std::vector<Vec3> pts(static_cast<size_t>(dense + 1));
  const double u0 = spec.domain_start();
  const double u1 = spec.domain_end();
  for (int k = 0; k <= dense; ++k) {
    us[static_cast<size_t>(k)] = u0 + (u1 - u0) * k / dense;
    pts[static_cast<size_t>(k)] = evaluate(spec, cps, us[static_cast<size_t>(k)]);
    if (k > 0) {
      lens[static_cast<size_t>(k)] =
          lens[static_cast<size_t>(k - 1)] +
          (pts[static_cast<size_t>(k)] - pts[static_cast<size_t>(k - 1)]).norm();
    }
  }
  const double total = lens.back();

  Trajectory traj;
  traj.samples.resize(static_cast<size_t>(M));
  traj.source_param.resize(static_cast<size_t>(M));
  if (total < kDegenerateLength) {
    for (int j = 0; j < M; ++j) {
      traj.samples[static_cast<size_t>(j)] = {0.0, cps[0]};
      traj.source_param[static_cast<size_t>(j)] = u0;
    }
    traj.degenerate = true;
    return traj;
  }

  // Inverse-interpolate the cumulative length table at uniform arc targets.
  // arc_length records the position along the curve, not output-polyline
  // chords, so spacing is uniform by construction.
  int cursor = 0;
  for (int j = 0; j < M; ++j) {
    const double target = total * j / (M - 1);
    while (cursor < dense && lens[static_cast<size_t>(cursor + 1)] < target) ++cursor;
    double u;
    if (j == 0) {
      u = u0;
    } else if (j == M - 1) {
      u = u1;
    } else {
      const double seg = lens[static_cast<size_t>(cursor + 1)] - lens[static_cast<size_t>(cursor)];
      const double frac = seg > 0.0 ? (target - lens[static_cast<size_t>(cursor)]) / seg : 0.0;
      u = us[static_cast<size_t>(cursor)] + frac * (us[static_cast<size_t>(cursor + 1)] - us[static_cast<size_t>(cursor)]);
    }
    traj.source_param[static_cast<size_t>(j)] = u;
    traj.samples[static_cast<size_t>(j)] = {target, evaluate(spec, cps, u)};
  }
  return traj;
}

DeviationBound deviation_bound(const SplineSpec& spec,
                               const ControlPointSet& clean,
                               const ControlPointSet& perturbed,
                               int dense_samples) {
  check_spec(spec);
  if (clean.size() != spec.control_count || perturbed.size() != spec.control_count) {
    throw std::invalid_argument("control point sets must match the spec");
  }
  if (dense_samples < 2) throw std::invalid_argument("need at least 2 samples");
  DeviationBound bound;
  for (int i = 0; i < spec.control_count; ++i) {
    bound.max_cp_error = std::max(bound.max_cp_error, (perturbed[i] - clean[i]).norm());
  }
  const double u0 = spec.domain_start();
  const double u1 = spec.domain_end();
  for (int k = 0; k < dense_samples; ++k) {
    const double u = u0 + (u1 - u0) * k / (dense_samples - 1);
    const double d = (evaluate(spec, perturbed, u) - evaluate(spec, clean, u)).norm();
    bound.max_path_deviation = std::max(bound.max_path_deviation, d);
  }
  return bound;
}

std::pair<double, double> local_support_range(const SplineSpec& spec, int i) {
  check_spec(spec);
  if (i < 0 || i >= spec.control_count) {
    throw std::out_of_range("control point index outside [0, N)");
  }
  const double lo = std::max(spec.knots[static_cast<size_t>(i)], spec.domain_start());
  const double hi = std::min(spec.knots[static_cast<size_t>(i + spec.degree + 1)],
                             spec.domain_end());
  return {lo, hi};
}

Trajectory resample_arclength(const Trajectory& traj, int M) {
  if (M < 2) throw std::invalid_argument("need at least 2 samples");
  if (traj.samples.empty()) throw std::invalid_argument("empty trajectory");

  const double total = traj.total_length();
  Trajectory out;
  out.samples.resize(static_cast<size_t>(M));
  if (total < kDegenerateLength) {
    for (int j = 0; j < M; ++j) {
      out.samples[static_cast<size_t>(j)] = {0.0, traj.samples.front().position};
    }
    out.degenerate = true;
    return out;
  }
  int cursor = 0;
  const int n = traj.size();
  for (int j = 0; j < M; ++j) {
    const double target = total * j / (M - 1);
    while (cursor + 1 < n - 1 &&
           traj.samples[static_cast<size_t>(cursor + 1)].arc_length < target) {
      ++cursor;
    }
    const auto& a = traj.samples[static_cast<size_t>(cursor)];
    const auto& b = traj.samples[static_cast<size_t>(cursor + 1)];
    const double seg = b.arc_length - a.arc_length;
    const double frac = seg > 0.0 ? std::clamp((target - a.arc_length) / seg, 0.0, 1.0) : 0.0;
    out.samples[static_cast<size_t>(j)].position = a.position + frac * (b.position - a.position);
  }
  for (int j = 1; j < M; ++j) {
    out.samples[static_cast<size_t>(j)].arc_length =
        out.samples[static_cast<size_t>(j - 1)].arc_length +
        (out.samples[static_cast<size_t>(j)].position -
         out.samples[static_cast<size_t>(j - 1)].position)
            .norm();
  }
  return out;
}

}  // namespace sdplan
