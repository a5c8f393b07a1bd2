#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsrd/measures.hpp"

namespace rsrd {

/// Per-position source distributions over the error-letter alphabet,
/// index i = (i+1)-th LRP rank.
struct SourceModel {
  std::vector<std::vector<double>> dists;
  int n() const { return static_cast<int>(dists.size()); }
};

/// One point of the R-D trade-off at slope s, with the per-position
/// test-channel input distributions that achieve it. q_dists[i][c] is the
/// probability of erasure column c (letter c + col_letter_offset).
struct RdPoint {
  double s = 0.0;
  double rate = 0.0;        // bits
  double distortion = 0.0;  // in measure units
  std::vector<std::vector<double>> q_dists;
};

namespace detail {

constexpr double kProbClamp = 1e-12;

inline double clamp_prob(double p) {
  return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

/// Binary entropy in bits.
inline double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

struct BaOutcome {
  double rate = 0.0, distortion = 0.0;
  std::vector<double> q;
};

/// Core Blahut-Arimoto fixed point for one discrete source: p over rows,
/// delta row-major rows x cols (measure units), slope s < 0. Rate in bits.
inline BaOutcome ba_iterate(std::span<const double> p, std::span<const double> delta,
                            int rows, int cols, double s,
                            int max_iters = 5000, double tol = 1e-10) {
  if (s >= 0) throw std::invalid_argument("ba_iterate: slope must be negative");
  std::vector<double> a(static_cast<size_t>(rows) * cols);
  for (size_t i = 0; i < a.size(); ++i) a[i] = std::exp(s * delta[i]);

  std::vector<double> q(cols, 1.0 / cols), qn(cols), trans(static_cast<size_t>(rows) * cols);
  double rate = 0.0, dist = 0.0, prev_rate = -1.0, prev_dist = -1.0;
  for (int it = 0; it < max_iters; ++it) {
    // Q_{k|j} = q_k a_{jk} / sum_k q_k a_{jk}; q' = sum_j p_j Q_{k|j}.
    std::fill(qn.begin(), qn.end(), 0.0);
    rate = 0.0;
    dist = 0.0;
    for (int j = 0; j < rows; ++j) {
      if (p[j] <= 0.0) continue;
      double z = 0.0;
      for (int k = 0; k < cols; ++k) z += q[k] * a[static_cast<size_t>(j) * cols + k];
      for (int k = 0; k < cols; ++k) {
        const double t = q[k] * a[static_cast<size_t>(j) * cols + k] / z;
        trans[static_cast<size_t>(j) * cols + k] = t;
        qn[k] += p[j] * t;
      }
    }
    for (int j = 0; j < rows; ++j) {
      if (p[j] <= 0.0) continue;
      for (int k = 0; k < cols; ++k) {
        const double t = trans[static_cast<size_t>(j) * cols + k];
        if (t > 0.0 && qn[k] > 0.0) rate += p[j] * t * std::log2(t / qn[k]);
        dist += p[j] * t * delta[static_cast<size_t>(j) * cols + k];
      }
    }
    q = qn;
    if (it > 0 && std::abs(rate - prev_rate) < tol && std::abs(dist - prev_dist) < tol)
      break;
    prev_rate = rate;
    prev_dist = dist;
  }
  return {std::max(rate, 0.0), dist, std::move(q)};
}

inline std::vector<double> delta_real(const DistortionMeasure& dm) {
  std::vector<double> d(dm.scaled.size());
  for (size_t i = 0; i < d.size(); ++i)
    d[i] = static_cast<double>(dm.scaled[i]) / static_cast<double>(dm.denom);
  return d;
}

}  // namespace detail

/// B-A fixed point for a single source component at slope s.
inline detail::BaOutcome ba_component(std::span<const double> p,
                                      const DistortionMeasure& dm, double s,
                                      int max_iters = 5000, double tol = 1e-10) {
  if (static_cast<int>(p.size()) != dm.rows)
    throw std::invalid_argument("ba_component: source alphabet mismatch");
  return detail::ba_iterate(p, detail::delta_real(dm), dm.rows, dm.cols, s,
                            max_iters, tol);
}

/// Direct B-A on the product super-source; test oracle for factored_rd.
/// Guarded to tiny instances.
inline RdPoint ba_direct_super(const SourceModel& src, const DistortionMeasure& dm,
                               double s) {
  const int n = src.n();
  double super_rows = 1.0, super_cols = 1.0;
  for (int i = 0; i < n; ++i) {
    super_rows *= dm.rows;
    super_cols *= dm.cols;
  }
  if (super_rows > 1e4 || super_cols > 1e4)
    throw std::invalid_argument("ba_direct_super: super-alphabet too large");
  const int rows = static_cast<int>(super_rows), cols = static_cast<int>(super_cols);

  const auto d1 = detail::delta_real(dm);
  std::vector<double> p(rows), delta(static_cast<size_t>(rows) * cols);
  for (int jj = 0; jj < rows; ++jj) {
    double pj = 1.0;
    int rem = jj;
    std::vector<int> js(n);
    for (int i = n - 1; i >= 0; --i) {
      js[i] = rem % dm.rows;
      rem /= dm.rows;
      pj *= src.dists[i][js[i]];
    }
    p[jj] = pj;
    for (int kk = 0; kk < cols; ++kk) {
      double dsum = 0.0;
      int krem = kk;
      for (int i = n - 1; i >= 0; --i) {
        dsum += d1[static_cast<size_t>(js[i]) * dm.cols + (krem % dm.cols)];
        krem /= dm.cols;
      }
      delta[static_cast<size_t>(jj) * cols + kk] = dsum;
    }
  }
  auto out = detail::ba_iterate(p, delta, rows, cols, s);
  RdPoint pt;
  pt.s = s;
  pt.rate = out.rate;
  pt.distortion = out.distortion;
  pt.q_dists.push_back(std::move(out.q));  // joint distribution, single entry
  return pt;
}

/// Factored B-A: run each component at the common slope s and sum rates and
/// distortions; the product of the component q's achieves the point.
inline RdPoint factored_rd(const SourceModel& src, const DistortionMeasure& dm,
                           double s) {
  RdPoint pt;
  pt.s = s;
  pt.q_dists.reserve(src.dists.size());
  const auto delta = detail::delta_real(dm);
  for (const auto& p : src.dists) {
    auto out = detail::ba_iterate(p, delta, dm.rows, dm.cols, s);
    pt.rate += out.rate;
    pt.distortion += out.distortion;
    pt.q_dists.push_back(std::move(out.q));
  }
  return pt;
}

/// Zero-rate endpoint: each position keeps the single reproduction letter with
/// the smallest expected distortion. (B-A converges too slowly as s -> 0- to
/// reach this point numerically.)
inline RdPoint zero_rate_point(const SourceModel& src, const DistortionMeasure& dm) {
  RdPoint pt;
  const auto delta = detail::delta_real(dm);
  for (const auto& p : src.dists) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < dm.cols; ++k) {
      double d = 0.0;
      for (int j = 0; j < dm.rows; ++j)
        d += p[j] * delta[static_cast<size_t>(j) * dm.cols + k];
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    pt.distortion += best_d;
    std::vector<double> q(dm.cols, 0.0);
    q[best] = 1.0;
    pt.q_dists.push_back(std::move(q));
  }
  return pt;
}

/// Slope bisection until |rate - R_target| <= rate_tol bits.
inline RdPoint rd_at_rate(const SourceModel& src, const DistortionMeasure& dm,
                          double r_target, double rate_tol = 0.01) {
  if (r_target < 0) throw std::invalid_argument("rd_at_rate: negative rate target");
  if (r_target <= rate_tol) return zero_rate_point(src, dm);
  double s_hi = -1e-4;  // rate -> 0
  double s_lo = -60.0;  // rate -> max
  RdPoint hi = factored_rd(src, dm, s_hi);
  if (r_target <= hi.rate + rate_tol) return hi;
  RdPoint lo = factored_rd(src, dm, s_lo);
  // Target beyond the curve's maximum rate: the max-rate point already has
  // minimal distortion, so clamp there.
  if (r_target > lo.rate + rate_tol) return lo;
  for (int it = 0; it < 200; ++it) {
    const double s = 0.5 * (s_lo + s_hi);
    RdPoint mid = factored_rd(src, dm, s);
    if (std::abs(mid.rate - r_target) <= rate_tol) return mid;
    if (mid.rate > r_target)
      s_lo = s;
    else
      s_hi = s;
  }
  throw std::runtime_error("rd_at_rate: bisection failed to converge");
}

struct ClosedFormConventional {
  double rate = 0.0;
  double lambda = 0.0;
  std::vector<double> d_tilde;                // per-position levels
  std::vector<std::vector<double>> q_dists;   // columns (erase, hard-decision)
};

/// Reverse water-filling for the conventional measure. p[i] = Pr(x_i = 1)
/// (the hard decision is correct); D_total is in measure units.
inline ClosedFormConventional closedform_conventional(std::span<const double> p,
                                                      double d_total) {
  const int n = static_cast<int>(p.size());
  double sum_p = 0.0, cap_sum = 0.0;
  std::vector<double> cap(n);
  for (int i = 0; i < n; ++i) {
    sum_p += p[i];
    cap[i] = std::min(p[i], 1.0 - p[i]);
    cap_sum += cap[i];
  }
  double target = d_total + sum_p - n;  // = sum of d_tilde
  if (target < -1e-6 || target > cap_sum + 1e-6)
    throw std::invalid_argument("closedform_conventional: infeasible distortion");
  target = std::clamp(target, 0.0, cap_sum);

  // sum_i min(lambda, cap_i) is increasing in lambda; bisect to the target.
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::min(mid, cap[i]);
    (acc < target ? lo : hi) = mid;
  }
  const double lambda = 0.5 * (lo + hi);

  ClosedFormConventional out;
  out.lambda = lambda;
  out.d_tilde.resize(n);
  out.q_dists.resize(n);
  for (int i = 0; i < n; ++i) {
    const double dt = std::min(lambda, cap[i]);
    out.d_tilde[i] = dt;
    out.rate += std::max(0.0, detail::h2(p[i]) - detail::h2(dt));
    double q0, q1;
    if (std::abs(1.0 - 2.0 * dt) < 1e-12) {
      q0 = q1 = 0.5;
    } else {
      q0 = (1.0 - p[i] - dt) / (1.0 - 2.0 * dt);
      q1 = (p[i] - dt) / (1.0 - 2.0 * dt);
    }
    out.q_dists[i] = {std::clamp(q0, 0.0, 1.0), std::clamp(q1, 0.0, 1.0)};
  }
  return out;
}

struct ClosedFormBitlevel {
  double rate = 0.0;
  double distortion = 0.0;
  std::vector<std::vector<double>> q_dists;  // columns (erase, hard-decision)
};

/// Closed-form bit-level curve at tilt lambda = e^s, lambda in (0,1).
/// p[i] = Pr(bit i hard decision correct).
inline ClosedFormBitlevel closedform_bitlevel(std::span<const double> p, double lambda) {
  if (lambda <= 0.0 || lambda >= 1.0)
    throw std::invalid_argument("closedform_bitlevel: lambda must be in (0,1)");
  using detail::h2;
  const double l2 = lambda * lambda;
  const double phi = (1.0 + lambda) / (1.0 + lambda + l2);
  ClosedFormBitlevel out;
  out.q_dists.resize(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double ri = h2(pi) - h2(phi) + (pi - phi) * h2(lambda / (1.0 + lambda));
    if (ri > 0.0) {
      out.rate += ri;
      out.distortion += (1.0 + 2.0 * lambda + 3.0 * l2) / (1.0 + lambda + l2) -
                        pi * (1.0 + 2.0 * lambda) / (1.0 + lambda);
      const double q0 = ((1.0 + lambda) - pi * (1.0 + lambda + l2)) / (1.0 - l2);
      const double q1 = (pi * (1.0 + lambda + l2) - lambda * (1.0 + lambda)) / (1.0 - l2);
      out.q_dists[i] = {std::clamp(q0, 0.0, 1.0), std::clamp(q1, 0.0, 1.0)};
    } else {
      // Zero-rate component: single best reproduction letter.
      const double d_hd = 3.0 * (1.0 - pi);
      if (d_hd <= 1.0) {
        out.distortion += d_hd;
        out.q_dists[i] = {0.0, 1.0};
      } else {
        out.distortion += 1.0;
        out.q_dists[i] = {1.0, 0.0};
      }
    }
  }
  return out;
}

}  // namespace rsrd
