#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsrd/gf.hpp"

namespace rsrd {

/// BPSK over AWGN, one channel use per coded bit. With unit energy per coded
/// bit, Eb/N0 refers to energy per information bit, so the noise variance per
/// dimension is sigma^2 = 1 / (2 * code_rate * 10^(ebno_db/10)).
struct ChannelConfig {
  double ebno_db = 0.0;
  double code_rate = 0.5;  // k/n
  int q = 8;               // bits per RS symbol

  double noise_sigma2() const {
    const double ebno = std::pow(10.0, ebno_db / 10.0);
    return 1.0 / (2.0 * code_rate * ebno);
  }
  double noise_sigma() const { return std::sqrt(noise_sigma2()); }
};

/// 2^q x n a-posteriori probability matrix; p(j, i) = Pr(c_i = element j | r).
struct AppMatrix {
  int rows = 0, cols = 0;
  std::vector<double> data;  // column-major

  double& p(int j, int i) { return data[static_cast<size_t>(i) * rows + j]; }
  double p(int j, int i) const { return data[static_cast<size_t>(i) * rows + j]; }
  const double* col(int i) const { return data.data() + static_cast<size_t>(i) * rows; }
};

/// Per-column rank permutations pi, LRP-first position order sigma, and the
/// bit-level analog. pi[i][r] is the element value of the (r+1)-th most
/// likely symbol in column i; sigma[r] is the position of the (r+1)-th LRP.
struct ReliabilityView {
  std::vector<std::vector<Symbol>> pi;
  std::vector<int> sigma;
  std::vector<int> bit_sigma;
};

/// Bit b in {0,1} maps to the antipodal point 1 - 2b. Bits of each symbol are
/// sent LSB first.
inline std::vector<double> transmit(const ChannelConfig& cfg,
                                    std::span<const Symbol> codeword,
                                    std::mt19937_64& rng) {
  const double sigma = cfg.noise_sigma();
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> out;
  out.reserve(codeword.size() * cfg.q);
  for (Symbol s : codeword)
    for (int b = 0; b < cfg.q; ++b) {
      const double sig = ((s >> b) & 1) ? -1.0 : 1.0;
      out.push_back(sig + sigma * noise(rng));
    }
  return out;
}

/// Log Pr(bit = 0 | y) and log Pr(bit = 1 | y) for one received sample.
inline std::pair<double, double> bit_log_posteriors(double y, double sigma2) {
  const double llr = 2.0 * y / sigma2;  // log p0 - log p1
  return {-std::log1p(std::exp(-llr)), -std::log1p(std::exp(llr))};
}

/// Symbol posteriors as products of per-bit posteriors (bits are independent
/// given r); computed in the log domain with max subtraction.
inline AppMatrix symbol_app(const ChannelConfig& cfg, std::span<const double> received) {
  if (received.size() % cfg.q != 0)
    throw std::invalid_argument("symbol_app: received length must be n*q");
  const int n = static_cast<int>(received.size()) / cfg.q;
  const int rows = 1 << cfg.q;
  const double sigma2 = cfg.noise_sigma2();

  AppMatrix app{rows, n, std::vector<double>(static_cast<size_t>(rows) * n)};
  std::vector<double> lp0(cfg.q), lp1(cfg.q), logp(rows);
  for (int i = 0; i < n; ++i) {
    for (int b = 0; b < cfg.q; ++b)
      std::tie(lp0[b], lp1[b]) = bit_log_posteriors(received[i * cfg.q + b], sigma2);
    double mx = -1e300;
    for (int v = 0; v < rows; ++v) {
      double acc = 0;
      for (int b = 0; b < cfg.q; ++b) acc += ((v >> b) & 1) ? lp1[b] : lp0[b];
      logp[v] = acc;
      mx = std::max(mx, acc);
    }
    double z = 0;
    for (int v = 0; v < rows; ++v) z += std::exp(logp[v] - mx);
    for (int v = 0; v < rows; ++v) app.p(v, i) = std::exp(logp[v] - mx) / z;
  }
  return app;
}

/// Per-bit probability that the hard decision on that bit is correct.
inline std::vector<double> bit_app(const ChannelConfig& cfg, std::span<const double> received) {
  const double sigma2 = cfg.noise_sigma2();
  std::vector<double> rel(received.size());
  for (size_t i = 0; i < received.size(); ++i) {
    auto [l0, l1] = bit_log_posteriors(received[i], sigma2);
    rel[i] = std::exp(std::max(l0, l1));
  }
  return rel;
}

/// Sort columns (descending within a column, positions by ascending top
/// probability). Ties break toward the lower index so the ordering is stable.
inline ReliabilityView reliability(const AppMatrix& app) {
  ReliabilityView v;
  v.pi.resize(app.cols);
  for (int i = 0; i < app.cols; ++i) {
    auto& perm = v.pi[i];
    perm.resize(app.rows);
    std::iota(perm.begin(), perm.end(), 0);
    const double* c = app.col(i);
    std::stable_sort(perm.begin(), perm.end(),
                     [c](Symbol a, Symbol b) { return c[a] > c[b]; });
  }
  v.sigma.resize(app.cols);
  std::iota(v.sigma.begin(), v.sigma.end(), 0);
  std::stable_sort(v.sigma.begin(), v.sigma.end(), [&](int a, int b) {
    return app.p(v.pi[a][0], a) < app.p(v.pi[b][0], b);
  });
  return v;
}

/// Ascending order of bit reliabilities, lower index first on ties.
inline std::vector<int> bit_reliability_order(std::span<const double> rel) {
  std::vector<int> order(rel.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rel[a] < rel[b]; });
  return order;
}

}  // namespace rsrd
