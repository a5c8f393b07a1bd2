#pragma once

#include <bit>
#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsrd/rdengine.hpp"

namespace rsrd {

/// A set of erasure patterns in reliability-sorted coordinates.
struct PatternSet {
  std::vector<ErasurePattern> patterns;
  double rate_bits = 0.0;
  std::string scheme;
};

/// l-ary covering code over the letter alphabet {1..l}: every word in
/// {1..l}^{n_c} lies within Hamming distance t_c of some codeword.
struct CoveringCode {
  int n_c = 0, k_c = 0, t_c = 0, l = 2;
  std::vector<std::vector<std::uint8_t>> codewords;
};

/// GMD pattern set: erase 0, 2, 4, ..., d_min-1 of the least reliable
/// positions (d_min odd).
inline PatternSet gmd_set(int n, int d_min) {
  if (d_min % 2 == 0) throw std::invalid_argument("gmd_set: d_min must be odd");
  PatternSet ps;
  ps.scheme = "gmd";
  for (int e = 0; e <= d_min - 1; e += 2) {
    ErasurePattern p(n, 1);
    for (int i = 0; i < e; ++i) p[i] = 0;
    ps.patterns.push_back(std::move(p));
  }
  ps.rate_bits = std::log2(static_cast<double>(ps.patterns.size()));
  return ps;
}

/// SED(l, f): every even-size (<= f) erasure subset of the l LRPs.
inline PatternSet sed_set(int l, int f, int n) {
  if (f > l) throw std::invalid_argument("sed_set: f must be <= l");
  PatternSet ps;
  ps.scheme = "sed";
  for (unsigned mask = 0; mask < (1u << l); ++mask) {
    const int w = std::popcount(mask);
    if (w % 2 != 0 || w > f) continue;
    ErasurePattern p(n, 1);
    for (int i = 0; i < l; ++i)
      if (mask & (1u << i)) p[i] = 0;
    ps.patterns.push_back(std::move(p));
  }
  ps.rate_bits = std::log2(static_cast<double>(ps.patterns.size()));
  return ps;
}

namespace detail {
inline std::uint8_t sample_letter(std::span<const double> q, int letter_offset,
                                  std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = u(rng);
  for (size_t c = 0; c + 1 < q.size(); ++c) {
    x -= q[c];
    if (x < 0.0) return static_cast<std::uint8_t>(c + letter_offset);
  }
  return static_cast<std::uint8_t>(q.size() - 1 + letter_offset);
}
}  // namespace detail

/// 2^R patterns sampled i.i.d. per position from the test-channel input
/// distributions. Pattern 0 is the deterministic all-hard-decision pattern
/// unless include_hd is false (pure sampling). Duplicates are kept.
inline PatternSet random_set(const RdPoint& rd, int r_bits, int letter_offset,
                             std::mt19937_64& rng, bool include_hd = true) {
  if (r_bits < 0) throw std::invalid_argument("random_set: negative rate");
  const int n = static_cast<int>(rd.q_dists.size());
  const int hd_letter = 1;
  const size_t count = size_t{1} << r_bits;
  PatternSet ps;
  ps.scheme = "random";
  ps.rate_bits = r_bits;
  ps.patterns.reserve(count);
  for (size_t t = 0; t < count; ++t) {
    ErasurePattern p(n);
    if (t == 0 && include_hd) {
      std::fill(p.begin(), p.end(), static_cast<std::uint8_t>(hd_letter));
    } else {
      for (int i = 0; i < n; ++i)
        p[i] = detail::sample_letter(rd.q_dists[i], letter_offset, rng);
    }
    ps.patterns.push_back(std::move(p));
  }
  return ps;
}

/// Binary (7,4) Hamming code mapped to letters {1,2}; covering radius 1.
inline CoveringCode hamming74() {
  CoveringCode cc;
  cc.n_c = 7;
  cc.k_c = 4;
  cc.t_c = 1;
  cc.l = 2;
  // Systematic generator rows for the (7,4) Hamming code.
  static constexpr std::uint8_t gen[4] = {0b1000011, 0b0100101, 0b0010110, 0b0001111};
  for (int msg = 0; msg < 16; ++msg) {
    std::uint8_t w = 0;
    for (int b = 0; b < 4; ++b)
      if (msg & (1 << b)) w ^= gen[b];
    std::vector<std::uint8_t> cw(7);
    for (int i = 0; i < 7; ++i) cw[i] = ((w >> i) & 1) ? 2 : 1;  // bit 0 -> letter 1
    cc.codewords.push_back(std::move(cw));
  }
  return cc;
}

/// Covering-hybrid construction: every covering codeword over the n_c LRPs,
/// paired with every one of 2^{R - k_c log2 l} random tails over the MRPs
/// drawn from rd_tail. Total set size is exactly 2^R.
inline PatternSet covering_hybrid_set(const CoveringCode& cov, const RdPoint& rd_tail,
                                      int r_bits, int n, std::mt19937_64& rng,
                                      bool include_hd_tail = true) {
  const double k_bits = cov.k_c * std::log2(static_cast<double>(cov.l));
  const int r_mrp = r_bits - static_cast<int>(std::lround(k_bits));
  if (r_mrp < 0 || std::abs(k_bits - std::lround(k_bits)) > 1e-9)
    throw std::invalid_argument("covering_hybrid_set: rate too small for the covering code");
  const int n_tail = n - cov.n_c;
  if (static_cast<int>(rd_tail.q_dists.size()) != n_tail)
    throw std::invalid_argument("covering_hybrid_set: tail distribution length mismatch");

  // All tails first so each codeword pairs with the same tail list.
  std::vector<ErasurePattern> tails;
  const size_t n_tails = size_t{1} << r_mrp;
  tails.reserve(n_tails);
  for (size_t t = 0; t < n_tails; ++t) {
    ErasurePattern tail(n_tail, 1);
    if (!(t == 0 && include_hd_tail))
      for (int i = 0; i < n_tail; ++i)
        tail[i] = detail::sample_letter(rd_tail.q_dists[i], 1, rng);
    tails.push_back(std::move(tail));
  }

  PatternSet ps;
  ps.scheme = "covering-hybrid";
  ps.rate_bits = r_bits;
  ps.patterns.reserve(cov.codewords.size() * n_tails);
  for (const auto& cw : cov.codewords)
    for (const auto& tail : tails) {
      ErasurePattern p(n);
      std::copy(cw.begin(), cw.end(), p.begin());
      std::copy(tail.begin(), tail.end(), p.begin() + cov.n_c);
      ps.patterns.push_back(std::move(p));
    }
  return ps;
}

/// Reliability coordinates -> codeword coordinates: out[sigma(i)] = in[i].
inline ErasurePattern to_codeword_coords(const ErasurePattern& p,
                                         std::span<const int> sigma) {
  ErasurePattern out(p.size());
  for (size_t i = 0; i < p.size(); ++i) out[sigma[i]] = p[i];
  return out;
}

}  // namespace rsrd
