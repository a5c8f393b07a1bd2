#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsrd/channel.hpp"
#include "rsrd/gf.hpp"

namespace rsrd {

/// Error pattern: per-position letter, stored in reliability-sorted order
/// (entry i belongs to the (i+1)-th LRP). Letter j>0 means the j-th most
/// likely symbol is the transmitted one; 0 means none of the top-l are.
using ErrorPattern = std::vector<std::uint8_t>;

/// Erasure pattern over a scheme's erasure alphabet, also reliability-sorted.
/// Letter 0 erases (where the alphabet has it); letter j>0 picks the j-th
/// most likely symbol as the hard decision, or multiplicity type j for ASD.
using ErasurePattern = std::vector<std::uint8_t>;

using MultiplicityType = std::vector<int>;

/// 2^q x n multiplicity matrix, column-major.
struct MultiplicityMatrix {
  int rows = 0, cols = 0;
  std::vector<int> m;
  int& at(int j, int i) { return m[static_cast<size_t>(i) * rows + j]; }
  int at(int j, int i) const { return m[static_cast<size_t>(i) * rows + j]; }
};

/// Letter-by-letter distortion table plus the success threshold it is
/// compared against. Entries and threshold are stored as exact integers
/// scaled by `denom` so strict-inequality checks never hinge on rounding.
struct DistortionMeasure {
  int rows = 0;               // error letters 0..rows-1
  int cols = 0;               // erasure alphabet columns
  int col_letter_offset = 0;  // erasure letter = column index + offset
  std::int64_t denom = 1;
  std::vector<std::int64_t> scaled;  // row-major, rows x cols
  std::int64_t threshold_scaled = 0;

  std::int64_t delta_scaled(int x, int xh_letter) const {
    return scaled[static_cast<size_t>(x) * cols + (xh_letter - col_letter_offset)];
  }
  double delta(int x, int xh_letter) const {
    return static_cast<double>(delta_scaled(x, xh_letter)) / static_cast<double>(denom);
  }
  double threshold() const {
    return static_cast<double>(threshold_scaled) / static_cast<double>(denom);
  }
  int min_letter() const { return col_letter_offset; }
  int max_letter() const { return col_letter_offset + cols - 1; }
};

/// Conventional error-and-erasure decoding: delta = [[1,2],[1,0]],
/// threshold n-k+1.
inline DistortionMeasure conventional_measure(int n, int k) {
  DistortionMeasure dm;
  dm.rows = 2;
  dm.cols = 2;
  dm.denom = 1;
  dm.scaled = {1, 2, 1, 0};
  dm.threshold_scaled = n - k + 1;
  return dm;
}

/// mBM-l: top-l hard decisions plus erasure; (l+1)x(l+1) table, threshold
/// n-k+1.
inline DistortionMeasure mbm_measure(int n, int k, int l) {
  if (l < 1) throw std::invalid_argument("mbm_measure: l must be >= 1");
  DistortionMeasure dm;
  dm.rows = l + 1;
  dm.cols = l + 1;
  dm.denom = 1;
  dm.scaled.assign(static_cast<size_t>(dm.rows) * dm.cols, 2);
  for (int x = 0; x < dm.rows; ++x) dm.scaled[static_cast<size_t>(x) * dm.cols + 0] = 1;
  for (int j = 1; j <= l; ++j) dm.scaled[static_cast<size_t>(j) * dm.cols + j] = 0;
  dm.threshold_scaled = n - k + 1;
  return dm;
}

/// Bit-level multiplicity assignment: delta = [[1,3],[1,0]], threshold
/// (n-k+1)/2, on length n*q bit patterns. Requires rate >= 2/3 + 1/n.
inline DistortionMeasure bitlevel_measure(int n, int k) {
  // k/n >= 2/3 + 1/n  <=>  3k >= 2n + 3
  if (3 * k < 2 * n + 3)
    throw std::invalid_argument("bitlevel_measure: code rate below 2/3 + 1/n");
  DistortionMeasure dm;
  dm.rows = 2;
  dm.cols = 2;
  dm.denom = 2;
  dm.scaled = {2, 6, 2, 0};
  dm.threshold_scaled = n - k + 1;  // (n-k+1)/2 in units of 1/2
  return dm;
}

/// Error-only decoding with top-l hard decisions; distortion counts wrong
/// hard decisions, threshold (n-k+1)/2. Erasure letters run 1..l.
inline DistortionMeasure error_only_measure(int n, int k, int l) {
  if (l < 1) throw std::invalid_argument("error_only_measure: l must be >= 1");
  DistortionMeasure dm;
  dm.rows = l + 1;
  dm.cols = l;
  dm.col_letter_offset = 1;
  dm.denom = 2;
  dm.scaled.assign(static_cast<size_t>(dm.rows) * dm.cols, 2);
  for (int j = 1; j <= l; ++j) dm.scaled[static_cast<size_t>(j) * dm.cols + (j - 1)] = 0;
  dm.threshold_scaled = n - k + 1;
  return dm;
}

namespace detail {
inline bool type_allowable(const MultiplicityType& t, int m) {
  int sum = 0, lhs = 0, nz = 0, mn = 0;
  for (int mr : t) {
    sum += mr;
    lhs += mr * (m - mr);
    if (mr != 0) {
      ++nz;
      mn = (mn == 0) ? mr : std::min(mn, mr);
    }
  }
  if (sum > m) return false;
  const int rhs = (nz == 0) ? 0 : (m + 1) * (nz - 1) * mn;
  return lhs <= rhs;
}
}  // namespace detail

/// All multiplicity types (m_1..m_l), sum <= m, satisfying the allowable-set
/// inequality; listed in lexicographically descending order.
inline std::vector<MultiplicityType> allowable_types(int m, int l) {
  if (m < 1 || l < 1) throw std::invalid_argument("allowable_types: need m,l >= 1");
  std::vector<MultiplicityType> out;
  MultiplicityType cur(l, 0);
  // Odometer over {0..m}^l in descending lexicographic order.
  long long total = 1;
  for (int r = 0; r < l; ++r) total *= m + 1;
  for (long long idx = total - 1; idx >= 0; --idx) {
    long long rem = idx;
    for (int r = l - 1; r >= 0; --r) {
      cur[r] = static_cast<int>(rem % (m + 1));
      rem /= (m + 1);
    }
    if (detail::type_allowable(cur, m)) out.push_back(cur);
  }
  return out;
}

/// ASD distortion table from Theorem-style per-type weights
/// mu_t = 1 + sum m_r (m_r + 1) / (m (m + 1)); row j subtracts 2 m_{t,j} / m.
/// Entries are exact in units of 1/(m(m+1)). Erasure letters run 1..z.
inline DistortionMeasure asd_measure(int n, int k, int m,
                                     const std::vector<MultiplicityType>& types) {
  if (types.empty()) throw std::invalid_argument("asd_measure: empty type set");
  const int l = static_cast<int>(types[0].size());
  // High-rate constraint: k/n >= 1/n + m(m+3)/((m+1)(m+2)).
  if (static_cast<long long>(k - 1) * (m + 1) * (m + 2) <
      static_cast<long long>(n) * m * (m + 3))
    throw std::invalid_argument("asd_measure: high-rate constraint violated");
  for (const auto& t : types) {
    if (static_cast<int>(t.size()) != l)
      throw std::invalid_argument("asd_measure: inconsistent type lengths");
    if (!detail::type_allowable(t, m))
      throw std::invalid_argument("asd_measure: type outside the allowable set");
  }
  const std::int64_t den = static_cast<std::int64_t>(m) * (m + 1);
  DistortionMeasure dm;
  dm.rows = l + 1;
  dm.cols = static_cast<int>(types.size());
  dm.col_letter_offset = 1;
  dm.denom = den;
  dm.scaled.assign(static_cast<size_t>(dm.rows) * dm.cols, 0);
  for (int t = 0; t < dm.cols; ++t) {
    std::int64_t mu = den;  // the leading 1
    for (int r = 0; r < l; ++r) mu += static_cast<std::int64_t>(types[t][r]) * (types[t][r] + 1);
    dm.scaled[t] = mu;  // row 0
    for (int j = 1; j <= l; ++j)
      dm.scaled[static_cast<size_t>(j) * dm.cols + t] =
          mu - 2LL * types[t][j - 1] * (m + 1);
  }
  dm.threshold_scaled = static_cast<std::int64_t>(n - k + 1) * den;
  return dm;
}

inline std::int64_t distortion_scaled(const ErrorPattern& x, const ErasurePattern& xh,
                                      const DistortionMeasure& dm) {
  if (x.size() != xh.size())
    throw std::invalid_argument("distortion: pattern length mismatch");
  std::int64_t d = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= dm.rows || xh[i] < dm.min_letter() || xh[i] > dm.max_letter())
      throw std::invalid_argument("distortion: letter outside alphabet");
    d += dm.delta_scaled(x[i], xh[i]);
  }
  return d;
}

inline double distortion(const ErrorPattern& x, const ErasurePattern& xh,
                         const DistortionMeasure& dm) {
  return static_cast<double>(distortion_scaled(x, xh, dm)) /
         static_cast<double>(dm.denom);
}

/// Strict threshold test: decoding succeeds iff d(x, xh) < threshold.
inline bool succeeds(const ErrorPattern& x, const ErasurePattern& xh,
                     const DistortionMeasure& dm) {
  return distortion_scaled(x, xh, dm) < dm.threshold_scaled;
}

/// Genie error pattern of the transmitted codeword: letter j if the symbol
/// ranks j-th most likely (j <= l), else 0. Output in sigma-sorted order.
inline ErrorPattern extract_error_pattern(std::span<const Symbol> codeword,
                                          const ReliabilityView& view, int l) {
  ErrorPattern x(codeword.size(), 0);
  for (size_t r = 0; r < codeword.size(); ++r) {
    const int pos = view.sigma[r];
    const auto& perm = view.pi[pos];
    for (int j = 0; j < l; ++j)
      if (perm[j] == codeword[pos]) {
        x[r] = static_cast<std::uint8_t>(j + 1);
        break;
      }
  }
  return x;
}

/// Bit-level genie pattern: letter 1 where the hard bit decision matches the
/// transmitted bit, in bit-reliability-sorted order. Bits are LSB first.
inline ErrorPattern extract_bit_error_pattern(std::span<const Symbol> codeword,
                                              std::span<const double> received,
                                              std::span<const int> bit_sigma, int q) {
  ErrorPattern x(received.size(), 0);
  for (size_t r = 0; r < received.size(); ++r) {
    const int b = bit_sigma[r];
    const int tx_bit = (codeword[b / q] >> (b % q)) & 1;
    const int hd_bit = received[b] < 0 ? 1 : 0;
    x[r] = (tx_bit == hd_bit) ? 1 : 0;
  }
  return x;
}

/// Columns of M from a symbol-level ASD erasure pattern: letter j at rank i
/// places type j's multiplicities on the top-l symbols of position sigma(i).
inline MultiplicityMatrix build_multiplicity_matrix(
    const ErasurePattern& xh, const ReliabilityView& view,
    const std::vector<MultiplicityType>& types, int q) {
  const int n = static_cast<int>(xh.size());
  MultiplicityMatrix mm{1 << q, n, std::vector<int>(static_cast<size_t>(1 << q) * n, 0)};
  for (int r = 0; r < n; ++r) {
    if (xh[r] < 1 || xh[r] > types.size())
      throw std::invalid_argument("build_multiplicity_matrix: bad type letter");
    const auto& t = types[xh[r] - 1];
    const int pos = view.sigma[r];
    for (size_t j = 0; j < t.size(); ++j)
      if (t[j] != 0) mm.at(view.pi[pos][j], pos) = t[j];
  }
  return mm;
}

/// Bit-level MAS: per symbol position, 0 erased bits -> multiplicity 2 on the
/// hard-decision symbol; 1 erased bit -> multiplicity 1 on both candidates;
/// >= 2 erased bits -> all-zero column. The erasure pattern is given in
/// bit-sigma order; hard bits come from the received signs.
inline MultiplicityMatrix bit_level_multiplicity_matrix(
    const ErasurePattern& bit_xh, std::span<const double> received,
    std::span<const int> bit_sigma, int q) {
  const int n = static_cast<int>(received.size()) / q;
  MultiplicityMatrix mm{1 << q, n, std::vector<int>(static_cast<size_t>(1 << q) * n, 0)};
  std::vector<std::uint8_t> erased(received.size(), 0);
  for (size_t r = 0; r < bit_xh.size(); ++r)
    if (bit_xh[r] == 0) erased[bit_sigma[r]] = 1;
  for (int i = 0; i < n; ++i) {
    int hd = 0, n_erased = 0, erased_bit = -1;
    for (int b = 0; b < q; ++b) {
      if (received[i * q + b] < 0) hd |= 1 << b;
      if (erased[i * q + b]) {
        ++n_erased;
        erased_bit = b;
      }
    }
    if (n_erased == 0) {
      mm.at(hd, i) = 2;
    } else if (n_erased == 1) {
      mm.at(hd & ~(1 << erased_bit), i) = 1;
      mm.at(hd | (1 << erased_bit), i) = 1;
    }
  }
  return mm;
}

/// Score of M with respect to a codeword: sum of the multiplicities placed
/// on the transmitted symbols.
inline long long score(const MultiplicityMatrix& mm, std::span<const Symbol> codeword) {
  long long s = 0;
  for (int i = 0; i < mm.cols; ++i) s += mm.at(codeword[i], i);
  return s;
}

inline long long cost(const MultiplicityMatrix& mm) {
  long long c2 = 0;
  for (int v : mm.m) c2 += static_cast<long long>(v) * (v + 1);
  return c2 / 2;
}

/// ASD success threshold T(S) > C with T(S) = (a+1)(S - a(k-1)/2) for the
/// unique a with a(k-1) < S <= (a+1)(k-1).
inline bool asd_condition2(long long s, long long c, int k) {
  if (s <= 0) return false;
  const long long a = (s - 1) / (k - 1);
  // Compare 2*T(S) against 2*C to stay in integers.
  return (a + 1) * (2 * s - a * (k - 1)) > 2 * c;
}

}  // namespace rsrd
