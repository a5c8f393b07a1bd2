#pragma once

#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "rsrd/channel.hpp"
#include "rsrd/patterns.hpp"
#include "rsrd/rdengine.hpp"
#include "rsrd/rng.hpp"
#include "rsrd/rs.hpp"

namespace rsrd {

/// Entry-wise average of reliability-sorted APP matrices over tau training
/// frames, plus the bit-level analog. Row j, column i of p_bar is the mean
/// probability of the (j+1)-th most likely symbol at the (i+1)-th LRP.
struct TrainedProfile {
  int q = 0, n = 0, tau = 0;
  std::uint64_t seed = 0;
  double ebno_db = 0.0, code_rate = 0.0;
  std::vector<std::vector<double>> p_bar;  // (2^q) x n
  std::vector<double> bit_rel;             // n*q ascending-rank bit reliabilities

  /// Top-l symbol error-letter source: letter j (1..l) has the rank-j mass,
  /// letter 0 the residual.
  SourceModel symbol_source(int l) const {
    SourceModel src;
    src.dists.resize(n);
    for (int i = 0; i < n; ++i) {
      auto& d = src.dists[i];
      d.assign(l + 1, 0.0);
      double top = 0.0;
      for (int j = 1; j <= l; ++j) {
        d[j] = p_bar[j - 1][i];
        top += d[j];
      }
      d[0] = std::max(0.0, 1.0 - top);
    }
    return src;
  }

  /// Bit-level source: letter 1 = hard bit decision correct.
  SourceModel bit_source() const {
    SourceModel src;
    src.dists.resize(bit_rel.size());
    for (size_t i = 0; i < bit_rel.size(); ++i)
      src.dists[i] = {1.0 - bit_rel[i], bit_rel[i]};
    return src;
  }
};

inline TrainedProfile train(const RsCode& code, const ChannelConfig& cfg, int tau,
                            std::uint64_t seed) {
  if (tau < 1) throw std::invalid_argument("train: tau must be >= 1");
  const int n = code.n(), q = cfg.q, rows = 1 << q;
  TrainedProfile prof;
  prof.q = q;
  prof.n = n;
  prof.tau = tau;
  prof.seed = seed;
  prof.ebno_db = cfg.ebno_db;
  prof.code_rate = cfg.code_rate;
  prof.p_bar.assign(rows, std::vector<double>(n, 0.0));
  prof.bit_rel.assign(static_cast<size_t>(n) * q, 0.0);

  std::vector<Symbol> msg(code.k());
  for (int t = 0; t < tau; ++t) {
    auto rng = stream_rng(seed, t);
    std::uniform_int_distribution<int> sym(0, rows - 1);
    for (auto& s : msg) s = static_cast<Symbol>(sym(rng));
    const auto cw = code.encode(msg);
    const auto received = transmit(cfg, cw, rng);
    const auto app = symbol_app(cfg, received);
    const auto view = reliability(app);
    for (int i = 0; i < n; ++i) {
      const int pos = view.sigma[i];
      for (int j = 0; j < rows; ++j)
        prof.p_bar[j][i] += app.p(view.pi[pos][j], pos);
    }
    auto rel = bit_app(cfg, received);
    std::sort(rel.begin(), rel.end());
    for (size_t b = 0; b < rel.size(); ++b) prof.bit_rel[b] += rel[b];
  }
  for (auto& row : prof.p_bar)
    for (auto& v : row) v /= tau;
  for (auto& v : prof.bit_rel) v /= tau;
  return prof;
}

struct DecodeResult {
  std::optional<std::vector<Symbol>> chosen;
  int candidates = 0;
  int trials_run = 0;
};

/// ML candidate selection: minimum squared Euclidean distance between the
/// candidate's BPSK image and the received sequence; first-found wins ties.
inline const std::vector<Symbol>& ml_select(
    const std::vector<std::vector<Symbol>>& candidates,
    std::span<const double> received, int q) {
  if (candidates.empty()) throw std::invalid_argument("ml_select: empty candidate list");
  double best = 1e300;
  size_t best_i = 0;
  for (size_t ci = 0; ci < candidates.size(); ++ci) {
    double d = 0.0;
    const auto& cw = candidates[ci];
    for (size_t i = 0; i < cw.size(); ++i)
      for (int b = 0; b < q; ++b) {
        const double sig = ((cw[i] >> b) & 1) ? -1.0 : 1.0;
        const double diff = received[i * q + b] - sig;
        d += diff * diff;
      }
    if (d < best) {
      best = d;
      best_i = ci;
    }
  }
  return candidates[best_i];
}

/// One multi-trial decoding pass: each erasure pattern is moved to codeword
/// coordinates, materialized as a hard-decision word (letter 0 erases,
/// letter j picks the rank-j symbol), decoded, and distinct codewords are
/// collected; ML picks the winner.
inline DecodeResult decode_frame(const RsCode& code, std::span<const double> received,
                                 const ReliabilityView& view, const PatternSet& pset,
                                 int q) {
  const int n = code.n();
  std::vector<std::vector<Symbol>> candidates;
  HardDecisionWord word;
  word.symbols.resize(n);
  word.erased.resize(n);
  DecodeResult res;
  for (const auto& pat : pset.patterns) {
    ++res.trials_run;
    const auto cw_pat = to_codeword_coords(pat, view.sigma);
    for (int pos = 0; pos < n; ++pos) {
      if (cw_pat[pos] == 0) {
        word.erased[pos] = 1;
        word.symbols[pos] = 0;
      } else {
        word.erased[pos] = 0;
        word.symbols[pos] = view.pi[pos][cw_pat[pos] - 1];
      }
    }
    auto dec = code.decode_ee(word);
    if (dec && std::find(candidates.begin(), candidates.end(), *dec) == candidates.end())
      candidates.push_back(std::move(*dec));
  }
  res.candidates = static_cast<int>(candidates.size());
  if (!candidates.empty()) res.chosen = ml_select(candidates, received, q);
  return res;
}

/// Genie success test: some pattern in the set meets the distortion
/// threshold for the given error pattern.
inline bool oracle_decode(const ErrorPattern& x, const PatternSet& pset,
                          const DistortionMeasure& dm) {
  for (const auto& p : pset.patterns)
    if (succeeds(x, p, dm)) return true;
  return false;
}

inline std::int64_t min_distortion_scaled(const ErrorPattern& x, const PatternSet& pset,
                                          const DistortionMeasure& dm) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const auto& p : pset.patterns)
    best = std::min(best, distortion_scaled(x, p, dm));
  return best;
}

/// Decoding scheme descriptor for experiments.
struct Scheme {
  enum class Kind { SingleBm, Gmd, Sed, Mbm, Hm74, BitAsd, Masd, Masd2a };
  Kind kind = Kind::SingleBm;
  int l = 1;   // top-l (Mbm) / SED l
  int f = 0;   // SED f
  int m = 0;   // ASD maximum multiplicity
  int R = 0;   // log2 of the pattern-set size, where applicable

  bool oracle_only() const {
    return kind == Kind::BitAsd || kind == Kind::Masd || kind == Kind::Masd2a;
  }
  bool bit_level() const { return kind == Kind::BitAsd; }

  std::string name() const {
    switch (kind) {
      case Kind::SingleBm: return "single-BM";
      case Kind::Gmd: return "GMD";
      case Kind::Sed: return "SED(" + std::to_string(l) + "," + std::to_string(f) + ")";
      case Kind::Mbm: return "mBM-" + std::to_string(l) + "(" + std::to_string(R) + ")";
      case Kind::Hm74: return "mBM-HM74(" + std::to_string(R) + ")";
      case Kind::BitAsd: return "m-b-ASD(" + std::to_string(R) + ")";
      case Kind::Masd: return "mASD-" + std::to_string(m) + "(" + std::to_string(R) + ")";
      case Kind::Masd2a: return "mASD-2a(" + std::to_string(R) + ")";
    }
    return "?";
  }

  /// Error-letter alphabet parameter for extract_error_pattern.
  int error_l() const {
    switch (kind) {
      case Kind::Mbm: return l;
      case Kind::Hm74: return 2;
      case Kind::Masd: return m;
      case Kind::Masd2a: return 2;
      default: return 1;
    }
  }

  DistortionMeasure measure(int n, int k) const {
    switch (kind) {
      case Kind::SingleBm:
      case Kind::Gmd:
      case Kind::Sed:
        return conventional_measure(n, k);
      case Kind::Mbm:
        return l == 1 ? conventional_measure(n, k) : mbm_measure(n, k, l);
      case Kind::Hm74:
        return error_only_measure(n, k, 2);
      case Kind::BitAsd:
        return bitlevel_measure(n, k);
      case Kind::Masd:
        return asd_measure(n, k, m, allowable_types(m, m));
      case Kind::Masd2a:
        return asd_measure(n, k, 2, {{2, 0}, {1, 1}, {0, 0}});
    }
    throw std::logic_error("unreachable");
  }
};

struct FerOptions {
  int frames = 1000;
  std::uint64_t seed = 1;
  bool oracle = false;
  int threads = 1;
  bool fresh_sets = true;   // regenerate random sets per frame
  bool include_hd = true;   // force the all-HD pattern into random sets
};

struct FrameLog {
  long frame = 0;
  double min_distortion = 0.0;
  int candidates = 0;
  bool success = false;
};

struct FerResult {
  double fer = 0.0, ci_lo = 0.0, ci_hi = 0.0;
  long errors = 0;
  int frames = 0;
  double mean_candidates = 0.0;
  std::vector<FrameLog> log;
};

inline std::pair<double, double> wilson_interval(long errors, long n_trials) {
  if (n_trials == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;  // 95%
  const double phat = static_cast<double>(errors) / n_trials;
  const double z2n = z * z / n_trials;
  const double denom = 1.0 + z2n;
  const double center = phat + z2n / 2.0;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n_trials + z2n / (4.0 * n_trials));
  return {std::max(0.0, (center - half) / denom), std::min(1.0, (center + half) / denom)};
}

/// Full frame loop for one scheme: transmit, compute reliabilities, build the
/// pattern set, decode (real BM trials or the distortion-threshold genie),
/// and count frames where the selected codeword differs from the transmitted
/// one. Frames use independent rng streams and are processed in parallel.
inline FerResult fer_experiment(const RsCode& code, const ChannelConfig& cfg,
                                const TrainedProfile& prof, const Scheme& scheme,
                                const FerOptions& opt) {
  const int n = code.n(), k = code.k(), q = cfg.q;
  const DistortionMeasure dm = scheme.measure(n, k);
  const bool oracle = opt.oracle || scheme.oracle_only();

  // Fixed machinery shared across frames.
  std::optional<PatternSet> fixed_set;
  std::optional<RdPoint> rd;            // for per-frame random sets
  std::optional<RdPoint> rd_tail;       // Hm74 MRP tail
  std::optional<CoveringCode> cov;
  switch (scheme.kind) {
    case Scheme::Kind::SingleBm: {
      PatternSet ps;
      ps.scheme = "single-BM";
      ps.patterns.push_back(ErasurePattern(n, 1));
      fixed_set = std::move(ps);
      break;
    }
    case Scheme::Kind::Gmd:
      fixed_set = gmd_set(n, code.d_min());
      break;
    case Scheme::Kind::Sed:
      fixed_set = sed_set(scheme.l, scheme.f, n);
      break;
    case Scheme::Kind::Mbm:
    case Scheme::Kind::Masd:
    case Scheme::Kind::Masd2a:
      rd = rd_at_rate(prof.symbol_source(scheme.error_l()), dm, scheme.R);
      break;
    case Scheme::Kind::BitAsd:
      rd = rd_at_rate(prof.bit_source(), dm, scheme.R);
      break;
    case Scheme::Kind::Hm74: {
      cov = hamming74();
      SourceModel full = prof.symbol_source(2);
      SourceModel tail;
      tail.dists.assign(full.dists.begin() + cov->n_c, full.dists.end());
      rd_tail = rd_at_rate(tail, dm, scheme.R - cov->k_c);
      break;
    }
  }

  FerResult res;
  res.frames = opt.frames;
  res.log.resize(opt.frames);
  std::atomic<long> next{0};
  std::atomic<long> errors{0};
  std::atomic<long> cand_total{0};

  auto worker = [&]() {
    std::vector<Symbol> msg(k);
    std::optional<PatternSet> local_set;
    for (;;) {
      const long f = next.fetch_add(1);
      if (f >= opt.frames) break;
      auto rng = stream_rng(opt.seed, f);
      std::uniform_int_distribution<int> sym(0, (1 << q) - 1);
      for (auto& s : msg) s = static_cast<Symbol>(sym(rng));
      const auto cw = code.encode(msg);
      const auto received = transmit(cfg, cw, rng);
      const auto app = symbol_app(cfg, received);
      const auto view = reliability(app);

      const PatternSet* pset = nullptr;
      if (fixed_set) {
        pset = &*fixed_set;
      } else {
        const bool fresh = opt.fresh_sets || !local_set;
        if (fresh) {
          auto set_rng = opt.fresh_sets ? rng : stream_rng(opt.seed, 0x5e75e7ULL);
          if (rd) {
            local_set = random_set(*rd, scheme.R, dm.col_letter_offset, set_rng,
                                   opt.include_hd);
          } else {
            local_set = covering_hybrid_set(*cov, *rd_tail, scheme.R, n, set_rng,
                                            opt.include_hd);
          }
        }
        pset = &*local_set;
      }

      ErrorPattern x;
      std::vector<int> bit_sigma;
      if (scheme.bit_level()) {
        const auto rel = bit_app(cfg, received);
        bit_sigma = bit_reliability_order(rel);
        x = extract_bit_error_pattern(cw, received, bit_sigma, q);
      } else {
        x = extract_error_pattern(cw, view, scheme.error_l());
      }
      const auto min_d = min_distortion_scaled(x, *pset, dm);

      bool ok;
      int candidates = 0;
      if (oracle) {
        ok = min_d < dm.threshold_scaled;
      } else {
        auto dec = decode_frame(code, received, view, *pset, q);
        candidates = dec.candidates;
        ok = dec.chosen && *dec.chosen == cw;
      }
      if (!ok) errors.fetch_add(1);
      cand_total.fetch_add(candidates);
      res.log[f] = {f, static_cast<double>(min_d) / static_cast<double>(dm.denom),
                    candidates, ok};
    }
  };

  const int nthreads = std::max(1, opt.threads);
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  res.errors = errors.load();
  res.fer = static_cast<double>(res.errors) / opt.frames;
  std::tie(res.ci_lo, res.ci_hi) = wilson_interval(res.errors, opt.frames);
  res.mean_candidates = static_cast<double>(cand_total.load()) / opt.frames;
  return res;
}

}  // namespace rsrd
