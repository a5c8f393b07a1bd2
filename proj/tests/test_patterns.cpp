#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "rsrd/patterns.hpp"
#include "rsrd/rng.hpp"

using namespace rsrd;

TEST_CASE("gmd_set structure") {
  const auto ps = gmd_set(255, 17);
  REQUIRE(ps.patterns.size() == 9);
  CHECK(ps.rate_bits == Catch::Approx(std::log2(9.0)));
  CHECK(ps.patterns[0] == ErasurePattern(255, 1));
  for (int j = 0; j < 9; ++j) {
    int erased = 0;
    for (int i = 0; i < 255; ++i) {
      if (ps.patterns[j][i] == 0) {
        ++erased;
        CHECK(i < 2 * j);  // always the least reliable prefix
      }
    }
    CHECK(erased == 2 * j);
  }
  CHECK_THROWS_AS(gmd_set(255, 16), std::invalid_argument);
}

TEST_CASE("sed_set counts and membership") {
  const auto small = sed_set(3, 2, 15);
  REQUIRE(small.patterns.size() == 4);  // empty set + 3 pairs
  std::set<ErasurePattern> uniq(small.patterns.begin(), small.patterns.end());
  CHECK(uniq.size() == 4);
  for (const auto& p : small.patterns) {
    int w = 0;
    for (int i = 0; i < 15; ++i) {
      if (p[i] == 0) {
        ++w;
        CHECK(i < 3);
      }
    }
    CHECK(w % 2 == 0);
    CHECK(w <= 2);
  }

  const auto full = sed_set(12, 12, 255);
  CHECK(full.patterns.size() == 2048);  // even subsets of 12 elements
  CHECK(full.rate_bits == Catch::Approx(11.0));

  CHECK(sed_set(4, 2, 15).patterns.size() == 7);
  CHECK_THROWS_AS(sed_set(3, 4, 15), std::invalid_argument);
}

TEST_CASE("random_set basics") {
  RdPoint rd;
  rd.q_dists.assign(10, {0.0, 1.0});  // point mass on the hard decision
  auto rng = stream_rng(5, 0);
  const auto ps = random_set(rd, 3, 0, rng);
  REQUIRE(ps.patterns.size() == 8);
  CHECK(ps.rate_bits == 3.0);
  for (const auto& p : ps.patterns) CHECK(p == ErasurePattern(10, 1));

  auto rng2 = stream_rng(5, 1);
  const auto one = random_set(rd, 0, 0, rng2);
  REQUIRE(one.patterns.size() == 1);
  CHECK(one.patterns[0] == ErasurePattern(10, 1));
}

TEST_CASE("random_set respects the sampling distribution") {
  RdPoint rd;
  rd.q_dists.assign(4, {0.3, 0.7});
  auto rng = stream_rng(6, 0);
  const auto ps = random_set(rd, 12, 0, rng, /*include_hd=*/false);
  REQUIRE(ps.patterns.size() == 4096);
  for (int i = 0; i < 4; ++i) {
    double frac0 = 0.0;
    for (const auto& p : ps.patterns) frac0 += (p[i] == 0);
    frac0 /= ps.patterns.size();
    CHECK(frac0 == Catch::Approx(0.3).margin(0.02));
  }
}

TEST_CASE("random_set letter offset and forced pattern") {
  RdPoint rd;
  rd.q_dists.assign(6, {0.5, 0.5});
  auto rng = stream_rng(7, 0);
  const auto ps = random_set(rd, 5, 1, rng);  // letters {1, 2}
  CHECK(ps.patterns[0] == ErasurePattern(6, 1));
  for (const auto& p : ps.patterns)
    for (const auto c : p) CHECK((c == 1 || c == 2));
  bool saw2 = false;
  for (const auto& p : ps.patterns)
    for (const auto c : p) saw2 |= (c == 2);
  CHECK(saw2);
}

TEST_CASE("hamming74 is a perfect covering code") {
  const auto cc = hamming74();
  REQUIRE(cc.codewords.size() == 16);
  CHECK(cc.n_c == 7);
  CHECK(cc.t_c == 1);

  // Distinct codewords with pairwise distance >= 3.
  for (size_t a = 0; a < 16; ++a)
    for (size_t b = a + 1; b < 16; ++b) {
      int d = 0;
      for (int i = 0; i < 7; ++i) d += cc.codewords[a][i] != cc.codewords[b][i];
      CHECK(d >= 3);
    }

  // Exhaustive covering radius over {1,2}^7.
  for (int w = 0; w < 128; ++w) {
    int best = 8;
    for (const auto& cw : cc.codewords) {
      int d = 0;
      for (int i = 0; i < 7; ++i) {
        const std::uint8_t letter = ((w >> i) & 1) ? 2 : 1;
        d += letter != cw[i];
      }
      best = std::min(best, d);
    }
    CHECK(best <= cc.t_c);
  }

  // Letters are only {1, 2} and the all-zero message maps to all-HD.
  CHECK(cc.codewords[0] == std::vector<std::uint8_t>(7, 1));
}

TEST_CASE("covering_hybrid_set counts and layout") {
  const auto cc = hamming74();
  RdPoint tail;
  tail.q_dists.assign(248, {0.1, 0.9});
  auto rng = stream_rng(8, 0);
  const auto ps = covering_hybrid_set(cc, tail, 11, 255, rng);
  REQUIRE(ps.patterns.size() == 2048);
  CHECK(ps.rate_bits == 11.0);

  // Patterns come in 16 blocks of 128; block b carries codeword b on the LRPs.
  for (int b = 0; b < 16; ++b)
    for (int t = 0; t < 128; ++t) {
      const auto& p = ps.patterns[static_cast<size_t>(b) * 128 + t];
      for (int i = 0; i < 7; ++i) CHECK(p[i] == cc.codewords[b][i]);
    }
  // Every codeword shares the same tail list; tail 0 is all hard decisions.
  for (int b = 0; b < 16; ++b) {
    const auto& p0 = ps.patterns[static_cast<size_t>(b) * 128];
    for (int i = 7; i < 255; ++i) CHECK(p0[i] == 1);
    for (int t = 0; t < 128; ++t)
      for (int i = 7; i < 255; ++i)
        CHECK(ps.patterns[static_cast<size_t>(b) * 128 + t][i] == ps.patterns[t][i]);
  }
}

TEST_CASE("covering_hybrid_set rate-4 degenerates to the bare covering code") {
  const auto cc = hamming74();
  RdPoint tail;
  tail.q_dists.assign(8, {0.5, 0.5});
  auto rng = stream_rng(9, 0);
  const auto ps = covering_hybrid_set(cc, tail, 4, 15, rng);
  REQUIRE(ps.patterns.size() == 16);
  for (int b = 0; b < 16; ++b)
    for (int i = 7; i < 15; ++i) CHECK(ps.patterns[b][i] == 1);
  CHECK_THROWS_AS(covering_hybrid_set(cc, tail, 3, 15, rng), std::invalid_argument);
}

TEST_CASE("to_codeword_coords places rank i at position sigma(i)") {
  const std::vector<int> sigma = {1, 2, 0};
  const ErasurePattern in = {0, 1, 2};
  const auto out = to_codeword_coords(in, sigma);
  CHECK(out == ErasurePattern{2, 0, 1});

  // Identity permutation round-trips.
  const std::vector<int> id = {0, 1, 2};
  CHECK(to_codeword_coords(in, id) == in);
}
