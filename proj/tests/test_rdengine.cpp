#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rsrd/rdengine.hpp"

using namespace rsrd;

namespace {

std::vector<double> random_dist(int sz, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(sz);
  double z = 0.0;
  for (auto& v : p) {
    v = u(rng);
    z += v;
  }
  for (auto& v : p) v /= z;
  return p;
}

// Source with the hard decision mostly correct, like a trained profile.
std::vector<double> skewed_binary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.75, 0.999);
  const double p1 = u(rng);
  return {1.0 - p1, p1};
}

}  // namespace

TEST_CASE("ba_component degenerate source has zero rate and distortion") {
  const auto dm = conventional_measure(255, 239);
  const auto out = ba_component(std::vector<double>{0.0, 1.0}, dm, -2.0);
  CHECK(out.rate == Catch::Approx(0.0).margin(1e-9));
  CHECK(out.distortion == Catch::Approx(0.0).margin(1e-9));
  CHECK(out.q[1] == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("ba_component matches single-component direct B-A") {
  const auto dm = conventional_measure(255, 239);
  SourceModel src;
  src.dists = {{0.5, 0.5}};
  const auto direct = ba_direct_super(src, dm, -2.0);
  const auto comp = ba_component(src.dists[0], dm, -2.0);
  CHECK(comp.rate == Catch::Approx(direct.rate).margin(1e-9));
  CHECK(comp.distortion == Catch::Approx(direct.distortion).margin(1e-9));
}

TEST_CASE("slope limits") {
  const auto dm = conventional_measure(255, 239);
  const std::vector<double> p = {0.3, 0.7};
  // Zero-rate endpoint: best single reproduction letter per position.
  SourceModel one;
  one.dists = {p};
  const auto flat = zero_rate_point(one, dm);
  CHECK(flat.distortion == Catch::Approx(std::min(2 * p[0], 1.0)).margin(1e-12));
  CHECK(flat.q_dists[0][1] == 1.0);
  // s -> -inf: distortion -> per-letter minimum (here 0*p1 + 1*p0).
  const auto steep = ba_component(p, dm, -40.0);
  CHECK(steep.distortion == Catch::Approx(p[0] * 1.0).margin(1e-6));
}

TEST_CASE("factored equals direct B-A on small product sources") {
  std::mt19937_64 rng(31);
  for (const int l : {1, 2}) {
    const auto dm = l == 1 ? conventional_measure(255, 239) : mbm_measure(255, 239, 2);
    for (int trial = 0; trial < 10; ++trial) {
      SourceModel src;
      for (int i = 0; i < 3; ++i) src.dists.push_back(random_dist(dm.rows, rng));
      for (const double s : {-0.5, -2.0, -5.0}) {
        const auto fac = factored_rd(src, dm, s);
        const auto dir = ba_direct_super(src, dm, s);
        CHECK(fac.rate == Catch::Approx(dir.rate).margin(1e-6));
        CHECK(fac.distortion == Catch::Approx(dir.distortion).margin(1e-6));
      }
    }
  }
}

TEST_CASE("two identical components double the component rate") {
  const auto dm = conventional_measure(255, 239);
  SourceModel src;
  src.dists = {{0.2, 0.8}, {0.2, 0.8}};
  const auto fac = factored_rd(src, dm, -3.0);
  const auto comp = ba_component(src.dists[0], dm, -3.0);
  CHECK(fac.rate == Catch::Approx(2 * comp.rate).margin(1e-9));
  CHECK(fac.distortion == Catch::Approx(2 * comp.distortion).margin(1e-9));
}

TEST_CASE("rd_at_rate hits the target and is monotone") {
  std::mt19937_64 rng(32);
  const auto dm = conventional_measure(255, 239);
  SourceModel src;
  for (int i = 0; i < 40; ++i) src.dists.push_back(skewed_binary(rng));

  const auto p0 = rd_at_rate(src, dm, 0.0);
  double prev_d = p0.distortion;
  for (const double r : {1.0, 2.0, 4.0, 6.0}) {
    const auto pt = rd_at_rate(src, dm, r);
    CHECK(std::abs(pt.rate - r) <= 0.01);
    CHECK(pt.distortion <= prev_d + 1e-9);
    prev_d = pt.distortion;
  }
  // Rate 0: every position keeps whatever single letter is cheapest.
  double d0 = 0.0;
  for (const auto& p : src.dists) d0 += std::min(2 * p[0], 1.0);
  CHECK(p0.distortion == Catch::Approx(d0).margin(1e-3));
}

TEST_CASE("rd curve is non-increasing and convex over a slope sweep") {
  std::mt19937_64 rng(33);
  const auto dm = mbm_measure(255, 239, 2);
  SourceModel src;
  for (int i = 0; i < 25; ++i) src.dists.push_back(random_dist(3, rng));
  std::vector<std::pair<double, double>> curve;  // (D, R), D increasing
  for (int i = 0; i < 40; ++i) {
    const double s = -12.0 * std::pow(10.0, -2.0 * i / 39.0);
    const auto pt = factored_rd(src, dm, s);
    curve.emplace_back(pt.distortion, pt.rate);
  }
  for (size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].first >= curve[i - 1].first - 1e-9);
    CHECK(curve[i].second <= curve[i - 1].second + 1e-9);
  }
  // Convexity: slopes between consecutive points become less negative.
  for (size_t i = 2; i < curve.size(); ++i) {
    const auto [d0, r0] = curve[i - 2];
    const auto [d1, r1] = curve[i - 1];
    const auto [d2, r2] = curve[i];
    if (d1 - d0 > 1e-7 && d2 - d1 > 1e-7) {
      const double s01 = (r1 - r0) / (d1 - d0);
      const double s12 = (r2 - r1) / (d2 - d1);
      CHECK(s12 >= s01 - 1e-6);
    }
  }
}

TEST_CASE("closed-form conventional: worked single-component point") {
  // p = 0.5, lambda = 0.25 -> R = 1 - H(0.25), D_tilde = 0.25, D = 0.75.
  const std::vector<double> p = {0.5};
  const auto cf = closedform_conventional(p, 0.75);
  CHECK(cf.lambda == Catch::Approx(0.25).margin(1e-9));
  CHECK(cf.rate == Catch::Approx(1.0 - detail::h2(0.25)).margin(1e-9));
  CHECK(cf.rate == Catch::Approx(0.18872).margin(1e-4));
  CHECK(cf.q_dists[0][0] == Catch::Approx(0.5).margin(1e-9));
  CHECK(cf.q_dists[0][1] == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("closed-form conventional: perfect source") {
  const std::vector<double> p = {1.0, 1.0, 1.0};
  const auto cf = closedform_conventional(p, 0.0);
  CHECK(cf.rate == Catch::Approx(0.0).margin(1e-9));
  for (const auto& q : cf.q_dists) CHECK(q[1] == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("closed-form conventional matches the factored numerical curve") {
  std::mt19937_64 rng(34);
  const auto dm = conventional_measure(255, 239);
  SourceModel src;
  std::vector<double> p1;
  for (int i = 0; i < 30; ++i) {
    src.dists.push_back(skewed_binary(rng));
    p1.push_back(src.dists.back()[1]);
  }
  for (int i = 0; i < 12; ++i) {
    const double s = -8.0 * std::pow(10.0, -1.6 * i / 11.0);
    const auto num = factored_rd(src, dm, s);
    const auto cf = closedform_conventional(p1, num.distortion);
    CHECK(cf.rate == Catch::Approx(num.rate).margin(1e-6));
  }
}

TEST_CASE("closed-form bit-level matches ba_component at lambda = e^s") {
  std::mt19937_64 rng(35);
  const auto dm = bitlevel_measure(255, 239);
  std::uniform_real_distribution<double> u(0.8, 0.999);
  for (int trial = 0; trial < 20; ++trial) {
    const double p1 = u(rng);
    const double s = -std::uniform_real_distribution<double>(0.3, 4.0)(rng);
    const double lambda = std::exp(s);
    const std::vector<double> pv = {p1};
    const auto cf = closedform_bitlevel(pv, lambda);
    const auto num = ba_component(std::vector<double>{1.0 - p1, p1}, dm, s);
    CHECK(cf.rate == Catch::Approx(num.rate).margin(1e-6));
    CHECK(cf.distortion == Catch::Approx(num.distortion).margin(1e-6));
  }
}

TEST_CASE("closed-form bit-level identities") {
  // q0 + q1 = 1 for active components at any lambda.
  std::mt19937_64 rng(36);
  std::uniform_real_distribution<double> u(0.55, 0.99), ul(0.05, 0.95);
  for (int t = 0; t < 100; ++t) {
    const double lambda = ul(rng);
    const std::vector<double> p = {u(rng)};
    const auto cf = closedform_bitlevel(p, lambda);
    CHECK(cf.q_dists[0][0] + cf.q_dists[0][1] == Catch::Approx(1.0).margin(1e-9));
  }
  // p = 1: degenerate, D = 0.
  const auto cf = closedform_bitlevel(std::vector<double>{1.0}, 0.3);
  CHECK(cf.distortion == Catch::Approx(0.0).margin(1e-9));
  CHECK_THROWS_AS(closedform_bitlevel(std::vector<double>{0.9}, 1.5),
                  std::invalid_argument);
}

TEST_CASE("factorization invariance of the super-source iterates") {
  // With a product initialization, the super-source B-A iterate equals the
  // product of component iterates at every step; spot-check the first two
  // steps for n=2 by direct computation.
  const auto dm = conventional_measure(255, 239);
  const std::vector<std::vector<double>> p = {{0.3, 0.7}, {0.15, 0.85}};
  const double s = -1.7;
  auto step = [&](const std::vector<double>& q, const std::vector<double>& pj) {
    std::vector<double> qn(2, 0.0);
    for (int j = 0; j < 2; ++j) {
      double z = 0.0;
      for (int k = 0; k < 2; ++k) z += q[k] * std::exp(s * dm.delta(j, k));
      for (int k = 0; k < 2; ++k)
        qn[k] += pj[j] * q[k] * std::exp(s * dm.delta(j, k)) / z;
    }
    return qn;
  };
  std::vector<double> q1 = {0.5, 0.5}, q2 = {0.5, 0.5};
  std::vector<double> qs(4, 0.25);  // product initialization
  for (int t = 0; t < 2; ++t) {
    // Super-source step over joint letters (j1,j2), (k1,k2).
    std::vector<double> qsn(4, 0.0);
    for (int j1 = 0; j1 < 2; ++j1)
      for (int j2 = 0; j2 < 2; ++j2) {
        const double pj = p[0][j1] * p[1][j2];
        double z = 0.0;
        for (int k1 = 0; k1 < 2; ++k1)
          for (int k2 = 0; k2 < 2; ++k2)
            z += qs[2 * k1 + k2] *
                 std::exp(s * (dm.delta(j1, k1) + dm.delta(j2, k2)));
        for (int k1 = 0; k1 < 2; ++k1)
          for (int k2 = 0; k2 < 2; ++k2)
            qsn[2 * k1 + k2] += pj * qs[2 * k1 + k2] *
                                std::exp(s * (dm.delta(j1, k1) + dm.delta(j2, k2))) / z;
      }
    qs = qsn;
    q1 = step(q1, p[0]);
    q2 = step(q2, p[1]);
    for (int k1 = 0; k1 < 2; ++k1)
      for (int k2 = 0; k2 < 2; ++k2)
        CHECK(qs[2 * k1 + k2] == Catch::Approx(q1[k1] * q2[k2]).margin(1e-12));
  }
}

TEST_CASE("reverse water-filling level constraint") {
  std::mt19937_64 rng(37);
  std::vector<double> p;
  for (int i = 0; i < 50; ++i) p.push_back(skewed_binary(rng)[1]);
  double sum_p = 0.0;
  for (double v : p) sum_p += v;
  const double d_total = 8.0;
  const auto cf = closedform_conventional(p, d_total);
  double acc = 0.0;
  for (int i = 0; i < 50; ++i) {
    acc += cf.d_tilde[i];
    const double cap = std::min(p[i], 1.0 - p[i]);
    // Active components sit exactly at the common level.
    if (cf.d_tilde[i] < cap - 1e-12)
      CHECK(cf.d_tilde[i] == Catch::Approx(cf.lambda).margin(1e-12));
  }
  CHECK(acc == Catch::Approx(d_total + sum_p - 50.0).margin(1e-9));
}
