#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cict/error.hpp"
#include "cict/eval.hpp"
#include "cict/rng.hpp"
#include "oracles.hpp"

using namespace cict;
using doctest::Approx;

TEST_CASE("auc examples") {
  CHECK(eval::roc_auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}).auc == 0.75);
  CHECK(eval::roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}).auc == 1.0);
  CHECK(eval::roc_auc(std::vector<double>(6, 0.3), std::vector<int>{0, 1, 0, 1, 1, 0}).auc == 0.5);
  try {
    eval::roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Metric);
  }
}

TEST_CASE("auc: trapezoid, pairs and rank-sum agree") {
  Rng rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.below(999);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(i % 2);
      // coarse grid forces plenty of ties
      s[i] = std::round((rng.uniform() + 0.3 * y[i]) * 20.0) / 20.0;
    }
    const auto roc = eval::roc_auc(s, y);
    const double pairs = oracle::auc_by_pairs(s, y);
    CHECK(std::abs(roc.auc - pairs) <= 1e-12);
    CHECK(std::abs(eval::trapezoid_auc(roc.points) - pairs) <= 1e-12);
    for (std::size_t k = 1; k < roc.points.size(); ++k) {
      CHECK(roc.points[k].fpr >= roc.points[k - 1].fpr);
      CHECK(roc.points[k].tpr >= roc.points[k - 1].tpr);
    }
    // strictly increasing transform
    std::vector<double> t(n);
    std::transform(s.begin(), s.end(), t.begin(), [](double v) { return std::exp(3 * v) - 7; });
    CHECK(eval::roc_auc(t, y).auc == roc.auc);
  }
}

TEST_CASE("hosmer-lemeshow") {
  SUBCASE("constant calibrated score") {
    std::vector<double> s(100, 0.5);
    std::vector<int> y(100);
    for (int i = 0; i < 100; ++i) y[i] = i % 2;
    const auto hl = eval::hosmer_lemeshow(s, y);
    CHECK(hl.chi_square == Approx(0.0));
    CHECK(hl.p_value == Approx(1.0));
  }
  SUBCASE("scores equal group event rates") {
    // 10 groups of 10; group g has score (g+0.5)/10 rounded to a multiple of 0.1 and that many events
    std::vector<double> s;
    std::vector<int> y;
    for (int g = 0; g < 10; ++g) {
      const int events = 1 + g % 8;
      for (int i = 0; i < 10; ++i) {
        s.push_back(g + events / 10.0);  // keeps groups sorted
        y.push_back(i < events);
      }
    }
    for (auto& v : s) v = (v - std::floor(v));  // back to the rate, order preserved by construction below
    // re-sort rows into score order so decile groups coincide with the blocks above
    std::vector<std::size_t> idx(s.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s[a] < s[b]; });
    std::vector<double> ss;
    std::vector<int> yy;
    for (auto i : idx) {
      ss.push_back(s[i]);
      yy.push_back(y[i]);
    }
    const auto hl = eval::hosmer_lemeshow(ss, yy);
    CHECK(hl.chi_square == Approx(0.0).epsilon(1e-12));
    CHECK(hl.df == 8);
  }
  SUBCASE("two-group formula") {
    std::vector<double> s(20, 0.5);
    std::vector<int> y(20, 0);
    for (int i = 0; i < 3; ++i) y[i] = 1;
    for (int i = 10; i < 17; ++i) y[i] = 1;
    const auto hl = eval::hosmer_lemeshow(s, y, 2);
    // (3-5)^2/(5*(1-5/10)) + (7-5)^2/(5*(1-5/10)) = 1.6 + 1.6
    CHECK(hl.chi_square == Approx(3.2).epsilon(1e-12));
    CHECK(hl.groups[0].observed == 3);
    CHECK(hl.groups[1].observed == 7);
    CHECK(hl.df == 1);
    CHECK(hl.p_value == Approx(std::erfc(std::sqrt(3.2 / 2.0))).epsilon(1e-9));
  }
  SUBCASE("degenerate groups are excluded") {
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 50; ++i) {
      s.push_back(0.0);
      y.push_back(0);
    }
    for (int i = 0; i < 50; ++i) {
      s.push_back(0.5);
      y.push_back(i % 2);
    }
    const auto hl = eval::hosmer_lemeshow(s, y);
    int degenerate = 0;
    for (const auto& g : hl.groups) degenerate += g.degenerate;
    CHECK(degenerate == 5);
    CHECK(hl.df == 3);
    CHECK(std::isfinite(hl.chi_square));
  }
  CHECK_THROWS_AS(eval::hosmer_lemeshow(std::vector<double>{0.1, 0.2}, std::vector<int>{0, 1}), Error);
}

TEST_CASE("youden threshold") {
  const auto y1 = eval::youden_threshold(std::vector<double>{0.1, 0.2, 0.3, 0.7, 0.8}, std::vector<int>{0, 0, 0, 1, 1});
  CHECK(y1.threshold == Approx(0.5));
  CHECK(y1.j == 1.0);
  CHECK(y1.sensitivity == 1.0);
  CHECK(y1.specificity == 1.0);

  Rng rng(2);
  std::vector<double> s(4000);
  std::vector<int> y(4000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = rng.uniform();
    y[i] = rng.bernoulli(0.5);
  }
  const auto yn = eval::youden_threshold(s, y);
  CHECK(yn.j >= 0.0);
  CHECK(yn.j < 0.06);  // max of a KS-like statistic on 2000+2000 null draws

  // ties resolve to the lowest threshold
  const auto yt = eval::youden_threshold(std::vector<double>{0.1, 0.2, 0.3, 0.4}, std::vector<int>{0, 1, 0, 1});
  CHECK(yt.j == Approx(0.5));
  CHECK(yt.threshold == Approx(0.15));
}

TEST_CASE("mse and r2") {
  std::vector<double> s{0.0, 1.0, 0.5, 0.5};
  std::vector<int> y{0, 1, 0, 1};
  CHECK(eval::mean_squared_error(s, y) == Approx(0.125));
  CHECK(eval::r_squared(s, y) == Approx(0.5));
}

namespace {
Matrix two_blobs(std::size_t per, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(2 * per, 2);
  for (std::size_t i = 0; i < 2 * per; ++i) {
    const double off = i < per ? 0.0 : 10.0;
    m(i, 0) = off + rng.normal();
    m(i, 1) = -off + rng.normal();
  }
  return m;
}
}  // namespace

TEST_CASE("pam") {
  const auto data = two_blobs(30, 3);
  const auto res = eval::pam_cluster(data, 2);
  for (std::size_t i = 1; i < 30; ++i) CHECK(res.assignment[i] == res.assignment[0]);
  for (std::size_t i = 31; i < 60; ++i) CHECK(res.assignment[i] == res.assignment[30]);
  CHECK(res.assignment[0] != res.assignment[30]);
  for (std::size_t k = 1; k < res.cost_trace.size(); ++k) CHECK(res.cost_trace[k] <= res.cost_trace[k - 1]);
  CHECK(res.cost == Approx(res.cost_trace.back()));

  const auto all = eval::pam_cluster(two_blobs(4, 4), 8);
  CHECK(all.cost == 0.0);

  // duplicated rows: same medoids up to duplicate indices
  const auto small = two_blobs(6, 5);
  Matrix doubled(24, 2);
  for (std::size_t r = 0; r < 12; ++r)
    for (std::size_t c = 0; c < 2; ++c) doubled(r, c) = doubled(r + 12, c) = small(r, c);
  const auto a = eval::pam_cluster(small, 2);
  const auto b = eval::pam_cluster(doubled, 2);
  std::vector<std::size_t> ma = a.medoids, mb;
  for (auto m : b.medoids) mb.push_back(m % 12);
  std::sort(ma.begin(), ma.end());
  std::sort(mb.begin(), mb.end());
  CHECK(ma == mb);

  // monotone descent from arbitrary distance matrices
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + rng.below(20);
    Matrix pts(n, 3);
    for (auto& v : pts.data()) v = rng.uniform();
    const auto r = eval::pam(eval::euclidean_distances(pts), 1 + rng.below(4));
    for (std::size_t k = 1; k < r.cost_trace.size(); ++k) CHECK(r.cost_trace[k] <= r.cost_trace[k - 1] + 1e-12);
  }
  CHECK_THROWS_AS(eval::pam_cluster(small, 0), Error);
  CHECK_THROWS_AS(eval::pam_cluster(small, 13), Error);
}

TEST_CASE("adjusted rand index") {
  using V = std::vector<std::size_t>;
  CHECK(eval::adjusted_rand_index(V{0, 0, 1, 1}, V{0, 0, 1, 1}) == 1.0);
  CHECK(eval::adjusted_rand_index(V{0, 0, 1, 1}, V{5, 5, 2, 2}) == 1.0);
  // contingency [[1,1],[1,1]]
  const V a{0, 0, 1, 1}, b{0, 1, 0, 1};
  CHECK(eval::adjusted_rand_index(a, b) == oracle::ari_by_pairs(a, b));
  CHECK(eval::adjusted_rand_index(a, b) == Approx(-0.5));
  // one cluster vs balanced partition
  V one(100, 0), bal(100);
  for (std::size_t i = 0; i < 100; ++i) bal[i] = i % 2;
  CHECK(std::abs(eval::adjusted_rand_index(one, bal)) < 1e-12);

  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    V x(n), y(n), relabeled(n);
    const std::size_t kx = 1 + rng.below(5), ky = 1 + rng.below(5);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.below(kx);
      y[i] = rng.bernoulli(0.6) ? x[i] % ky : rng.below(ky);
      relabeled[i] = 100 - y[i];
    }
    const double ari = eval::adjusted_rand_index(x, y);
    CHECK(ari == oracle::ari_by_pairs(x, y));
    CHECK(ari == eval::adjusted_rand_index(y, x));
    CHECK(ari == eval::adjusted_rand_index(x, relabeled));
  }
  CHECK_THROWS_AS(eval::adjusted_rand_index(V{0, 1}, V{0}), Error);
}

TEST_CASE("quartiles") {
  const auto q = eval::quartiles(std::vector<double>{1, 2, 3, 4});
  CHECK(q.q1 == Approx(1.75));
  CHECK(q.median == Approx(2.5));
  CHECK(q.q3 == Approx(3.25));
  CHECK(q.mean == Approx(2.5));
}
