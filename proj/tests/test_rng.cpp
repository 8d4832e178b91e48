#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include "ice/rng.hpp"

using namespace ice;

TEST_CASE("same seed, same stream") {
  Rng a(123), b(123), c(124);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
}

TEST_CASE("mt19937_64 engine matches the standard's 10000th value") {
  Rng r(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = r.next_u64();
  CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("derive_seed has no collisions over labels and indices") {
  std::set<std::uint64_t> seen;
  const char* labels[] = {"landscape", "reference", "corpus", "pairgen", "infer/ice-sg", "infer/sampling", "iteration"};
  std::size_t n = 0;
  for (std::uint64_t master : {0ULL, 1ULL, 42ULL})
    for (const char* l : labels)
      for (std::uint64_t i = 0; i < 5000; ++i, ++n) seen.insert(derive_seed(master, l, i));
  CHECK(seen.size() == n);
  CHECK(derive_seed(42, "corpus", 0) == derive_seed(42, "corpus", 0));
  CHECK(derive_seed(42, "corpus", 0) != derive_seed(42, "corpu", 0));
}

TEST_CASE("fnv1a64 reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("uniform_index stays in range and covers it") {
  Rng r(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    auto v = r.uniform_index(7);
    REQUIRE(v < 7);
    ++hits[v];
  }
  // 1000 expected per cell, sd ~ 29
  for (int h : hits) CHECK(std::abs(h - 1000) < 150);
}

TEST_CASE("normal draws have unit moments") {
  Rng r(9);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("poisson mean and variance") {
  Rng r(17);
  const int n = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.poisson(6.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 6.0) < 0.05);
  CHECK(std::abs(var - 6.0) < 0.15);
}

TEST_CASE("categorical frequencies within 3 standard errors") {
  Rng r(21);
  const std::vector<double> w{0.0, 1.0, 3.0, 6.0};
  const int n = 50000;
  std::vector<int> hits(4, 0);
  for (int i = 0; i < n; ++i) ++hits[r.categorical(w)];
  CHECK(hits[0] == 0);
  for (int k = 1; k < 4; ++k) {
    const double p = w[k] / 10.0;
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(hits[k] / double(n) - p) < 3 * se);
  }
  CHECK_THROWS(r.categorical(std::vector<double>{0.0, 0.0}));
}
