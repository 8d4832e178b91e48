#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>

#include "ice/seq.hpp"
#include "support.hpp"

using namespace ice;

namespace {

// Memoized recursion over suffixes; shares no code with the library's table DP.
std::size_t edit_distance_oracle(const std::vector<Token>& a, const std::vector<Token>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = go(i + 1, j + 1) + (a[i] != b[j]);
    best = std::min(best, go(i + 1, j) + 1);
    best = std::min(best, go(i, j + 1) + 1);
    return memo[key] = best;
  };
  return go(0, 0);
}

}  // namespace

TEST_CASE("alphabet maps symbols both ways") {
  Alphabet a("ACDEFGHK");
  CHECK(a.size() == 8);
  CHECK(a.index('E') == Token{3});
  CHECK_FALSE(a.index('Z').has_value());
  CHECK(a.symbol(7) == 'K');
  CHECK_THROWS(Alphabet("AA"));
  CHECK_THROWS(Alphabet(""));
}

TEST_CASE("parse and format round trip") {
  Alphabet a("ACD");
  auto s = parse_sequence("DACD", a);
  CHECK(s.tokens == std::vector<Token>{2, 0, 1, 2});
  CHECK(format_sequence(s, a) == "DACD");
  CHECK_THROWS(parse_sequence("DAXD", a));
}

TEST_CASE("validate_sequence names the problem") {
  Alphabet a("ACD");
  CHECK_FALSE(validate_sequence(Sequence({0, 1, 2}), a, 3).has_value());
  CHECK(validate_sequence(Sequence(std::vector<Token>{0, 1}), a, 3).has_value());
  CHECK(validate_sequence(Sequence({0, 5, 1}), a, 3).has_value());
}

TEST_CASE("region mask with an immutable span") {
  auto m = RegionMask::with_immutable_span(20, 8, 4);
  CHECK(m.n_mutable() == 16);
  for (std::size_t i = 0; i < 20; ++i) CHECK(m.is_mutable(i) == (i < 8 || i >= 12));
  CHECK(RegionMask::all_mutable(5).n_mutable() == 5);
  CHECK_THROWS(RegionMask::with_immutable_span(10, 8, 4));
}

TEST_CASE("apply_edits rejects immutable, duplicate and no-op edits") {
  auto mask = RegionMask::with_immutable_span(4, 1, 1);
  Sequence x({0, 0, 0, 0});
  std::vector<Edit> ok{{0, 2}, {3, 1}};
  CHECK(apply_edits(x, ok, mask).tokens == std::vector<Token>{2, 0, 0, 1});
  std::vector<Edit> immut{{1, 2}};
  CHECK_THROWS_AS(apply_edits(x, immut, mask), std::invalid_argument);
  std::vector<Edit> dup{{0, 1}, {0, 2}};
  CHECK_THROWS_AS(apply_edits(x, dup, mask), std::invalid_argument);
  std::vector<Edit> noop{{0, 0}};
  CHECK_THROWS_AS(apply_edits(x, noop, mask), std::invalid_argument);
  std::vector<Edit> range{{4, 1}};
  CHECK_THROWS_AS(apply_edits(x, range, mask), std::invalid_argument);
}

TEST_CASE("levenshtein agrees with the recursive oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto la = rng.uniform_index(9), lb = rng.uniform_index(9);
    auto a = testing::random_sequence(rng, la, 3);
    auto b = testing::random_sequence(rng, lb, 3);
    CHECK(levenshtein(a, b) == edit_distance_oracle(a.tokens, b.tokens));
  }
  CHECK(levenshtein(Sequence({0, 1, 2}), Sequence({0, 1, 2})) == 0);
  CHECK(levenshtein(Sequence(), Sequence(std::vector<Token>{1, 1})) == 2);
}

TEST_CASE("hamming bounds levenshtein for equal lengths") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = testing::random_sequence(rng, 12, 4);
    auto b = testing::random_sequence(rng, 12, 4);
    CHECK(levenshtein(a, b) <= hamming(a, b));
    CHECK(diff_positions(a, b).size() == hamming(a, b));
  }
}

TEST_CASE("preserves_immutable checks only the fixed span") {
  auto mask = RegionMask::with_immutable_span(5, 2, 2);
  Sequence ref({1, 1, 1, 1, 1});
  CHECK(preserves_immutable(Sequence({0, 0, 1, 1, 0}), ref, mask));
  CHECK_FALSE(preserves_immutable(Sequence({1, 1, 1, 0, 1}), ref, mask));
}
