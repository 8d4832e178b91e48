#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ice/editor.hpp"
#include "support.hpp"

using namespace ice;

namespace {

EditPair pair_of(ControlTag tag, std::vector<Token> src, std::vector<Token> tgt) {
  return {tag, Sequence(std::move(src)), Sequence(std::move(tgt)), 0.0, tag == ControlTag::Inc ? 1.0 : -1.0, 0};
}

struct Enumerated {
  Sequence y;
  double lp;
  std::vector<std::size_t> pos;
  std::vector<Token> tok;
};

// Every candidate with 1..max_edits diffs at mutable positions, ranked the
// way beam_step promises: logprob desc, then positions, then tokens.
std::vector<Enumerated> enumerate_ranked(const EditTables& t, std::size_t cond, const Sequence& x) {
  std::vector<Enumerated> out;
  for (const auto& y : testing::enumerate_all(x.size(), t.alphabet_size())) {
    const auto d = diff_positions(x, y);
    if (d.empty() || d.size() > t.max_edits()) continue;
    if (!std::all_of(d.begin(), d.end(), [&](std::size_t i) { return t.mask().is_mutable(i); })) continue;
    std::vector<Token> tok;
    for (auto i : d) tok.push_back(y[i]);
    out.push_back({y, candidate_logprob(t, cond, x, y), d, tok});
  }
  std::sort(out.begin(), out.end(), [](const Enumerated& a, const Enumerated& b) {
    if (a.lp != b.lp) return a.lp > b.lp;
    if (a.pos != b.pos) return a.pos < b.pos;
    return a.tok < b.tok;
  });
  return out;
}

EditTables random_tables(std::uint64_t seed, std::size_t L, std::size_t A, std::size_t max_edits,
                         const RegionMask& mask, double smoothing) {
  Rng rng(seed);
  EditTables t(L, A, 2, max_edits, smoothing, mask);
  const auto& mut = mask.mutable_positions();
  for (int n = 0; n < 300; ++n) {
    auto x = testing::random_sequence(rng, L, A);
    auto y = x;
    const std::size_t m = 1 + rng.uniform_index(std::min(max_edits, mut.size()));
    std::vector<std::size_t> pool = mut;
    for (std::size_t e = 0; e < m; ++e) {
      const auto j = rng.uniform_index(pool.size());
      const auto i = pool[j];
      pool.erase(pool.begin() + static_cast<long>(j));
      y[i] = static_cast<Token>((x[i] + 1 + rng.uniform_index(A - 1)) % A);
    }
    t.observe(rng.uniform_index(2), x, y);
  }
  t.finalize();
  return t;
}

}  // namespace

TEST_CASE("one observation sets the modes") {
  auto mask = RegionMask::all_mutable(4);
  std::vector<EditPair> pairs{pair_of(ControlTag::Inc, {0, 0, 0, 0}, {0, 0, 0, 1})};
  auto m = fit_editor(pairs, 3, 1.0, 2, mask);
  const auto& t = m.tables();
  for (std::size_t i = 0; i < 3; ++i) CHECK(t.position_prob(0, 3) > t.position_prob(0, i));
  CHECK(t.subst_prob(0, 3, 0, 1) > t.subst_prob(0, 3, 0, 2));
  auto beam = beam_step(m, pairs[0].source, ControlTag::Inc, 1);
  REQUIRE(beam.size() == 1);
  CHECK(beam[0].seq == pairs[0].target);
}

TEST_CASE("every distribution sums to one") {
  auto mask = RegionMask::with_immutable_span(6, 2, 1);
  auto t = random_tables(3, 6, 4, 3, mask, 0.7);
  for (std::size_t c = 0; c < 2; ++c) {
    double pw = 0, ecd = 0;
    for (std::size_t i = 0; i < 6; ++i) pw += t.position_prob(c, i);
    for (std::size_t m = 1; m <= 3; ++m) ecd += t.edit_count_prob(c, m);
    CHECK(std::abs(pw - 1) < 1e-12);
    CHECK(std::abs(ecd - 1) < 1e-12);
    CHECK(t.position_prob(c, 2) == 0.0);
    for (std::size_t i : mask.mutable_positions())
      for (Token a = 0; a < 4; ++a) {
        double s = 0;
        for (Token b = 0; b < 4; ++b) s += t.subst_prob(c, i, a, b);
        CHECK(std::abs(s - 1) < 1e-12);
        CHECK(t.subst_prob(c, i, a, a) == 0.0);
      }
  }
}

TEST_CASE("logprob of a held-out candidate, by hand") {
  auto mask = RegionMask::all_mutable(4);
  std::vector<EditPair> pairs{pair_of(ControlTag::Inc, {0, 0, 0, 0}, {0, 1, 0, 0}),
                              pair_of(ControlTag::Inc, {0, 0, 0, 0}, {0, 1, 2, 0})};
  auto m = fit_editor(pairs, 3, 0.5, 2, mask);
  // position counts {0,2,1,0} over 4 mutable slots; subst rows over the two other tokens;
  // edit counts m=1:1, m=2:1.
  const double expect = std::log(1.5 / 3) + std::log(2.5 / 5) + std::log(2.5 / 3) + std::log(1.5 / 5) +
                        std::log(0.5 / 2) - std::log(2.0);
  const double got = candidate_logprob(m, Sequence({0, 0, 0, 0}), Sequence({0, 1, 1, 0}), ControlTag::Inc);
  CHECK(std::abs(got - expect) < 1e-12);
  // DEC saw nothing: uniform over positions, substitutions and counts.
  const double dec = candidate_logprob(m, Sequence({0, 0, 0, 0}), Sequence({2, 0, 0, 0}), ControlTag::Dec);
  CHECK(std::abs(dec - (std::log(0.5) + std::log(0.25) + std::log(0.5))) < 1e-12);
}

TEST_CASE("candidate_logprob rejects invalid candidates") {
  auto mask = RegionMask::with_immutable_span(4, 1, 1);
  auto t = random_tables(1, 4, 3, 2, mask, 1.0);
  Sequence x({0, 0, 0, 0});
  CHECK_THROWS(candidate_logprob(t, 0, x, x));
  CHECK_THROWS(candidate_logprob(t, 0, x, Sequence({1, 1, 1, 1})));
  CHECK_THROWS(candidate_logprob(t, 0, x, Sequence({0, 2, 0, 0})));
}

TEST_CASE("uniform model: single edits at distinct positions tie") {
  auto mask = RegionMask::all_mutable(5);
  EditTables t(5, 4, 2, 2, 1.0, mask);
  t.finalize();
  Sequence x({0, 1, 2, 3, 0});
  const double a = candidate_logprob(t, 0, x, Sequence({1, 1, 2, 3, 0}));
  const double b = candidate_logprob(t, 0, x, Sequence({0, 1, 2, 0, 0}));
  CHECK(a == b);
  // ties rank by positions, then tokens
  auto beam = beam_step(t, 0, x, 3);
  CHECK(beam[0].seq == Sequence({1, 1, 2, 3, 0}));
  CHECK(beam[1].seq == Sequence({2, 1, 2, 3, 0}));
  CHECK(beam[2].seq == Sequence({3, 1, 2, 3, 0}));
}

TEST_CASE("beam equals exhaustive enumeration on the tiny shape") {
  auto mask = RegionMask::with_immutable_span(4, 1, 1);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto t = random_tables(seed, 4, 3, 2, mask, 0.5 + static_cast<double>(seed % 3));
    Rng rng(seed);
    for (int s = 0; s < 5; ++s) {
      auto x = testing::random_sequence(rng, 4, 3);
      for (std::size_t c = 0; c < 2; ++c) {
        const auto oracle = enumerate_ranked(t, c, x);
        for (std::size_t B : {std::size_t{1}, std::size_t{5}, oracle.size(), oracle.size() + 4}) {
          auto beam = beam_step(t, c, x, B);
          REQUIRE(beam.size() == std::min(B, oracle.size()));
          for (std::size_t r = 0; r < beam.size(); ++r) {
            CHECK(beam[r].seq == oracle[r].y);
            CHECK(std::abs(beam[r].logprob - oracle[r].lp) < 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("beam on a wider shape matches enumeration") {
  auto mask = RegionMask::with_immutable_span(6, 3, 1);
  auto t = random_tables(77, 6, 3, 3, mask, 1.0);
  Sequence x({0, 1, 2, 0, 1, 2});
  const auto oracle = enumerate_ranked(t, 1, x);
  auto beam = beam_step(t, 1, x, 40);
  for (std::size_t r = 0; r < beam.size(); ++r) CHECK(beam[r].seq == oracle[r].y);
}

TEST_CASE("beam output is strictly ordered") {
  auto mask = RegionMask::with_immutable_span(8, 2, 2);
  auto t = random_tables(5, 8, 4, 3, mask, 2.0);
  auto beam = beam_step(t, 0, Sequence(8, 1), 25);
  for (std::size_t r = 1; r < beam.size(); ++r) {
    CHECK(beam[r - 1].logprob >= beam[r].logprob);
    CHECK(beam[r - 1].seq != beam[r].seq);
  }
}

TEST_CASE("no candidate means an error") {
  RegionMask frozen(std::vector<bool>(3, false));
  EditTables t(3, 2, 2, 1, 1.0, frozen);
  t.finalize();
  CHECK_THROWS(beam_step(t, 0, Sequence(3, 0), 3));
}

TEST_CASE("single-edit sampling frequencies within 3 standard errors") {
  auto mask = RegionMask::with_immutable_span(6, 2, 1);
  auto t = random_tables(9, 6, 4, 1, mask, 1.0);
  Sequence x({0, 1, 2, 3, 0, 1});
  Rng rng(4);
  const int n = 10000;
  auto draws = sample_step(t, 0, x, n, 1.0, rng);
  std::map<std::size_t, int> pos_hits;
  std::map<Token, int> tok_hits;  // substitutions chosen at position 0
  int at0 = 0;
  for (const auto& c : draws) {
    auto d = diff_positions(x, c.seq);
    REQUIRE(d.size() == 1);
    ++pos_hits[d[0]];
    if (d[0] == 0) ++tok_hits[c.seq[0]], ++at0;
  }
  for (std::size_t i : mask.mutable_positions()) {
    const double p = t.position_prob(0, i);
    CHECK(std::abs(pos_hits[i] / double(n) - p) < 3 * std::sqrt(p * (1 - p) / n));
  }
  for (Token b = 1; b < 4; ++b) {
    const double p = t.subst_prob(0, 0, 0, b);
    CHECK(std::abs(tok_hits[b] / double(at0) - p) < 3 * std::sqrt(p * (1 - p) / at0));
  }
}

TEST_CASE("edit-count frequencies follow the count distribution") {
  auto mask = RegionMask::all_mutable(8);
  auto t = random_tables(10, 8, 3, 4, mask, 1.0);
  Rng rng(5);
  const int n = 20000;
  std::vector<int> hits(5, 0);
  for (const auto& c : sample_step(t, 1, Sequence(8, 0), n, 0.7, rng)) ++hits[hamming(c.seq, Sequence(8, 0))];
  for (std::size_t m = 1; m <= 4; ++m) {
    const double p = t.edit_count_prob(1, m);
    CHECK(std::abs(hits[m] / double(n) - p) < 3 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("sampling is deterministic in the seed and respects the mask") {
  auto mask = RegionMask::with_immutable_span(10, 4, 3);
  auto t = random_tables(11, 10, 5, 4, mask, 1.0);
  Sequence x(10, 2);
  Rng a(8), b(8);
  auto da = sample_step(t, 0, x, 50, 0.7, a), db = sample_step(t, 0, x, 50, 0.7, b);
  for (std::size_t k = 0; k < 50; ++k) {
    CHECK(da[k].seq == db[k].seq);
    CHECK(preserves_immutable(da[k].seq, x, mask));
    const auto h = hamming(da[k].seq, x);
    CHECK(h >= 1);
    CHECK(h <= 4);
    CHECK(da[k].logprob == candidate_logprob(t, 0, x, da[k].seq));
  }
}

TEST_CASE("cold sampling on a concentrated model is the beam top-1") {
  auto mask = RegionMask::all_mutable(4);
  std::vector<EditPair> pairs(5000, pair_of(ControlTag::Inc, {0, 0, 0, 0}, {0, 0, 2, 0}));
  pairs.push_back(pair_of(ControlTag::Inc, {1, 0, 0, 0}, {2, 0, 0, 0}));
  auto m = fit_editor(pairs, 3, 1e-6, 1, mask);
  Sequence x({0, 0, 0, 0});
  const auto top = beam_step(m, x, ControlTag::Inc, 1).front().seq;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    CHECK(sample_step(m, x, ControlTag::Inc, 1, 1e-3, rng).front().seq == top);
  }
}

TEST_CASE("swapped pairs give mirrored tables") {
  Rng rng(12);
  auto mask = RegionMask::with_immutable_span(6, 0, 1);
  std::vector<EditPair> pairs;
  for (int n = 0; n < 200; ++n) {
    auto x = testing::random_sequence(rng, 6, 3);
    auto y = x;
    y[1 + rng.uniform_index(5)] = static_cast<Token>((x[3] + 1) % 3);
    if (x == y) continue;
    pairs.push_back(pair_of(ControlTag::Inc, x.tokens, y.tokens));
    pairs.push_back(pair_of(ControlTag::Dec, y.tokens, x.tokens));
  }
  auto t = fit_editor(pairs, 3, 1.0, 2, mask).tables();
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(t.position_count(0, i) == t.position_count(1, i));
    for (Token a = 0; a < 3; ++a)
      for (Token b = 0; b < 3; ++b) CHECK(t.subst_count(0, i, a, b) == t.subst_count(1, i, b, a));
  }
  for (std::size_t m = 1; m <= 2; ++m) CHECK(t.edit_count_count(0, m) == t.edit_count_count(1, m));
}

TEST_CASE("fit_editor rejects malformed pairs") {
  auto mask = RegionMask::with_immutable_span(4, 1, 1);
  std::vector<EditPair> same{pair_of(ControlTag::Inc, {0, 0, 0, 0}, {0, 0, 0, 0})};
  CHECK_THROWS(fit_editor(same, 3, 1.0, 2, mask));
  std::vector<EditPair> immut{pair_of(ControlTag::Inc, {0, 0, 0, 0}, {0, 1, 0, 0})};
  CHECK_THROWS(fit_editor(immut, 3, 1.0, 2, mask));
  std::vector<EditPair> many{pair_of(ControlTag::Inc, {0, 0, 0, 0}, {1, 0, 1, 1})};
  CHECK_THROWS(fit_editor(many, 3, 1.0, 2, mask));
  std::vector<EditPair> none;
  CHECK_THROWS(fit_editor(none, 3, 1.0, 2, mask));
}

TEST_CASE("editor file round trip keeps logprobs bitwise") {
  auto mask = RegionMask::with_immutable_span(6, 2, 1);
  EditorModel m(random_tables(13, 6, 4, 3, mask, 0.3));
  std::stringstream ss;
  write_editor(ss, m);
  auto back = read_editor(ss);
  CHECK(back == m);
  Sequence x({0, 1, 2, 3, 0, 1});
  for (const auto& c : beam_step(m, x, ControlTag::Dec, 10))
    CHECK(candidate_logprob(back, x, c.seq, ControlTag::Dec) == c.logprob);
  std::stringstream bad("ICE-EDITOR 9\n");
  CHECK_THROWS(read_editor(bad));
}

TEST_CASE("a frozen sequence cannot be sampled either") {
  RegionMask frozen(std::vector<bool>(3, false));
  EditTables t(3, 2, 2, 1, 1.0, frozen);
  t.finalize();
  Rng rng(1);
  CHECK_THROWS_AS(sample_step(t, 0, Sequence(3, 0), 2, 1.0, rng), std::runtime_error);
}
