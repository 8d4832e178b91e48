#include <doctest.h>

#include <cstring>

#include "ice/simd.hpp"
#include "support.hpp"

using namespace ice;

namespace {

struct Fixture {
  std::size_t L, A, n;
  std::vector<std::uint8_t> tokens;
  std::vector<double> table, pairs;
  std::vector<std::uint32_t> pi, pj;
};

Fixture make(std::size_t L, std::size_t A, std::size_t n, std::size_t n_pairs, std::uint64_t seed) {
  Rng rng(seed);
  Fixture f{L, A, n, {}, {}, {}, {}, {}};
  for (std::size_t k = 0; k < L * n; ++k) f.tokens.push_back(static_cast<std::uint8_t>(rng.uniform_index(A)));
  for (std::size_t k = 0; k < L * A; ++k) f.table.push_back(rng.normal() * 1e3);
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const auto i = static_cast<std::uint32_t>(rng.uniform_index(L - 1));
    f.pi.push_back(i);
    f.pj.push_back(i + 1 + static_cast<std::uint32_t>(rng.uniform_index(L - 1 - i)));
    for (std::size_t k = 0; k < A * A; ++k) f.pairs.push_back(rng.normal() * 1e-3);
  }
  return f;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar table_sum is the plain loop") {
  auto f = make(7, 5, 13, 0, 1);
  std::vector<double> out(f.n, 0.25);
  simd::scalar::table_sum(f.table.data(), f.A, {f.tokens.data(), f.n, f.L}, out.data());
  for (std::size_t s = 0; s < f.n; ++s) {
    double acc = 0.25;
    for (std::size_t i = 0; i < f.L; ++i) acc += f.table[i * f.A + f.tokens[s * f.L + i]];
    CHECK(out[s] == acc);
  }
}

#if defined(ICE_HAVE_AVX2_KERNELS)
TEST_CASE("avx2 kernels are bitwise equal to scalar") {
  if (simd::detect_isa() != simd::Isa::Avx2) return;
  // Odd batch sizes exercise the tail path.
  for (std::size_t n : {1u, 3u, 4u, 5u, 31u, 1000u}) {
    auto f = make(20, 8, n, 20, n);
    simd::TokenBatch b{f.tokens.data(), f.n, f.L};
    std::vector<double> s1(n, 0.0), v1(n, 0.0), s2(n, 1.0), v2(n, 1.0);
    simd::scalar::table_sum(f.table.data(), f.A, b, s1.data());
    simd::avx2::table_sum(f.table.data(), f.A, b, v1.data());
    CHECK(bitwise_equal(s1, v1));
    simd::scalar::pair_table_sum(f.pairs.data(), f.pi.data(), f.pj.data(), f.pi.size(), f.A, b, s2.data());
    simd::avx2::pair_table_sum(f.pairs.data(), f.pi.data(), f.pj.data(), f.pi.size(), f.A, b, v2.data());
    CHECK(bitwise_equal(s2, v2));
  }
}
#endif

TEST_CASE("oracle output does not depend on the active ISA") {
  auto l = make_landscape(Landscape::Shape{}, 42);
  Rng rng(3);
  std::vector<Sequence> seqs;
  for (int i = 0; i < 333; ++i) seqs.push_back(testing::random_sequence(rng, 20, 8));
  const auto before = simd::active_isa();
  simd::set_active_isa(simd::Isa::Scalar);
  const auto scalar = oracle_scores(l, seqs);
  simd::set_active_isa(simd::Isa::Avx2);
  const auto wide = oracle_scores(l, seqs);
  simd::set_active_isa(before);
  CHECK(bitwise_equal(scalar, wide));
}

TEST_CASE("isa names") {
  CHECK(simd::isa_name(simd::Isa::Scalar) == "scalar");
  CHECK(simd::isa_name(simd::Isa::Avx2) == "avx2");
}
