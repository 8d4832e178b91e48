// Compiled with -mavx2; only reached after a runtime CPU check.
#include "ice/simd.hpp"

#include <immintrin.h>

namespace ice::simd::avx2 {

namespace {

// Four lanes = four sequences. Each lane adds its terms in position order,
// which is exactly the scalar accumulation order.
inline __m128i row_tokens(const std::uint8_t* base, std::size_t length, std::size_t i) {
  return _mm_setr_epi32(base[i], base[length + i], base[2 * length + i], base[3 * length + i]);
}

}  // namespace

void table_sum(const double* table, std::size_t stride, TokenBatch batch, double* out) {
  const std::size_t len = batch.length;
  std::size_t s = 0;
  for (; s + 4 <= batch.n_seq; s += 4) {
    const std::uint8_t* base = batch.tokens + s * len;
    __m256d acc = _mm256_loadu_pd(out + s);
    for (std::size_t i = 0; i < len; ++i) {
      __m128i idx = _mm_add_epi32(row_tokens(base, len, i), _mm_set1_epi32(static_cast<int>(i * stride)));
      acc = _mm256_add_pd(acc, _mm256_i32gather_pd(table, idx, 8));
    }
    _mm256_storeu_pd(out + s, acc);
  }
  if (s < batch.n_seq) {
    TokenBatch tail{batch.tokens + s * len, batch.n_seq - s, len};
    scalar::table_sum(table, stride, tail, out + s);
  }
}

void pair_table_sum(const double* pair_tables, const std::uint32_t* pi, const std::uint32_t* pj,
                    std::size_t n_pairs, std::size_t alphabet, TokenBatch batch, double* out) {
  const std::size_t len = batch.length;
  const std::size_t block = alphabet * alphabet;
  const __m128i a = _mm_set1_epi32(static_cast<int>(alphabet));
  std::size_t s = 0;
  for (; s + 4 <= batch.n_seq; s += 4) {
    const std::uint8_t* base = batch.tokens + s * len;
    __m256d acc = _mm256_loadu_pd(out + s);
    for (std::size_t p = 0; p < n_pairs; ++p) {
      __m128i ti = row_tokens(base, len, pi[p]);
      __m128i tj = row_tokens(base, len, pj[p]);
      __m128i idx = _mm_add_epi32(_mm_mullo_epi32(ti, a), tj);
      idx = _mm_add_epi32(idx, _mm_set1_epi32(static_cast<int>(p * block)));
      acc = _mm256_add_pd(acc, _mm256_i32gather_pd(pair_tables, idx, 8));
    }
    _mm256_storeu_pd(out + s, acc);
  }
  if (s < batch.n_seq) {
    TokenBatch tail{batch.tokens + s * len, batch.n_seq - s, len};
    scalar::pair_table_sum(pair_tables, pi, pj, n_pairs, alphabet, tail, out + s);
  }
}

}  // namespace ice::simd::avx2
