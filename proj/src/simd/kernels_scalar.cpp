#include "ice/simd.hpp"

namespace ice::simd::scalar {

void table_sum(const double* table, std::size_t stride, TokenBatch batch, double* out) {
  for (std::size_t s = 0; s < batch.n_seq; ++s) {
    const std::uint8_t* row = batch.tokens + s * batch.length;
    double acc = out[s];
    for (std::size_t i = 0; i < batch.length; ++i) acc += table[i * stride + row[i]];
    out[s] = acc;
  }
}

void pair_table_sum(const double* pair_tables, const std::uint32_t* pi, const std::uint32_t* pj,
                    std::size_t n_pairs, std::size_t alphabet, TokenBatch batch, double* out) {
  const std::size_t block = alphabet * alphabet;
  for (std::size_t s = 0; s < batch.n_seq; ++s) {
    const std::uint8_t* row = batch.tokens + s * batch.length;
    double acc = out[s];
    for (std::size_t p = 0; p < n_pairs; ++p)
      acc += pair_tables[p * block + row[pi[p]] * alphabet + row[pj[p]]];
    out[s] = acc;
  }
}

}  // namespace ice::simd::scalar
