#pragma once

// Batch table-lookup kernels behind the oracle and the ridge scorer.
//
// Every variant vectorizes across sequences and accumulates each sequence's
// terms in the same order as the scalar reference, so all backends produce
// bitwise-identical results. Backend choice can therefore never change an
// artifact.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace ice::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Best ISA supported by the running CPU and this build.
Isa detect_isa();

/// ISA used by the dispatching entry points. Defaults to detect_isa(), or
/// Scalar when the environment variable ICE_SIMD=scalar is set.
Isa active_isa();

/// Override for tests and benchmarks. Requesting an unsupported ISA falls
/// back to Scalar.
void set_active_isa(Isa isa);

/// Packed batch of equal-length token rows.
struct TokenBatch {
  const std::uint8_t* tokens;  // n_seq * length, row-major
  std::size_t n_seq;
  std::size_t length;
};

/// out[s] += sum_i table[i*stride + tokens[s][i]], positions in ascending order.
void table_sum(const double* table, std::size_t stride, TokenBatch batch, double* out);

/// out[s] += sum_p pair_tables[p*A*A + tokens[s][pi[p]]*A + tokens[s][pj[p]]],
/// pairs in ascending order.
void pair_table_sum(const double* pair_tables, const std::uint32_t* pi, const std::uint32_t* pj,
                    std::size_t n_pairs, std::size_t alphabet, TokenBatch batch, double* out);

namespace scalar {
void table_sum(const double* table, std::size_t stride, TokenBatch batch, double* out);
void pair_table_sum(const double* pair_tables, const std::uint32_t* pi, const std::uint32_t* pj,
                    std::size_t n_pairs, std::size_t alphabet, TokenBatch batch, double* out);
}  // namespace scalar

#if defined(ICE_HAVE_AVX2_KERNELS)
namespace avx2 {
void table_sum(const double* table, std::size_t stride, TokenBatch batch, double* out);
void pair_table_sum(const double* pair_tables, const std::uint32_t* pi, const std::uint32_t* pj,
                    std::size_t n_pairs, std::size_t alphabet, TokenBatch batch, double* out);
}  // namespace avx2
#endif

}  // namespace ice::simd
