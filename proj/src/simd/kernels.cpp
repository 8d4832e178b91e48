#include "ice/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace ice::simd {

namespace {

bool cpu_has_avx2() {
#if defined(ICE_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  const char* env = std::getenv("ICE_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return detect_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

Isa detect_isa() {
  static const Isa detected = cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
  return detected;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::Avx2 && detect_isa() != Isa::Avx2) isa = Isa::Scalar;
  active().store(isa, std::memory_order_relaxed);
}

void table_sum(const double* table, std::size_t stride, TokenBatch batch, double* out) {
#if defined(ICE_HAVE_AVX2_KERNELS)
  if (active_isa() == Isa::Avx2) return avx2::table_sum(table, stride, batch, out);
#endif
  scalar::table_sum(table, stride, batch, out);
}

void pair_table_sum(const double* pair_tables, const std::uint32_t* pi, const std::uint32_t* pj,
                    std::size_t n_pairs, std::size_t alphabet, TokenBatch batch, double* out) {
#if defined(ICE_HAVE_AVX2_KERNELS)
  if (active_isa() == Isa::Avx2) return avx2::pair_table_sum(pair_tables, pi, pj, n_pairs, alphabet, batch, out);
#endif
  scalar::pair_table_sum(pair_tables, pi, pj, n_pairs, alphabet, batch, out);
}

}  // namespace ice::simd
