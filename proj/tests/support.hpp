#pragma once

#include <cstddef>
#include <vector>

#include "ice/landscape.hpp"
#include "ice/rng.hpp"
#include "ice/seq.hpp"

namespace testing {

// All |A|^L sequences, first position most significant.
inline std::vector<ice::Sequence> enumerate_all(std::size_t length, std::size_t alphabet) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < length; ++i) n *= alphabet;
  std::vector<ice::Sequence> out;
  out.reserve(n);
  for (std::size_t code = 0; code < n; ++code) {
    ice::Sequence s(length, 0);
    std::size_t c = code;
    for (std::size_t i = length; i-- > 0;) {
      s[i] = static_cast<ice::Token>(c % alphabet);
      c /= alphabet;
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline ice::Sequence random_sequence(ice::Rng& rng, std::size_t length, std::size_t alphabet) {
  ice::Sequence s(length, 0);
  for (std::size_t i = 0; i < length; ++i) s[i] = static_cast<ice::Token>(rng.uniform_index(alphabet));
  return s;
}

// Straight from the weight tables, no batching.
inline double naive_score(const ice::Landscape& l, const ice::Sequence& s) {
  const std::size_t A = l.alphabet_size();
  double z = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) z += l.additive()[i * A + s[i]];
  for (std::size_t p = 0; p < l.pairs().size(); ++p) {
    const auto [i, j] = l.pairs()[p];
    z += l.epistatic()[p * A * A + s[i] * A + s[j]];
  }
  return z;
}

}  // namespace testing
