#include "ice/landscape.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ice/rng.hpp"
#include "ice/simd.hpp"

namespace ice {

Landscape::Landscape(Shape shape, std::uint64_t seed, std::vector<double> additive,
                     std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs, std::vector<double> epistatic)
    : shape_(shape), seed_(seed), additive_(std::move(additive)), pairs_(std::move(pairs)), epistatic_(std::move(epistatic)) {
  const std::size_t L = shape_.length, A = shape_.alphabet_size;
  if (L == 0 || A < 2) throw std::invalid_argument("landscape: length must be >= 1 and alphabet >= 2");
  if (additive_.size() != L * A) throw std::invalid_argument("landscape: additive table has wrong size");
  if (epistatic_.size() != pairs_.size() * A * A) throw std::invalid_argument("landscape: epistatic table has wrong size");
  shape_.n_pairs = pairs_.size();
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    auto [i, j] = pairs_[p];
    if (!(i < j) || j >= L) throw std::invalid_argument("landscape: pair positions must satisfy i < j < length");
    if (p > 0 && !(pairs_[p - 1] < pairs_[p])) throw std::invalid_argument("landscape: pairs must be distinct and sorted");
    pair_i_.push_back(i);
    pair_j_.push_back(j);
  }
  for (double w : additive_)
    if (!std::isfinite(w)) throw std::invalid_argument("landscape: non-finite weight");
  for (double w : epistatic_)
    if (!std::isfinite(w)) throw std::invalid_argument("landscape: non-finite weight");
}

Landscape make_landscape(const Landscape::Shape& shape, std::uint64_t seed) {
  const std::size_t L = shape.length, A = shape.alphabet_size;
  if (L == 0 || A < 2 || A > 255) throw std::invalid_argument("make_landscape: invalid length or alphabet size");
  if (shape.n_pairs > L * (L - 1) / 2) throw std::invalid_argument("make_landscape: n_pairs exceeds length*(length-1)/2");
  if (!(shape.additive_scale >= 0.0) || !(shape.epistatic_scale >= 0.0) || !std::isfinite(shape.additive_scale) ||
      !std::isfinite(shape.epistatic_scale))
    throw std::invalid_argument("make_landscape: scales must be finite and non-negative");

  Rng add_rng(derive_seed(seed, "landscape/additive", 0));
  std::vector<double> additive(L * A);
  for (auto& w : additive) w = shape.additive_scale * add_rng.normal();

  std::vector<std::pair<std::uint32_t, std::uint32_t>> all;
  for (std::uint32_t i = 0; i < L; ++i)
    for (std::uint32_t j = i + 1; j < L; ++j) all.emplace_back(i, j);
  Rng pair_rng(derive_seed(seed, "landscape/pairs", 0));
  for (std::size_t k = 0; k < shape.n_pairs; ++k) {
    auto r = k + pair_rng.uniform_index(all.size() - k);
    std::swap(all[k], all[r]);
  }
  all.resize(shape.n_pairs);
  std::sort(all.begin(), all.end());

  Rng epi_rng(derive_seed(seed, "landscape/epistatic", 0));
  std::vector<double> epistatic(all.size() * A * A);
  for (auto& w : epistatic) w = shape.epistatic_scale * epi_rng.normal();

  return Landscape(shape, seed, std::move(additive), std::move(all), std::move(epistatic));
}

std::uint64_t landscape_checksum(const Landscape& landscape) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    h = fnv1a64(std::string_view(buf, 8), h);
  };
  for (double w : landscape.additive()) mix(std::bit_cast<std::uint64_t>(w));
  for (auto [i, j] : landscape.pairs()) mix((std::uint64_t{i} << 32) | j);
  for (double w : landscape.epistatic()) mix(std::bit_cast<std::uint64_t>(w));
  return h;
}

double oracle_score(const Landscape& landscape, const Sequence& seq) {
  const std::size_t L = landscape.length(), A = landscape.alphabet_size();
  if (seq.size() != L) throw std::invalid_argument("oracle_score: length mismatch");
  auto add = landscape.additive();
  auto epi = landscape.epistatic();
  double z = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    if (seq[i] >= A) throw std::invalid_argument("oracle_score: token out of range");
    z += add[i * A + seq[i]];
  }
  const auto& pairs = landscape.pairs();
  for (std::size_t p = 0; p < pairs.size(); ++p)
    z += epi[p * A * A + seq[pairs[p].first] * A + seq[pairs[p].second]];
  return z;
}

void oracle_scores_into(const Landscape& landscape, std::span<const Sequence> seqs, std::span<double> out) {
  const std::size_t L = landscape.length(), A = landscape.alphabet_size();
  if (out.size() != seqs.size()) throw std::invalid_argument("oracle_scores: output size mismatch");
  std::vector<std::uint8_t> packed(seqs.size() * L);
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    if (seqs[s].size() != L) throw std::invalid_argument("oracle_score: length mismatch");
    for (std::size_t i = 0; i < L; ++i) {
      if (seqs[s][i] >= A) throw std::invalid_argument("oracle_score: token out of range");
      packed[s * L + i] = seqs[s][i];
    }
  }
  std::fill(out.begin(), out.end(), 0.0);
  simd::TokenBatch batch{packed.data(), seqs.size(), L};
  simd::table_sum(landscape.additive_.data(), A, batch, out.data());
  simd::pair_table_sum(landscape.epistatic_.data(), landscape.pair_i_.data(), landscape.pair_j_.data(),
                       landscape.pairs_.size(), A, batch, out.data());
}

std::vector<double> oracle_scores(const Landscape& landscape, std::span<const Sequence> seqs) {
  std::vector<double> out(seqs.size());
  oracle_scores_into(landscape, seqs, out);
  return out;
}

std::vector<Sequence> sample_corpus(const Landscape& landscape, std::size_t m, std::uint64_t seed,
                                    const RegionMask& mask, const Sequence& reference) {
  const std::size_t L = landscape.length(), A = landscape.alphabet_size();
  if (m == 0) throw std::invalid_argument("sample_corpus: m must be >= 1");
  if (mask.size() != L || reference.size() != L) throw std::invalid_argument("sample_corpus: length mismatch");
  Rng rng(seed);
  std::vector<Sequence> corpus;
  corpus.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    Sequence s = reference;
    for (auto i : mask.mutable_positions()) s[i] = static_cast<Token>(rng.uniform_index(A));
    corpus.push_back(std::move(s));
  }
  return corpus;
}

DatasetSplit build_supervised_split(std::span<const Sequence> corpus, std::span<const double> corpus_scores,
                                    Region region, std::size_t m_sup) {
  if (corpus.empty()) throw std::invalid_argument("build_supervised_split: empty corpus");
  if (corpus_scores.size() != corpus.size()) throw std::invalid_argument("build_supervised_split: score count mismatch");
  if (!(region.low < region.high)) throw std::invalid_argument("build_supervised_split: region low must be < high");
  DatasetSplit split;
  split.region = region;
  split.unsup.assign(corpus.begin(), corpus.end());
  for (std::size_t k = 0; k < corpus.size() && split.sup_train.size() < m_sup; ++k) {
    if (region.contains(corpus_scores[k])) {
      split.sup_train.push_back({corpus[k], corpus_scores[k]});
      split.sup_indices.push_back(k);
    }
  }
  if (split.sup_train.size() < m_sup)
    throw std::runtime_error("build_supervised_split: only " + std::to_string(split.sup_train.size()) +
                             " in-region sequences, need " + std::to_string(m_sup));
  return split;
}

DatasetSplit build_supervised_split(std::span<const Sequence> corpus, const Landscape& landscape, Region region,
                                    std::size_t m_sup) {
  auto scores = oracle_scores(landscape, corpus);
  return build_supervised_split(corpus, scores, region, m_sup);
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile: p outside [0, 100]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = p / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace ice
