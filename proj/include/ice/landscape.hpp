#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ice/seq.hpp"

namespace ice {

/// Seeded additive + sparse pairwise-epistatic fitness function. This is the
/// ground-truth oracle; nothing but evaluation should read it.
class Landscape {
 public:
  struct Shape {
    std::size_t length = 20;
    std::size_t alphabet_size = 8;
    std::size_t n_pairs = 20;
    double additive_scale = 1.0;
    double epistatic_scale = 0.15;

    bool operator==(const Shape&) const = default;
  };

  Landscape(Shape shape, std::uint64_t seed, std::vector<double> additive,
            std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs, std::vector<double> epistatic);

  const Shape& shape() const { return shape_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t length() const { return shape_.length; }
  std::size_t alphabet_size() const { return shape_.alphabet_size; }

  /// additive[i * A + token]
  std::span<const double> additive() const { return additive_; }
  /// epistatic[p * A * A + a * A + b] for pair p = (i, j), i < j
  std::span<const double> epistatic() const { return epistatic_; }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs() const { return pairs_; }

  bool operator==(const Landscape&) const = default;

 private:
  Shape shape_;
  std::uint64_t seed_;
  std::vector<double> additive_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
  std::vector<std::uint32_t> pair_i_, pair_j_;
  std::vector<double> epistatic_;

  friend void oracle_scores_into(const Landscape&, std::span<const Sequence>, std::span<double>);
};

/// Zero-mean Gaussian weights; the pair set is drawn uniformly without replacement.
Landscape make_landscape(const Landscape::Shape& shape, std::uint64_t seed);

/// Order-independent checksum over every weight's bit pattern and the pair set.
std::uint64_t landscape_checksum(const Landscape& landscape);

double oracle_score(const Landscape& landscape, const Sequence& seq);

/// Batched oracle; bitwise equal to calling oracle_score per sequence.
std::vector<double> oracle_scores(const Landscape& landscape, std::span<const Sequence> seqs);
void oracle_scores_into(const Landscape& landscape, std::span<const Sequence> seqs, std::span<double> out);

struct Region {
  double low = 0.0;   // alpha-
  double high = 0.0;  // alpha+
  bool contains(double z) const { return z >= low && z <= high; }
};

struct LabeledExample {
  Sequence seq;
  double z = 0.0;
};

struct DatasetSplit {
  std::vector<Sequence> unsup;
  std::vector<LabeledExample> sup_train;
  Region region;
  /// Corpus indices of the sup_train members, in order.
  std::vector<std::size_t> sup_indices;
};

/// Immutable positions copied from `reference`, mutable ones i.i.d. uniform.
std::vector<Sequence> sample_corpus(const Landscape& landscape, std::size_t m, std::uint64_t seed,
                                    const RegionMask& mask, const Sequence& reference);

/// Keeps the first m_sup corpus members whose exact oracle score lies in the region.
/// Throws std::runtime_error when fewer than m_sup qualify.
DatasetSplit build_supervised_split(std::span<const Sequence> corpus, const Landscape& landscape,
                                    Region region, std::size_t m_sup);
DatasetSplit build_supervised_split(std::span<const Sequence> corpus, std::span<const double> corpus_scores,
                                    Region region, std::size_t m_sup);

/// Linear-interpolated empirical percentile (p in [0, 100]).
double percentile(std::span<const double> values, double p);

/// Spearman rank correlation with average ranks for ties; nullopt when
/// either input is constant.
std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys);

/// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace ice
