#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ice/rng.hpp"
#include "ice/seq.hpp"

namespace ice {

enum class MaskStrategy { Span, Iid };

struct MaskSpec {
  MaskStrategy strategy = MaskStrategy::Span;
  double span_lambda = 6.0;
  std::size_t span_max = 12;
  double iid_rate = 0.8;
  std::size_t n_spans = 1;

  void validate() const;
  /// Largest masked set this spec can produce on `mask`.
  std::size_t max_masked(const RegionMask& mask) const;

  bool operator==(const MaskSpec&) const = default;
};

/// Named span presets: small, medium, large, super-large.
std::optional<MaskSpec> mask_preset(std::string_view name);

/// Poisson(lambda) truncated to [1, span_max] by rejection; after 1000
/// rejections the draw falls back to span_max.
std::size_t sample_span_length(Rng& rng, double lambda, std::size_t span_max);

/// Mean of the truncated Poisson pmf on [1, span_max], by direct summation.
double truncated_poisson_mean(double lambda, std::size_t span_max);

/// Non-empty ascending set of mutable positions. Throws std::runtime_error when
/// the IID redraw bound (1000) is exhausted.
std::vector<std::size_t> mask_positions(const Sequence& seq, const MaskSpec& spec, const RegionMask& mask, Rng& rng);

/// Left-to-right masked-token infill model: Laplace-smoothed counts of token b
/// at position i given the previous token a (order 1) or given nothing (order 0).
class InfillModel {
 public:
  InfillModel(std::size_t length, std::size_t alphabet_size, int order, double smoothing,
              std::vector<std::uint64_t> counts);

  std::size_t length() const { return length_; }
  std::size_t alphabet_size() const { return alphabet_size_; }
  int order() const { return order_; }
  double smoothing() const { return smoothing_; }
  /// Context states per position: A + 1 for order 1 (last is start-of-sequence), 1 for order 0.
  std::size_t n_contexts() const { return order_ == 1 ? alphabet_size_ + 1 : 1; }
  std::span<const std::uint64_t> counts() const { return counts_; }

  /// Context index used at position i given the previous token.
  std::size_t context(std::size_t i, std::optional<Token> previous) const;
  /// p(b | position i, context)
  double prob(std::size_t i, std::size_t context, Token b) const;
  std::span<const double> distribution(std::size_t i, std::size_t context) const;

  bool operator==(const InfillModel& o) const {
    return length_ == o.length_ && alphabet_size_ == o.alphabet_size_ && order_ == o.order_ &&
           smoothing_ == o.smoothing_ && counts_ == o.counts_;
  }

 private:
  std::size_t length_, alphabet_size_;
  int order_;
  double smoothing_;
  std::vector<std::uint64_t> counts_;  // [i][context][b]
  std::vector<double> probs_;
};

InfillModel fit_infill(std::span<const Sequence> corpus, double smoothing, std::size_t alphabet_size, int order = 1);

/// Resamples `positions` left to right from temperature-scaled conditionals;
/// every other token is kept. temperature == 0 selects the argmax (lowest
/// token index on ties).
Sequence infill(const InfillModel& model, const Sequence& seq, std::span<const std::size_t> positions, Rng& rng,
                double temperature = 1.0);

/// Index drawn from probs^(1/T) (argmax, lowest index first, for T == 0).
std::size_t sample_tempered(std::span<const double> probs, double temperature, Rng& rng);

void write_infill(std::ostream& os, const InfillModel& model);
InfillModel read_infill(std::istream& is);

}  // namespace ice
