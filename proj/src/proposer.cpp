#include "ice/proposer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ice/io.hpp"

namespace ice {

void MaskSpec::validate() const {
  if (span_max < 1) throw std::invalid_argument("mask: span_max must be >= 1");
  if (!(span_lambda > 0.0)) throw std::invalid_argument("mask: span_lambda must be > 0");
  if (!(iid_rate > 0.0 && iid_rate <= 1.0)) throw std::invalid_argument("mask: iid_rate must be in (0, 1]");
  if (n_spans < 1) throw std::invalid_argument("mask: n_spans must be >= 1");
}

std::size_t MaskSpec::max_masked(const RegionMask& mask) const {
  if (strategy == MaskStrategy::Iid) return mask.n_mutable();
  return std::min(mask.n_mutable(), span_max * n_spans);
}

std::optional<MaskSpec> mask_preset(std::string_view name) {
  MaskSpec s;
  s.strategy = MaskStrategy::Span;
  if (name == "small") {
    s.span_lambda = 3;
    s.span_max = 6;
  } else if (name == "medium") {
    s.span_lambda = 4;
    s.span_max = 8;
  } else if (name == "large") {
    s.span_lambda = 5;
    s.span_max = 10;
  } else if (name == "super-large") {
    s.span_lambda = 6;
    s.span_max = 12;
  } else {
    return std::nullopt;
  }
  return s;
}

std::size_t sample_span_length(Rng& rng, double lambda, std::size_t span_max) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const auto k = rng.poisson(lambda);
    if (k >= 1 && k <= span_max) return k;
  }
  return span_max;
}

double truncated_poisson_mean(double lambda, std::size_t span_max) {
  double pmf = std::exp(-lambda);  // k = 0
  double mass = 0.0, first = 0.0;
  for (std::size_t k = 1; k <= span_max; ++k) {
    pmf *= lambda / static_cast<double>(k);
    mass += pmf;
    first += static_cast<double>(k) * pmf;
  }
  return first / mass;
}

std::vector<std::size_t> mask_positions(const Sequence& seq, const MaskSpec& spec, const RegionMask& mask, Rng& rng) {
  spec.validate();
  if (seq.size() != mask.size()) throw std::invalid_argument("mask_positions: length mismatch");
  const auto& mut = mask.mutable_positions();
  if (mut.empty()) throw std::invalid_argument("mask_positions: no mutable position");
  std::vector<bool> chosen(seq.size(), false);
  if (spec.strategy == MaskStrategy::Span) {
    for (std::size_t s = 0; s < spec.n_spans; ++s) {
      const std::size_t start = mut[rng.uniform_index(mut.size())];
      const std::size_t len = sample_span_length(rng, spec.span_lambda, spec.span_max);
      for (std::size_t i = start; i < std::min(seq.size(), start + len); ++i)
        if (mask.is_mutable(i)) chosen[i] = true;
    }
  } else {
    bool any = false;
    for (int attempt = 0; attempt < 1000 && !any; ++attempt) {
      for (auto i : mut) {
        chosen[i] = rng.bernoulli(spec.iid_rate);
        any = any || chosen[i];
      }
    }
    if (!any) throw std::runtime_error("mask_positions: IID mask stayed empty after 1000 redraws");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < chosen.size(); ++i)
    if (chosen[i]) out.push_back(i);
  return out;
}

InfillModel::InfillModel(std::size_t length, std::size_t alphabet_size, int order, double smoothing,
                         std::vector<std::uint64_t> counts)
    : length_(length), alphabet_size_(alphabet_size), order_(order), smoothing_(smoothing), counts_(std::move(counts)) {
  if (order_ != 0 && order_ != 1) throw std::invalid_argument("infill: order must be 0 or 1");
  if (!(smoothing_ > 0.0)) throw std::invalid_argument("infill: smoothing must be > 0");
  const std::size_t C = n_contexts(), A = alphabet_size_;
  if (counts_.size() != length_ * C * A) throw std::invalid_argument("infill: count table has wrong size");
  probs_.resize(counts_.size());
  for (std::size_t i = 0; i < length_; ++i) {
    for (std::size_t c = 0; c < C; ++c) {
      const std::size_t base = (i * C + c) * A;
      std::uint64_t total = 0;
      for (std::size_t b = 0; b < A; ++b) total += counts_[base + b];
      const double denom = static_cast<double>(total) + smoothing_ * static_cast<double>(A);
      for (std::size_t b = 0; b < A; ++b) probs_[base + b] = (static_cast<double>(counts_[base + b]) + smoothing_) / denom;
    }
  }
}

std::size_t InfillModel::context(std::size_t i, std::optional<Token> previous) const {
  if (order_ == 0) return 0;
  if (i == 0 || !previous) return alphabet_size_;
  return *previous;
}

double InfillModel::prob(std::size_t i, std::size_t context, Token b) const {
  return probs_.at((i * n_contexts() + context) * alphabet_size_ + b);
}

std::span<const double> InfillModel::distribution(std::size_t i, std::size_t context) const {
  if (i >= length_ || context >= n_contexts()) throw std::out_of_range("infill: distribution index");
  return std::span<const double>(probs_).subspan((i * n_contexts() + context) * alphabet_size_, alphabet_size_);
}

InfillModel fit_infill(std::span<const Sequence> corpus, double smoothing, std::size_t alphabet_size, int order) {
  if (corpus.empty()) throw std::invalid_argument("fit_infill: empty corpus");
  if (!(smoothing > 0.0)) throw std::invalid_argument("fit_infill: smoothing must be > 0");
  const std::size_t L = corpus.front().size();
  const std::size_t C = order == 1 ? alphabet_size + 1 : 1;
  std::vector<std::uint64_t> counts(L * C * alphabet_size, 0);
  for (const auto& s : corpus) {
    if (s.size() != L) throw std::invalid_argument("fit_infill: ragged corpus");
    for (std::size_t i = 0; i < L; ++i) {
      if (s[i] >= alphabet_size) throw std::invalid_argument("fit_infill: token out of range");
      const std::size_t c = order == 1 ? (i == 0 ? alphabet_size : s[i - 1]) : 0;
      ++counts[(i * C + c) * alphabet_size + s[i]];
    }
  }
  return InfillModel(L, alphabet_size, order, smoothing, std::move(counts));
}

std::size_t sample_tempered(std::span<const double> probs, double temperature, Rng& rng) {
  if (temperature < 0.0) throw std::invalid_argument("temperature must be >= 0");
  if (temperature == 0.0) return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  if (temperature == 1.0) return rng.categorical(probs);
  double max_log = -INFINITY;
  for (double p : probs)
    if (p > 0.0) max_log = std::max(max_log, std::log(p));
  std::vector<double> w(probs.size(), 0.0);
  for (std::size_t b = 0; b < probs.size(); ++b)
    if (probs[b] > 0.0) w[b] = std::exp((std::log(probs[b]) - max_log) / temperature);
  return rng.categorical(w);
}

Sequence infill(const InfillModel& model, const Sequence& seq, std::span<const std::size_t> positions, Rng& rng,
                double temperature) {
  if (seq.size() != model.length()) throw std::invalid_argument("infill: length mismatch");
  std::vector<bool> masked(seq.size(), false);
  for (auto p : positions) {
    if (p >= seq.size()) throw std::out_of_range("infill: position " + std::to_string(p) + " out of range");
    masked[p] = true;
  }
  Sequence out = seq;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!masked[i]) continue;
    const auto ctx = model.context(i, i > 0 ? std::optional<Token>(out[i - 1]) : std::nullopt);
    out[i] = static_cast<Token>(sample_tempered(model.distribution(i, ctx), temperature, rng));
  }
  return out;
}

void write_infill(std::ostream& os, const InfillModel& model) {
  os << "ICE-INFILL 1\n";
  os << "length " << model.length() << '\n';
  os << "alphabet_size " << model.alphabet_size() << '\n';
  os << "order " << model.order() << '\n';
  os << "smoothing " << io::format_double(model.smoothing()) << '\n';
  const std::size_t A = model.alphabet_size();
  const std::size_t rows = model.length() * model.n_contexts();
  os << "counts " << rows << '\n';
  auto counts = model.counts();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t b = 0; b < A; ++b) os << (b ? "\t" : "") << counts[r * A + b];
    os << '\n';
  }
}

InfillModel read_infill(std::istream& is) {
  io::expect_header(is, "ICE-INFILL", 1);
  auto lines = io::read_data_lines(is);
  auto value = [&](std::size_t idx, std::string_view key) {
    if (idx >= lines.size() || lines[idx].rfind(std::string(key) + " ", 0) != 0)
      throw std::runtime_error("infill file: expected key '" + std::string(key) + "'");
    return std::string_view(lines[idx]).substr(key.size() + 1);
  };
  const auto L = io::parse_u64(value(0, "length"));
  const auto A = io::parse_u64(value(1, "alphabet_size"));
  const auto order = static_cast<int>(io::parse_u64(value(2, "order")));
  const double smoothing = io::parse_double(value(3, "smoothing"));
  const auto rows = io::parse_u64(value(4, "counts"));
  if (lines.size() != 5 + rows) throw std::runtime_error("infill file: row count mismatch");
  std::vector<std::uint64_t> counts;
  for (std::size_t r = 0; r < rows; ++r) {
    auto f = io::split_tabs(lines[5 + r]);
    if (f.size() != A) throw std::runtime_error("infill file: row width mismatch");
    for (auto v : f) counts.push_back(io::parse_u64(v));
  }
  return InfillModel(L, A, order, smoothing, std::move(counts));
}

}  // namespace ice
