#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ice/landscape.hpp"
#include "ice/seq.hpp"

namespace ice {

/// Ridge regressor on per-position one-hot features plus an unregularized bias.
/// Fit on training-region data only; a surrogate, never an oracle.
class ScorerModel {
 public:
  ScorerModel(std::size_t length, std::size_t alphabet_size, double ridge_lambda, std::vector<double> weights);

  std::size_t length() const { return length_; }
  std::size_t alphabet_size() const { return alphabet_size_; }
  double ridge_lambda() const { return lambda_; }
  /// weights[i * A + token] for one-hot features, bias last.
  std::span<const double> weights() const { return weights_; }
  double bias() const { return weights_.back(); }
  std::size_t feature_count() const { return weights_.size(); }

  bool operator==(const ScorerModel&) const = default;

 private:
  std::size_t length_;
  std::size_t alphabet_size_;
  double lambda_;
  std::vector<double> weights_;
};

/// One-hot per position followed by a constant 1 bias entry.
std::vector<double> featurize(const Sequence& seq, std::size_t length, std::size_t alphabet_size);

/// Closed-form ridge via Cholesky on X^T X + lambda*I (bias excluded from the
/// penalty), followed by iterative refinement. Throws std::runtime_error
/// with a condition estimate if the factorization breaks down.
ScorerModel fit_ridge(std::span<const LabeledExample> examples, double ridge_lambda, std::size_t length,
                      std::size_t alphabet_size);

/// ||X^T (y - X w) - lambda * w_nonbias||_inf for the given data.
double ridge_normal_residual(const ScorerModel& model, std::span<const LabeledExample> examples);

double predict(const ScorerModel& model, const Sequence& seq);
std::vector<double> predict_batch(const ScorerModel& model, std::span<const Sequence> seqs);

struct CorrelationReport {
  std::optional<double> train;
  std::optional<double> heldout;
};

/// Spearman of (predicted, true) on the training split and on `heldout`.
CorrelationReport correlation_report(const ScorerModel& model, const DatasetSplit& split,
                                     std::span<const LabeledExample> heldout);

void write_scorer(std::ostream& os, const ScorerModel& model);
ScorerModel read_scorer(std::istream& is);

}  // namespace ice
