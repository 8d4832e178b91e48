#include "ice/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ice/io.hpp"
#include "ice/simd.hpp"

namespace ice {

ScorerModel::ScorerModel(std::size_t length, std::size_t alphabet_size, double ridge_lambda, std::vector<double> weights)
    : length_(length), alphabet_size_(alphabet_size), lambda_(ridge_lambda), weights_(std::move(weights)) {
  if (length_ == 0 || alphabet_size_ < 2) throw std::invalid_argument("scorer: invalid layout");
  if (!(lambda_ > 0.0)) throw std::invalid_argument("scorer: ridge_lambda must be > 0");
  if (weights_.size() != length_ * alphabet_size_ + 1) throw std::invalid_argument("scorer: weight count != L*A + 1");
  for (double w : weights_)
    if (!std::isfinite(w)) throw std::invalid_argument("scorer: non-finite weight");
}

std::vector<double> featurize(const Sequence& seq, std::size_t length, std::size_t alphabet_size) {
  if (seq.size() != length) throw std::invalid_argument("featurize: length mismatch");
  std::vector<double> f(length * alphabet_size + 1, 0.0);
  for (std::size_t i = 0; i < length; ++i) {
    if (seq[i] >= alphabet_size) throw std::invalid_argument("featurize: token out of range");
    f[i * alphabet_size + seq[i]] = 1.0;
  }
  f.back() = 1.0;
  return f;
}

namespace {

using Matrix = std::vector<double>;  // row-major D x D

struct NormalSystem {
  std::size_t dim;
  Matrix gram;  // X^T X + lambda * I (non-bias)
  std::vector<double> rhs;
  double y_inf = 0.0;
};

NormalSystem build_normal_system(std::span<const LabeledExample> examples, double lambda, std::size_t L, std::size_t A) {
  const std::size_t D = L * A + 1, bias = D - 1;
  NormalSystem sys{D, Matrix(D * D, 0.0), std::vector<double>(D, 0.0)};
  std::vector<std::size_t> active(L);
  for (const auto& ex : examples) {
    if (ex.seq.size() != L) throw std::invalid_argument("fit_ridge: length mismatch");
    for (std::size_t i = 0; i < L; ++i) {
      if (ex.seq[i] >= A) throw std::invalid_argument("fit_ridge: token out of range");
      active[i] = i * A + ex.seq[i];
    }
    for (std::size_t p = 0; p < L; ++p) {
      for (std::size_t q = 0; q < L; ++q) sys.gram[active[p] * D + active[q]] += 1.0;
      sys.gram[active[p] * D + bias] += 1.0;
      sys.gram[bias * D + active[p]] += 1.0;
      sys.rhs[active[p]] += ex.z;
    }
    sys.gram[bias * D + bias] += 1.0;
    sys.rhs[bias] += ex.z;
    sys.y_inf = std::max(sys.y_inf, std::abs(ex.z));
  }
  for (std::size_t k = 0; k < bias; ++k) sys.gram[k * D + k] += lambda;
  return sys;
}

// In-place lower Cholesky factor. Returns the smallest pivot^2 / largest diagonal
// ratio as a crude reciprocal condition estimate.
double cholesky(Matrix& a, std::size_t n) {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a[i * n + i]);
  double min_pivot_sq = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > max_diag * 1e-15)) {
      std::ostringstream msg;
      msg << "fit_ridge: normal matrix numerically singular at column " << j
          << " (pivot " << d << ", condition estimate >= " << (d > 0 ? max_diag / d : INFINITY) << ")";
      throw std::runtime_error(msg.str());
    }
    min_pivot_sq = std::min(min_pivot_sq, d);
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
  }
  return min_pivot_sq / max_diag;
}

std::vector<double> cholesky_solve(const Matrix& l, std::size_t n, std::vector<double> b) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
    b[i] = s / l[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l[k * n + ii] * b[k];
    b[ii] = s / l[ii * n + ii];
  }
  return b;
}

}  // namespace

ScorerModel fit_ridge(std::span<const LabeledExample> examples, double ridge_lambda, std::size_t length,
                      std::size_t alphabet_size) {
  if (examples.size() < 2) throw std::invalid_argument("fit_ridge: need at least 2 examples");
  if (!(ridge_lambda > 0.0)) throw std::invalid_argument("fit_ridge: ridge_lambda must be > 0");
  auto sys = build_normal_system(examples, ridge_lambda, length, alphabet_size);
  const std::size_t D = sys.dim;
  Matrix factor = sys.gram;
  cholesky(factor, D);
  auto w = cholesky_solve(factor, D, sys.rhs);
  // Two rounds of iterative refinement against the unfactored system.
  for (int round = 0; round < 2; ++round) {
    std::vector<double> r(D);
    for (std::size_t i = 0; i < D; ++i) {
      long double s = sys.rhs[i];
      for (std::size_t k = 0; k < D; ++k) s -= static_cast<long double>(sys.gram[i * D + k]) * w[k];
      r[i] = static_cast<double>(s);
    }
    auto d = cholesky_solve(factor, D, std::move(r));
    for (std::size_t i = 0; i < D; ++i) w[i] += d[i];
  }
  return ScorerModel(length, alphabet_size, ridge_lambda, std::move(w));
}

double ridge_normal_residual(const ScorerModel& model, std::span<const LabeledExample> examples) {
  const std::size_t L = model.length(), A = model.alphabet_size(), D = model.feature_count();
  auto w = model.weights();
  std::vector<long double> g(D, 0.0L);
  for (const auto& ex : examples) {
    long double pred = 0.0L;
    for (std::size_t i = 0; i < L; ++i) pred += w[i * A + ex.seq[i]];
    pred += w[D - 1];
    const long double resid = ex.z - pred;
    for (std::size_t i = 0; i < L; ++i) g[i * A + ex.seq[i]] += resid;
    g[D - 1] += resid;
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < D; ++k) {
    long double v = g[k];
    if (k + 1 < D) v -= static_cast<long double>(model.ridge_lambda()) * w[k];
    worst = std::max(worst, static_cast<double>(std::fabs(v)));
  }
  return worst;
}

double predict(const ScorerModel& model, const Sequence& seq) {
  const std::size_t L = model.length(), A = model.alphabet_size();
  if (seq.size() != L) throw std::invalid_argument("predict: layout mismatch");
  auto w = model.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    if (seq[i] >= A) throw std::invalid_argument("predict: token out of range");
    acc += w[i * A + seq[i]];
  }
  return acc + w.back();
}

std::vector<double> predict_batch(const ScorerModel& model, std::span<const Sequence> seqs) {
  const std::size_t L = model.length(), A = model.alphabet_size();
  std::vector<std::uint8_t> packed(seqs.size() * L);
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    if (seqs[s].size() != L) throw std::invalid_argument("predict: layout mismatch");
    for (std::size_t i = 0; i < L; ++i) {
      if (seqs[s][i] >= A) throw std::invalid_argument("predict: token out of range");
      packed[s * L + i] = seqs[s][i];
    }
  }
  std::vector<double> out(seqs.size(), 0.0);
  simd::table_sum(model.weights().data(), A, {packed.data(), seqs.size(), L}, out.data());
  const double b = model.bias();
  for (auto& v : out) v += b;
  return out;
}

CorrelationReport correlation_report(const ScorerModel& model, const DatasetSplit& split,
                                     std::span<const LabeledExample> heldout) {
  if (split.sup_train.empty() || heldout.empty()) throw std::invalid_argument("correlation_report: empty input");
  auto corr = [&model](std::span<const LabeledExample> data) -> std::optional<double> {
    if (data.size() < 2) return std::nullopt;
    std::vector<double> pred, truth;
    for (const auto& ex : data) {
      pred.push_back(predict(model, ex.seq));
      truth.push_back(ex.z);
    }
    return spearman(pred, truth);
  };
  return {corr(split.sup_train), corr(heldout)};
}

void write_scorer(std::ostream& os, const ScorerModel& model) {
  os << "ICE-SCORER 1\n";
  os << "length " << model.length() << '\n';
  os << "alphabet_size " << model.alphabet_size() << '\n';
  os << "ridge_lambda " << io::format_double(model.ridge_lambda()) << '\n';
  os << "weights " << model.feature_count() << '\n';
  for (double w : model.weights()) os << io::format_double(w) << '\n';
}

ScorerModel read_scorer(std::istream& is) {
  io::expect_header(is, "ICE-SCORER", 1);
  auto lines = io::read_data_lines(is);
  auto value = [&](std::size_t idx, std::string_view key) {
    if (idx >= lines.size() || lines[idx].rfind(std::string(key) + " ", 0) != 0)
      throw std::runtime_error("scorer file: expected key '" + std::string(key) + "'");
    return std::string_view(lines[idx]).substr(key.size() + 1);
  };
  const auto L = io::parse_u64(value(0, "length"));
  const auto A = io::parse_u64(value(1, "alphabet_size"));
  const double lambda = io::parse_double(value(2, "ridge_lambda"));
  const auto n = io::parse_u64(value(3, "weights"));
  if (lines.size() != 4 + n) throw std::runtime_error("scorer file: weight count mismatch");
  std::vector<double> w;
  for (std::size_t k = 0; k < n; ++k) w.push_back(io::parse_double(lines[4 + k]));
  return ScorerModel(L, A, lambda, std::move(w));
}

}  // namespace ice
