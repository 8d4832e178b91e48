#include "ice/editor.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ice/io.hpp"

namespace ice {

EditTables::EditTables(std::size_t length, std::size_t alphabet_size, std::size_t n_conditions, std::size_t max_edits,
                       double smoothing, RegionMask mask)
    : length_(length),
      alphabet_size_(alphabet_size),
      n_conditions_(n_conditions),
      max_edits_(max_edits),
      smoothing_(smoothing),
      mask_(std::move(mask)) {
  if (!(smoothing_ > 0.0) || !std::isfinite(smoothing_)) throw std::invalid_argument("editor: smoothing must be > 0");
  if (max_edits_ < 1) throw std::invalid_argument("editor: max_edits must be >= 1");
  if (n_conditions_ < 1) throw std::invalid_argument("editor: need at least one condition");
  if (alphabet_size_ < 2) throw std::invalid_argument("editor: alphabet needs >= 2 symbols");
  if (mask_.size() != length_) throw std::invalid_argument("editor: mask length mismatch");
  const std::size_t A = alphabet_size_;
  pos_counts_.assign(n_conditions_ * length_, 0);
  sub_counts_.assign(n_conditions_ * length_ * A * A, 0);
  edit_counts_.assign(n_conditions_ * (max_edits_ + 1), 0);
  n_obs_.assign(n_conditions_, 0);
  finalize();
}

void EditTables::observe(std::size_t condition, const Sequence& source, const Sequence& target) {
  if (condition >= n_conditions_) throw std::out_of_range("editor: condition index");
  if (source.size() != length_ || target.size() != length_) throw std::invalid_argument("editor: pair length mismatch");
  const auto diffs = diff_positions(source, target);
  if (diffs.empty()) throw std::invalid_argument("editor: pair with zero diffs");
  if (diffs.size() > max_edits_)
    throw std::invalid_argument("editor: pair has " + std::to_string(diffs.size()) + " diffs, max_edits is " +
                                std::to_string(max_edits_));
  for (auto i : diffs)
    if (!mask_.is_mutable(i))
      throw std::invalid_argument("editor: pair edits immutable position " + std::to_string(i));
  const std::size_t A = alphabet_size_;
  for (auto i : diffs) {
    if (source[i] >= A || target[i] >= A) throw std::invalid_argument("editor: token out of range");
    ++pos_counts_[condition * length_ + i];
    ++sub_counts_[((condition * length_ + i) * A + source[i]) * A + target[i]];
  }
  ++edit_counts_[condition * (max_edits_ + 1) + diffs.size()];
  ++n_obs_[condition];
}

void EditTables::finalize() {
  const std::size_t A = alphabet_size_, L = length_, M = max_edits_ + 1;
  const double s = smoothing_;
  const double ninf = -INFINITY;
  log_pos_.assign(n_conditions_ * L, ninf);
  log_sub_.assign(n_conditions_ * L * A * A, ninf);
  log_count_.assign(n_conditions_ * M, ninf);
  term_.assign(log_sub_.size(), ninf);
  count_term_.assign(log_count_.size(), ninf);
  const auto& mut = mask_.mutable_positions();
  for (std::size_t c = 0; c < n_conditions_; ++c) {
    std::uint64_t pos_total = 0;
    for (auto i : mut) pos_total += pos_counts_[c * L + i];
    const double pos_denom = static_cast<double>(pos_total) + s * static_cast<double>(mut.size());
    for (auto i : mut) log_pos_[c * L + i] = std::log((static_cast<double>(pos_counts_[c * L + i]) + s) / pos_denom);

    for (auto i : mut) {
      for (std::size_t a = 0; a < A; ++a) {
        const std::size_t row = ((c * L + i) * A + a) * A;
        std::uint64_t total = 0;
        for (std::size_t b = 0; b < A; ++b)
          if (b != a) total += sub_counts_[row + b];
        const double denom = static_cast<double>(total) + s * static_cast<double>(A - 1);
        for (std::size_t b = 0; b < A; ++b) {
          if (b == a) continue;
          log_sub_[row + b] = std::log((static_cast<double>(sub_counts_[row + b]) + s) / denom);
          term_[row + b] = log_pos_[c * L + i] + log_sub_[row + b];
        }
      }
    }

    std::uint64_t m_total = 0;
    for (std::size_t m = 1; m < M; ++m) m_total += edit_counts_[c * M + m];
    const double m_denom = static_cast<double>(m_total) + s * static_cast<double>(max_edits_);
    for (std::size_t m = 1; m < M; ++m) {
      log_count_[c * M + m] = std::log((static_cast<double>(edit_counts_[c * M + m]) + s) / m_denom);
      count_term_[c * M + m] = log_count_[c * M + m] - std::lgamma(static_cast<double>(m) + 1.0);
    }
  }
}

double EditTables::position_prob(std::size_t c, std::size_t i) const { return std::exp(log_pos_.at(c * length_ + i)); }

double EditTables::subst_prob(std::size_t c, std::size_t i, Token from, Token to) const {
  return std::exp(log_sub_.at(((c * length_ + i) * alphabet_size_ + from) * alphabet_size_ + to));
}

double EditTables::edit_count_prob(std::size_t c, std::size_t m) const {
  if (m == 0 || m > max_edits_) return 0.0;
  return std::exp(log_count_.at(c * (max_edits_ + 1) + m));
}

bool EditTables::operator==(const EditTables& o) const {
  return length_ == o.length_ && alphabet_size_ == o.alphabet_size_ && n_conditions_ == o.n_conditions_ &&
         max_edits_ == o.max_edits_ && smoothing_ == o.smoothing_ && mask_ == o.mask_ &&
         pos_counts_ == o.pos_counts_ && sub_counts_ == o.sub_counts_ && edit_counts_ == o.edit_counts_ &&
         n_obs_ == o.n_obs_;
}

double candidate_logprob(const EditTables& t, std::size_t condition, const Sequence& x, const Sequence& y) {
  if (condition >= t.n_conditions()) throw std::out_of_range("candidate_logprob: condition index");
  if (x.size() != t.length() || y.size() != t.length()) throw std::invalid_argument("candidate_logprob: length mismatch");
  const auto diffs = diff_positions(x, y);
  if (diffs.empty()) throw std::invalid_argument("candidate_logprob: candidate equals the source");
  if (diffs.size() > t.max_edits()) throw std::invalid_argument("candidate_logprob: more than max_edits diffs");
  double s = 0.0;
  for (auto i : diffs) {
    if (!t.mask().is_mutable(i)) throw std::invalid_argument("candidate_logprob: edit at immutable position");
    s += t.term(condition, i, x[i], y[i]);
  }
  return s + t.count_term(condition, diffs.size());
}

namespace {

struct Partial {
  double sum = 0.0;
  std::vector<std::uint32_t> pos;
  std::vector<Token> tok;
};

// (sum desc, positions asc, tokens asc)
bool better(double sa, const Partial& a, double sb, const Partial& b) {
  if (sa != sb) return sa > sb;
  if (a.pos != b.pos) return a.pos < b.pos;
  return a.tok < b.tok;
}

void keep_top(std::vector<Partial>& v, std::size_t width) {
  auto cmp = [](const Partial& a, const Partial& b) { return better(a.sum, a, b.sum, b); };
  if (v.size() > width) {
    std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(width), v.end(), cmp);
    v.resize(width);
  } else {
    std::sort(v.begin(), v.end(), cmp);
  }
}

}  // namespace

// Exact top-B by dynamic programming over mutable positions in ascending order.
// dp[r] holds the best B partial edit sets with r edits among the positions
// seen so far. Pruning is exact: a partial beaten by B others in dp[r] is
// beaten by their extensions with the same suffix, both in score and in the
// (positions, tokens) tie order. Per position only the B best substitutions
// can ever appear in the answer, by the same argument.
std::vector<Candidate> beam_step(const EditTables& t, std::size_t condition, const Sequence& x, std::size_t beam_width) {
  if (beam_width < 1) throw std::invalid_argument("beam_step: beam_width must be >= 1");
  if (condition >= t.n_conditions()) throw std::out_of_range("beam_step: condition index");
  if (x.size() != t.length()) throw std::invalid_argument("beam_step: length mismatch");
  const std::size_t A = t.alphabet_size();
  const auto& mut = t.mask().mutable_positions();
  const std::size_t max_m = std::min(t.max_edits(), mut.size());

  std::vector<std::vector<Partial>> dp(max_m + 1);
  dp[0].push_back(Partial{});
  std::vector<std::pair<double, Token>> opts;
  for (std::size_t idx = 0; idx < mut.size(); ++idx) {
    const std::size_t i = mut[idx];
    opts.clear();
    for (std::size_t b = 0; b < A; ++b) {
      if (b == x[i]) continue;
      const double v = t.term(condition, i, x[i], static_cast<Token>(b));
      if (std::isfinite(v)) opts.emplace_back(v, static_cast<Token>(b));
    }
    std::sort(opts.begin(), opts.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    if (opts.size() > beam_width) opts.resize(beam_width);
    if (opts.empty()) continue;
    for (std::size_t r = std::min(max_m, idx + 1); r >= 1; --r) {
      std::vector<Partial> next = dp[r];
      for (const auto& p : dp[r - 1]) {
        for (const auto& [v, b] : opts) {
          Partial q = p;
          q.sum = p.sum + v;
          q.pos.push_back(static_cast<std::uint32_t>(i));
          q.tok.push_back(b);
          next.push_back(std::move(q));
        }
      }
      keep_top(next, beam_width);
      dp[r] = std::move(next);
    }
  }

  std::vector<std::pair<double, Partial>> finals;
  for (std::size_t m = 1; m <= max_m; ++m)
    for (auto& p : dp[m]) finals.emplace_back(p.sum + t.count_term(condition, m), std::move(p));
  if (finals.empty()) throw std::runtime_error("beam_step: no valid candidate");
  std::sort(finals.begin(), finals.end(),
            [](const auto& a, const auto& b) { return better(a.first, a.second, b.first, b.second); });
  if (finals.size() > beam_width) finals.resize(beam_width);

  std::vector<Candidate> out;
  out.reserve(finals.size());
  for (const auto& [score, p] : finals) {
    Candidate c{x, score};
    for (std::size_t e = 0; e < p.pos.size(); ++e) c.seq[p.pos[e]] = p.tok[e];
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Candidate> sample_step(const EditTables& t, std::size_t condition, const Sequence& x, std::size_t k,
                                   double temperature, Rng& rng) {
  if (k < 1) throw std::invalid_argument("sample_step: k must be >= 1");
  if (!(temperature > 0.0)) throw std::invalid_argument("sample_step: temperature must be > 0");
  if (condition >= t.n_conditions()) throw std::out_of_range("sample_step: condition index");
  if (x.size() != t.length()) throw std::invalid_argument("sample_step: length mismatch");
  if (t.mask().n_mutable() == 0 || t.max_edits() == 0) throw std::runtime_error("sample_step: no valid candidate");
  const std::size_t A = t.alphabet_size();
  const auto& mut = t.mask().mutable_positions();
  const std::size_t max_m = std::min(t.max_edits(), mut.size());

  std::vector<double> m_weights(max_m);
  for (std::size_t m = 1; m <= max_m; ++m) m_weights[m - 1] = t.edit_count_prob(condition, m);
  std::vector<double> base_pos(mut.size());
  for (std::size_t j = 0; j < mut.size(); ++j) base_pos[j] = t.position_prob(condition, mut[j]);

  std::vector<Candidate> out;
  out.reserve(k);
  std::vector<double> pos_w, sub_p;
  std::vector<Token> sub_b;
  for (std::size_t draw = 0; draw < k; ++draw) {
    const std::size_t m = rng.categorical(m_weights) + 1;
    pos_w = base_pos;
    std::vector<std::size_t> chosen;
    for (std::size_t e = 0; e < m; ++e) {
      const std::size_t j = rng.categorical(pos_w);
      chosen.push_back(mut[j]);
      pos_w[j] = 0.0;
    }
    std::sort(chosen.begin(), chosen.end());
    Sequence y = x;
    for (auto i : chosen) {
      sub_p.clear();
      sub_b.clear();
      for (std::size_t b = 0; b < A; ++b) {
        if (b == x[i]) continue;
        sub_p.push_back(t.subst_prob(condition, i, x[i], static_cast<Token>(b)));
        sub_b.push_back(static_cast<Token>(b));
      }
      y[i] = sub_b[sample_tempered(sub_p, temperature, rng)];
    }
    const double lp = candidate_logprob(t, condition, x, y);
    out.push_back({std::move(y), lp});
  }
  return out;
}

EditorModel::EditorModel(EditTables tables) : tables_(std::move(tables)) {
  if (tables_.n_conditions() != 2) throw std::invalid_argument("editor: tag model needs exactly 2 conditions");
}

EditorModel fit_editor(std::span<const EditPair> pairs, std::size_t alphabet_size, double smoothing,
                       std::size_t max_edits, const RegionMask& mask) {
  if (pairs.empty()) throw std::invalid_argument("fit_editor: no pairs");
  EditTables t(pairs.front().source.size(), alphabet_size, 2, max_edits, smoothing, mask);
  for (const auto& p : pairs) t.observe(EditorModel::condition(p.tag), p.source, p.target);
  t.finalize();
  return EditorModel(std::move(t));
}

double candidate_logprob(const EditorModel& model, const Sequence& x, const Sequence& y, ControlTag c) {
  return candidate_logprob(model.tables(), EditorModel::condition(c), x, y);
}

std::vector<Candidate> beam_step(const EditorModel& model, const Sequence& x, ControlTag c, std::size_t beam_width) {
  return beam_step(model.tables(), EditorModel::condition(c), x, beam_width);
}

std::vector<Candidate> sample_step(const EditorModel& model, const Sequence& x, ControlTag c, std::size_t k,
                                   double temperature, Rng& rng) {
  return sample_step(model.tables(), EditorModel::condition(c), x, k, temperature, rng);
}

namespace {

std::string mask_string(const RegionMask& mask) {
  std::string s;
  for (std::size_t i = 0; i < mask.size(); ++i) s += mask.is_mutable(i) ? '1' : '0';
  return s;
}

template <class T>
void write_row(std::ostream& os, const T* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) os << (i ? "\t" : "") << data[i];
  os << '\n';
}

}  // namespace

void write_edit_tables(std::ostream& os, const EditTables& t) {
  const std::size_t L = t.length_, A = t.alphabet_size_, C = t.n_conditions_, M = t.max_edits_ + 1;
  os << "length " << L << '\n';
  os << "alphabet_size " << A << '\n';
  os << "conditions " << C << '\n';
  os << "max_edits " << t.max_edits_ << '\n';
  os << "smoothing " << io::format_double(t.smoothing_) << '\n';
  os << "mask " << mask_string(t.mask_) << '\n';
  os << "observations\n";
  write_row(os, t.n_obs_.data(), C);
  os << "positions\n";
  for (std::size_t c = 0; c < C; ++c) write_row(os, t.pos_counts_.data() + c * L, L);
  os << "edit_counts\n";
  for (std::size_t c = 0; c < C; ++c) write_row(os, t.edit_counts_.data() + c * M + 1, M - 1);
  os << "substitutions\n";
  for (std::size_t r = 0; r < C * L * A; ++r) write_row(os, t.sub_counts_.data() + r * A, A);
}

EditTables read_edit_tables(std::istream& is) {
  auto lines = io::read_data_lines(is);
  std::size_t at = 0;
  auto value = [&](std::string_view key) {
    if (at >= lines.size() || lines[at].rfind(std::string(key) + " ", 0) != 0)
      throw std::runtime_error("editor file: expected key '" + std::string(key) + "'");
    return std::string_view(lines[at++]).substr(key.size() + 1);
  };
  auto section = [&](std::string_view key) {
    if (at >= lines.size() || lines[at] != key) throw std::runtime_error("editor file: expected section '" + std::string(key) + "'");
    ++at;
  };
  auto row = [&](std::size_t width) {
    if (at >= lines.size()) throw std::runtime_error("editor file: truncated");
    auto f = io::split_tabs(lines[at++]);
    if (f.size() != width) throw std::runtime_error("editor file: row width mismatch");
    std::vector<std::uint64_t> v;
    for (auto s : f) v.push_back(io::parse_u64(s));
    return v;
  };
  const auto L = io::parse_u64(value("length"));
  const auto A = io::parse_u64(value("alphabet_size"));
  const auto C = io::parse_u64(value("conditions"));
  const auto max_edits = io::parse_u64(value("max_edits"));
  const double smoothing = io::parse_double(value("smoothing"));
  const auto mask_text = value("mask");
  if (mask_text.size() != L) throw std::runtime_error("editor file: mask length mismatch");
  std::vector<bool> flags;
  for (char ch : mask_text) {
    if (ch != '0' && ch != '1') throw std::runtime_error("editor file: bad mask");
    flags.push_back(ch == '1');
  }
  EditTables t(L, A, C, max_edits, smoothing, RegionMask(std::move(flags)));
  section("observations");
  t.n_obs_ = row(C);
  section("positions");
  for (std::size_t c = 0; c < C; ++c) {
    auto v = row(L);
    std::copy(v.begin(), v.end(), t.pos_counts_.begin() + static_cast<std::ptrdiff_t>(c * L));
  }
  section("edit_counts");
  for (std::size_t c = 0; c < C; ++c) {
    auto v = row(max_edits);
    std::copy(v.begin(), v.end(), t.edit_counts_.begin() + static_cast<std::ptrdiff_t>(c * (max_edits + 1) + 1));
  }
  section("substitutions");
  for (std::size_t r = 0; r < C * L * A; ++r) {
    auto v = row(A);
    std::copy(v.begin(), v.end(), t.sub_counts_.begin() + static_cast<std::ptrdiff_t>(r * A));
  }
  if (at != lines.size()) throw std::runtime_error("editor file: trailing data");
  t.finalize();
  return t;
}

void write_editor(std::ostream& os, const EditorModel& model) {
  os << "ICE-EDITOR 1\n";
  write_edit_tables(os, model.tables());
}

EditorModel read_editor(std::istream& is) {
  io::expect_header(is, "ICE-EDITOR", 1);
  return EditorModel(read_edit_tables(is));
}

}  // namespace ice
