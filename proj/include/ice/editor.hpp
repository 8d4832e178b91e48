#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ice/landscape.hpp"
#include "ice/pairgen.hpp"
#include "ice/rng.hpp"
#include "ice/seq.hpp"

namespace ice {

/// Count tables of the factorized local editor, one set per condition
/// (a control tag, or a score bin for the score-conditioned baseline):
///
///   p(y | x, c) ~ p_count(m | c) * prod_{i in diff} p_pos(i | c) * p_sub(y_i | x_i, i, c)
///
/// Every distribution is Laplace-smoothed. p_pos is supported on mutable
/// positions only; p_sub(. | a, i, c) is normalized over tokens b != a since
/// an edit never keeps its token.
class EditTables {
 public:
  EditTables(std::size_t length, std::size_t alphabet_size, std::size_t n_conditions, std::size_t max_edits,
             double smoothing, RegionMask mask);

  /// Adds one observed edit (source -> target) under `condition`.
  void observe(std::size_t condition, const Sequence& source, const Sequence& target);
  /// Recomputes the normalized log tables; call after the last observe().
  void finalize();

  std::size_t length() const { return length_; }
  std::size_t alphabet_size() const { return alphabet_size_; }
  std::size_t n_conditions() const { return n_conditions_; }
  std::size_t max_edits() const { return max_edits_; }
  double smoothing() const { return smoothing_; }
  const RegionMask& mask() const { return mask_; }

  double position_prob(std::size_t c, std::size_t i) const;
  double subst_prob(std::size_t c, std::size_t i, Token from, Token to) const;
  double edit_count_prob(std::size_t c, std::size_t m) const;

  /// log p_pos(i|c) + log p_sub(to|from,i,c); -inf for from == to or immutable i.
  double term(std::size_t c, std::size_t i, Token from, Token to) const {
    return term_[((c * length_ + i) * alphabet_size_ + from) * alphabet_size_ + to];
  }
  /// log p_count(m|c) - log(m!)
  double count_term(std::size_t c, std::size_t m) const { return count_term_[c * (max_edits_ + 1) + m]; }

  std::uint64_t position_count(std::size_t c, std::size_t i) const { return pos_counts_[c * length_ + i]; }
  std::uint64_t subst_count(std::size_t c, std::size_t i, Token from, Token to) const {
    return sub_counts_[((c * length_ + i) * alphabet_size_ + from) * alphabet_size_ + to];
  }
  std::uint64_t edit_count_count(std::size_t c, std::size_t m) const { return edit_counts_[c * (max_edits_ + 1) + m]; }
  std::uint64_t observations(std::size_t c) const { return n_obs_[c]; }

  bool operator==(const EditTables& o) const;

 private:
  friend void write_edit_tables(std::ostream&, const EditTables&);
  friend EditTables read_edit_tables(std::istream&);

  std::size_t length_, alphabet_size_, n_conditions_, max_edits_;
  double smoothing_;
  RegionMask mask_;
  std::vector<std::uint64_t> pos_counts_;   // [c][i]
  std::vector<std::uint64_t> sub_counts_;   // [c][i][from][to]
  std::vector<std::uint64_t> edit_counts_;  // [c][m], m in [0, max_edits]; slot 0 unused
  std::vector<std::uint64_t> n_obs_;        // [c]
  std::vector<double> log_pos_, log_sub_, log_count_, term_, count_term_;
};

struct Candidate {
  Sequence seq;
  double logprob = 0.0;
};

/// log p(y | x, c): log p_count(m) + sum over ascending diff positions of the
/// per-edit terms - log(m!). Throws on m == 0, m > max_edits or an edit at an
/// immutable position.
double candidate_logprob(const EditTables& tables, std::size_t condition, const Sequence& x, const Sequence& y);

/// Exact top-`beam_width` candidates by candidate_logprob, ordered by
/// (logprob desc, positions then tokens lexicographic). Throws when no
/// candidate exists.
std::vector<Candidate> beam_step(const EditTables& tables, std::size_t condition, const Sequence& x,
                                 std::size_t beam_width);

/// k i.i.d. draws: m ~ p_count, positions ~ p_pos without replacement, tokens
/// ~ p_sub^(1/T) renormalized. Duplicates allowed.
std::vector<Candidate> sample_step(const EditTables& tables, std::size_t condition, const Sequence& x,
                                   std::size_t k, double temperature, Rng& rng);

/// The ICE local editor p(y | x, c) keyed by control tag.
class EditorModel {
 public:
  explicit EditorModel(EditTables tables);
  const EditTables& tables() const { return tables_; }
  static constexpr std::size_t condition(ControlTag tag) { return static_cast<std::size_t>(tag); }

  bool operator==(const EditorModel& o) const { return tables_ == o.tables_; }

 private:
  EditTables tables_;
};

/// Diff positions of every pair feed the tables of its tag. Throws on a pair
/// with zero diffs, more than max_edits diffs, or an immutable-position diff.
EditorModel fit_editor(std::span<const EditPair> pairs, std::size_t alphabet_size, double smoothing,
                       std::size_t max_edits, const RegionMask& mask);

double candidate_logprob(const EditorModel& model, const Sequence& x, const Sequence& y, ControlTag c);
std::vector<Candidate> beam_step(const EditorModel& model, const Sequence& x, ControlTag c, std::size_t beam_width);
std::vector<Candidate> sample_step(const EditorModel& model, const Sequence& x, ControlTag c, std::size_t k,
                                   double temperature, Rng& rng);

void write_edit_tables(std::ostream& os, const EditTables& tables);
EditTables read_edit_tables(std::istream& is);
void write_editor(std::ostream& os, const EditorModel& model);
EditorModel read_editor(std::istream& is);

}  // namespace ice
