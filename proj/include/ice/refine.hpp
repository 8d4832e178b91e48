#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ice/editor.hpp"
#include "ice/landscape.hpp"
#include "ice/pairgen.hpp"
#include "ice/proposer.hpp"
#include "ice/scorer.hpp"

namespace ice {

enum class InferenceMode { ScorerFree, ScorerGuided };

std::string_view mode_name(InferenceMode mode);

struct TrajectoryStep {
  std::size_t k = 0;
  Sequence seq;
  /// Scorer value of seq. Scorer-free runs leave it NaN until annotate_scores.
  double fs = 0.0;
  /// Beam members (scorer-free) or the k sampled proposals (scorer-guided)
  /// this step chose from; empty at k = 0 and on carried-forward steps.
  std::vector<Sequence> candidates;
  std::vector<double> candidate_fs;
};

struct Trajectory {
  Sequence start;
  ControlTag tag = ControlTag::Inc;
  InferenceMode mode = InferenceMode::ScorerFree;
  std::vector<TrajectoryStep> steps;  // K + 1 entries, steps[0].seq == start

  const Sequence& final_sequence() const { return steps.back().seq; }
};

/// x_{k+1} = top-1 of beam_step(x_k). Takes no scorer: selection is by model
/// likelihood only. An empty beam carries x_k forward.
Trajectory run_scorer_free(const EditorModel& editor, const Sequence& x0, ControlTag c, std::size_t K,
                           std::size_t beam_width);

/// Fills every fs / candidate_fs of a trajectory from the scorer.
void annotate_scores(Trajectory& trajectory, const ScorerModel& scorer);

/// Each iteration draws k proposals with sample_step from
/// Rng(derive_seed(stream_seed, "iteration", k)) and keeps the scorer's best:
/// max f_s for INC, min for DEC, ties to the lexicographically smallest sequence.
Trajectory run_scorer_guided(const EditorModel& editor, const ScorerModel& scorer, const Sequence& x0, ControlTag c,
                             std::size_t K, std::size_t k, double temperature, std::uint64_t stream_seed);

/// n independent one-shot mask + infill perturbations of x0.
std::vector<Sequence> baseline_sampling(const InfillModel& infill_model, const MaskSpec& spec, const RegionMask& mask,
                                        const Sequence& x0, Rng& rng, std::size_t n, double temperature = 1.0);

/// Same loop and seeding as run_scorer_guided with mask + infill proposals.
Trajectory baseline_iter_sampling(const InfillModel& infill_model, const MaskSpec& spec, const RegionMask& mask,
                                  const ScorerModel& scorer, const Sequence& x0, ControlTag c, std::size_t K,
                                  std::size_t k, std::uint64_t stream_seed, double temperature = 1.0);

/// Index of the scorer-best proposal under the selection rule above.
std::size_t select_best(std::span<const Sequence> seqs, std::span<const double> fs, ControlTag c);

/// The factorized editor conditioned on an equal-width bin of the target
/// score over the training region instead of a direction tag.
class ScoreConditionedEditor {
 public:
  ScoreConditionedEditor(EditTables tables, double low, double high);

  const EditTables& tables() const { return tables_; }
  std::size_t n_bins() const { return tables_.n_conditions(); }
  double low() const { return low_; }
  double high() const { return high_; }
  double bin_width() const { return (high_ - low_) / static_cast<double>(n_bins()); }
  /// Bin containing z; values outside [low, high] clamp to the nearest bin.
  std::size_t bin_of(double z) const;

  bool operator==(const ScoreConditionedEditor& o) const {
    return tables_ == o.tables_ && low_ == o.low_ && high_ == o.high_;
  }

 private:
  EditTables tables_;
  double low_, high_;
};

/// Every pair contributes under the bin of its target_score.
ScoreConditionedEditor fit_score_conditioned(std::span<const EditPair> pairs, std::size_t alphabet_size,
                                             std::size_t n_bins, double smoothing, std::size_t max_edits,
                                             const RegionMask& mask, Region region);

/// One-shot generation: top-1 of the beam conditioned on target's bin, or x0
/// if no candidate exists.
Sequence score_conditioned_generate(const ScoreConditionedEditor& model, const Sequence& x0, double target,
                                    std::size_t beam_width);

void write_score_conditioned(std::ostream& os, const ScoreConditionedEditor& model);
ScoreConditionedEditor read_score_conditioned(std::istream& is);

/// start_id, k, sequence, f_s, oracle_z (oracle column "NA" when absent).
void write_trajectories(std::ostream& os, std::span<const Trajectory> trajectories, const Alphabet& alphabet,
                        const Landscape* oracle = nullptr);
/// start_id, k, rank, sequence, f_s per recorded candidate.
void write_step_candidates(std::ostream& os, std::span<const Trajectory> trajectories, const Alphabet& alphabet);

/// Attaches the rows of a step-candidate file to already loaded trajectories.
void attach_step_candidates(std::istream& is, const Alphabet& alphabet, std::vector<Trajectory>& trajectories);

/// Rebuilds trajectories (steps only, no candidates) from a trajectory file.
std::vector<Trajectory> read_trajectories(std::istream& is, const Alphabet& alphabet, ControlTag tag,
                                          InferenceMode mode);

}  // namespace ice
