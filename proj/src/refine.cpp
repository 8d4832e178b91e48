#include "ice/refine.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ice/io.hpp"

namespace ice {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string_view mode_name(InferenceMode mode) {
  return mode == InferenceMode::ScorerFree ? "scorer-free" : "scorer-guided";
}

Trajectory run_scorer_free(const EditorModel& editor, const Sequence& x0, ControlTag c, std::size_t K,
                           std::size_t beam_width) {
  if (K < 1) throw std::invalid_argument("run_scorer_free: K must be >= 1");
  Trajectory t{x0, c, InferenceMode::ScorerFree, {}};
  t.steps.push_back({0, x0, kNaN, {}, {}});
  for (std::size_t k = 1; k <= K; ++k) {
    const Sequence& cur = t.steps.back().seq;
    std::vector<Candidate> beam;
    try {
      beam = beam_step(editor, cur, c, beam_width);
    } catch (const std::runtime_error&) {
      beam.clear();
    }
    TrajectoryStep step{k, beam.empty() ? cur : beam.front().seq, kNaN, {}, {}};
    for (auto& cand : beam) {
      step.candidates.push_back(std::move(cand.seq));
      step.candidate_fs.push_back(kNaN);
    }
    t.steps.push_back(std::move(step));
  }
  return t;
}

void annotate_scores(Trajectory& trajectory, const ScorerModel& scorer) {
  for (auto& s : trajectory.steps) {
    s.fs = predict(scorer, s.seq);
    if (!s.candidates.empty()) s.candidate_fs = predict_batch(scorer, s.candidates);
  }
}

std::size_t select_best(std::span<const Sequence> seqs, std::span<const double> fs, ControlTag c) {
  if (seqs.empty() || seqs.size() != fs.size()) throw std::invalid_argument("select_best: bad proposal set");
  std::size_t best = 0;
  for (std::size_t j = 1; j < seqs.size(); ++j) {
    const bool strictly = c == ControlTag::Inc ? fs[j] > fs[best] : fs[j] < fs[best];
    if (strictly || (fs[j] == fs[best] && seqs[j] < seqs[best])) best = j;
  }
  return best;
}

namespace {

template <class Propose>
Trajectory guided_loop(const ScorerModel& scorer, const Sequence& x0, ControlTag c, std::size_t K, std::size_t k,
                       std::uint64_t stream_seed, Propose&& propose) {
  if (K < 1) throw std::invalid_argument("refinement: K must be >= 1");
  if (k < 1) throw std::invalid_argument("refinement: k must be >= 1");
  Trajectory t{x0, c, InferenceMode::ScorerGuided, {}};
  t.steps.push_back({0, x0, predict(scorer, x0), {}, {}});
  for (std::size_t it = 1; it <= K; ++it) {
    Rng rng(derive_seed(stream_seed, "iteration", it));
    auto proposals = propose(t.steps.back().seq, rng);
    auto fs = predict_batch(scorer, proposals);
    const auto best = select_best(proposals, fs, c);
    TrajectoryStep step{it, proposals[best], fs[best], std::move(proposals), std::move(fs)};
    t.steps.push_back(std::move(step));
  }
  return t;
}

}  // namespace

Trajectory run_scorer_guided(const EditorModel& editor, const ScorerModel& scorer, const Sequence& x0, ControlTag c,
                             std::size_t K, std::size_t k, double temperature, std::uint64_t stream_seed) {
  return guided_loop(scorer, x0, c, K, k, stream_seed, [&](const Sequence& cur, Rng& rng) {
    std::vector<Sequence> out;
    for (auto& cand : sample_step(editor, cur, c, k, temperature, rng)) out.push_back(std::move(cand.seq));
    return out;
  });
}

std::vector<Sequence> baseline_sampling(const InfillModel& infill_model, const MaskSpec& spec, const RegionMask& mask,
                                        const Sequence& x0, Rng& rng, std::size_t n, double temperature) {
  if (n < 1) throw std::invalid_argument("baseline_sampling: n must be >= 1");
  std::vector<Sequence> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto positions = mask_positions(x0, spec, mask, rng);
    out.push_back(infill(infill_model, x0, positions, rng, temperature));
  }
  return out;
}

Trajectory baseline_iter_sampling(const InfillModel& infill_model, const MaskSpec& spec, const RegionMask& mask,
                                  const ScorerModel& scorer, const Sequence& x0, ControlTag c, std::size_t K,
                                  std::size_t k, std::uint64_t stream_seed, double temperature) {
  return guided_loop(scorer, x0, c, K, k, stream_seed, [&](const Sequence& cur, Rng& rng) {
    return baseline_sampling(infill_model, spec, mask, cur, rng, k, temperature);
  });
}

ScoreConditionedEditor::ScoreConditionedEditor(EditTables tables, double low, double high)
    : tables_(std::move(tables)), low_(low), high_(high) {
  if (tables_.n_conditions() < 2) throw std::invalid_argument("score-conditioned: n_bins must be >= 2");
  if (!(high_ > low_)) throw std::invalid_argument("score-conditioned: empty score range");
}

std::size_t ScoreConditionedEditor::bin_of(double z) const {
  if (!(z > low_)) return 0;
  if (z >= high_) return n_bins() - 1;
  const auto b = static_cast<std::size_t>(std::floor((z - low_) / bin_width()));
  return std::min(b, n_bins() - 1);
}

ScoreConditionedEditor fit_score_conditioned(std::span<const EditPair> pairs, std::size_t alphabet_size,
                                             std::size_t n_bins, double smoothing, std::size_t max_edits,
                                             const RegionMask& mask, Region region) {
  if (n_bins < 2) throw std::invalid_argument("fit_score_conditioned: n_bins must be >= 2");
  if (pairs.empty()) throw std::invalid_argument("fit_score_conditioned: no pairs");
  ScoreConditionedEditor model(
      EditTables(pairs.front().source.size(), alphabet_size, n_bins, max_edits, smoothing, mask), region.low,
      region.high);
  EditTables tables = model.tables();
  for (const auto& p : pairs) tables.observe(model.bin_of(p.target_score), p.source, p.target);
  tables.finalize();
  return ScoreConditionedEditor(std::move(tables), region.low, region.high);
}

Sequence score_conditioned_generate(const ScoreConditionedEditor& model, const Sequence& x0, double target,
                                    std::size_t beam_width) {
  try {
    auto beam = beam_step(model.tables(), model.bin_of(target), x0, beam_width);
    return beam.front().seq;
  } catch (const std::runtime_error&) {
    return x0;
  }
}

void write_score_conditioned(std::ostream& os, const ScoreConditionedEditor& model) {
  os << "ICE-SCORECOND 1\n";
  os << "low " << io::format_double(model.low()) << '\n';
  os << "high " << io::format_double(model.high()) << '\n';
  write_edit_tables(os, model.tables());
}

ScoreConditionedEditor read_score_conditioned(std::istream& is) {
  io::expect_header(is, "ICE-SCORECOND", 1);
  auto read_key = [&](std::string_view key) {
    std::string line;
    while (std::getline(is, line))
      if (!line.empty() && line[0] != '#') break;
    if (line.rfind(std::string(key) + " ", 0) != 0)
      throw std::runtime_error("score-conditioned file: expected key '" + std::string(key) + "'");
    return io::parse_double(std::string_view(line).substr(key.size() + 1));
  };
  const double low = read_key("low");
  const double high = read_key("high");
  return ScoreConditionedEditor(read_edit_tables(is), low, high);
}

namespace {
std::string fs_text(double v) { return std::isnan(v) ? "NA" : io::format_double(v); }
}  // namespace

void write_trajectories(std::ostream& os, std::span<const Trajectory> trajectories, const Alphabet& alphabet,
                        const Landscape* oracle) {
  for (std::size_t s = 0; s < trajectories.size(); ++s) {
    for (const auto& step : trajectories[s].steps) {
      os << s << '\t' << step.k << '\t' << format_sequence(step.seq, alphabet) << '\t' << fs_text(step.fs) << '\t'
         << (oracle ? io::format_double(oracle_score(*oracle, step.seq)) : std::string("NA")) << '\n';
    }
  }
}

void write_step_candidates(std::ostream& os, std::span<const Trajectory> trajectories, const Alphabet& alphabet) {
  for (std::size_t s = 0; s < trajectories.size(); ++s) {
    for (const auto& step : trajectories[s].steps) {
      for (std::size_t r = 0; r < step.candidates.size(); ++r) {
        os << s << '\t' << step.k << '\t' << r << '\t' << format_sequence(step.candidates[r], alphabet) << '\t'
           << fs_text(r < step.candidate_fs.size() ? step.candidate_fs[r] : kNaN) << '\n';
      }
    }
  }
}

std::vector<Trajectory> read_trajectories(std::istream& is, const Alphabet& alphabet, ControlTag tag,
                                          InferenceMode mode) {
  std::vector<Trajectory> out;
  for (const auto& line : io::read_data_lines(is)) {
    auto f = io::split_tabs(line);
    if (f.size() != 5) throw std::runtime_error("trajectory line needs 5 tab-separated fields: '" + line + "'");
    const auto id = io::parse_u64(f[0]);
    const auto k = io::parse_u64(f[1]);
    if (id == out.size()) {
      if (k != 0) throw std::runtime_error("trajectory " + std::to_string(id) + " does not start at k=0");
      out.push_back(Trajectory{parse_sequence(f[2], alphabet), tag, mode, {}});
    } else if (id + 1 != out.size()) {
      throw std::runtime_error("trajectory file: start ids out of order");
    }
    auto& t = out.back();
    if (k != t.steps.size()) throw std::runtime_error("trajectory file: iteration index out of order");
    t.steps.push_back({k, parse_sequence(f[2], alphabet), f[3] == "NA" ? kNaN : io::parse_double(f[3]), {}, {}});
  }
  return out;
}

void attach_step_candidates(std::istream& is, const Alphabet& alphabet, std::vector<Trajectory>& trajectories) {
  for (const auto& line : io::read_data_lines(is)) {
    auto f = io::split_tabs(line);
    if (f.size() != 5) throw std::runtime_error("step-candidate line needs 5 tab-separated fields: '" + line + "'");
    const auto id = io::parse_u64(f[0]);
    const auto k = io::parse_u64(f[1]);
    if (id >= trajectories.size() || k >= trajectories[id].steps.size())
      throw std::runtime_error("step-candidate row refers to a missing trajectory step");
    auto& step = trajectories[id].steps[k];
    if (io::parse_u64(f[2]) != step.candidates.size()) throw std::runtime_error("step-candidate ranks out of order");
    step.candidates.push_back(parse_sequence(f[3], alphabet));
    step.candidate_fs.push_back(f[4] == "NA" ? kNaN : io::parse_double(f[4]));
  }
}

}  // namespace ice
