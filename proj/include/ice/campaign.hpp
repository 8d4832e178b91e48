#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ice/config.hpp"
#include "ice/evalrep.hpp"

namespace ice {

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("stage " + stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Campaign-level statistics persisted by gen-data.
struct CampaignMeta {
  Sequence reference;
  Region region;
  double corpus_mean = 0.0;
  double corpus_std = 0.0;
  std::vector<EvalTarget> targets;  // resolved values
  const EvalTarget& target(const std::string& name) const;
};

std::vector<EvalTarget> resolve_targets(const CampaignConfig& config, const Region& region, double corpus_mean,
                                        double corpus_std);

enum class Method { IceScorerFree, IceScorerGuided, Sampling, IterSampling, ScoreConditioned };

std::string method_name(Method m);
Method parse_method(const std::string& name);
/// CLI form: --method ice|sampling|iter-sampling|score-cond plus --mode for ice.
Method method_from_flags(const std::string& method, const std::string& mode);
std::vector<Method> all_methods();

struct InferOptions {
  std::optional<std::size_t> iterations, beam_width, top_k;
  std::optional<double> temperature;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_starts;
};

/// Paths of every persisted artifact, relative to the output directory.
namespace paths {
inline const char* landscape = "landscape.txt";
inline const char* corpus = "data/corpus.txt";
inline const char* sup_train = "data/sup_train.tsv";
inline const char* heldout = "data/heldout.tsv";
inline const char* starts = "data/starts.txt";
inline const char* meta = "data/meta.json";
inline const char* pairs = "data/pairs.tsv";
inline const char* scorer = "models/scorer.txt";
inline const char* infill = "models/infill.txt";
inline const char* editor = "models/editor.txt";
inline const char* score_cond = "models/score_cond.txt";
inline const char* summary = "summary.json";
}  // namespace paths

class Campaign {
 public:
  Campaign(CampaignConfig config, std::filesystem::path out_dir, std::size_t workers = 1);

  const CampaignConfig& config() const { return config_; }
  const std::filesystem::path& out_dir() const { return out_; }
  const std::string& hash() const { return hash_; }

  void gen_landscape();
  void gen_data();
  void train_scorer();
  void gen_pairs();
  void train_editor();
  void infer(Method method, const InferOptions& options = {});
  void evaluate();
  void sweep();
  /// Every stage in order, then evaluate. Stage failures surface as StageError.
  void run_all();

  CampaignMeta load_meta() const;
  /// Final candidates of a method, one per start.
  std::vector<Sequence> load_candidates(Method method) const;
  std::vector<Trajectory> load_trajectories(Method method) const;

 private:
  std::filesystem::path path(const std::string& rel) const { return out_ / rel; }
  /// Writes content preceded by the config-hash line.
  void write_artifact(const std::string& rel, const std::string& content) const;
  /// Opens an artifact after checking that it carries this campaign's hash.
  std::string read_artifact(const std::string& rel) const;

  CampaignConfig config_;
  std::filesystem::path out_;
  std::size_t workers_;
  std::string hash_;
  Alphabet alphabet_;
};

std::filesystem::path method_dir(Method m);

}  // namespace ice
