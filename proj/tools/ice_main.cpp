// ice: command-line driver for the extrapolation campaign.

#include <CLI11.hpp>
#include <iostream>

#include "ice/campaign.hpp"
#include "ice/config.hpp"

namespace {

struct Globals {
  std::string config_path;
  std::string out_dir;
  std::size_t workers = 1;
};

ice::Campaign open_campaign(const Globals& g) {
  ice::CampaignConfig cfg = g.config_path.empty() ? ice::default_config() : ice::load_config(g.config_path);
  if (g.config_path.empty()) cfg.validate();
  const std::string out = g.out_dir.empty() ? cfg.output_dir : g.out_dir;
  return ice::Campaign(std::move(cfg), out, g.workers);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative controlled extrapolation on synthetic fitness landscapes"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Campaign config (JSON); defaults built in when omitted");
  app.add_option("--out", g.out_dir, "Output directory (overrides output_dir in the config)");
  app.add_option("--workers", g.workers, "Worker threads; never changes any output")->check(CLI::PositiveNumber);

  auto* gen_landscape = app.add_subcommand("gen-landscape", "Draw the oracle landscape");
  auto* gen_data = app.add_subcommand("gen-data", "Sample corpus, region and supervised split");
  auto* train_scorer = app.add_subcommand("train-scorer", "Fit the ridge scorer on the supervised split");
  auto* gen_pairs = app.add_subcommand("gen-pairs", "Fit the infill model and generate edit pairs");
  auto* train_editor = app.add_subcommand("train-editor", "Fit the local editor and the score-conditioned baseline");
  auto* infer = app.add_subcommand("infer", "Run one inference method over the start set");
  auto* evaluate = app.add_subcommand("evaluate", "Write all reports and summary.json");
  auto* sweep = app.add_subcommand("sweep", "Beam width x top-k x iterations grid");
  auto* run_all = app.add_subcommand("run-all", "Every stage, then evaluate");
  auto* print_config = app.add_subcommand("print-config", "Print the effective config as JSON");

  std::string mode = "scorer-guided", method = "ice";
  std::size_t k = 0, beam = 0, iters = 0;
  double temperature = 0.0;
  std::uint64_t seed = 0;
  auto* mode_opt = infer->add_option("--mode", mode, "scorer-free | scorer-guided")
                       ->check(CLI::IsMember({"scorer-free", "scorer-guided"}));
  infer->add_option("--method", method, "ice | sampling | iter-sampling | score-cond")
      ->check(CLI::IsMember({"ice", "sampling", "iter-sampling", "score-cond"}));
  auto* k_opt = infer->add_option("--k", k, "Proposals per scorer-guided step")->check(CLI::PositiveNumber);
  auto* beam_opt = infer->add_option("--beam", beam, "Beam width")->check(CLI::PositiveNumber);
  auto* iters_opt = infer->add_option("--iters", iters, "Refinement iterations")->check(CLI::PositiveNumber);
  auto* temp_opt = infer->add_option("--temperature", temperature, "Sampling temperature")->check(CLI::PositiveNumber);
  auto* seed_opt = infer->add_option("--seed", seed, "Master seed for the inference streams");
  (void)mode_opt;

  CLI11_PARSE(app, argc, argv);

  std::string stage = "config";
  try {
    auto campaign = open_campaign(g);
    if (print_config->parsed()) {
      std::cout << ice::config_to_json(campaign.config());
      return 0;
    }
    if (gen_landscape->parsed()) campaign.gen_landscape();
    if (gen_data->parsed()) campaign.gen_data();
    if (train_scorer->parsed()) campaign.train_scorer();
    if (gen_pairs->parsed()) campaign.gen_pairs();
    if (train_editor->parsed()) campaign.train_editor();
    if (infer->parsed()) {
      stage = "infer";
      ice::InferOptions o;
      if (*k_opt) o.top_k = k;
      if (*beam_opt) o.beam_width = beam;
      if (*iters_opt) o.iterations = iters;
      if (*temp_opt) o.temperature = temperature;
      if (*seed_opt) o.seed = seed;
      campaign.infer(ice::method_from_flags(method, mode), o);
    }
    if (evaluate->parsed()) campaign.evaluate();
    if (sweep->parsed()) campaign.sweep();
    if (run_all->parsed()) campaign.run_all();
  } catch (const ice::StageError& e) {
    std::cerr << "ice: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ice: stage " << stage << ": " << e.what() << '\n';
    return 2;
  }
  return 0;
}
