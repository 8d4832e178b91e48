#include "ice/campaign.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "ice/editor.hpp"
#include "ice/io.hpp"
#include "ice/pairgen.hpp"
#include "ice/parallel.hpp"
#include "ice/refine.hpp"

namespace ice {

namespace fs = std::filesystem;
using nlohmann::json;

const EvalTarget& CampaignMeta::target(const std::string& name) const {
  for (const auto& t : targets)
    if (t.name == name) return t;
  throw std::invalid_argument("unknown target '" + name + "'");
}

std::vector<EvalTarget> resolve_targets(const CampaignConfig& config, const Region& region, double corpus_mean,
                                        double corpus_std) {
  std::vector<EvalTarget> out;
  for (const auto& s : config.targets) {
    double anchor = 0.0, scale = corpus_std;
    if (s.anchor == "alpha_high") anchor = region.high;
    else if (s.anchor == "alpha_low") anchor = region.low;
    else if (s.anchor == "corpus_mean") anchor = corpus_mean;
    else scale = 1.0;
    EvalTarget t{s.name, anchor + s.offset_std * scale, s.direction, s.region};
    if (!target_consistent(t, region))
      throw std::invalid_argument("target " + t.name + " at " + io::format_double(t.value) + " is not " +
                                  std::string(target_region_name(t.region) == "TRAIN" ? "inside" : "outside") +
                                  " the training region");
    out.push_back(std::move(t));
  }
  return out;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::IceScorerFree: return "ice-sf";
    case Method::IceScorerGuided: return "ice-sg";
    case Method::Sampling: return "sampling";
    case Method::IterSampling: return "iter-sampling";
    case Method::ScoreConditioned: return "score-cond";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (auto m : all_methods())
    if (method_name(m) == name) return m;
  throw std::invalid_argument("unknown method '" + name + "'");
}

Method method_from_flags(const std::string& method, const std::string& mode) {
  if (method == "ice") {
    if (mode == "scorer-free") return Method::IceScorerFree;
    if (mode == "scorer-guided") return Method::IceScorerGuided;
    throw std::invalid_argument("--mode must be scorer-free or scorer-guided");
  }
  if (method == "sampling") return Method::Sampling;
  if (method == "iter-sampling") return Method::IterSampling;
  if (method == "score-cond") return Method::ScoreConditioned;
  return parse_method(method);
}

std::vector<Method> all_methods() {
  return {Method::IceScorerFree, Method::IceScorerGuided, Method::Sampling, Method::IterSampling,
          Method::ScoreConditioned};
}

fs::path method_dir(Method m) { return fs::path("infer") / method_name(m); }

namespace {

bool iterative(Method m) { return m != Method::Sampling && m != Method::ScoreConditioned; }

std::string sequences_text(std::span<const Sequence> seqs, const Alphabet& a) {
  std::ostringstream os;
  io::write_sequences(os, seqs, a);
  return os.str();
}

template <class Fn>
void stage(const char* name, Fn&& fn) {
  try {
    fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

Campaign::Campaign(CampaignConfig config, fs::path out_dir, std::size_t workers)
    : config_(std::move(config)),
      out_(std::move(out_dir)),
      workers_(std::max<std::size_t>(1, workers)),
      hash_(config_hash(config_)),
      alphabet_(config_.alphabet) {
  config_.validate();
}

void Campaign::write_artifact(const std::string& rel, const std::string& content) const {
  const auto p = path(rel);
  fs::create_directories(p.parent_path());
  io::write_file(p, "# config_hash=" + hash_ + "\n" + content);
}

std::string Campaign::read_artifact(const std::string& rel) const {
  const auto p = path(rel);
  if (!fs::exists(p)) throw std::runtime_error("missing artifact " + p.string() + " (run the earlier stage first)");
  const auto h = io::read_config_hash(p);
  if (h != hash_)
    throw std::runtime_error("artifact " + rel + " has config hash '" + h + "', expected '" + hash_ +
                             "'; refusing to mix campaigns");
  return io::read_file(p);
}

void Campaign::gen_landscape() {
  stage("gen-landscape", [&] {
    const auto landscape = make_landscape(config_.landscape, derive_seed(config_.seed, "landscape", 0));
    std::ostringstream os;
    io::write_landscape(os, landscape);
    write_artifact(paths::landscape, os.str());
  });
}

void Campaign::gen_data() {
  stage("gen-data", [&] {
    std::istringstream ls(read_artifact(paths::landscape));
    const auto landscape = io::read_landscape(ls);
    const auto mask = config_.region_mask();
    const std::size_t L = config_.landscape.length, A = config_.landscape.alphabet_size;

    Rng ref_rng(derive_seed(config_.seed, "reference", 0));
    Sequence reference(L, 0);
    for (std::size_t i = 0; i < L; ++i) reference[i] = static_cast<Token>(ref_rng.uniform_index(A));

    const auto corpus = sample_corpus(landscape, config_.m_unsup, derive_seed(config_.seed, "corpus", 0), mask, reference);
    const auto scores = oracle_scores(landscape, corpus);
    Region region{percentile(scores, config_.region_low_percentile), percentile(scores, config_.region_high_percentile)};
    const double mean = mean_of(scores), sd = std_of(scores, mean);
    const auto targets = resolve_targets(config_, region, mean, sd);

    const auto split = build_supervised_split(corpus, scores, region, config_.m_sup);
    // Held-out and start sets: the next in-region corpus members after the supervised ones.
    std::vector<LabeledExample> heldout;
    std::vector<Sequence> starts;
    for (std::size_t j = split.sup_indices.back() + 1; j < corpus.size(); ++j) {
      if (!region.contains(scores[j])) continue;
      if (heldout.size() < config_.n_heldout) heldout.push_back({corpus[j], scores[j]});
      else if (starts.size() < config_.n_starts) starts.push_back(corpus[j]);
      else break;
    }
    if (starts.size() < config_.n_starts)
      throw std::runtime_error("corpus has too few in-region sequences for " + std::to_string(config_.n_heldout) +
                               " held-out and " + std::to_string(config_.n_starts) + " start sequences");

    write_artifact(paths::corpus, sequences_text(corpus, alphabet_));
    std::ostringstream sup, held;
    io::write_labeled(sup, split.sup_train, alphabet_);
    io::write_labeled(held, heldout, alphabet_);
    write_artifact(paths::sup_train, sup.str());
    write_artifact(paths::heldout, held.str());
    write_artifact(paths::starts, sequences_text(starts, alphabet_));

    json j;
    j["reference"] = format_sequence(reference, alphabet_);
    j["region"] = {{"low", region.low}, {"high", region.high}};
    j["corpus_mean"] = mean;
    j["corpus_std"] = sd;
    json tj = json::array();
    for (const auto& t : targets)
      tj.push_back({{"name", t.name},
                    {"value", t.value},
                    {"direction", direction_name(t.direction)},
                    {"region", target_region_name(t.region)}});
    j["targets"] = tj;
    write_artifact(paths::meta, j.dump(2) + "\n");
  });
}

CampaignMeta Campaign::load_meta() const {
  auto text = read_artifact(paths::meta);
  text.erase(0, text.find('\n') + 1);
  const auto j = json::parse(text);
  CampaignMeta m;
  m.reference = parse_sequence(j.at("reference").get<std::string>(), alphabet_);
  m.region = {j.at("region").at("low").get<double>(), j.at("region").at("high").get<double>()};
  m.corpus_mean = j.at("corpus_mean").get<double>();
  m.corpus_std = j.at("corpus_std").get<double>();
  for (const auto& t : j.at("targets"))
    m.targets.push_back({t.at("name").get<std::string>(), t.at("value").get<double>(),
                         parse_direction(t.at("direction").get<std::string>()),
                         parse_target_region(t.at("region").get<std::string>())});
  return m;
}

void Campaign::train_scorer() {
  stage("train-scorer", [&] {
    std::istringstream sup_in(read_artifact(paths::sup_train)), held_in(read_artifact(paths::heldout));
    const auto sup = io::read_labeled(sup_in, alphabet_);
    const auto held = io::read_labeled(held_in, alphabet_);
    const auto model = fit_ridge(sup, config_.ridge_lambda, config_.landscape.length, config_.landscape.alphabet_size);
    std::ostringstream os;
    write_scorer(os, model);
    write_artifact(paths::scorer, os.str());

    DatasetSplit split;
    split.sup_train = sup;
    std::ostringstream corr;
    write_scorer_corr_csv(corr, correlation_report(model, split, held));
    write_artifact("reports/scorer_corr.csv", corr.str());
  });
}

void Campaign::gen_pairs() {
  stage("gen-pairs", [&] {
    std::istringstream corpus_in(read_artifact(paths::corpus)), sup_in(read_artifact(paths::sup_train)),
        scorer_in(read_artifact(paths::scorer));
    const auto corpus = io::read_sequences(corpus_in, alphabet_);
    DatasetSplit split;
    split.sup_train = io::read_labeled(sup_in, alphabet_);
    const auto scorer = read_scorer(scorer_in);

    const auto infill_model =
        fit_infill(corpus, config_.infill_smoothing, config_.landscape.alphabet_size, config_.infill_order);
    std::ostringstream im;
    write_infill(im, infill_model);
    write_artifact(paths::infill, im.str());

    PairGenOptions opt;
    opt.delta = config_.delta;
    opt.n_pairs = config_.n_pairs;
    opt.infill_temperature = config_.infill_temperature;
    opt.workers = workers_;
    const auto set = make_pairs(split, infill_model, config_.mask, config_.region_mask(), scorer, opt,
                                derive_seed(config_.seed, "pairgen", 0));
    std::ostringstream ps;
    write_pairs(ps, set.pairs, alphabet_);
    write_artifact(paths::pairs, ps.str());

    std::ostringstream audit;
    write_pairs_audit_csv(audit, audit_pairs(set.pairs, config_.delta), config_.delta, set.acceptance_rate());
    write_artifact("reports/pairs_audit.csv", audit.str());
  });
}

void Campaign::train_editor() {
  stage("train-editor", [&] {
    std::istringstream pairs_in(read_artifact(paths::pairs));
    const auto pairs = read_pairs(pairs_in, alphabet_);
    const auto meta = load_meta();
    const auto mask = config_.region_mask();
    const auto A = config_.landscape.alphabet_size;
    const auto editor = fit_editor(pairs, A, config_.editor_smoothing, config_.effective_max_edits(), mask);
    std::ostringstream es;
    write_editor(es, editor);
    write_artifact(paths::editor, es.str());

    const auto sc = fit_score_conditioned(pairs, A, config_.score_cond_bins, config_.editor_smoothing,
                                          config_.effective_max_edits(), mask, meta.region);
    std::ostringstream ss;
    write_score_conditioned(ss, sc);
    write_artifact(paths::score_cond, ss.str());
  });
}

void Campaign::infer(Method method, const InferOptions& o) {
  stage("infer", [&] {
    std::istringstream starts_in(read_artifact(paths::starts)), scorer_in(read_artifact(paths::scorer));
    auto starts = io::read_sequences(starts_in, alphabet_);
    if (o.n_starts) starts.resize(std::min(starts.size(), *o.n_starts));
    const auto scorer = read_scorer(scorer_in);
    const auto meta = load_meta();
    const std::size_t K = o.iterations.value_or(config_.iterations);
    const std::size_t beam = o.beam_width.value_or(config_.beam_width);
    const std::size_t k = o.top_k.value_or(config_.top_k);
    const double T = o.temperature.value_or(config_.temperature);
    const std::uint64_t master = o.seed.value_or(config_.seed);
    const auto mask = config_.region_mask();
    const std::string label = "infer/" + method_name(method);
    const ControlTag tag = ControlTag::Inc;

    std::optional<EditorModel> editor;
    std::optional<InfillModel> infill_model;
    std::optional<ScoreConditionedEditor> sc;
    if (method == Method::IceScorerFree || method == Method::IceScorerGuided) {
      std::istringstream in(read_artifact(paths::editor));
      editor.emplace(read_editor(in));
    } else if (method == Method::ScoreConditioned) {
      std::istringstream in(read_artifact(paths::score_cond));
      sc.emplace(read_score_conditioned(in));
    } else {
      std::istringstream in(read_artifact(paths::infill));
      infill_model.emplace(read_infill(in));
    }
    const double sc_target = meta.target(config_.acceptance_target).value;

    std::vector<Trajectory> trajs(iterative(method) ? starts.size() : 0);
    std::vector<Sequence> finals(starts.size());
    parallel_for(starts.size(), workers_, [&](std::size_t s) {
      const auto seed = derive_seed(master, label, s);
      switch (method) {
        case Method::IceScorerFree:
          trajs[s] = run_scorer_free(*editor, starts[s], tag, K, beam);
          annotate_scores(trajs[s], scorer);
          break;
        case Method::IceScorerGuided:
          trajs[s] = run_scorer_guided(*editor, scorer, starts[s], tag, K, k, T, seed);
          break;
        case Method::IterSampling:
          trajs[s] = baseline_iter_sampling(*infill_model, config_.mask, mask, scorer, starts[s], tag, K, k, seed,
                                            config_.infill_temperature);
          break;
        case Method::Sampling: {
          Rng rng(seed);
          finals[s] = baseline_sampling(*infill_model, config_.mask, mask, starts[s], rng, 1,
                                        config_.infill_temperature)
                          .front();
          break;
        }
        case Method::ScoreConditioned:
          finals[s] = score_conditioned_generate(*sc, starts[s], sc_target, beam);
          break;
      }
      if (iterative(method)) finals[s] = trajs[s].final_sequence();
    });

    const auto dir = method_dir(method).string();
    write_artifact(dir + "/candidates.txt", sequences_text(finals, alphabet_));
    if (iterative(method)) {
      std::ostringstream t, c;
      write_trajectories(t, trajs, alphabet_);
      write_step_candidates(c, trajs, alphabet_);
      write_artifact(dir + "/trajectories.tsv", t.str());
      write_artifact(dir + "/step_candidates.tsv", c.str());
    }
  });
}

std::vector<Sequence> Campaign::load_candidates(Method method) const {
  std::istringstream in(read_artifact((method_dir(method) / "candidates.txt").string()));
  return io::read_sequences(in, alphabet_);
}

std::vector<Trajectory> Campaign::load_trajectories(Method method) const {
  if (!iterative(method)) return {};
  const auto dir = method_dir(method);
  std::istringstream t(read_artifact((dir / "trajectories.tsv").string()));
  const auto mode = method == Method::IceScorerFree ? InferenceMode::ScorerFree : InferenceMode::ScorerGuided;
  auto trajs = read_trajectories(t, alphabet_, ControlTag::Inc, mode);
  std::istringstream c(read_artifact((dir / "step_candidates.tsv").string()));
  attach_step_candidates(c, alphabet_, trajs);
  return trajs;
}

void Campaign::evaluate() {
  stage("evaluate", [&] {
    std::istringstream ls(read_artifact(paths::landscape)), scorer_in(read_artifact(paths::scorer)),
        starts_in(read_artifact(paths::starts)), editor_in(read_artifact(paths::editor));
    const auto landscape = io::read_landscape(ls);
    const auto scorer = read_scorer(scorer_in);
    const auto starts = io::read_sequences(starts_in, alphabet_);
    const auto editor = read_editor(editor_in);
    const auto meta = load_meta();
    const auto mask = config_.region_mask();

    std::vector<MethodResult> results;
    for (auto m : all_methods()) {
      if (!fs::exists(path((method_dir(m) / "candidates.txt").string()))) continue;
      results.push_back({method_name(m), load_candidates(m), load_trajectories(m)});
    }
    if (results.empty()) throw std::runtime_error("no inference outputs found; run infer first");

    std::ostringstream success, topk, hist, div, plateau, delta, immut, direction;
    write_success_csv(success, results, landscape, meta.targets);
    write_topk_csv(topk, results, landscape, config_.topk_report);
    write_histogram_csv(hist, results, landscape, config_.histogram_bin_width);
    write_diversity_csv(div, results, meta.reference, landscape, meta.target(config_.acceptance_target));
    write_plateau_csv(plateau, results, scorer);

    delta << "method,k,mean_oracle_delta,mean_fs\n";
    for (const auto& r : results) {
      if (r.trajectories.empty()) continue;
      const auto h = iteration_histogram(r.trajectories, landscape, config_.histogram_bin_width);
      const auto fsm = plateau_table(r.trajectories, scorer);
      for (std::size_t k = 0; k < h.mean_delta.size(); ++k)
        delta << r.method << ',' << k << ',' << io::format_double(h.mean_delta[k]) << ','
              << io::format_double(fsm[k]) << '\n';
    }

    // Every generated sequence, including unselected proposals, against its start.
    immut << "method,checked,violations\n";
    for (const auto& r : results) {
      std::size_t checked = 0, bad = 0;
      for (std::size_t s = 0; s < r.candidates.size(); ++s) {
        ++checked;
        bad += !preserves_immutable(r.candidates[s], starts.at(s), mask);
      }
      for (const auto& t : r.trajectories) {
        for (const auto& step : t.steps) {
          ++checked;
          bad += !preserves_immutable(step.seq, t.start, mask);
          for (const auto& c : step.candidates) {
            ++checked;
            bad += !preserves_immutable(c, t.start, mask);
          }
        }
      }
      immut << r.method << ',' << checked << ',' << bad << '\n';
    }

    // Beam top-1 oracle change per tag over the first 200 starts.
    direction << "tag,n,mean_oracle_change\n";
    const std::size_t n_dir = std::min<std::size_t>(200, starts.size());
    for (auto tag : {ControlTag::Inc, ControlTag::Dec}) {
      double sum = 0.0;
      for (std::size_t s = 0; s < n_dir; ++s) {
        const auto top = beam_step(editor, starts[s], tag, 1).front().seq;
        sum += oracle_score(landscape, top) - oracle_score(landscape, starts[s]);
      }
      direction << tag_name(tag) << ',' << n_dir << ',' << io::format_double(sum / static_cast<double>(n_dir)) << '\n';
    }

    write_artifact("reports/success_rates.csv", success.str());
    write_artifact("reports/topk.csv", topk.str());
    write_artifact("reports/iteration_hist.csv", hist.str());
    write_artifact("reports/diversity.csv", div.str());
    write_artifact("reports/plateau.csv", plateau.str());
    write_artifact("reports/mean_delta.csv", delta.str());
    write_artifact("reports/immutable_audit.csv", immut.str());
    write_artifact("reports/editor_direction.csv", direction.str());

    for (const auto& r : results) {
      if (r.trajectories.empty()) continue;
      std::ostringstream t;
      write_trajectories(t, r.trajectories, alphabet_, &landscape);
      write_artifact("reports/trajectories_" + r.method + ".tsv", t.str());
    }

    // Summary: every artifact with its content hash, in path order.
    std::vector<std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(out_)) {
      if (!e.is_regular_file()) continue;
      auto rel = fs::relative(e.path(), out_).generic_string();
      if (rel != paths::summary && rel != "config.json") files.push_back(rel);
    }
    std::sort(files.begin(), files.end());
    json summary;
    summary["schema_version"] = CampaignConfig::kSchemaVersion;
    summary["config_hash"] = hash_;
    json methods = json::array();
    for (const auto& r : results) methods.push_back(r.method);
    summary["methods"] = methods;
    json arts = json::array();
    std::string all;
    for (const auto& f : files) {
      const auto h = io::hex64(fnv1a64(io::read_file(out_ / f)));
      arts.push_back({{"path", f}, {"fnv1a64", h}});
      all += f + '\t' + h + '\n';
    }
    summary["artifacts"] = arts;
    summary["summary_hash"] = io::hex64(fnv1a64(all));
    io::write_file(path(paths::summary), summary.dump(2) + "\n");
  });
}

void Campaign::sweep() {
  stage("sweep", [&] {
    const auto& g = config_.sweep;
    std::istringstream ls(read_artifact(paths::landscape)), starts_in(read_artifact(paths::starts)),
        scorer_in(read_artifact(paths::scorer)), editor_in(read_artifact(paths::editor));
    const auto landscape = io::read_landscape(ls);
    auto starts = io::read_sequences(starts_in, alphabet_);
    starts.resize(std::min(starts.size(), g.n_starts));
    const auto scorer = read_scorer(scorer_in);
    const auto editor = read_editor(editor_in);
    const auto meta = load_meta();
    const auto target = meta.target(config_.acceptance_target);
    const std::array<EvalTarget, 1> targets{target};

    std::ostringstream os;
    os << "beam_width,top_k,iterations,n_starts,target,ice_sf_success,ice_sg_success\n";
    for (auto beam : g.beam_widths) {
      for (auto k : g.top_k) {
        for (auto K : g.iterations) {
          std::vector<Sequence> sf(starts.size()), sg(starts.size());
          parallel_for(starts.size(), workers_, [&](std::size_t s) {
            sf[s] = run_scorer_free(editor, starts[s], ControlTag::Inc, K, beam).final_sequence();
            sg[s] = run_scorer_guided(editor, scorer, starts[s], ControlTag::Inc, K, k, config_.temperature,
                                      derive_seed(config_.seed, "infer/ice-sg", s))
                        .final_sequence();
          });
          os << beam << ',' << k << ',' << K << ',' << starts.size() << ',' << target.name << ','
             << io::format_double(success_rates(sf, landscape, targets)[0]) << ','
             << io::format_double(success_rates(sg, landscape, targets)[0]) << '\n';
        }
      }
    }
    write_artifact("reports/sweep.csv", os.str());
  });
}

void Campaign::run_all() {
  fs::create_directories(out_);
  io::write_file(path("config.json"), config_to_json(config_));
  gen_landscape();
  gen_data();
  train_scorer();
  gen_pairs();
  train_editor();
  for (auto m : all_methods()) infer(m);
  evaluate();
}

}  // namespace ice
