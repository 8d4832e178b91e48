#include "ice/config.hpp"

#include <json.hpp>
#include <set>
#include <stdexcept>

#include "ice/io.hpp"
#include "ice/rng.hpp"

namespace ice {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw std::invalid_argument("config: " + field + " " + what);
}

std::string_view strategy_name(MaskStrategy s) { return s == MaskStrategy::Span ? "span" : "iid"; }

MaskStrategy parse_strategy(const std::string& s) {
  if (s == "span") return MaskStrategy::Span;
  if (s == "iid") return MaskStrategy::Iid;
  throw std::invalid_argument("config: mask.strategy must be 'span' or 'iid'");
}

json to_json(const CampaignConfig& c) {
  json j;
  j["schema_version"] = CampaignConfig::kSchemaVersion;
  j["seed"] = c.seed;
  j["alphabet"] = c.alphabet;
  j["landscape"] = {{"length", c.landscape.length},
                    {"alphabet_size", c.landscape.alphabet_size},
                    {"n_pairs", c.landscape.n_pairs},
                    {"additive_scale", c.landscape.additive_scale},
                    {"epistatic_scale", c.landscape.epistatic_scale}};
  j["immutable"] = {{"start", c.immutable_start}, {"count", c.immutable_count}};
  j["region_percentiles"] = {c.region_low_percentile, c.region_high_percentile};
  j["corpus"] = {{"m_unsup", c.m_unsup}, {"m_sup", c.m_sup}, {"n_heldout", c.n_heldout}, {"n_starts", c.n_starts}};
  j["scorer"] = {{"ridge_lambda", c.ridge_lambda}};
  j["infill"] = {{"smoothing", c.infill_smoothing}, {"order", c.infill_order}, {"temperature", c.infill_temperature}};
  j["mask"] = {{"strategy", strategy_name(c.mask.strategy)},
               {"span_lambda", c.mask.span_lambda},
               {"span_max", c.mask.span_max},
               {"iid_rate", c.mask.iid_rate},
               {"n_spans", c.mask.n_spans}};
  j["pairs"] = {{"delta", c.delta}, {"count", c.n_pairs}};
  j["editor"] = {{"smoothing", c.editor_smoothing}, {"max_edits", c.max_edits}, {"score_cond_bins", c.score_cond_bins}};
  j["inference"] = {{"iterations", c.iterations},
                    {"beam_width", c.beam_width},
                    {"top_k", c.top_k},
                    {"temperature", c.temperature}};
  json targets = json::array();
  for (const auto& t : c.targets)
    targets.push_back({{"name", t.name},
                       {"anchor", t.anchor},
                       {"offset_std", t.offset_std},
                       {"direction", direction_name(t.direction)},
                       {"region", target_region_name(t.region)}});
  j["targets"] = targets;
  j["acceptance_target"] = c.acceptance_target;
  j["report"] = {{"histogram_bin_width", c.histogram_bin_width}, {"topk", c.topk_report}};
  j["sweep"] = {{"beam_widths", c.sweep.beam_widths},
                {"top_k", c.sweep.top_k},
                {"iterations", c.sweep.iterations},
                {"n_starts", c.sweep.n_starts}};
  j["output_dir"] = c.output_dir;
  return j;
}

void check_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw std::invalid_argument("config: unknown key '" + where + it.key() + "'");
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void CampaignConfig::validate() const {
  require(landscape.length >= 1, "landscape.length", "must be >= 1");
  require(landscape.alphabet_size >= 2, "landscape.alphabet_size", "must be >= 2");
  require(alphabet.size() == landscape.alphabet_size, "alphabet", "length must equal landscape.alphabet_size");
  Alphabet check(alphabet);
  require(landscape.additive_scale >= 0 && landscape.epistatic_scale >= 0, "landscape scales", "must be >= 0");
  require(immutable_start + immutable_count <= landscape.length, "immutable", "span exceeds the sequence");
  require(immutable_count < landscape.length, "immutable.count", "leaves no mutable position");
  require(region_low_percentile >= 0 && region_low_percentile < region_high_percentile &&
              region_high_percentile <= 100,
          "region_percentiles", "must satisfy 0 <= low < high <= 100");
  require(m_unsup > 0 && m_sup > 0 && n_heldout > 0 && n_starts > 0, "corpus sizes", "must be positive");
  require(ridge_lambda > 0, "scorer.ridge_lambda", "must be > 0");
  require(infill_smoothing > 0, "infill.smoothing", "must be > 0");
  require(infill_order == 0 || infill_order == 1, "infill.order", "must be 0 or 1");
  require(infill_temperature >= 0, "infill.temperature", "must be >= 0");
  mask.validate();
  require(delta > 0, "pairs.delta", "must be > 0");
  require(n_pairs > 0, "pairs.count", "must be positive");
  require(editor_smoothing > 0, "editor.smoothing", "must be > 0");
  require(score_cond_bins >= 2, "editor.score_cond_bins", "must be >= 2");
  require(iterations >= 1, "inference.iterations", "must be >= 1");
  require(beam_width >= 1, "inference.beam_width", "must be >= 1");
  require(top_k >= 1, "inference.top_k", "must be >= 1");
  require(temperature > 0, "inference.temperature", "must be > 0");
  require(!targets.empty(), "targets", "must be non-empty");
  bool found = false;
  std::set<std::string> names;
  for (const auto& t : targets) {
    require(!t.name.empty() && names.insert(t.name).second, "targets", "need unique non-empty names");
    require(t.anchor == "alpha_high" || t.anchor == "alpha_low" || t.anchor == "corpus_mean" || t.anchor == "absolute",
            "targets." + t.name + ".anchor", "must be alpha_high, alpha_low, corpus_mean or absolute");
    found = found || t.name == acceptance_target;
  }
  require(found, "acceptance_target", "must name one of the targets");
  require(histogram_bin_width > 0, "report.histogram_bin_width", "must be > 0");
  for (auto k : topk_report) require(k >= 1, "report.topk", "entries must be >= 1");
  require(!sweep.beam_widths.empty() && !sweep.top_k.empty() && !sweep.iterations.empty(), "sweep", "grid must be non-empty");
  for (auto v : sweep.beam_widths) require(v >= 1, "sweep.beam_widths", "entries must be >= 1");
  for (auto v : sweep.top_k) require(v >= 1, "sweep.top_k", "entries must be >= 1");
  for (auto v : sweep.iterations) require(v >= 1, "sweep.iterations", "entries must be >= 1");
  require(sweep.n_starts >= 1, "sweep.n_starts", "must be >= 1");
}

RegionMask CampaignConfig::region_mask() const {
  return RegionMask::with_immutable_span(landscape.length, immutable_start, immutable_count);
}

std::size_t CampaignConfig::effective_max_edits() const {
  return max_edits ? max_edits : mask.max_masked(region_mask());
}

CampaignConfig default_config() {
  CampaignConfig c;
  c.targets = {
      {"train_mean_0.5", "corpus_mean", 0.5, Direction::Above, TargetRegion::Train},
      {"extrap_0.5", "alpha_high", 0.5, Direction::Above, TargetRegion::Extrapolation},
      {"extrap_1.0", "alpha_high", 1.0, Direction::Above, TargetRegion::Extrapolation},
      {"extrap_1.5", "alpha_high", 1.5, Direction::Above, TargetRegion::Extrapolation},
  };
  return c;
}

std::string config_to_json(const CampaignConfig& config) { return to_json(config).dump(2) + "\n"; }

CampaignConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  check_keys(j, "", {"schema_version", "seed", "alphabet", "landscape", "immutable", "region_percentiles", "corpus",
                     "scorer", "infill", "mask", "pairs", "editor", "inference", "targets", "acceptance_target",
                     "report", "sweep", "output_dir"});
  if (!j.contains("schema_version") || j["schema_version"] != CampaignConfig::kSchemaVersion)
    throw std::invalid_argument("config: schema_version must be " + std::to_string(CampaignConfig::kSchemaVersion));
  CampaignConfig c = default_config();
  try {
    get(j, "seed", c.seed);
    get(j, "alphabet", c.alphabet);
    if (j.contains("landscape")) {
      const auto& l = j["landscape"];
      check_keys(l, "landscape.", {"length", "alphabet_size", "n_pairs", "additive_scale", "epistatic_scale"});
      get(l, "length", c.landscape.length);
      get(l, "alphabet_size", c.landscape.alphabet_size);
      get(l, "n_pairs", c.landscape.n_pairs);
      get(l, "additive_scale", c.landscape.additive_scale);
      get(l, "epistatic_scale", c.landscape.epistatic_scale);
    }
    if (j.contains("immutable")) {
      const auto& m = j["immutable"];
      check_keys(m, "immutable.", {"start", "count"});
      get(m, "start", c.immutable_start);
      get(m, "count", c.immutable_count);
    }
    if (j.contains("region_percentiles")) {
      const auto p = j["region_percentiles"].get<std::vector<double>>();
      if (p.size() != 2) throw std::invalid_argument("config: region_percentiles needs two entries");
      c.region_low_percentile = p[0];
      c.region_high_percentile = p[1];
    }
    if (j.contains("corpus")) {
      const auto& m = j["corpus"];
      check_keys(m, "corpus.", {"m_unsup", "m_sup", "n_heldout", "n_starts"});
      get(m, "m_unsup", c.m_unsup);
      get(m, "m_sup", c.m_sup);
      get(m, "n_heldout", c.n_heldout);
      get(m, "n_starts", c.n_starts);
    }
    if (j.contains("scorer")) {
      check_keys(j["scorer"], "scorer.", {"ridge_lambda"});
      get(j["scorer"], "ridge_lambda", c.ridge_lambda);
    }
    if (j.contains("infill")) {
      const auto& m = j["infill"];
      check_keys(m, "infill.", {"smoothing", "order", "temperature"});
      get(m, "smoothing", c.infill_smoothing);
      get(m, "order", c.infill_order);
      get(m, "temperature", c.infill_temperature);
    }
    if (j.contains("mask")) {
      const auto& m = j["mask"];
      check_keys(m, "mask.", {"strategy", "preset", "span_lambda", "span_max", "iid_rate", "n_spans"});
      if (m.contains("preset")) {
        auto p = mask_preset(m["preset"].get<std::string>());
        if (!p) throw std::invalid_argument("config: unknown mask preset");
        c.mask = *p;
      }
      if (m.contains("strategy")) c.mask.strategy = parse_strategy(m["strategy"].get<std::string>());
      get(m, "span_lambda", c.mask.span_lambda);
      get(m, "span_max", c.mask.span_max);
      get(m, "iid_rate", c.mask.iid_rate);
      get(m, "n_spans", c.mask.n_spans);
    }
    if (j.contains("pairs")) {
      check_keys(j["pairs"], "pairs.", {"delta", "count"});
      get(j["pairs"], "delta", c.delta);
      get(j["pairs"], "count", c.n_pairs);
    }
    if (j.contains("editor")) {
      const auto& m = j["editor"];
      check_keys(m, "editor.", {"smoothing", "max_edits", "score_cond_bins"});
      get(m, "smoothing", c.editor_smoothing);
      get(m, "max_edits", c.max_edits);
      get(m, "score_cond_bins", c.score_cond_bins);
    }
    if (j.contains("inference")) {
      const auto& m = j["inference"];
      check_keys(m, "inference.", {"iterations", "beam_width", "top_k", "temperature"});
      get(m, "iterations", c.iterations);
      get(m, "beam_width", c.beam_width);
      get(m, "top_k", c.top_k);
      get(m, "temperature", c.temperature);
    }
    if (j.contains("targets")) {
      c.targets.clear();
      for (const auto& t : j["targets"]) {
        check_keys(t, "targets[].", {"name", "anchor", "offset_std", "direction", "region"});
        TargetSpec s;
        get(t, "name", s.name);
        get(t, "anchor", s.anchor);
        get(t, "offset_std", s.offset_std);
        if (t.contains("direction")) s.direction = parse_direction(t["direction"].get<std::string>());
        if (t.contains("region")) s.region = parse_target_region(t["region"].get<std::string>());
        c.targets.push_back(std::move(s));
      }
    }
    get(j, "acceptance_target", c.acceptance_target);
    if (j.contains("report")) {
      check_keys(j["report"], "report.", {"histogram_bin_width", "topk"});
      get(j["report"], "histogram_bin_width", c.histogram_bin_width);
      get(j["report"], "topk", c.topk_report);
    }
    if (j.contains("sweep")) {
      const auto& m = j["sweep"];
      check_keys(m, "sweep.", {"beam_widths", "top_k", "iterations", "n_starts"});
      get(m, "beam_widths", c.sweep.beam_widths);
      get(m, "top_k", c.sweep.top_k);
      get(m, "iterations", c.sweep.iterations);
      get(m, "n_starts", c.sweep.n_starts);
    }
    get(j, "output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

CampaignConfig load_config(const std::filesystem::path& path) { return config_from_json(io::read_file(path)); }

std::string config_hash(const CampaignConfig& config) {
  auto j = to_json(config);
  j.erase("output_dir");
  return io::hex64(fnv1a64(j.dump()));
}

}  // namespace ice
