#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ice/evalrep.hpp"
#include "ice/landscape.hpp"
#include "ice/proposer.hpp"

namespace ice {

/// A target placed relative to campaign statistics once the corpus exists:
/// value = anchor + offset_std * corpus score std.
struct TargetSpec {
  std::string name;
  std::string anchor = "alpha_high";  // alpha_high | alpha_low | corpus_mean | absolute
  double offset_std = 0.0;            // for "absolute", the value itself
  Direction direction = Direction::Above;
  TargetRegion region = TargetRegion::Extrapolation;

  bool operator==(const TargetSpec&) const = default;
};

struct SweepGrid {
  std::vector<std::size_t> beam_widths{1, 5};
  std::vector<std::size_t> top_k{2, 5};
  std::vector<std::size_t> iterations{10};
  std::size_t n_starts = 500;

  bool operator==(const SweepGrid&) const = default;
};

struct CampaignConfig {
  static constexpr int kSchemaVersion = 1;

  std::uint64_t seed = 42;
  std::string alphabet = "ACDEFGHK";
  Landscape::Shape landscape{20, 8, 20, 1.0, 0.15};
  std::size_t immutable_start = 8;
  std::size_t immutable_count = 4;
  double region_low_percentile = 1.0;
  double region_high_percentile = 80.0;
  std::size_t m_unsup = 50000;
  std::size_t m_sup = 5000;
  std::size_t n_heldout = 1000;
  std::size_t n_starts = 2000;
  double ridge_lambda = 1.0;
  double infill_smoothing = 1.0;
  int infill_order = 1;
  double infill_temperature = 1.0;
  MaskSpec mask{MaskStrategy::Span, 6.0, 12, 0.8, 1};
  double delta = 1.5;
  std::size_t n_pairs = 100000;
  double editor_smoothing = 300.0;
  std::size_t max_edits = 0;  // 0: the largest mask the MaskSpec can draw
  std::size_t score_cond_bins = 10;
  std::size_t iterations = 10;
  std::size_t beam_width = 5;
  std::size_t top_k = 5;
  double temperature = 0.7;
  std::vector<TargetSpec> targets;
  std::string acceptance_target = "extrap_0.5";
  double histogram_bin_width = 0.25;
  std::vector<std::size_t> topk_report{1000, 100};
  SweepGrid sweep;
  std::string output_dir = "out";

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
  std::size_t effective_max_edits() const;
  RegionMask region_mask() const;

  bool operator==(const CampaignConfig&) const = default;
};

/// Defaults plus the standard target list.
CampaignConfig default_config();

std::string config_to_json(const CampaignConfig& config);
CampaignConfig config_from_json(const std::string& text);
CampaignConfig load_config(const std::filesystem::path& path);

/// FNV-1a of the canonical JSON with output_dir removed, as 16 hex digits.
std::string config_hash(const CampaignConfig& config);

}  // namespace ice
