#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ice/landscape.hpp"
#include "ice/proposer.hpp"
#include "ice/scorer.hpp"

namespace ice {

enum class ControlTag : std::uint8_t { Inc = 0, Dec = 1 };

std::string_view tag_name(ControlTag tag);
ControlTag parse_tag(std::string_view s);

/// Directed training triple (tag, source -> target) with the scorer values
/// that produced the tag.
struct EditPair {
  ControlTag tag = ControlTag::Inc;
  Sequence source;
  Sequence target;
  double source_score = 0.0;
  double target_score = 0.0;
  /// Size of the mask draw that generated the pair; not persisted.
  std::size_t n_masked = 0;
};

/// INC when y scores higher, DEC when lower, nullopt (drop) on an exact tie.
std::optional<ControlTag> label(double x_score, double y_score);

struct PairSet {
  std::vector<EditPair> pairs;
  std::size_t attempts = 0;
  std::size_t accepted = 0;  // perturbations kept; each yields two pairs
  double acceptance_rate() const { return attempts ? static_cast<double>(accepted) / attempts : 0.0; }
};

class PairGenerationError : public std::runtime_error {
 public:
  PairGenerationError(const std::string& what, std::size_t attempts, double acceptance_rate)
      : std::runtime_error(what), attempts_(attempts), acceptance_rate_(acceptance_rate) {}
  std::size_t attempts() const { return attempts_; }
  double acceptance_rate() const { return acceptance_rate_; }

 private:
  std::size_t attempts_;
  double acceptance_rate_;
};

struct PairGenOptions {
  double delta = 1.5;
  std::size_t n_pairs = 100000;
  double infill_temperature = 1.0;
  std::size_t workers = 1;
};

/// Perturbs supervised examples by mask + infill and keeps those with
/// 0 < |f_s(x~) - f_s(x)| < delta, emitting both directed pairs per kept
/// perturbation. Attempt a draws from derive_seed(seed, "pairgen/attempt", a),
/// so the output does not depend on the worker count. Gives up with
/// PairGenerationError after 100 * n_pairs attempts.
PairSet make_pairs(const DatasetSplit& split, const InfillModel& infill_model, const MaskSpec& spec,
                   const RegionMask& mask, const ScorerModel& scorer, const PairGenOptions& options,
                   std::uint64_t seed);

struct PairAudit {
  std::size_t total = 0;
  std::size_t inc = 0;
  std::size_t dec = 0;
  std::size_t delta_violations = 0;
  std::size_t tag_violations = 0;
  std::size_t identical = 0;
  bool ok() const { return delta_violations == 0 && tag_violations == 0 && identical == 0 && inc == dec; }
};

PairAudit audit_pairs(std::span<const EditPair> pairs, double delta);

void write_pairs(std::ostream& os, std::span<const EditPair> pairs, const Alphabet& alphabet);
std::vector<EditPair> read_pairs(std::istream& is, const Alphabet& alphabet);

}  // namespace ice
