#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ice/landscape.hpp"
#include "ice/pairgen.hpp"
#include "ice/refine.hpp"
#include "ice/scorer.hpp"

namespace ice {

enum class Direction { Above, Below };
enum class TargetRegion { Train, Extrapolation };

std::string_view direction_name(Direction d);
std::string_view target_region_name(TargetRegion r);
Direction parse_direction(std::string_view s);
TargetRegion parse_target_region(std::string_view s);

struct EvalTarget {
  std::string name;
  double value = 0.0;
  Direction direction = Direction::Above;
  TargetRegion region = TargetRegion::Extrapolation;
};

/// Strictly beyond: ties count as failure.
inline bool beyond(double z, const EvalTarget& t) { return t.direction == Direction::Above ? z > t.value : z < t.value; }

/// TRAIN targets must lie inside the region, EXTRAPOLATION targets outside it.
bool target_consistent(const EvalTarget& t, const Region& region);

std::vector<double> success_rates(std::span<const Sequence> candidates, const Landscape& landscape,
                                  std::span<const EvalTarget> targets);
std::vector<double> success_rates_from_scores(std::span<const double> oracle, std::span<const EvalTarget> targets);

/// Mean oracle score of the best k candidates in `direction`; ties in score
/// are ordered by sequence. Throws when some k exceeds the candidate count.
std::vector<double> topk_average(std::span<const Sequence> candidates, const Landscape& landscape,
                                 std::span<const std::size_t> ks, Direction direction = Direction::Above);

/// Per iteration k, counts of oracle(x_k) - oracle(x_0) by bin floor(delta / width).
/// With include_candidates, recorded step candidates are counted too.
struct IterationHistogram {
  double bin_width = 0.25;
  std::vector<std::map<long, std::size_t>> bins;  // [k][bin]
  std::vector<double> mean_delta;                 // chosen sequences only
  std::vector<std::size_t> mass;                  // total count per k
  long mode_bin(std::size_t k) const;
};

IterationHistogram iteration_histogram(std::span<const Trajectory> trajectories, const Landscape& landscape,
                                       double bin_width, bool include_candidates = false);

struct DiversityBucket {
  std::size_t distance = 0;
  std::size_t count = 0;
  double fraction = 0.0;
  double success = 0.0;
};

std::vector<DiversityBucket> diversity_profile(std::span<const Sequence> candidates, const Sequence& reference,
                                               const Landscape& landscape, const EvalTarget& threshold);

/// Mean scorer value of x_k over trajectories, k = 0..K.
std::vector<double> plateau_table(std::span<const Trajectory> trajectories, const ScorerModel& scorer);

struct MethodResult {
  std::string method;
  std::vector<Sequence> candidates;
  std::vector<Trajectory> trajectories;  // empty for one-shot methods
};

void write_success_csv(std::ostream& os, std::span<const MethodResult> methods, const Landscape& landscape,
                       std::span<const EvalTarget> targets);
void write_topk_csv(std::ostream& os, std::span<const MethodResult> methods, const Landscape& landscape,
                    std::span<const std::size_t> ks);
void write_histogram_csv(std::ostream& os, std::span<const MethodResult> methods, const Landscape& landscape,
                         double bin_width);
void write_diversity_csv(std::ostream& os, std::span<const MethodResult> methods, const Sequence& reference,
                         const Landscape& landscape, const EvalTarget& threshold);
void write_plateau_csv(std::ostream& os, std::span<const MethodResult> methods, const ScorerModel& scorer);
void write_pairs_audit_csv(std::ostream& os, const PairAudit& audit, double delta, double acceptance_rate);
void write_scorer_corr_csv(std::ostream& os, const CorrelationReport& report);

}  // namespace ice
