#include "ice/evalrep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "ice/io.hpp"

namespace ice {

std::string_view direction_name(Direction d) { return d == Direction::Above ? "ABOVE" : "BELOW"; }
std::string_view target_region_name(TargetRegion r) { return r == TargetRegion::Train ? "TRAIN" : "EXTRAPOLATION"; }

Direction parse_direction(std::string_view s) {
  if (s == "ABOVE" || s == "above") return Direction::Above;
  if (s == "BELOW" || s == "below") return Direction::Below;
  throw std::invalid_argument("unknown direction '" + std::string(s) + "'");
}

TargetRegion parse_target_region(std::string_view s) {
  if (s == "TRAIN" || s == "train") return TargetRegion::Train;
  if (s == "EXTRAPOLATION" || s == "extrapolation") return TargetRegion::Extrapolation;
  throw std::invalid_argument("unknown target region '" + std::string(s) + "'");
}

bool target_consistent(const EvalTarget& t, const Region& region) {
  return (t.region == TargetRegion::Train) == region.contains(t.value);
}

std::vector<double> success_rates_from_scores(std::span<const double> oracle, std::span<const EvalTarget> targets) {
  if (oracle.empty()) throw std::invalid_argument("success_rates: no candidates");
  std::vector<double> out;
  for (const auto& t : targets) {
    std::size_t hits = 0;
    for (double z : oracle) hits += beyond(z, t);
    out.push_back(static_cast<double>(hits) / static_cast<double>(oracle.size()));
  }
  return out;
}

std::vector<double> success_rates(std::span<const Sequence> candidates, const Landscape& landscape,
                                  std::span<const EvalTarget> targets) {
  if (candidates.empty()) throw std::invalid_argument("success_rates: no candidates");
  return success_rates_from_scores(oracle_scores(landscape, candidates), targets);
}

std::vector<double> topk_average(std::span<const Sequence> candidates, const Landscape& landscape,
                                 std::span<const std::size_t> ks, Direction direction) {
  const auto z = oracle_scores(landscape, candidates);
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (z[a] != z[b]) return direction == Direction::Above ? z[a] > z[b] : z[a] < z[b];
    return candidates[a] < candidates[b];
  });
  std::vector<double> out;
  for (auto k : ks) {
    if (k < 1 || k > candidates.size())
      throw std::invalid_argument("topk_average: k=" + std::to_string(k) + " outside [1, " +
                                  std::to_string(candidates.size()) + "]");
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += z[order[j]];
    out.push_back(s / static_cast<double>(k));
  }
  return out;
}

long IterationHistogram::mode_bin(std::size_t k) const {
  const auto& h = bins.at(k);
  if (h.empty()) throw std::invalid_argument("mode_bin: empty histogram");
  auto best = h.begin();
  for (auto it = h.begin(); it != h.end(); ++it)
    if (it->second > best->second) best = it;  // lowest bin wins ties
  return best->first;
}

IterationHistogram iteration_histogram(std::span<const Trajectory> trajectories, const Landscape& landscape,
                                       double bin_width, bool include_candidates) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("iteration_histogram: bin_width must be > 0");
  if (trajectories.empty()) throw std::invalid_argument("iteration_histogram: no trajectories");
  const std::size_t steps = trajectories.front().steps.size();
  for (const auto& t : trajectories)
    if (t.steps.size() != steps) throw std::invalid_argument("iteration_histogram: ragged trajectories");
  IterationHistogram h;
  h.bin_width = bin_width;
  h.bins.resize(steps);
  h.mean_delta.assign(steps, 0.0);
  h.mass.assign(steps, 0);
  auto bin = [&](double d) { return static_cast<long>(std::floor(d / bin_width)); };
  for (const auto& t : trajectories) {
    const double z0 = oracle_score(landscape, t.steps.front().seq);
    for (std::size_t k = 0; k < steps; ++k) {
      const double d = oracle_score(landscape, t.steps[k].seq) - z0;
      h.mean_delta[k] += d;
      ++h.bins[k][bin(d)];
      ++h.mass[k];
      if (include_candidates) {
        for (const auto& c : t.steps[k].candidates) {
          ++h.bins[k][bin(oracle_score(landscape, c) - z0)];
          ++h.mass[k];
        }
      }
    }
  }
  for (auto& m : h.mean_delta) m /= static_cast<double>(trajectories.size());
  return h;
}

std::vector<DiversityBucket> diversity_profile(std::span<const Sequence> candidates, const Sequence& reference,
                                               const Landscape& landscape, const EvalTarget& threshold) {
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> buckets;  // distance -> (count, hits)
  for (const auto& c : candidates) {
    auto& b = buckets[levenshtein(c, reference)];
    ++b.first;
    b.second += beyond(oracle_score(landscape, c), threshold);
  }
  std::vector<DiversityBucket> out;
  for (const auto& [d, ch] : buckets) {
    out.push_back({d, ch.first, static_cast<double>(ch.first) / static_cast<double>(candidates.size()),
                   static_cast<double>(ch.second) / static_cast<double>(ch.first)});
  }
  return out;
}

std::vector<double> plateau_table(std::span<const Trajectory> trajectories, const ScorerModel& scorer) {
  if (trajectories.empty()) throw std::invalid_argument("plateau_table: no trajectories");
  const std::size_t steps = trajectories.front().steps.size();
  std::vector<double> mean(steps, 0.0);
  for (const auto& t : trajectories) {
    if (t.steps.size() != steps) throw std::invalid_argument("plateau_table: ragged trajectories");
    for (std::size_t k = 0; k < steps; ++k) mean[k] += predict(scorer, t.steps[k].seq);
  }
  for (auto& m : mean) m /= static_cast<double>(trajectories.size());
  return mean;
}

using io::format_double;

void write_success_csv(std::ostream& os, std::span<const MethodResult> methods, const Landscape& landscape,
                       std::span<const EvalTarget> targets) {
  os << "method,target,region,direction,value,n,success_rate\n";
  for (const auto& m : methods) {
    const auto rates = success_rates(m.candidates, landscape, targets);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      os << m.method << ',' << targets[t].name << ',' << target_region_name(targets[t].region) << ','
         << direction_name(targets[t].direction) << ',' << format_double(targets[t].value) << ','
         << m.candidates.size() << ',' << format_double(rates[t]) << '\n';
    }
  }
}

void write_topk_csv(std::ostream& os, std::span<const MethodResult> methods, const Landscape& landscape,
                    std::span<const std::size_t> ks) {
  os << "method,k,mean_oracle\n";
  for (const auto& m : methods) {
    std::vector<std::size_t> valid;
    for (auto k : ks)
      if (k <= m.candidates.size()) valid.push_back(k);
    valid.push_back(m.candidates.size());
    const auto avg = topk_average(m.candidates, landscape, valid);
    for (std::size_t j = 0; j < valid.size(); ++j)
      os << m.method << ',' << (j + 1 == valid.size() ? std::string("all") : std::to_string(valid[j])) << ','
         << format_double(avg[j]) << '\n';
  }
}

void write_histogram_csv(std::ostream& os, std::span<const MethodResult> methods, const Landscape& landscape,
                         double bin_width) {
  os << "method,source,k,bin_low,bin_high,count\n";
  for (const auto& m : methods) {
    if (m.trajectories.empty()) continue;
    for (bool with_candidates : {false, true}) {
      const auto h = iteration_histogram(m.trajectories, landscape, bin_width, with_candidates);
      for (std::size_t k = 0; k < h.bins.size(); ++k)
        for (const auto& [b, n] : h.bins[k])
          os << m.method << ',' << (with_candidates ? "chosen+candidates" : "chosen") << ',' << k << ','
             << format_double(static_cast<double>(b) * bin_width) << ','
             << format_double(static_cast<double>(b + 1) * bin_width) << ',' << n << '\n';
    }
  }
}

void write_diversity_csv(std::ostream& os, std::span<const MethodResult> methods, const Sequence& reference,
                         const Landscape& landscape, const EvalTarget& threshold) {
  os << "method,distance,count,fraction,success_rate\n";
  for (const auto& m : methods) {
    for (const auto& b : diversity_profile(m.candidates, reference, landscape, threshold))
      os << m.method << ',' << b.distance << ',' << b.count << ',' << format_double(b.fraction) << ','
         << format_double(b.success) << '\n';
  }
}

void write_plateau_csv(std::ostream& os, std::span<const MethodResult> methods, const ScorerModel& scorer) {
  os << "method,k,mean_fs\n";
  for (const auto& m : methods) {
    if (m.trajectories.empty()) continue;
    const auto row = plateau_table(m.trajectories, scorer);
    for (std::size_t k = 0; k < row.size(); ++k) os << m.method << ',' << k << ',' << format_double(row[k]) << '\n';
  }
}

void write_pairs_audit_csv(std::ostream& os, const PairAudit& a, double delta, double acceptance_rate) {
  os << "total,inc,dec,delta,delta_violations,tag_violations,identical,acceptance_rate,ok\n";
  os << a.total << ',' << a.inc << ',' << a.dec << ',' << format_double(delta) << ',' << a.delta_violations << ','
     << a.tag_violations << ',' << a.identical << ',' << format_double(acceptance_rate) << ',' << (a.ok() ? 1 : 0)
     << '\n';
}

void write_scorer_corr_csv(std::ostream& os, const CorrelationReport& r) {
  os << "split,spearman\n";
  os << "train," << (r.train ? format_double(*r.train) : "NA") << '\n';
  os << "heldout," << (r.heldout ? format_double(*r.heldout) : "NA") << '\n';
}

}  // namespace ice
