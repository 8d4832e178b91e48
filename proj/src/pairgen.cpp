#include "ice/pairgen.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "ice/io.hpp"
#include "ice/parallel.hpp"

namespace ice {

std::string_view tag_name(ControlTag tag) { return tag == ControlTag::Inc ? "INC" : "DEC"; }

ControlTag parse_tag(std::string_view s) {
  if (s == "INC" || s == "inc") return ControlTag::Inc;
  if (s == "DEC" || s == "dec") return ControlTag::Dec;
  throw std::invalid_argument("unknown control tag '" + std::string(s) + "'");
}

std::optional<ControlTag> label(double x_score, double y_score) {
  if (y_score > x_score) return ControlTag::Inc;
  if (y_score < x_score) return ControlTag::Dec;
  return std::nullopt;
}

namespace {

struct Attempt {
  bool kept = false;
  Sequence x, perturbed;
  double fx = 0.0, fp = 0.0;
  std::size_t n_masked = 0;
};

}  // namespace

PairSet make_pairs(const DatasetSplit& split, const InfillModel& infill_model, const MaskSpec& spec,
                   const RegionMask& mask, const ScorerModel& scorer, const PairGenOptions& options,
                   std::uint64_t seed) {
  if (!(options.delta >= 0.0)) throw std::invalid_argument("make_pairs: delta must be >= 0");
  if (options.n_pairs < 1) throw std::invalid_argument("make_pairs: n_pairs must be >= 1");
  if (split.sup_train.empty()) throw std::invalid_argument("make_pairs: empty supervised split");
  spec.validate();

  const auto& sup = split.sup_train;
  std::vector<Sequence> sup_seqs;
  for (const auto& ex : sup) sup_seqs.push_back(ex.seq);
  const auto sup_scores = predict_batch(scorer, sup_seqs);

  const std::size_t cap = 100 * options.n_pairs;
  const std::size_t block = std::max<std::size_t>(1024, 64 * std::max<std::size_t>(1, options.workers));
  PairSet out;
  std::vector<Attempt> results;
  std::size_t next = 0;
  while (out.pairs.size() < options.n_pairs) {
    if (next >= cap) {
      const double rate = next ? static_cast<double>(out.accepted) / next : 0.0;
      throw PairGenerationError("make_pairs: attempt cap " + std::to_string(cap) + " reached with " +
                                    std::to_string(out.pairs.size()) + " of " + std::to_string(options.n_pairs) +
                                    " pairs (acceptance rate " + io::format_double(rate) + ")",
                                next, rate);
    }
    const std::size_t n = std::min(block, cap - next);
    results.assign(n, Attempt{});
    parallel_for(n, options.workers, [&](std::size_t k) {
      Rng rng(derive_seed(seed, "pairgen/attempt", next + k));
      const auto idx = rng.uniform_index(sup.size());
      const auto& x = sup[idx].seq;
      auto positions = mask_positions(x, spec, mask, rng);
      auto perturbed = infill(infill_model, x, positions, rng, options.infill_temperature);
      const double fx = sup_scores[idx];
      const double fp = predict(scorer, perturbed);
      const double gap = std::fabs(fp - fx);
      Attempt& a = results[k];
      if (gap > 0.0 && gap < options.delta && perturbed != x) {
        a.kept = true;
        a.x = x;
        a.perturbed = std::move(perturbed);
        a.fx = fx;
        a.fp = fp;
        a.n_masked = positions.size();
      }
    });
    for (auto& a : results) {
      ++out.attempts;
      if (!a.kept) continue;
      ++out.accepted;
      const bool up = *label(a.fx, a.fp) == ControlTag::Inc;
      const Sequence& lo = up ? a.x : a.perturbed;
      const Sequence& hi = up ? a.perturbed : a.x;
      const double flo = up ? a.fx : a.fp, fhi = up ? a.fp : a.fx;
      out.pairs.push_back({ControlTag::Inc, lo, hi, flo, fhi, a.n_masked});
      out.pairs.push_back({ControlTag::Dec, hi, lo, fhi, flo, a.n_masked});
      if (out.pairs.size() >= options.n_pairs) break;
    }
    next += n;
  }
  return out;
}

PairAudit audit_pairs(std::span<const EditPair> pairs, double delta) {
  PairAudit a;
  for (const auto& p : pairs) {
    ++a.total;
    (p.tag == ControlTag::Inc ? a.inc : a.dec)++;
    const double gap = std::fabs(p.target_score - p.source_score);
    if (!(gap > 0.0 && gap < delta)) ++a.delta_violations;
    auto expected = label(p.source_score, p.target_score);
    if (!expected || *expected != p.tag) ++a.tag_violations;
    if (p.source == p.target) ++a.identical;
  }
  return a;
}

void write_pairs(std::ostream& os, std::span<const EditPair> pairs, const Alphabet& alphabet) {
  for (const auto& p : pairs) {
    os << tag_name(p.tag) << '\t' << format_sequence(p.source, alphabet) << '\t' << format_sequence(p.target, alphabet)
       << '\t' << io::format_double(p.source_score) << '\t' << io::format_double(p.target_score) << '\n';
  }
}

std::vector<EditPair> read_pairs(std::istream& is, const Alphabet& alphabet) {
  std::vector<EditPair> out;
  for (const auto& line : io::read_data_lines(is)) {
    auto f = io::split_tabs(line);
    if (f.size() != 5) throw std::runtime_error("pair line needs 5 tab-separated fields: '" + line + "'");
    EditPair p;
    p.tag = parse_tag(f[0]);
    p.source = parse_sequence(f[1], alphabet);
    p.target = parse_sequence(f[2], alphabet);
    p.source_score = io::parse_double(f[3]);
    p.target_score = io::parse_double(f[4]);
    p.n_masked = hamming(p.source, p.target);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace ice
