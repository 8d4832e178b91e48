#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ice/evalrep.hpp"
#include "support.hpp"

using namespace ice;

namespace {

// z = 1.0 * (token at position 0); easy to reason about.
Landscape line() {
  std::vector<double> add(2 * 5, 0.0);
  for (int b = 0; b < 5; ++b) add[static_cast<std::size_t>(b)] = b;
  return Landscape({2, 5, 0, 1.0, 0.0}, 0, add, {}, {});
}

Sequence s2(Token a, Token b) { return Sequence(std::vector<Token>{a, b}); }

Trajectory traj(std::vector<Sequence> xs) {
  Trajectory t{xs.front(), ControlTag::Inc, InferenceMode::ScorerGuided, {}};
  for (std::size_t k = 0; k < xs.size(); ++k) t.steps.push_back({k, xs[k], 0.0, {}, {}});
  return t;
}

}  // namespace

TEST_CASE("success is strictly beyond the threshold") {
  auto l = line();
  std::vector<Sequence> c{s2(0, 0), s2(2, 0), s2(3, 1), s2(4, 0)};
  std::vector<EvalTarget> t{{"a", 2.0, Direction::Above, TargetRegion::Extrapolation},
                            {"b", 2.0, Direction::Below, TargetRegion::Train},
                            {"c", 10.0, Direction::Above, TargetRegion::Extrapolation}};
  auto r = success_rates(c, l, t);
  CHECK(r[0] == 0.5);
  CHECK(r[1] == 0.25);
  CHECK(r[2] == 0.0);
  std::vector<Sequence> none;
  CHECK_THROWS(success_rates(none, l, t));
}

TEST_CASE("target consistency with the region") {
  Region r{0.0, 1.0};
  CHECK(target_consistent({"t", 0.5, Direction::Above, TargetRegion::Train}, r));
  CHECK_FALSE(target_consistent({"t", 1.5, Direction::Above, TargetRegion::Train}, r));
  CHECK(target_consistent({"t", 1.5, Direction::Above, TargetRegion::Extrapolation}, r));
  CHECK(parse_direction("BELOW") == Direction::Below);
  CHECK(parse_target_region("TRAIN") == TargetRegion::Train);
  CHECK_THROWS(parse_direction("up"));
}

TEST_CASE("top-k averages by hand") {
  auto l = line();
  std::vector<Sequence> c{s2(1, 0), s2(4, 0), s2(2, 0), s2(4, 1), s2(0, 0)};
  std::vector<std::size_t> ks{1, 2, 3, 5};
  auto up = topk_average(c, l, ks);
  CHECK(up == std::vector<double>{4.0, 4.0, 10.0 / 3, 11.0 / 5});
  auto down = topk_average(c, l, ks, Direction::Below);
  CHECK(down[0] == 0.0);
  CHECK(down[1] == 0.5);
  std::vector<std::size_t> too_many{6};
  CHECK_THROWS(topk_average(c, l, too_many));
}

TEST_CASE("iteration histogram uses floor bins") {
  auto l = line();
  std::vector<Trajectory> ts{traj({s2(0, 0), s2(1, 0), s2(3, 0)}), traj({s2(2, 0), s2(2, 1), s2(1, 0)})};
  auto h = iteration_histogram(ts, l, 1.0);
  REQUIRE(h.bins.size() == 3);
  CHECK(h.bins[0].at(0) == 2);
  CHECK(h.bins[1].at(1) == 1);
  CHECK(h.bins[1].at(0) == 1);
  CHECK(h.bins[2].at(3) == 1);
  CHECK(h.bins[2].at(-1) == 1);
  CHECK(h.mean_delta == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(h.mass == std::vector<std::size_t>{2, 2, 2});
  CHECK(h.mode_bin(1) == 0);

  auto half = iteration_histogram(ts, l, 0.4);
  CHECK(half.bins[2].at(7) == 1);  // delta 3 -> floor(7.5)
  CHECK(half.bins[2].at(-3) == 1);  // delta -1 -> floor(-2.5)

  ts[0].steps[1].candidates = {s2(4, 0), s2(0, 1)};
  auto with = iteration_histogram(ts, l, 1.0, true);
  CHECK(with.mass[1] == 4);
  CHECK(with.bins[1].at(4) == 1);
  CHECK(with.mean_delta == h.mean_delta);
}

TEST_CASE("diversity buckets by edit distance") {
  auto l = line();
  Sequence ref = s2(0, 0);
  std::vector<Sequence> c{s2(0, 0), s2(3, 0), s2(1, 0), s2(4, 4)};
  auto d = diversity_profile(c, ref, l, {"t", 2.0, Direction::Above, TargetRegion::Extrapolation});
  REQUIRE(d.size() == 3);
  CHECK(d[0].distance == 0);
  CHECK(d[0].success == 0.0);
  CHECK(d[1].distance == 1);
  CHECK(d[1].count == 2);
  CHECK(d[1].fraction == 0.5);
  CHECK(d[1].success == 0.5);
  CHECK(d[2].distance == 2);
  CHECK(d[2].success == 1.0);
}

TEST_CASE("plateau table is the mean scorer value per step") {
  ScorerModel m(2, 5, 1.0, {0, 1, 2, 3, 4, 0, 0, 0, 0, 0, 0.5});
  std::vector<Trajectory> ts{traj({s2(0, 0), s2(2, 0)}), traj({s2(1, 0), s2(4, 0)})};
  CHECK(plateau_table(ts, m) == std::vector<double>{1.0, 3.5});
}

TEST_CASE("csv writers emit headers and one row per entry") {
  auto l = line();
  std::vector<MethodResult> ms{{"m", {s2(1, 0), s2(3, 0)}, {}}};
  std::vector<EvalTarget> t{{"a", 2.0, Direction::Above, TargetRegion::Extrapolation}};
  std::ostringstream os;
  write_success_csv(os, ms, l, t);
  CHECK(os.str() == "method,target,region,direction,value,n,success_rate\nm,a,EXTRAPOLATION,ABOVE,2,2,0.5\n");
  std::ostringstream tk;
  std::vector<std::size_t> ks{1, 100};
  write_topk_csv(tk, ms, l, ks);
  CHECK(tk.str() == "method,k,mean_oracle\nm,1,3\nm,all,2\n");
}
