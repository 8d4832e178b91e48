#include <doctest.h>

#include <json.hpp>

#include "ice/config.hpp"

using namespace ice;

TEST_CASE("defaults validate and carry the standard targets") {
  auto c = default_config();
  CHECK_NOTHROW(c.validate());
  CHECK(c.seed == 42);
  CHECK(c.landscape.length == 20);
  CHECK(c.alphabet.size() == 8);
  CHECK(c.n_pairs == 100000);
  CHECK(c.delta == 1.5);
  CHECK(c.iterations == 10);
  CHECK(c.beam_width == 5);
  CHECK(c.top_k == 5);
  CHECK(c.temperature == 0.7);
  CHECK(c.mask.span_lambda == 6.0);
  CHECK(c.mask.span_max == 12);
  CHECK(c.effective_max_edits() == 12);
  CHECK(c.region_mask().n_mutable() == 16);
  bool found = false;
  for (const auto& t : c.targets) found |= t.name == c.acceptance_target;
  CHECK(found);
}

TEST_CASE("json round trip") {
  auto c = default_config();
  c.seed = 7;
  c.mask.strategy = MaskStrategy::Iid;
  c.targets.pop_back();
  c.output_dir = "elsewhere";
  CHECK(config_from_json(config_to_json(c)) == c);
}

TEST_CASE("hash ignores the output directory only") {
  auto a = default_config(), b = default_config();
  b.output_dir = "/tmp/other";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.seed = 43;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("unknown keys and bad values are rejected") {
  auto j = nlohmann::json::parse(config_to_json(default_config()));
  auto bad = j;
  bad["landscape"]["lenght"] = 20;
  CHECK_THROWS_WITH(config_from_json(bad.dump()), doctest::Contains("lenght"));
  bad = j;
  bad["schema_version"] = 2;
  CHECK_THROWS(config_from_json(bad.dump()));
  bad = j;
  bad["pairs"]["delta"] = -1.0;
  CHECK_THROWS_WITH(config_from_json(bad.dump()), doctest::Contains("delta"));
  bad = j;
  bad["immutable"]["start"] = 18;
  CHECK_THROWS(config_from_json(bad.dump()));
  bad = j;
  bad["acceptance_target"] = "nope";
  CHECK_THROWS(config_from_json(bad.dump()));
  CHECK_THROWS(config_from_json("{not json"));
}

TEST_CASE("mask presets load by name") {
  auto j = nlohmann::json::parse(config_to_json(default_config()));
  j["mask"] = {{"preset", "small"}};
  auto c = config_from_json(j.dump());
  CHECK(c.mask.span_lambda == 3.0);
  CHECK(c.mask.span_max == 6);
}

TEST_CASE("partial configs fill in defaults") {
  auto c = config_from_json(R"({"schema_version": 1, "seed": 5})");
  auto d = default_config();
  d.seed = 5;
  CHECK(c == d);
}
