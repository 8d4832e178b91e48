#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ice/campaign.hpp"
#include "ice/io.hpp"

using namespace ice;
namespace fs = std::filesystem;

namespace {

CampaignConfig tiny() { return load_config(fs::path(ICE_CONFIG_DIR) / "tiny.json"); }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("ice_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::map<std::string, std::string> all_files(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = io::read_file(e.path());
  return out;
}

}  // namespace

TEST_CASE("tiny campaign is byte-identical across worker counts") {
  auto a = scratch("w1"), b = scratch("w3");
  Campaign(tiny(), a, 1).run_all();
  Campaign(tiny(), b, 3).run_all();
  const auto fa = all_files(a), fb = all_files(b);
  CHECK(fa.size() == fb.size());
  for (const auto& [name, content] : fa) {
    INFO(name);
    REQUIRE(fb.count(name));
    CHECK(content == fb.at(name));
  }
}

TEST_CASE("every artifact carries the config hash") {
  auto dir = scratch("hash");
  Campaign c(tiny(), dir, 1);
  c.run_all();
  for (const char* rel : {paths::landscape, paths::corpus, paths::pairs, paths::editor, paths::scorer})
    CHECK(io::read_config_hash(dir / rel) == c.hash());
}

TEST_CASE("a stage refuses artifacts from another config") {
  auto dir = scratch("mismatch");
  auto cfg = tiny();
  Campaign(cfg, dir, 1).gen_landscape();
  cfg.seed += 1;
  Campaign other(cfg, dir, 1);
  CHECK_THROWS_WITH_AS(other.gen_data(), doctest::Contains("config"), StageError);
}

TEST_CASE("stages fail with the stage name when inputs are missing") {
  auto dir = scratch("missing");
  Campaign c(tiny(), dir, 1);
  try {
    c.train_scorer();
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "train-scorer");
  }
}

TEST_CASE("starts are in-region and disjoint from training") {
  auto dir = scratch("starts");
  Campaign c(tiny(), dir, 1);
  c.gen_landscape();
  c.gen_data();
  const auto meta = c.load_meta();
  Alphabet alpha(c.config().alphabet);
  std::ifstream lin(dir / paths::landscape);
  auto land = io::read_landscape(lin);
  std::ifstream sin(dir / paths::starts);
  auto starts = io::read_sequences(sin, alpha);
  CHECK(starts.size() == c.config().n_starts);
  for (const auto& s : starts) CHECK(meta.region.contains(oracle_score(land, s)));
}

TEST_CASE("method names round trip") {
  for (auto m : all_methods()) CHECK(parse_method(method_name(m)) == m);
  CHECK(method_from_flags("ice", "scorer-free") == Method::IceScorerFree);
  CHECK(method_from_flags("sampling", "scorer-guided") == Method::Sampling);
  CHECK_THROWS(parse_method("genhance"));
}

TEST_CASE("golden pair acceptance rate on the default campaign") {
  auto dir = scratch("golden");
  Campaign c(default_config(), dir, 1);
  c.gen_landscape();
  c.gen_data();
  c.train_scorer();
  c.gen_pairs();
  const auto text = io::read_file(dir / "reports/pairs_audit.csv");
  CHECK(text.find(",0.436898718139161,1\n") != std::string::npos);
  fs::remove_all(dir);
}
