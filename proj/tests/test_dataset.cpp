#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"

#include "degradekit/dataset.hpp"
#include "degradekit/png_io.hpp"
#include "fixtures.hpp"

using namespace degradekit;
using namespace degradekit::testing;
namespace fs = std::filesystem;

namespace {

// Writes n clean pairs under dir/ir and dir/vi and scans them back.
std::vector<CleanPair> make_fixture(const fs::path& dir, int n,
                                    int h = 24, int w = 32) {
  fs::remove_all(dir);
  fs::create_directories(dir / "ir");
  fs::create_directories(dir / "vi");
  for (int i = 0; i < n; ++i) {
    const std::string name = "pair" + std::to_string(i) + ".png";
    write_png((dir / "ir" / name).string(), synthetic_scene_gray(i, h, w));
    write_png((dir / "vi" / name).string(), synthetic_scene(100 + i, h, w));
  }
  return scan_pairs(dir.string());
}

fs::path test_root() {
  const fs::path root = fs::temp_directory_path() / "degradekit_dataset_test";
  fs::create_directories(root);
  return root;
}

}  // namespace

TEST_CASE("scan_pairs registers matching decodable pairs") {
  const fs::path dir = test_root() / "pairs_scan";
  const auto pairs = make_fixture(dir, 3);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].id == "pair0");
  CHECK(pairs[0].width == 32);
  CHECK(pairs[0].height == 24);
  // An unmatched ir image is ignored.
  write_png((dir / "ir" / "orphan.png").string(), synthetic_scene_gray(9));
  CHECK(scan_pairs(dir.string()).size() == 3);
}

TEST_CASE("product mode yields pairs x kinds x levels records") {
  const fs::path dir = test_root() / "pairs_product";
  const auto pairs = make_fixture(dir, 2);
  SynthConfig config;
  config.out_dir = (test_root() / "out_product").string();
  fs::remove_all(config.out_dir);
  config.levels = {1, 4};
  config.kinds = {DegradationKind::gauss_noise, DegradationKind::stripe_noise,
                  DegradationKind::haze};
  const DatasetManifest m = synthesize(pairs, config);
  CHECK(m.records.size() == 2 * 3 * 2);
  for (const ManifestRecord& rec : m.records) {
    CHECK(!rec.skipped);
    CHECK(fs::exists(fs::path(config.out_dir) / rec.ir_out));
    CHECK(fs::exists(fs::path(config.out_dir) / rec.vi_out));
    CHECK(!rec.prompt.empty());
  }
}

TEST_CASE("composite combos add pairs x combos x levels records") {
  const fs::path dir = test_root() / "pairs_combo";
  const auto pairs = make_fixture(dir, 2);
  SynthConfig config;
  config.out_dir = (test_root() / "out_combo").string();
  fs::remove_all(config.out_dir);
  config.levels = {4, 7};
  config.kinds = {DegradationKind::blur};
  config.combos = {{"oe_lc",
                    {DegradationKind::over_exposure, DegradationKind::low_contrast}},
                   {"rh_rn",
                    {DegradationKind::rain_haze, DegradationKind::random_noise}}};
  const DatasetManifest m = synthesize(pairs, config);
  CHECK(m.records.size() == 2 * (1 + 2) * 2);
  int combo_records = 0;
  for (const ManifestRecord& rec : m.records)
    if (rec.label == "oe_lc" || rec.label == "rh_rn") {
      ++combo_records;
      CHECK(rec.specs.size() == 2);
    }
  CHECK(combo_records == 2 * 2 * 2);
}

TEST_CASE("two runs produce byte-identical manifests") {
  const fs::path dir = test_root() / "pairs_det";
  const auto pairs = make_fixture(dir, 2);
  SynthConfig config;
  config.levels = {1, 7};
  config.kinds = {DegradationKind::low_light, DegradationKind::contrast_stripe};
  config.global_seed = 99;

  config.out_dir = (test_root() / "out_det_a").string();
  fs::remove_all(config.out_dir);
  const DatasetManifest a = synthesize(pairs, config);
  config.out_dir = (test_root() / "out_det_b").string();
  fs::remove_all(config.out_dir);
  const DatasetManifest b = synthesize(pairs, config);
  CHECK(manifest_body_hash(a) == manifest_body_hash(b));

  // And the PNG payloads agree byte for byte.
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const Image ia = read_png(((test_root() / "out_det_a") / a.records[i].ir_out).string());
    const Image ib = read_png(((test_root() / "out_det_b") / b.records[i].ir_out).string());
    CHECK(quantize_to_bytes(ia) == quantize_to_bytes(ib));
  }
}

TEST_CASE("manifest JSON round trip is lossless") {
  const fs::path dir = test_root() / "pairs_json";
  const auto pairs = make_fixture(dir, 1);
  SynthConfig config;
  config.out_dir = (test_root() / "out_json").string();
  fs::remove_all(config.out_dir);
  config.levels = {4};
  config.kinds = {DegradationKind::rain};
  const DatasetManifest m = synthesize(pairs, config);
  const DatasetManifest back = manifest_from_json(manifest_to_json(m));
  CHECK(manifest_body_hash(back) == manifest_body_hash(m));
}

TEST_CASE("verify passes on a fresh dataset and localizes corruption") {
  const fs::path dir = test_root() / "pairs_verify";
  const auto pairs = make_fixture(dir, 2);
  SynthConfig config;
  config.out_dir = (test_root() / "out_verify").string();
  fs::remove_all(config.out_dir);
  config.levels = {1, 10};
  config.kinds = {DegradationKind::gauss_noise, DegradationKind::low_light};
  const DatasetManifest m = synthesize(pairs, config);

  VerificationReport clean = verify(m, config.out_dir, 1.0);
  CHECK(clean.ok());
  CHECK(clean.regenerated == static_cast<int>(m.records.size()));

  // Corrupt exactly one output PNG.
  const ManifestRecord& victim = m.records[3];
  write_png((fs::path(config.out_dir) / victim.vi_out).string(),
            synthetic_scene(55, 24, 32));
  VerificationReport corrupted = verify(m, config.out_dir, 1.0);
  REQUIRE(corrupted.mismatched.size() == 1);
  CHECK(corrupted.mismatched[0] == victim.key);

  // An edited level breaks that record's spec hash.
  DatasetManifest tampered = m;
  tampered.records[1].level = tampered.records[1].level == 1 ? 10 : 1;
  VerificationReport hashes = verify(tampered, config.out_dir, 0.0);
  REQUIRE(hashes.hash_errors.size() == 1);
  CHECK(hashes.hash_errors[0] == tampered.records[1].key);

  // A missing file is enumerated.
  fs::remove(fs::path(config.out_dir) / victim.vi_out);
  VerificationReport missing = verify(m, config.out_dir, 1.0);
  CHECK(missing.missing.size() + missing.mismatched.size() >= 1);
}

TEST_CASE("split fractions are honored within one pair per label") {
  const fs::path dir = test_root() / "pairs_split";
  const auto pairs = make_fixture(dir, 10, 16, 16);
  SynthConfig config;
  config.out_dir = (test_root() / "out_split").string();
  fs::remove_all(config.out_dir);
  config.levels = {4};
  config.kinds = {DegradationKind::haze, DegradationKind::random_noise};
  config.train_fraction = 0.9;
  const DatasetManifest m = synthesize(pairs, config);

  for (const std::string& label : m.labels) {
    int train = 0, total = 0;
    for (const ManifestRecord& rec : m.records) {
      if (rec.label != label) continue;
      ++total;
      train += rec.split == "train" ? 1 : 0;
    }
    CHECK(total == 10);
    CHECK(train == 9);
  }
  CHECK(verify(m, config.out_dir, 0.0).ok());
}

TEST_CASE("unreadable inputs are recorded as skipped with a reason") {
  const fs::path dir = test_root() / "pairs_skip";
  auto pairs = make_fixture(dir, 2);
  fs::remove(pairs[0].ir_path);  // breaks after scanning
  SynthConfig config;
  config.out_dir = (test_root() / "out_skip").string();
  fs::remove_all(config.out_dir);
  config.levels = {4};
  config.kinds = {DegradationKind::blur};
  const DatasetManifest m = synthesize(pairs, config);
  int skipped = 0;
  for (const ManifestRecord& rec : m.records)
    if (rec.skipped) {
      ++skipped;
      CHECK(!rec.skip_reason.empty());
      CHECK(rec.pair_id == pairs[0].id);
    }
  CHECK(skipped == 1);
  CHECK(!m.partial);
}

TEST_CASE("config JSON parsing covers kinds, combos and defaults") {
  const nlohmann::json j{
      {"pairs_dir", "clean"},
      {"out_dir", "out"},
      {"kinds", {"haze", "blur"}},
      {"levels", {1, 4, 7, 10}},
      {"train_fraction", 0.8},
      {"global_seed", 7},
      {"combos",
       {{{"name", "ll_sn"},
         {"kinds", {"low_light", "stripe_noise"}}}}},
  };
  const SynthConfig config = synth_config_from_json(j);
  CHECK(config.kinds.size() == 2);
  CHECK(config.combos.size() == 1);
  CHECK(config.combos[0].kinds[1] == DegradationKind::stripe_noise);
  CHECK(config.train_fraction == 0.8);
  CHECK(config.global_seed == 7);

  const nlohmann::json bad{{"out_dir", "out"}, {"kinds", {"fog"}}};
  CHECK_THROWS_WITH_AS(synth_config_from_json(bad),
                       "unknown degradation kind: fog", std::invalid_argument);
}

TEST_CASE("duplicate combo names are rejected") {
  const fs::path dir = test_root() / "pairs_dup";
  const auto pairs = make_fixture(dir, 1);
  SynthConfig config;
  config.out_dir = (test_root() / "out_dup").string();
  config.kinds = {DegradationKind::haze};
  config.combos = {{"haze", {DegradationKind::rain}}};
  CHECK_THROWS_AS(synthesize(pairs, config), std::invalid_argument);
}
