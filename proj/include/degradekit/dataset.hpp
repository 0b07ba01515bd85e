#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "degradekit/degrade.hpp"

namespace degradekit {

// One registered clean IR/VI pair. Paths are stored absolute so manifests
// can be re-verified from anywhere.
struct CleanPair {
  std::string id;
  std::string ir_path;
  std::string vi_path;
  int width = 0;
  int height = 0;
};

// Scans <dir>/ir/*.png and <dir>/vi/*.png for matching stems; both files
// must decode and share dimensions.
std::vector<CleanPair> scan_pairs(const std::string& dir);

// A named multi-modality combination, e.g. VI rain_haze + IR random_noise.
struct ComboEntry {
  std::string name;
  std::vector<DegradationKind> kinds;  // 1..2 kinds, modalities implied
};

struct SynthConfig {
  std::string pairs_dir;
  std::string out_dir;
  std::vector<DegradationKind> kinds;  // empty = full registry
  std::vector<ComboEntry> combos;
  std::vector<int> levels = {1, 4, 7, 10};
  double train_fraction = 0.9;
  std::uint64_t global_seed = 0;
  bool jitter = false;
  int threads = 0;  // 0 = DEGRADEKIT_THREADS env, else hardware concurrency
};

SynthConfig synth_config_from_json(const nlohmann::json& j);
SynthConfig load_synth_config(const std::string& path);

struct ManifestRecord {
  std::string key;      // label/level/pair_id
  std::string pair_id;
  std::string label;    // kind id or combo name
  int level = 1;
  std::string split;    // "train" | "test"
  std::uint64_t seed = 0;
  std::vector<DegradationSpec> specs;
  std::string prompt;
  std::string ir_out;   // paths relative to the output directory
  std::string vi_out;
  std::uint64_t spec_hash = 0;
  bool skipped = false;
  std::string skip_reason;
};

struct DatasetManifest {
  std::string version = "1";
  std::uint64_t global_seed = 0;
  double train_fraction = 0.9;
  std::vector<int> levels;
  std::vector<std::string> labels;  // kind ids plus combo names
  std::vector<CleanPair> pairs;
  std::vector<ManifestRecord> records;  // sorted by key
  bool partial = false;
};

// Synthesizes every pair x label x level record: derives the record seed as
// hash(global_seed, pair_id, label, level), resolves params, composes,
// renders a seeded prompt and writes both degraded PNGs. Unreadable pairs
// are recorded as skipped; a write failure stops the run and flags the
// manifest as partial. Deterministic end to end; records are produced in
// parallel but the manifest is key-sorted, so output never depends on
// scheduling.
DatasetManifest synthesize(const std::vector<CleanPair>& pairs,
                           const SynthConfig& config);

nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const DatasetManifest& m, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

// FNV-1a over the canonical JSON serialization (no timestamps exist, so the
// whole body is covered).
std::uint64_t manifest_body_hash(const DatasetManifest& m);

struct VerificationReport {
  int records_checked = 0;
  int regenerated = 0;
  std::vector<std::string> mismatched;   // regenerated pixels differ
  std::vector<std::string> missing;      // referenced file absent/unreadable
  std::vector<std::string> hash_errors;  // stored spec_hash does not match
  std::vector<std::string> count_errors; // record-count / split violations

  bool ok() const {
    return mismatched.empty() && missing.empty() && hash_errors.empty() &&
           count_errors.empty();
  }
};

// Re-derives a deterministic sample of the records (sample_fraction of them)
// and checks regenerated pixels against the stored PNGs byte for byte, plus
// the count and split invariants and each record's spec hash. base_dir is
// the directory holding the dataset (where the manifest was written).
VerificationReport verify(const DatasetManifest& m, const std::string& base_dir,
                          double sample_fraction = 1.0);

}  // namespace degradekit
