#include "degradekit/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "degradekit/image.hpp"
#include "degradekit/png_io.hpp"
#include "degradekit/prompts.hpp"
#include "degradekit/rng.hpp"

namespace fs = std::filesystem;

namespace degradekit {

namespace {

Image to_gray(const Image& img) { return luminance(img); }

Image to_rgb(const Image& img) {
  if (img.is_rgb()) return img;
  Image out(img.height, img.width, 3);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    out.data[3 * i] = img.data[i];
    out.data[3 * i + 1] = img.data[i];
    out.data[3 * i + 2] = img.data[i];
  }
  return out;
}

// IR loads as gray, VI as RGB, regardless of how the PNGs were stored.
std::pair<Image, Image> load_pair(const CleanPair& pair) {
  const Image ir = to_gray(read_png(pair.ir_path));
  const Image vi = to_rgb(read_png(pair.vi_path));
  if (ir.height != vi.height || ir.width != vi.width)
    throw IoError("pair '" + pair.id + "' images differ in size");
  return {ir, vi};
}

std::string record_key(const std::string& label, int level,
                       const std::string& pair_id) {
  return label + "/" + std::to_string(level) + "/" + pair_id;
}

std::uint64_t record_seed(std::uint64_t global_seed, const std::string& pair_id,
                          const std::string& label, int level) {
  return fnv1a64(std::to_string(global_seed) + "|" + pair_id + "|" + label +
                 "|" + std::to_string(level));
}

std::uint64_t record_spec_hash(const ManifestRecord& r) {
  nlohmann::json specs = nlohmann::json::array();
  for (const DegradationSpec& s : r.specs) specs.push_back(spec_to_json(s));
  return fnv1a64(r.pair_id + "|" + r.label + "|" + std::to_string(r.level) +
                 "|" + specs.dump() + "|" + r.prompt);
}

int resolve_thread_count(int configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("DEGRADEKIT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

struct Label {
  std::string name;
  std::vector<std::pair<Modality, DegradationKind>> parts;
};

std::vector<Label> build_labels(const SynthConfig& config) {
  std::vector<Label> labels;
  std::vector<DegradationKind> kinds = config.kinds;
  if (kinds.empty() && config.combos.empty())
    for (const KindInfo& info : kind_registry()) kinds.push_back(info.kind);
  for (DegradationKind kind : kinds) {
    const KindInfo& info = kind_info(kind);
    labels.push_back({info.id, {{info.modality, kind}}});
  }
  for (const ComboEntry& combo : config.combos) {
    if (combo.kinds.empty() || combo.kinds.size() > 2)
      throw std::invalid_argument("combo '" + combo.name +
                                  "' must list one or two kinds");
    Label label{combo.name, {}};
    for (DegradationKind kind : combo.kinds)
      label.parts.push_back({kind_info(kind).modality, kind});
    if (label.parts.size() == 2 &&
        label.parts[0].first == label.parts[1].first &&
        (kind_info(label.parts[0].second).stages &
         kind_info(label.parts[1].second).stages))
      throw std::invalid_argument("combo '" + combo.name +
                                  "' stacks two kinds on one stage");
    labels.push_back(std::move(label));
  }
  std::set<std::string> seen;
  for (const Label& l : labels)
    if (!seen.insert(l.name).second)
      throw std::invalid_argument("duplicate label: " + l.name);
  return labels;
}

// Deterministic stratified split: within each label, pair ids are ordered by
// hash and the first round(fraction * n) go to train, so the fraction is
// honored within one record per stratum.
std::set<std::string> train_pairs_for_label(
    const std::string& label, const std::vector<CleanPair>& pairs,
    double fraction) {
  std::vector<std::pair<std::uint64_t, std::string>> order;
  for (const CleanPair& p : pairs)
    order.push_back({fnv1a64(label + "|" + p.id), p.id});
  std::sort(order.begin(), order.end());
  const auto n_train = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(order.size())));
  std::set<std::string> train;
  for (std::size_t i = 0; i < n_train && i < order.size(); ++i)
    train.insert(order[i].second);
  return train;
}

}  // namespace

std::vector<CleanPair> scan_pairs(const std::string& dir) {
  const fs::path ir_dir = fs::path(dir) / "ir";
  const fs::path vi_dir = fs::path(dir) / "vi";
  if (!fs::is_directory(ir_dir) || !fs::is_directory(vi_dir))
    throw IoError("expected ir/ and vi/ subdirectories under " + dir);

  std::vector<CleanPair> pairs;
  std::vector<fs::path> ir_files;
  for (const auto& entry : fs::directory_iterator(ir_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".png")
      ir_files.push_back(entry.path());
  std::sort(ir_files.begin(), ir_files.end());

  for (const fs::path& ir_path : ir_files) {
    const fs::path vi_path = vi_dir / ir_path.filename();
    if (!fs::exists(vi_path)) continue;
    CleanPair pair;
    pair.id = ir_path.stem().string();
    pair.ir_path = fs::absolute(ir_path).string();
    pair.vi_path = fs::absolute(vi_path).string();
    const auto [ir, vi] = load_pair(pair);  // must decode and agree in size
    pair.width = ir.width;
    pair.height = ir.height;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

DatasetManifest synthesize(const std::vector<CleanPair>& pairs,
                           const SynthConfig& config) {
  if (pairs.empty()) throw std::invalid_argument("no clean pairs registered");
  if (config.out_dir.empty()) throw std::invalid_argument("out_dir is required");
  if (config.train_fraction < 0.0 || config.train_fraction > 1.0)
    throw std::invalid_argument("train_fraction must be in [0, 1]");
  if (config.levels.empty())
    throw std::invalid_argument("levels must not be empty");
  for (int level : config.levels)
    if (level < 1 || level > 10)
      throw std::invalid_argument("levels must be in [1, 10]");

  const std::vector<Label> labels = build_labels(config);

  DatasetManifest manifest;
  manifest.global_seed = config.global_seed;
  manifest.train_fraction = config.train_fraction;
  manifest.levels = config.levels;
  manifest.pairs = pairs;
  for (const Label& l : labels) manifest.labels.push_back(l.name);

  // Lay out every record up front, sorted by key; workers fill them in.
  std::set<std::uint64_t> seeds_seen;
  for (const Label& label : labels) {
    const std::set<std::string> train =
        train_pairs_for_label(label.name, pairs, config.train_fraction);
    for (int level : config.levels) {
      for (const CleanPair& pair : pairs) {
        ManifestRecord rec;
        rec.key = record_key(label.name, level, pair.id);
        rec.pair_id = pair.id;
        rec.label = label.name;
        rec.level = level;
        rec.split = train.count(pair.id) ? "train" : "test";
        rec.seed = record_seed(config.global_seed, pair.id, label.name, level);
        if (!seeds_seen.insert(rec.seed).second)
          throw std::runtime_error("record seed collision at " + rec.key);
        for (std::size_t i = 0; i < label.parts.size(); ++i) {
          DegradationSpec spec;
          spec.modality = label.parts[i].first;
          spec.kind = label.parts[i].second;
          spec.level = level;
          spec.seed = fnv1a64(rec.key + "#" + std::to_string(i),
                              config.global_seed ^ 0x9e3779b97f4a7c15ull);
          spec.params = severity_to_params(spec.kind, spec.level, spec.seed,
                                           config.jitter);
          rec.specs.push_back(std::move(spec));
        }
        rec.prompt = render_prompt_seeded(rec.specs, rec.seed);
        const fs::path rel = fs::path(rec.split) / rec.label /
                             std::to_string(rec.level);
        rec.ir_out = (rel / (pair.id + "_ir.png")).string();
        rec.vi_out = (rel / (pair.id + "_vi.png")).string();
        rec.spec_hash = record_spec_hash(rec);
        manifest.records.push_back(std::move(rec));
      }
    }
  }
  std::sort(manifest.records.begin(), manifest.records.end(),
            [](const ManifestRecord& a, const ManifestRecord& b) {
              return a.key < b.key;
            });

  std::map<std::string, const CleanPair*> pair_index;
  for (const CleanPair& p : pairs) pair_index[p.id] = &p;

  const fs::path out_root(config.out_dir);
  std::error_code ec;
  fs::create_directories(out_root, ec);
  if (ec) throw IoError("cannot create output directory: " + config.out_dir);
  {
    std::set<fs::path> dirs;
    for (const ManifestRecord& rec : manifest.records)
      dirs.insert((out_root / rec.ir_out).parent_path());
    for (const fs::path& d : dirs) {
      fs::create_directories(d, ec);
      if (ec) throw IoError("cannot create output directory: " + d.string());
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex mu;
  const int n_threads = std::min<int>(resolve_thread_count(config.threads),
                                      static_cast<int>(manifest.records.size()));

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= manifest.records.size() || abort.load()) return;
      ManifestRecord& rec = manifest.records[i];
      try {
        const auto [ir, vi] = load_pair(*pair_index.at(rec.pair_id));
        const auto [ir_out, vi_out] = compose(ir, vi, rec.specs);
        write_png((out_root / rec.ir_out).string(), ir_out);
        write_png((out_root / rec.vi_out).string(), vi_out);
      } catch (const IoError& e) {
        std::lock_guard<std::mutex> lock(mu);
        rec.skipped = true;
        rec.skip_reason = e.what();
        // A failed write invalidates the run; unreadable inputs only skip.
        if (rec.skip_reason.find("writing") != std::string::npos ||
            rec.skip_reason.find("encode") != std::string::npos) {
          manifest.partial = true;
          abort.store(true);
        }
      }
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  return manifest;
}

nlohmann::json manifest_to_json(const DatasetManifest& m) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const CleanPair& p : m.pairs)
    pairs.push_back({{"id", p.id},
                     {"ir_path", p.ir_path},
                     {"vi_path", p.vi_path},
                     {"width", p.width},
                     {"height", p.height}});
  nlohmann::json records = nlohmann::json::array();
  for (const ManifestRecord& r : m.records) {
    nlohmann::json specs = nlohmann::json::array();
    for (const DegradationSpec& s : r.specs) specs.push_back(spec_to_json(s));
    nlohmann::json rj{
        {"key", r.key},           {"pair_id", r.pair_id},
        {"label", r.label},       {"level", r.level},
        {"split", r.split},       {"seed", r.seed},
        {"specs", specs},         {"prompt", r.prompt},
        {"ir_out", r.ir_out},     {"vi_out", r.vi_out},
        {"spec_hash", r.spec_hash},
    };
    if (r.skipped) {
      rj["skipped"] = true;
      rj["skip_reason"] = r.skip_reason;
    }
    records.push_back(std::move(rj));
  }
  return nlohmann::json{
      {"version", m.version},
      {"global_seed", m.global_seed},
      {"train_fraction", m.train_fraction},
      {"levels", m.levels},
      {"labels", m.labels},
      {"pairs", pairs},
      {"records", records},
      {"partial", m.partial},
  };
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  m.version = j.at("version").get<std::string>();
  m.global_seed = j.at("global_seed").get<std::uint64_t>();
  m.train_fraction = j.at("train_fraction").get<double>();
  m.levels = j.at("levels").get<std::vector<int>>();
  m.labels = j.at("labels").get<std::vector<std::string>>();
  for (const nlohmann::json& pj : j.at("pairs")) {
    CleanPair p;
    p.id = pj.at("id").get<std::string>();
    p.ir_path = pj.at("ir_path").get<std::string>();
    p.vi_path = pj.at("vi_path").get<std::string>();
    p.width = pj.at("width").get<int>();
    p.height = pj.at("height").get<int>();
    m.pairs.push_back(std::move(p));
  }
  for (const nlohmann::json& rj : j.at("records")) {
    ManifestRecord r;
    r.key = rj.at("key").get<std::string>();
    r.pair_id = rj.at("pair_id").get<std::string>();
    r.label = rj.at("label").get<std::string>();
    r.level = rj.at("level").get<int>();
    r.split = rj.at("split").get<std::string>();
    r.seed = rj.at("seed").get<std::uint64_t>();
    for (const nlohmann::json& sj : rj.at("specs"))
      r.specs.push_back(spec_from_json(sj));
    r.prompt = rj.at("prompt").get<std::string>();
    r.ir_out = rj.at("ir_out").get<std::string>();
    r.vi_out = rj.at("vi_out").get<std::string>();
    r.spec_hash = rj.at("spec_hash").get<std::uint64_t>();
    r.skipped = rj.value("skipped", false);
    r.skip_reason = rj.value("skip_reason", std::string());
    m.records.push_back(std::move(r));
  }
  m.partial = j.at("partial").get<bool>();
  return m;
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << manifest_to_json(m).dump(2) << '\n';
  if (!out) throw IoError("failed writing manifest: " + path);
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  nlohmann::json j;
  in >> j;
  return manifest_from_json(j);
}

std::uint64_t manifest_body_hash(const DatasetManifest& m) {
  return fnv1a64(manifest_to_json(m).dump());
}

VerificationReport verify(const DatasetManifest& m, const std::string& base_dir,
                          double sample_fraction) {
  VerificationReport report;
  const fs::path root(base_dir);

  // Count invariant: records = pairs x labels x levels.
  const std::size_t expected =
      m.pairs.size() * m.labels.size() * m.levels.size();
  if (m.records.size() != expected)
    report.count_errors.push_back(
        "record count " + std::to_string(m.records.size()) + ", expected " +
        std::to_string(expected));

  // Split fractions per label, within one pair of the target.
  std::map<std::string, std::set<std::string>> train_by_label;
  std::map<std::string, std::set<std::string>> pairs_by_label;
  for (const ManifestRecord& r : m.records) {
    pairs_by_label[r.label].insert(r.pair_id);
    if (r.split == "train") train_by_label[r.label].insert(r.pair_id);
  }
  for (const auto& [label, ids] : pairs_by_label) {
    const auto want = std::llround(m.train_fraction *
                                   static_cast<double>(ids.size()));
    const auto got = static_cast<long long>(train_by_label[label].size());
    if (std::llabs(got - want) > 1)
      report.count_errors.push_back("label " + label + " train count " +
                                    std::to_string(got) + ", expected " +
                                    std::to_string(want));
  }

  std::map<std::string, const CleanPair*> pair_index;
  for (const CleanPair& p : m.pairs) pair_index[p.id] = &p;

  for (const ManifestRecord& rec : m.records) {
    report.records_checked++;
    if (rec.skipped) continue;

    if (record_spec_hash(rec) != rec.spec_hash) {
      report.hash_errors.push_back(rec.key);
      continue;
    }

    // Deterministic sampling by key hash.
    const double u = static_cast<double>(fnv1a64(rec.key + "#verify") >> 11) *
                     0x1.0p-53;
    if (u >= sample_fraction) continue;
    report.regenerated++;

    const auto it = pair_index.find(rec.pair_id);
    if (it == pair_index.end()) {
      report.missing.push_back(rec.key + " (pair not in manifest)");
      continue;
    }
    try {
      const auto [ir, vi] = load_pair(*it->second);
      const auto [ir_deg, vi_deg] = compose(ir, vi, rec.specs);
      const Image ir_stored = read_png((root / rec.ir_out).string());
      const Image vi_stored = read_png((root / rec.vi_out).string());
      const bool ir_ok = quantize_to_bytes(ir_deg) ==
                         quantize_to_bytes(to_gray(ir_stored));
      const bool vi_ok = quantize_to_bytes(vi_deg) ==
                         quantize_to_bytes(to_rgb(vi_stored));
      if (!ir_ok || !vi_ok) report.mismatched.push_back(rec.key);
    } catch (const IoError& e) {
      report.missing.push_back(rec.key + " (" + e.what() + ")");
    }
  }
  return report;
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig config;
  config.pairs_dir = j.value("pairs_dir", std::string());
  config.out_dir = j.value("out_dir", std::string());
  if (j.contains("kinds")) {
    for (const nlohmann::json& kj : j.at("kinds")) {
      const std::string id = kj.get<std::string>();
      const auto kind = kind_from_id(id);
      if (!kind) throw std::invalid_argument("unknown degradation kind: " + id);
      config.kinds.push_back(*kind);
    }
  }
  if (j.contains("combos")) {
    for (const nlohmann::json& cj : j.at("combos")) {
      ComboEntry combo;
      combo.name = cj.at("name").get<std::string>();
      for (const nlohmann::json& kj : cj.at("kinds")) {
        const std::string id = kj.get<std::string>();
        const auto kind = kind_from_id(id);
        if (!kind)
          throw std::invalid_argument("unknown degradation kind: " + id);
        combo.kinds.push_back(*kind);
      }
      config.combos.push_back(std::move(combo));
    }
  }
  if (j.contains("levels")) config.levels = j.at("levels").get<std::vector<int>>();
  config.train_fraction = j.value("train_fraction", config.train_fraction);
  config.global_seed = j.value("global_seed", config.global_seed);
  config.jitter = j.value("jitter", config.jitter);
  config.threads = j.value("threads", config.threads);
  return config;
}

SynthConfig load_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  nlohmann::json j;
  in >> j;
  return synth_config_from_json(j);
}

}  // namespace degradekit
