// degradekit CLI: degrade / synth / metrics / spectrum / prompt subcommands.
// stdout carries machine-parseable results only; diagnostics go to stderr.
// Exit codes: 0 success, 2 invalid arguments, 3 I/O failure, 4 prompt parse
// error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "degradekit/dataset.hpp"
#include "degradekit/degrade.hpp"
#include "degradekit/image.hpp"
#include "degradekit/losses.hpp"
#include "degradekit/png_io.hpp"
#include "degradekit/prompts.hpp"
#include "degradekit/signatures.hpp"
#include "degradekit/spectrum.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;
constexpr int kExitParse = 4;

json parse_json_arg(const std::string& arg) {
  // Inline JSON or a path to a JSON file.
  const std::string trimmed = arg.substr(arg.find_first_not_of(" \t\n"));
  if (!trimmed.empty() && (trimmed[0] == '{' || trimmed[0] == '['))
    return json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw degradekit::IoError("cannot open for reading: " + arg);
  json j;
  in >> j;
  return j;
}

std::vector<degradekit::DegradationSpec> specs_from_json_arg(
    const std::string& arg) {
  const json j = parse_json_arg(arg);
  std::vector<degradekit::DegradationSpec> specs;
  if (j.is_array())
    for (const json& sj : j) specs.push_back(degradekit::spec_from_json(sj));
  else
    specs.push_back(degradekit::spec_from_json(j));
  return specs;
}

degradekit::Image load_gray(const std::string& path) {
  return degradekit::luminance(degradekit::read_png(path));
}

degradekit::Image load_rgb(const std::string& path) {
  const degradekit::Image img = degradekit::read_png(path);
  if (img.is_rgb()) return img;
  degradekit::Image out(img.height, img.width, 3);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = img.data[i];
  return out;
}

struct DegradeArgs {
  std::string ir_path, vi_path, out_dir;
  std::string spec_arg, prompt_arg, config_arg;
  std::uint64_t seed = 0;
};

int run_degrade(const DegradeArgs& args) {
  const int given = (!args.spec_arg.empty()) + (!args.prompt_arg.empty()) +
                    (!args.config_arg.empty());
  if (given != 1) {
    std::cerr << "exactly one of --spec / --prompt / --config is required\n";
    return kExitInvalid;
  }

  std::vector<degradekit::DegradationSpec> specs;
  degradekit::SideMaps maps;
  if (!args.prompt_arg.empty()) {
    specs = degradekit::parse_prompt(args.prompt_arg);
  } else if (!args.spec_arg.empty()) {
    specs = specs_from_json_arg(args.spec_arg);
  } else {
    const json j = parse_json_arg(args.config_arg);
    for (const json& sj : j.at("specs"))
      specs.push_back(degradekit::spec_from_json(sj));
    if (j.contains("illumination_map"))
      maps.illumination = load_gray(j.at("illumination_map").get<std::string>());
    if (j.contains("depth_map"))
      maps.depth = load_gray(j.at("depth_map").get<std::string>());
    maps.sky_far_ramp = j.value("sky_far_ramp", false);
  }
  if (args.seed != 0) {
    for (std::size_t i = 0; i < specs.size(); ++i)
      specs[i].seed = args.seed + i;
  }
  for (degradekit::DegradationSpec& spec : specs)
    if (!spec.params)
      spec.params = degradekit::severity_to_params(spec.kind, spec.level,
                                                   spec.seed);

  const degradekit::Image ir = load_gray(args.ir_path);
  const degradekit::Image vi = load_rgb(args.vi_path);
  const auto [ir_out, vi_out] = degradekit::compose(ir, vi, specs, maps);

  fs::create_directories(args.out_dir);
  degradekit::write_png((fs::path(args.out_dir) / "ir_degraded.png").string(),
                        ir_out);
  degradekit::write_png((fs::path(args.out_dir) / "vi_degraded.png").string(),
                        vi_out);
  json out = json::array();
  for (const degradekit::DegradationSpec& spec : specs)
    out.push_back(degradekit::spec_to_json(spec));
  std::ofstream spec_out((fs::path(args.out_dir) / "spec.json").string());
  if (!spec_out) throw degradekit::IoError("cannot write spec.json");
  spec_out << out.dump(2) << '\n';
  std::cout << (fs::path(args.out_dir) / "spec.json").string() << '\n';
  return kExitOk;
}

int run_synth(const std::string& config_path, const std::string& pairs_dir,
              std::uint64_t seed_override, bool seed_given) {
  degradekit::SynthConfig config = degradekit::load_synth_config(config_path);
  if (!pairs_dir.empty()) config.pairs_dir = pairs_dir;
  if (seed_given) config.global_seed = seed_override;
  if (config.pairs_dir.empty()) {
    std::cerr << "pairs_dir missing (config key or --pairs)\n";
    return kExitInvalid;
  }
  const auto pairs = degradekit::scan_pairs(config.pairs_dir);
  const degradekit::DatasetManifest manifest =
      degradekit::synthesize(pairs, config);
  degradekit::save_manifest(manifest,
                            (fs::path(config.out_dir) / "manifest.json").string());

  std::size_t skipped = 0;
  for (const auto& rec : manifest.records) skipped += rec.skipped ? 1 : 0;
  std::cout << "records=" << (manifest.records.size() - skipped)
            << " skipped=" << skipped << '\n';
  if (manifest.partial) {
    std::cerr << "write failure: manifest flagged partial\n";
    return kExitIo;
  }
  return kExitOk;
}

int run_metrics(const std::string& fused_path, const std::string& ir_path,
                const std::string& vi_path, const std::string& format) {
  const degradekit::Image fused = degradekit::read_png(fused_path);
  const degradekit::Image ir = degradekit::read_png(ir_path);
  const degradekit::Image vi = degradekit::read_png(vi_path);

  const degradekit::LossReport losses = degradekit::total_loss(fused, ir, vi);
  const degradekit::Image fused_gray = degradekit::luminance(fused);
  json row{
      {"en", degradekit::entropy_metric(fused_gray)},
      {"sd", degradekit::sd_metric(fused_gray)},
      {"qabf", degradekit::qabf_metric(fused, ir, vi)},
      {"ssim", losses.l_ssim},
      {"l_int", losses.l_int},
      {"l_grad", losses.l_grad},
      {"l_color", losses.l_color},
      {"total", losses.total},
  };
  if (format == "csv") {
    const char* keys[] = {"en",    "sd",     "qabf",    "ssim",
                          "l_int", "l_grad", "l_color", "total"};
    std::string header, values;
    for (const char* key : keys) {
      if (!header.empty()) {
        header += ',';
        values += ',';
      }
      header += key;
      values += row.at(key).dump();
    }
    std::cout << header << '\n' << values << '\n';
  } else {
    std::cout << row.dump() << '\n';
  }
  return kExitOk;
}

int run_spectrum(const std::string& in_path, const std::string& out_dir) {
  const degradekit::Image img = load_gray(in_path);
  const degradekit::Spectrum spec = degradekit::dft2(img);
  const degradekit::SignatureVector sig = degradekit::signature(img);

  fs::create_directories(out_dir);
  const std::string stem = fs::path(in_path).stem().string();
  const fs::path png_path = fs::path(out_dir) / (stem + "_spectrum.png");
  const fs::path json_path = fs::path(out_dir) / (stem + "_signature.json");
  degradekit::write_png(png_path.string(),
                        degradekit::log_magnitude(spec, true));
  std::ofstream out(json_path.string());
  if (!out) throw degradekit::IoError("cannot write " + json_path.string());
  out << degradekit::signature_to_json(sig).dump(2) << '\n';
  std::cout << json_path.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"physics-based degradation synthesis and fusion metrics"};
  app.require_subcommand(1);

  DegradeArgs degrade_args;
  CLI::App* degrade = app.add_subcommand(
      "degrade", "apply a degradation spec or prompt to an IR/VI pair");
  degrade->add_option("--ir", degrade_args.ir_path, "clean infrared PNG")
      ->required();
  degrade->add_option("--vi", degrade_args.vi_path, "clean visible PNG")
      ->required();
  degrade->add_option("--out", degrade_args.out_dir, "output directory")
      ->required();
  degrade->add_option("--spec", degrade_args.spec_arg,
                      "degradation spec JSON (inline or file)");
  degrade->add_option("--prompt", degrade_args.prompt_arg,
                      "degradation prompt text");
  degrade->add_option("--config", degrade_args.config_arg,
                      "config JSON with specs and optional side maps");
  degrade->add_option("--seed", degrade_args.seed,
                      "rebase spec seeds (seed + index) when nonzero");

  std::string synth_config, synth_pairs;
  std::uint64_t synth_seed = 0;
  CLI::App* synth =
      app.add_subcommand("synth", "synthesize a degraded dataset");
  synth->add_option("--config", synth_config, "synthesis config JSON")
      ->required();
  synth->add_option("--pairs", synth_pairs,
                    "clean-pair directory (overrides config pairs_dir)");
  CLI::Option* synth_seed_opt =
      synth->add_option("--seed", synth_seed, "override global_seed");

  std::string m_fused, m_ir, m_vi, m_format = "json";
  CLI::App* metrics =
      app.add_subcommand("metrics", "fusion metrics and losses for one triple");
  metrics->add_option("--fused", m_fused, "fused PNG")->required();
  metrics->add_option("--ir", m_ir, "source infrared PNG")->required();
  metrics->add_option("--vi", m_vi, "source visible PNG")->required();
  metrics->add_option("--format", m_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string s_in, s_out;
  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "log-magnitude spectrum PNG plus signature JSON");
  spectrum->add_option("--in", s_in, "input PNG")->required();
  spectrum->add_option("--out", s_out, "output directory")->required();

  CLI::App* prompt =
      app.add_subcommand("prompt", "render, parse or dump the prompt grammar");
  std::string p_spec, p_template, p_text, p_bank_out;
  std::uint64_t p_seed = 0;
  CLI::App* p_render = prompt->add_subcommand("render", "spec JSON -> prompt");
  p_render->add_option("--spec", p_spec, "spec JSON (inline or file)")
      ->required();
  p_render->add_option("--template", p_template, "bank template id");
  CLI::Option* p_seed_opt = p_render->add_option(
      "--seed", p_seed, "pick a bank template by seed instead");
  CLI::App* p_parse = prompt->add_subcommand("parse", "prompt -> spec JSON");
  p_parse->add_option("--text", p_text, "prompt text")->required();
  CLI::App* p_bank = prompt->add_subcommand("bank", "dump the template bank");
  p_bank->add_option("--out", p_bank_out, "write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (degrade->parsed()) return run_degrade(degrade_args);
    if (synth->parsed())
      return run_synth(synth_config, synth_pairs, synth_seed,
                       synth_seed_opt->count() > 0);
    if (metrics->parsed()) return run_metrics(m_fused, m_ir, m_vi, m_format);
    if (spectrum->parsed()) return run_spectrum(s_in, s_out);
    if (prompt->parsed()) {
      if (p_render->parsed()) {
        const auto specs = specs_from_json_arg(p_spec);
        std::string text;
        if (!p_template.empty())
          text = degradekit::render_prompt(specs, p_template);
        else if (p_seed_opt->count() > 0)
          text = degradekit::render_prompt_seeded(specs, p_seed);
        else
          text = degradekit::render_prompt(specs);
        std::cout << text << '\n';
        return kExitOk;
      }
      if (p_parse->parsed()) {
        const auto specs = degradekit::parse_prompt(p_text);
        json out = json::array();
        for (const auto& spec : specs)
          out.push_back(degradekit::spec_to_json(spec));
        std::cout << out.dump() << '\n';
        return kExitOk;
      }
      if (p_bank->parsed()) {
        const json bank = degradekit::template_bank_json();
        if (p_bank_out.empty()) {
          std::cout << bank.dump(2) << '\n';
        } else {
          std::ofstream out(p_bank_out);
          if (!out) throw degradekit::IoError("cannot write " + p_bank_out);
          out << bank.dump(2) << '\n';
        }
        return kExitOk;
      }
      std::cerr << "prompt needs a render/parse/bank subcommand\n";
      return kExitInvalid;
    }
  } catch (const degradekit::PromptParseError& e) {
    std::cerr << "prompt parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const degradekit::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid JSON: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitInvalid;
}
