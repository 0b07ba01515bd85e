#include "degradekit/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <regex>

#include "degradekit/rng.hpp"

namespace degradekit {

PromptParseError::PromptParseError(const std::string& msg,
                                   std::string nearest_id,
                                   std::string nearest_pattern)
    : std::runtime_error(msg),
      nearest_template_id(std::move(nearest_id)),
      nearest_template_pattern(std::move(nearest_pattern)) {}

namespace {

const std::vector<std::string>& openers() {
  static const std::vector<std::string> v = {
      "We are performing infrared and visible image fusion",
      "We are fusing infrared and visible images",
      "We are conducting infrared and visible image fusion",
      "We are carrying out infrared and visible image fusion",
      "We are working on infrared and visible image fusion",
      "We are running an infrared and visible image fusion task",
  };
  return v;
}

std::vector<PromptTemplate> build_bank() {
  std::vector<PromptTemplate> bank;
  char id[32];

  // The first entry of each arity is the canonical phrasing.
  const std::vector<std::string> single_verbs = {
      "suffers from", "is affected by", "is corrupted by",
      "is degraded by", "contains",     "exhibits",
  };
  int n = 0;
  for (const std::string& verb : single_verbs) {
    for (const std::string& opener : openers()) {
      std::snprintf(id, sizeof(id), "single-%03d", ++n);
      bank.push_back({id,
                      opener + ", where the {modality} modality " + verb +
                          " a grade-{severity} {kind}.",
                      PromptArity::single});
    }
  }

  const std::vector<std::string> pair_verbs = {
      "handle", "address", "remove",   "fix",
      "mitigate", "correct", "suppress", "reduce",
  };
  n = 0;
  for (const std::string& verb : pair_verbs) {
    for (const std::string& opener : openers()) {
      std::snprintf(id, sizeof(id), "pair-%03d", ++n);
      bank.push_back(
          {id,
           opener + ". Please " + verb +
               " a grade-{severity_a} {kind_a} in the {modality_a} modality, "
               "and a grade-{severity_b} {kind_b} in the {modality_b} "
               "modality.",
           PromptArity::composite_two});
    }
  }

  const std::vector<std::string> combo_verbs = {
      "address", "handle", "remove", "fix", "mitigate", "correct",
  };
  n = 0;
  for (const std::string& verb : combo_verbs) {
    for (const std::string& opener : openers()) {
      std::snprintf(id, sizeof(id), "combo-%03d", ++n);
      bank.push_back({id,
                      opener + ". Please " + verb +
                          " level-{severity} {kind_a} and {kind_b} in the "
                          "{modality} modality.",
                      PromptArity::composite_same_modality});
    }
  }
  return bank;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string normalize(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_space = true;  // also trims leading whitespace
  for (char raw : text) {
    const unsigned char c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      if (!in_space) out.push_back(' ');
      in_space = true;
    } else {
      out.push_back(static_cast<char>(std::tolower(c)));
      in_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string regex_escape(const std::string& s) {
  static const std::string special = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// Display names and accepted synonyms, all lowercase.
const std::vector<std::pair<std::string, DegradationKind>>& kind_names() {
  static const std::vector<std::pair<std::string, DegradationKind>> names = [] {
    std::vector<std::pair<std::string, DegradationKind>> v;
    for (const KindInfo& info : kind_registry()) v.push_back({lower(info.display), info.kind});
    using K = DegradationKind;
    v.push_back({"low light", K::low_light});
    v.push_back({"lowlight", K::low_light});
    v.push_back({"overexposure", K::over_exposure});
    v.push_back({"over exposure", K::over_exposure});
    v.push_back({"gaussian noise", K::gauss_noise});
    v.push_back({"gauss noise", K::gauss_noise});
    v.push_back({"low contrast", K::low_contrast});
    v.push_back({"motion blur", K::blur});
    return v;
  }();
  return names;
}

std::string kind_alternation() {
  std::vector<std::string> names;
  for (const auto& [name, kind] : kind_names()) names.push_back(name);
  // Longest first so composite names win over their components.
  std::sort(names.begin(), names.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  std::string alt = "(";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) alt += "|";
    alt += regex_escape(names[i]);
  }
  alt += ")";
  return alt;
}

DegradationKind kind_from_name(const std::string& name) {
  for (const auto& [n, kind] : kind_names())
    if (n == name) return kind;
  throw PromptParseError("unknown degradation name: " + name, "", "");
}

struct CompiledTemplate {
  const PromptTemplate* tpl;
  std::regex re;
  std::vector<std::string> slots;  // capture order
  std::string skeleton;            // normalized pattern, slots blanked
};

std::regex build_regex(const std::string& pattern,
                       std::vector<std::string>& slots) {
  const std::string norm = normalize(pattern);
  std::string re;
  std::size_t pos = 0;
  while (pos < norm.size()) {
    const std::size_t open = norm.find('{', pos);
    if (open == std::string::npos) {
      re += regex_escape(norm.substr(pos));
      break;
    }
    re += regex_escape(norm.substr(pos, open - pos));
    const std::size_t close = norm.find('}', open);
    const std::string slot = norm.substr(open + 1, close - open - 1);
    slots.push_back(slot);
    if (slot.rfind("modality", 0) == 0) {
      re += "(infrared|visible)";
    } else if (slot.rfind("severity", 0) == 0) {
      re += "([0-9]{1,3})";
    } else {
      re += kind_alternation();
    }
    pos = close + 1;
  }
  return std::regex(re, std::regex::ECMAScript);
}

const std::vector<CompiledTemplate>& compiled_bank() {
  static const std::vector<CompiledTemplate> compiled = [] {
    std::vector<CompiledTemplate> v;
    for (const PromptTemplate& tpl : template_bank()) {
      CompiledTemplate ct;
      ct.tpl = &tpl;
      ct.re = build_regex(tpl.pattern, ct.slots);
      std::string skel = normalize(tpl.pattern);
      // Blank the slot markers for the nearest-template distance.
      std::string cleaned;
      bool in_slot = false;
      for (char c : skel) {
        if (c == '{') in_slot = true;
        else if (c == '}') in_slot = false;
        else if (!in_slot) cleaned.push_back(c);
      }
      ct.skeleton = cleaned;
      v.push_back(std::move(ct));
    }
    return v;
  }();
  return compiled;
}

int levenshtein(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

int parse_level(const std::string& digits) {
  const int level = std::stoi(digits);
  if (level < 1 || level > 10)
    throw std::invalid_argument("severity level out of range: " + digits);
  return level;
}

std::string modality_display(Modality m) {
  return m == Modality::infrared ? "infrared" : "visible";
}

std::optional<DegradationKind> composite_of(DegradationKind a,
                                            DegradationKind b) {
  for (const KindInfo& info : kind_registry()) {
    if (info.components.size() != 2) continue;
    if ((info.components[0] == a && info.components[1] == b) ||
        (info.components[0] == b && info.components[1] == a))
      return info.kind;
  }
  return std::nullopt;
}

std::string substitute(const std::string& pattern,
                       const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    const std::size_t open = pattern.find('{', pos);
    if (open == std::string::npos) {
      out += pattern.substr(pos);
      break;
    }
    out += pattern.substr(pos, open - pos);
    const std::size_t close = pattern.find('}', open);
    out += values.at(pattern.substr(open + 1, close - open - 1));
    pos = close + 1;
  }
  return out;
}

const PromptTemplate& template_by_id(const std::string& id) {
  for (const PromptTemplate& tpl : template_bank())
    if (tpl.id == id) return tpl;
  throw std::invalid_argument("unknown template id: " + id);
}

std::string render_with(const PromptTemplate& tpl,
                        const std::vector<DegradationSpec>& specs) {
  for (const DegradationSpec& s : specs) {
    if (s.level < 1 || s.level > 10)
      throw std::invalid_argument("severity level must be in [1, 10]");
  }
  std::map<std::string, std::string> values;
  switch (tpl.arity) {
    case PromptArity::single: {
      if (specs.size() != 1)
        throw std::invalid_argument("template expects exactly one degradation");
      values["modality"] = modality_display(specs[0].modality);
      values["severity"] = std::to_string(specs[0].level);
      values["kind"] = kind_info(specs[0].kind).display;
      break;
    }
    case PromptArity::composite_two: {
      if (specs.size() != 2)
        throw std::invalid_argument("template expects exactly two degradations");
      values["modality_a"] = modality_display(specs[0].modality);
      values["severity_a"] = std::to_string(specs[0].level);
      values["kind_a"] = kind_info(specs[0].kind).display;
      values["modality_b"] = modality_display(specs[1].modality);
      values["severity_b"] = std::to_string(specs[1].level);
      values["kind_b"] = kind_info(specs[1].kind).display;
      break;
    }
    case PromptArity::composite_same_modality: {
      if (specs.size() == 1) {
        const KindInfo& info = kind_info(specs[0].kind);
        if (info.components.size() != 2)
          throw std::invalid_argument(
              "shared-severity template needs a composite kind or two specs");
        values["kind_a"] = kind_info(info.components[0]).display;
        values["kind_b"] = kind_info(info.components[1]).display;
        values["severity"] = std::to_string(specs[0].level);
        values["modality"] = modality_display(specs[0].modality);
      } else if (specs.size() == 2) {
        if (specs[0].modality != specs[1].modality)
          throw std::invalid_argument(
              "shared-severity template needs a single modality");
        if (specs[0].level != specs[1].level)
          throw std::invalid_argument(
              "shared-severity template shares one level across both kinds");
        if (composite_of(specs[0].kind, specs[1].kind))
          throw std::invalid_argument(
              "this kind pair is a registered composite kind; pass one spec");
        values["kind_a"] = kind_info(specs[0].kind).display;
        values["kind_b"] = kind_info(specs[1].kind).display;
        values["severity"] = std::to_string(specs[0].level);
        values["modality"] = modality_display(specs[0].modality);
      } else {
        throw std::invalid_argument("template expects one or two degradations");
      }
      break;
    }
  }
  return substitute(tpl.pattern, values);
}

bool compatible(const PromptTemplate& tpl,
                const std::vector<DegradationSpec>& specs) {
  switch (tpl.arity) {
    case PromptArity::single:
      return specs.size() == 1;
    case PromptArity::composite_two:
      return specs.size() == 2;
    case PromptArity::composite_same_modality:
      if (specs.size() == 1)
        return kind_info(specs[0].kind).components.size() == 2;
      return specs.size() == 2 && specs[0].modality == specs[1].modality &&
             specs[0].level == specs[1].level &&
             !composite_of(specs[0].kind, specs[1].kind);
  }
  return false;
}

}  // namespace

const std::vector<PromptTemplate>& template_bank() {
  static const std::vector<PromptTemplate> bank = build_bank();
  return bank;
}

const std::string& template_bank_version() {
  static const std::string version = "1";
  return version;
}

nlohmann::json template_bank_json() {
  nlohmann::json templates = nlohmann::json::array();
  for (const PromptTemplate& tpl : template_bank()) {
    const char* arity = tpl.arity == PromptArity::single ? "single"
                        : tpl.arity == PromptArity::composite_two
                            ? "composite_two"
                            : "composite_same_modality";
    templates.push_back(
        {{"id", tpl.id}, {"pattern", tpl.pattern}, {"arity", arity}});
  }
  nlohmann::json anchors;
  for (int level : {1, 4, 7, 10})
    anchors[std::to_string(level)] = severity_anchor_description(level);
  return nlohmann::json{{"version", template_bank_version()},
                        {"severity_anchors", anchors},
                        {"templates", templates}};
}

std::string render_prompt(const std::vector<DegradationSpec>& specs) {
  if (specs.empty() || specs.size() > 2)
    throw std::invalid_argument("render_prompt supports one or two degradations");
  return render_with(
      template_by_id(specs.size() == 1 ? "single-001" : "pair-001"), specs);
}

std::string render_prompt(const std::vector<DegradationSpec>& specs,
                          const std::string& template_id) {
  if (specs.empty() || specs.size() > 2)
    throw std::invalid_argument("render_prompt supports one or two degradations");
  return render_with(template_by_id(template_id), specs);
}

std::string render_prompt_seeded(const std::vector<DegradationSpec>& specs,
                                 std::uint64_t seed) {
  if (specs.empty() || specs.size() > 2)
    throw std::invalid_argument("render_prompt supports one or two degradations");
  std::vector<const PromptTemplate*> pool;
  for (const PromptTemplate& tpl : template_bank())
    if (compatible(tpl, specs)) pool.push_back(&tpl);
  if (pool.empty()) throw std::logic_error("no compatible template");
  SeededRng rng(seed);
  const auto idx = static_cast<std::size_t>(rng.uniform() * pool.size());
  return render_with(*pool[std::min(idx, pool.size() - 1)], specs);
}

std::vector<DegradationSpec> parse_prompt(const std::string& text) {
  const std::string norm = normalize(text);
  for (const CompiledTemplate& ct : compiled_bank()) {
    std::smatch m;
    if (!std::regex_match(norm, m, ct.re)) continue;

    std::map<std::string, std::string> got;
    for (std::size_t i = 0; i < ct.slots.size(); ++i) got[ct.slots[i]] = m[i + 1];

    const auto make_spec = [&](const std::string& modality,
                               const std::string& kind_name, int level) {
      DegradationSpec spec;
      spec.modality = modality_from_id(modality);
      spec.kind = kind_from_name(kind_name);
      spec.level = level;
      validate_spec(spec);
      return spec;
    };

    switch (ct.tpl->arity) {
      case PromptArity::single:
        return {make_spec(got.at("modality"), got.at("kind"),
                          parse_level(got.at("severity")))};
      case PromptArity::composite_two:
        return {make_spec(got.at("modality_a"), got.at("kind_a"),
                          parse_level(got.at("severity_a"))),
                make_spec(got.at("modality_b"), got.at("kind_b"),
                          parse_level(got.at("severity_b")))};
      case PromptArity::composite_same_modality: {
        const int level = parse_level(got.at("severity"));
        const DegradationKind a = kind_from_name(got.at("kind_a"));
        const DegradationKind b = kind_from_name(got.at("kind_b"));
        if (const auto comp = composite_of(a, b)) {
          DegradationSpec spec;
          spec.modality = modality_from_id(got.at("modality"));
          spec.kind = *comp;
          spec.level = level;
          validate_spec(spec);
          return {spec};
        }
        return {make_spec(got.at("modality"), got.at("kind_a"), level),
                make_spec(got.at("modality"), got.at("kind_b"), level)};
      }
    }
  }

  // Nothing matched; point at the closest-looking template.
  int best = std::numeric_limits<int>::max();
  const CompiledTemplate* nearest = nullptr;
  for (const CompiledTemplate& ct : compiled_bank()) {
    const int d = levenshtein(norm, ct.skeleton);
    if (d < best) {
      best = d;
      nearest = &ct;
    }
  }
  throw PromptParseError(
      "prompt does not match any known template; nearest template is '" +
          nearest->tpl->id + "': " + nearest->tpl->pattern,
      nearest->tpl->id, nearest->tpl->pattern);
}

std::string severity_anchor_description(int level) {
  switch (level) {
    case 1: return "barely perceptible degradation";
    case 2:
    case 3: return "mild degradation, between the level-1 and level-4 anchors";
    case 4: return "degradation begins to interfere with human scene understanding";
    case 5:
    case 6: return "moderate degradation, between the level-4 and level-7 anchors";
    case 7: return "degradation severely hinders human perception of the scene";
    case 8:
    case 9: return "strong degradation, between the level-7 and level-10 anchors";
    case 10: return "most useful information is completely obscured";
    default:
      throw std::invalid_argument("severity level must be in [1, 10]");
  }
}

}  // namespace degradekit
