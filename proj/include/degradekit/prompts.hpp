#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "degradekit/degrade.hpp"

namespace degradekit {

// Template arities:
//   single                  -- one spec, one clause
//   composite_two           -- two specs, one clause each (modalities free)
//   composite_same_modality -- the shared-severity "type-A and type-B in the
//                              modality" form; renders either one composite
//                              kind or two same-level specs of one modality
enum class PromptArity { single, composite_two, composite_same_modality };

struct PromptTemplate {
  std::string id;
  std::string pattern;  // literal text with {modality}/{severity}/{kind}
                        // slots; composites use _a/_b suffixed slots
  PromptArity arity;
};

struct PromptParseError : std::runtime_error {
  PromptParseError(const std::string& msg, std::string nearest_id,
                   std::string nearest_pattern);
  std::string nearest_template_id;
  std::string nearest_template_pattern;
};

// The full rephrasing bank (>= 100 distinct patterns across the three
// arities). Index 0 of each arity is the canonical phrasing.
const std::vector<PromptTemplate>& template_bank();
const std::string& template_bank_version();
nlohmann::json template_bank_json();

// Canonical template for the arity of `specs`. Severity renders as
// "grade-N" ("level-N" in the shared-severity form).
std::string render_prompt(const std::vector<DegradationSpec>& specs);

// A specific bank template by id.
std::string render_prompt(const std::vector<DegradationSpec>& specs,
                          const std::string& template_id);

// Seeded pick among the bank templates compatible with `specs`.
std::string render_prompt_seeded(const std::vector<DegradationSpec>& specs,
                                 std::uint64_t seed);

// Inverse of render over the bank grammar, case- and whitespace-insensitive.
// Returned specs carry (modality, kind, level) with params unresolved.
// Unrecognized text throws PromptParseError carrying the nearest template;
// a recognized clause with a level outside 1..10 throws
// std::invalid_argument.
std::vector<DegradationSpec> parse_prompt(const std::string& text);

// Severity legend for levels 1..10; anchors at 1, 4, 7 and 10.
std::string severity_anchor_description(int level);

}  // namespace degradekit
