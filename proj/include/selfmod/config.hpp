#pragma once

#include <string>

#include "selfmod/ecosystem.hpp"
#include "selfmod/scenarios.hpp"
#include "selfmod/toml.hpp"

namespace selfmod {

struct LoadedConfig {
  scenarios::ScenarioSuiteConfig scenarios;
  eco::EcosystemConfig ecosystem;
};

// Fills defaults, applies overrides from the document, rejects unknown keys
// and runs every scenario's ordering validation. Throws Error with code
// parse/config/invalid_scenario; the CLI maps all of these to exit code 1.
LoadedConfig config_from_document(const toml::Document& doc);

// Empty path loads pure defaults.
LoadedConfig load_config_file(const std::string& path);

// Sets `key` (full dotted path, e.g. "ecosystem.maintenance") to a scalar
// parsed from `value_text`. The key is checked against the schema when the
// document is loaded.
void apply_override(toml::Document& doc, const std::string& key,
                    const std::string& value_text);

}  // namespace selfmod
