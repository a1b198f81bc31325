#pragma once

#include <string_view>

#include <json.hpp>

#include "penduflow/sim.hpp"

namespace penduflow {

/// A scenario together with the integrator settings for both models.
struct RunSettings {
    Scenario scenario;
    FullRunOptions full;
    SlowRunOptions slow;
};

/// Complete JSON document for `rs`; every overridable key is present.
nlohmann::json to_json(const RunSettings& rs);

/// Strict inverse of to_json. Unknown keys and wrongly typed values throw
/// std::invalid_argument naming the dotted key; absent keys keep defaults.
RunSettings settings_from_json(const nlohmann::json& doc);

/// Recursively merges `patch` into `base`. Every key of `patch` must already
/// exist in `base`, except below "initial" where the whole object is replaced
/// (switching between mechanical and slow initial conditions).
void merge_strict(nlohmann::json& base, const nlohmann::json& patch);

/// Applies "dotted.key=value". The value is read as JSON when it parses
/// (numbers, booleans), otherwise as a string. Unknown keys throw.
void apply_override(nlohmann::json& doc, std::string_view assignment);

}  // namespace penduflow
