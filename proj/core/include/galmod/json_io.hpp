#pragma once

#include <string>
#include <optional>

#include "galmod/datum.hpp"
#include "galmod/errors.hpp"
#include "galmod/decompose.hpp"
#include "galmod/local_fields.hpp"
#include "galmod/selftest.hpp"
#include "galmod/synth.hpp"

namespace galmod {

/// Malformed or schema-violating JSON; the message names the field path and position.
class SchemaError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

[[nodiscard]] std::string datum_to_json(const GaloisDatum& d);
[[nodiscard]] GaloisDatum datum_from_json(const std::string& text);

/// "-inf", "n/a" or the integer value.
[[nodiscard]] std::string level_label(const std::optional<Level>& m);

[[nodiscard]] std::string decomposition_to_json(const Decomposition& dec);
/// Coordinates are checked against the prime p.
[[nodiscard]] Decomposition decomposition_from_json(const std::string& text, unsigned p);

[[nodiscard]] std::string params_to_json(const SynthParams& params);
[[nodiscard]] SynthParams params_from_json(const std::string& text);

/// Sidecar written next to a synthesized datum.
[[nodiscard]] std::string sidecar_to_json(const SynthParams& params,
                                          const SynthExpectation& expected);
[[nodiscard]] SynthExpectation sidecar_expectation_from_json(const std::string& text);

[[nodiscard]] std::string tower_spec_to_json(const TowerSpec& spec);
[[nodiscard]] TowerSpec tower_spec_from_json(const std::string& text);

[[nodiscard]] std::string report_to_json(const Report& report);

/// {"p", "n", "sigma"}: a raw module for the jordan command.
[[nodiscard]] std::string module_to_json(const GModule& m);
[[nodiscard]] GModule module_from_json(const std::string& text);

[[nodiscard]] std::string acceptance_to_json(const std::vector<CriterionResult>& results);

}  // namespace galmod
