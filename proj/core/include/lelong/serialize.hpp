#pragma once

#include <nlohmann/json.hpp>

#include "lelong/current_model.hpp"

namespace lelong {

/// JSON has no infinities; non-finite values become "inf", "-inf" or "nan".
nlohmann::json json_number(double x);

/// Round-trippable description in the input schema.
nlohmann::json describe(const ModelCurrent& current);
nlohmann::json describe(const Weight& weight);

}  // namespace lelong
