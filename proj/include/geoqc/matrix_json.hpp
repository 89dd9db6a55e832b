#pragma once

#include <nlohmann/json.hpp>

#include "geoqc/su_algebra.hpp"

namespace geoqc {

// Repo-wide matrix schema: {"dim": d, "re": [[...]], "im": [[...]]},
// row-major nesting.
nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);

}  // namespace geoqc
