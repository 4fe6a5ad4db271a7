#pragma once

#include <string>

#include "lips/geometry.hpp"

namespace lips {

/// @brief Loads an ankle geometry from its JSON description.
///
/// Recognized keys: L1, L2 (number or "auto"), r1, a1, a2, p1_neutral,
/// p2_neutral, q_limits, chi_limits. "auto" resolves L2 by closing side 1 at
/// the neutral pose with the crank horizontal and requires side 2 to agree.
/// The loaded geometry is validated before being returned. Throws
/// SyntaxError for malformed JSON and SchemaError for unknown, missing, or
/// mistyped keys.
AnkleGeometry load_linkage_config(const std::string& text);

/// @brief Serializes a geometry back to the JSON schema with explicit L2.
std::string dump_linkage_config(const AnkleGeometry& geom);

}  // namespace lips
