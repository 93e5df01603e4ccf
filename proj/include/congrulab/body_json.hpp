#pragma once

#include "congrulab/bodies.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace congrulab {

struct ParsedBody {
  Body4 body;
  std::vector<std::string> warnings;
};

/// Parses a body spec
///   {kind, shape:{type, vertices | semiaxes, orientation? | base, epsilon, terms},
///    transforms:[{rot:[16]} | {shift:[4]}, ...]}.
/// Throws SpecParseError naming the line (for syntax errors) or the field.
ParsedBody parse_body(const std::string& text);
ParsedBody body_from_json(const nlohmann::json& spec);

/// Canonical form: polytope transforms folded into the vertices, smooth
/// bodies with the rotation folded into the orientation and poles and at most
/// one shift.
nlohmann::json canonical_json(const Body4& body);

nlohmann::json vec_to_json(const Vec4& v);

}  // namespace congrulab
