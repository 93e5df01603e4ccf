#include "congrulab/body_json.hpp"

#include "congrulab/error.hpp"

#include <algorithm>
#include <cmath>

namespace congrulab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::SpecParseError, "field '" + field + "': " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "not finite");
  return v;
}

Vec4 vec4(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4) fail(path, "expected an array of 4 numbers");
  Vec4 v;
  for (int i = 0; i < 4; ++i) v[i] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Orthogonal4 orthogonal(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 16) fail(path, "expected a row-major array of 16 numbers");
  Mat4 m;
  for (int k = 0; k < 16; ++k) m(k / 4, k % 4) = number(j[k], path + "[" + std::to_string(k) + "]");
  try {
    return Orthogonal4(m);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

EllipsoidShape ellipsoid_shape(const json& shape, const std::string& path) {
  EllipsoidShape e{vec4(require(shape, "semiaxes", path), path + ".semiaxes"), Orthogonal4::identity()};
  if (shape.contains("orientation")) e.orientation = orthogonal(shape["orientation"], path + ".orientation");
  if (!(e.semiaxes.minCoeff() > 0.0)) fail(path + ".semiaxes", "semiaxes must be positive");
  return e;
}

json ellipsoid_json(const Vec4& semiaxes, const Mat4& orientation) {
  json j;
  j["semiaxes"] = vec_to_json(semiaxes);
  json rot = json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) rot.push_back(orientation(r, c));
  j["orientation"] = rot;
  return j;
}

}  // namespace

json vec_to_json(const Vec4& v) { return json::array({v[0], v[1], v[2], v[3]}); }

ParsedBody body_from_json(const json& spec) {
  std::vector<std::string> warnings;
  const std::string kind_name = [&] {
    const json& k = require(spec, "kind", "");
    if (!k.is_string()) fail("kind", "expected \"convex\" or \"star\"");
    return k.get<std::string>();
  }();
  if (kind_name != "convex" && kind_name != "star") fail("kind", "expected \"convex\" or \"star\"");
  const BodyKind kind = kind_name == "star" ? BodyKind::Star : BodyKind::Convex;

  const json& shape = require(spec, "shape", "");
  const json& type_field = require(shape, "type", "shape");
  if (!type_field.is_string()) fail("shape.type", "expected a string");
  const std::string type = type_field.get<std::string>();

  auto build = [&]() -> Body4 {
    try {
      if (type == "polytope") {
        const json& verts = require(shape, "vertices", "shape");
        if (!verts.is_array()) fail("shape.vertices", "expected an array of vertices");
        std::vector<Vec4> v;
        std::size_t dropped = 0;
        for (std::size_t i = 0; i < verts.size(); ++i) {
          const Vec4 p = vec4(verts[i], "shape.vertices[" + std::to_string(i) + "]");
          const bool dup = std::any_of(v.begin(), v.end(), [&](const Vec4& q) {
            return (p - q).norm() <= 1e-12 * (1.0 + q.norm());
          });
          if (dup) {
            ++dropped;
            continue;
          }
          v.push_back(p);
        }
        if (dropped > 0) warnings.push_back("removed " + std::to_string(dropped) + " duplicate vertices");
        return Body4::polytope(std::move(v));
      }
      if (type == "ellipsoid") {
        const EllipsoidShape e = ellipsoid_shape(shape, "shape");
        return Body4::ellipsoid(e.semiaxes, e.orientation);
      }
      if (type == "zonal_bump") {
        if (kind == BodyKind::Star) {
          throw Error(ErrorCode::UnsupportedShape, "zonal_bump bodies have no radial evaluation");
        }
        const EllipsoidShape base = ellipsoid_shape(require(shape, "base", "shape"), "shape.base");
        const double eps = number(require(shape, "epsilon", "shape"), "shape.epsilon");
        const json& terms = require(shape, "terms", "shape");
        if (!terms.is_array()) fail("shape.terms", "expected an array");
        std::vector<ZonalTerm> parsed;
        for (std::size_t i = 0; i < terms.size(); ++i) {
          const std::string p = "shape.terms[" + std::to_string(i) + "]";
          ZonalTerm t{vec4(require(terms[i], "pole", p), p + ".pole"), {}};
          const json& c = require(terms[i], "coefficients", p);
          if (!c.is_array() || c.empty()) fail(p + ".coefficients", "expected a nonempty array");
          for (std::size_t k = 0; k < c.size(); ++k)
            t.coefficients.push_back(number(c[k], p + ".coefficients[" + std::to_string(k) + "]"));
          parsed.push_back(std::move(t));
        }
        return Body4::zonal_bump(base, eps, std::move(parsed));
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SpecParseError) throw;
      fail("shape", e.what());
    }
    fail("shape.type", "unknown shape type '" + type + "'");
  };
  Body4 body = build();

  if (spec.contains("transforms")) {
    const json& chain = spec["transforms"];
    if (!chain.is_array()) fail("transforms", "expected an array");
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const std::string p = "transforms[" + std::to_string(i) + "]";
      const json& step = chain[i];
      if (!step.is_object() || step.size() != 1) fail(p, "expected {\"rot\": [...]} or {\"shift\": [...]}");
      if (step.contains("rot")) {
        body = body.transformed(orthogonal(step["rot"], p + ".rot"));
      } else if (step.contains("shift")) {
        body = body.translated(vec4(step["shift"], p + ".shift"));
      } else {
        fail(p, "expected {\"rot\": [...]} or {\"shift\": [...]}");
      }
    }
  }
  if (kind == BodyKind::Star) {
    if (!body.contains_origin_interior()) {
      throw Error(ErrorCode::OriginOutside, "star body must contain the origin in its interior");
    }
    body = body.with_kind(BodyKind::Star);
  }
  return {body, std::move(warnings)};
}

ParsedBody parse_body(const std::string& text) {
  json spec;
  try {
    spec = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n');
    const auto last_nl = text.rfind('\n', byte == 0 ? 0 : byte - 1);
    const std::size_t column = last_nl == std::string::npos ? byte : byte - last_nl - 1;
    throw Error(ErrorCode::SpecParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what());
  }
  return body_from_json(spec);
}

json canonical_json(const Body4& body) {
  json j;
  j["kind"] = to_string(body.kind());
  json transforms = json::array();
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        json shape;
        if constexpr (std::is_same_v<T, PolytopeShape>) {
          shape["type"] = "polytope";
          json verts = json::array();
          for (const auto& v : body.vertices()) verts.push_back(vec_to_json(v));
          shape["vertices"] = verts;
        } else {
          if (!body.offset().isZero(0.0)) transforms.push_back({{"shift", vec_to_json(body.offset())}});
          if constexpr (std::is_same_v<T, EllipsoidShape>) {
            shape = ellipsoid_json(s.semiaxes, body.linear() * s.orientation.matrix());
            shape["type"] = "ellipsoid";
          } else {
            shape["type"] = "zonal_bump";
            shape["base"] = ellipsoid_json(s.base.semiaxes, body.linear() * s.base.orientation.matrix());
            shape["epsilon"] = s.epsilon;
            json terms = json::array();
            for (const auto& t : s.terms) {
              terms.push_back({{"pole", vec_to_json(body.linear() * t.pole)}, {"coefficients", t.coefficients}});
            }
            shape["terms"] = terms;
          }
        }
        j["shape"] = shape;
      },
      body.shape());
  j["transforms"] = transforms;
  return j;
}

}  // namespace congrulab
