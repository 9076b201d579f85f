#pragma once

// JSON DSL for maps, fields and soliton pairs. Requires nlohmann/json (vendor/json.hpp).
//
// DiffeoSpec: {"type": "identity" | "rotation" (alpha) | "mobius" (a, b, c, d) | "dilation" (t) |
//              "translation" (t) | "exp_field" (field, t) | "psi_t" (t) | "compose" (items) |
//              "nonsmooth_pair" (minus, plus)}
// FieldSpec:  {"cos": [c0, c1, ...], "sin": [s1, ...]} or
//             {"line_bump": {"center": c, "width": w, "height": h}} (Gaussian line density)
// SolitonSpec: {"minus": DiffeoSpec, "plus": DiffeoSpec} or {"map": DiffeoSpec}

#include <json.hpp>
#include <string>

#include "circle_diffeo.hpp"
#include "solitons.hpp"

namespace solnet {

using json = nlohmann::json;

namespace detail {

inline const json& field_of(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::input, std::string("missing key '") + key + "'");
  return j.at(key);
}

inline double number_of(const json& j, const char* key) {
  const json& v = field_of(j, key);
  if (!v.is_number()) fail(ErrorKind::input, std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

inline std::vector<double> numbers_of(const json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  const json& v = j.at(key);
  if (!v.is_array()) fail(ErrorKind::input, std::string("key '") + key + "' must be an array");
  for (const json& x : v) {
    if (!x.is_number()) fail(ErrorKind::input, std::string("key '") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace detail

inline VectorField gaussian_line_field(double center, double width, double height) {
  require(width > 0, ErrorKind::input, "line_bump width must be positive");
  LineProfile lp;
  lp.g = local_fn([center, width, height](auto t) {
    auto u = (t - center) * (1.0 / width);
    return height * exp(-1.0 * u * u);
  });
  lp.t_lo = center - 12.0 * width;
  lp.t_hi = center + 12.0 * width;
  return field_from_line(lp, "line_bump", SupportKind::interval);
}

inline VectorField parse_field(const json& j) {
  if (!j.is_object()) fail(ErrorKind::input, "field spec must be an object");
  if (j.contains("line_bump")) {
    const json& b = j.at("line_bump");
    return gaussian_line_field(detail::number_of(b, "center"), detail::number_of(b, "width"), detail::number_of(b, "height"));
  }
  if (!j.contains("cos") && !j.contains("sin")) fail(ErrorKind::input, "field spec needs 'cos'/'sin' or 'line_bump'");
  std::vector<double> c = detail::numbers_of(j, "cos"), s = detail::numbers_of(j, "sin");
  if (c.empty()) c.push_back(0.0);
  return VectorField::trig(c, s);
}

inline CircleMap parse_diffeo(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    fail(ErrorKind::input, "diffeo spec needs a string 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "identity") return identity_map();
  if (type == "rotation") return rotation(detail::number_of(j, "alpha"));
  if (type == "mobius")
    return mobius_map(MobiusElement::normalized(detail::number_of(j, "a"), detail::number_of(j, "b"),
                                                detail::number_of(j, "c"), detail::number_of(j, "d")));
  if (type == "dilation") return dilation(detail::number_of(j, "t"));
  if (type == "translation") return translation(detail::number_of(j, "t"));
  if (type == "psi_t") return psi_t(detail::number_of(j, "t"));
  if (type == "exp_field") return exp_field(parse_field(detail::field_of(j, "field")), detail::number_of(j, "t"));
  if (type == "compose") {
    const json& items = detail::field_of(j, "items");
    if (!items.is_array() || items.empty()) fail(ErrorKind::input, "'items' must be a non-empty array");
    CircleMap out;
    for (const json& it : items) out = compose(out, parse_diffeo(it));
    return out;
  }
  if (type == "nonsmooth_pair")
    return NonsmoothDiffeo::from_pieces(parse_diffeo(detail::field_of(j, "minus")), parse_diffeo(detail::field_of(j, "plus"))).map();
  fail(ErrorKind::input, "unknown diffeo type '" + type + "'");
}

inline NonsmoothDiffeo parse_soliton(const json& j) {
  if (j.contains("map")) return NonsmoothDiffeo::from_map(parse_diffeo(j.at("map")));
  return NonsmoothDiffeo::from_pieces(parse_diffeo(detail::field_of(j, "minus")), parse_diffeo(detail::field_of(j, "plus")));
}

}  // namespace solnet
