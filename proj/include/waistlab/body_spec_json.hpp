#pragma once

// Canonical JSON form of BodySpec: an object with a "kind" tag plus numeric
// fields and arrays. Unknown keys are rejected by name. An infinite
// transverse radius is written by omitting the key.

#include "waistlab/convex_bodies.hpp"

#include <json.hpp>

#include <set>
#include <string>

namespace waistlab {

using json = nlohmann::ordered_json;

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) throw InvalidSpec(it.key(), "unknown key");
  }
}

inline const json& require_key(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidSpec(key, "missing");
  return *it;
}

inline double get_number(const json& j, const char* key) {
  const json& v = require_key(j, key);
  if (!v.is_number()) throw InvalidSpec(key, "must be a number");
  return v.get<double>();
}

inline double get_number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? get_number(j, key) : fallback;
}

inline int get_int(const json& j, const char* key) {
  const json& v = require_key(j, key);
  if (!v.is_number_integer()) throw InvalidSpec(key, "must be an integer");
  return v.get<int>();
}

inline std::vector<double> get_vector(const json& j, const char* key) {
  const json& v = require_key(j, key);
  if (!v.is_array()) throw InvalidSpec(key, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw InvalidSpec(key, "must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline std::vector<std::vector<double>> get_matrix(const json& j, const char* key) {
  const json& v = require_key(j, key);
  if (!v.is_array()) throw InvalidSpec(key, "must be an array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& row : v) {
    if (!row.is_array()) throw InvalidSpec(key, "must be an array of arrays");
    std::vector<double> r;
    for (const auto& e : row) {
      if (!e.is_number()) throw InvalidSpec(key, "entries must be numbers");
      r.push_back(e.get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace detail

inline BodySpec body_spec_from_json(const json& j);

inline BodySpecPtr body_spec_ptr_from_json(const json& j) {
  return std::make_shared<const BodySpec>(body_spec_from_json(j));
}

inline BodySpec body_spec_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw InvalidSpec("body", "must be a JSON object");
  const json& kind_v = require_key(j, "kind");
  if (!kind_v.is_string()) throw InvalidSpec("kind", "must be a string");
  const std::string kind = kind_v.get<std::string>();
  if (kind == "ball") {
    reject_unknown(j, {"kind", "dim", "radius"});
    return {spec::Ball{get_int(j, "dim"), get_number_or(j, "radius", 1.0)}};
  }
  if (kind == "cube") {
    reject_unknown(j, {"kind", "dim", "half_width"});
    return {spec::Cube{get_int(j, "dim"), get_number_or(j, "half_width", 1.0)}};
  }
  if (kind == "cross_polytope") {
    reject_unknown(j, {"kind", "dim", "radius"});
    return {spec::CrossPolytope{get_int(j, "dim"), get_number_or(j, "radius", 1.0)}};
  }
  if (kind == "ellipsoid") {
    reject_unknown(j, {"kind", "semiaxes"});
    return {spec::Ellipsoid{get_vector(j, "semiaxes")}};
  }
  if (kind == "slab_intersection") {
    reject_unknown(j, {"kind", "slabs"});
    const json& arr = require_key(j, "slabs");
    if (!arr.is_array()) throw InvalidSpec("slabs", "must be an array");
    spec::SlabIntersection s;
    for (const auto& e : arr) {
      if (!e.is_object()) throw InvalidSpec("slabs", "entries must be objects");
      reject_unknown(e, {"normal", "width"});
      s.slabs.push_back({get_vector(e, "normal"), get_number(e, "width")});
    }
    return {s};
  }
  if (kind == "product") {
    reject_unknown(j, {"kind", "low", "rest", "dim"});
    spec::Product p;
    p.low = body_spec_ptr_from_json(require_key(j, "low"));
    if (j.contains("rest") && !j["rest"].is_null()) p.rest = body_spec_ptr_from_json(j["rest"]);
    if (j.contains("dim")) p.dim = get_int(j, "dim");
    return {p};
  }
  if (kind == "vertex_polytope") {
    reject_unknown(j, {"kind", "vertices", "symmetric"});
    spec::VertexPolytope v;
    v.vertices = get_matrix(j, "vertices");
    if (j.contains("symmetric")) {
      if (!j["symmetric"].is_boolean()) throw InvalidSpec("symmetric", "must be a boolean");
      v.symmetric = j["symmetric"].get<bool>();
    }
    return {v};
  }
  if (kind == "truncated_cylinder") {
    reject_unknown(j, {"kind", "dim", "core", "basis", "transverse_radius", "truncation_radius"});
    spec::TruncatedCylinder c;
    c.dim = get_int(j, "dim");
    c.core = body_spec_ptr_from_json(require_key(j, "core"));
    if (j.contains("basis")) c.basis = get_matrix(j, "basis");
    c.transverse_radius = get_number_or(j, "transverse_radius", kInf);
    c.truncation_radius = get_number_or(j, "truncation_radius", kDefaultTruncation);
    return {c};
  }
  throw InvalidSpec("kind", "unknown body kind '" + kind + "'");
}

inline json to_json(const BodySpec& s);

namespace detail {
struct SpecWriter {
  json operator()(const spec::Ball& b) const { return {{"kind", "ball"}, {"dim", b.dim}, {"radius", b.radius}}; }
  json operator()(const spec::Cube& c) const {
    return {{"kind", "cube"}, {"dim", c.dim}, {"half_width", c.half_width}};
  }
  json operator()(const spec::CrossPolytope& c) const {
    return {{"kind", "cross_polytope"}, {"dim", c.dim}, {"radius", c.radius}};
  }
  json operator()(const spec::Ellipsoid& e) const { return {{"kind", "ellipsoid"}, {"semiaxes", e.semiaxes}}; }
  json operator()(const spec::SlabIntersection& s) const {
    json slabs = json::array();
    for (const auto& sl : s.slabs) slabs.push_back({{"normal", sl.normal}, {"width", sl.width}});
    return {{"kind", "slab_intersection"}, {"slabs", slabs}};
  }
  json operator()(const spec::Product& p) const {
    json j = {{"kind", "product"}, {"low", to_json(*p.low)}};
    j["rest"] = p.rest ? to_json(*p.rest) : json(nullptr);
    if (p.dim != 0) j["dim"] = p.dim;
    return j;
  }
  json operator()(const spec::VertexPolytope& v) const {
    return {{"kind", "vertex_polytope"}, {"vertices", v.vertices}, {"symmetric", v.symmetric}};
  }
  json operator()(const spec::TruncatedCylinder& c) const {
    json j = {{"kind", "truncated_cylinder"}, {"dim", c.dim}, {"core", to_json(*c.core)}};
    if (!c.basis.empty()) j["basis"] = c.basis;
    if (std::isfinite(c.transverse_radius)) j["transverse_radius"] = c.transverse_radius;
    j["truncation_radius"] = c.truncation_radius;
    return j;
  }
};
}  // namespace detail

inline json to_json(const BodySpec& s) { return std::visit(detail::SpecWriter{}, s.body); }

inline BodyOracle construct_body(const json& j) { return construct_body(body_spec_from_json(j)); }

}  // namespace waistlab
