#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "poncelet/confocal.hpp"
#include "poncelet/conics.hpp"
#include "poncelet/error.hpp"
#include "poncelet/grid.hpp"
#include "poncelet/kasner.hpp"
#include "poncelet/poncelet.hpp"
#include "poncelet/sampling.hpp"

namespace poncelet {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Scene documents keep the raw numbers they were read with, so that
// write -> read -> write reproduces the file byte for byte.

struct LabeledConic {
  std::string label;
  Vector6d coefficients;  ///< (A, B, C, D, E, F)
  Conic conic() const { return Conic::from_coefficients(coefficients); }
};

struct LabeledPolygon {
  std::string label;
  std::vector<Eigen::Vector2d> vertices;
  Polygon polygon() const { return Polygon::from_xy(vertices); }
};

struct LabeledPoints {
  std::string label;
  std::vector<Eigen::Vector3d> points;  ///< homogeneous (x, y, w)
};

struct LabeledLines {
  std::string label;
  std::vector<Eigen::Vector3d> lines;  ///< (a, b, c) for ax + by + cw = 0
};

struct SceneDocument {
  std::vector<LabeledPolygon> polygons;
  std::vector<LabeledConic> conics;
  std::vector<LabeledPoints> points;
  std::vector<LabeledLines> lines;
  json metadata = json::object();

  const LabeledConic& conic(const std::string& label) const { return find(conics, label); }
  const LabeledPolygon& polygon(const std::string& label) const { return find(polygons, label); }
  const LabeledPoints& point_set(const std::string& label) const { return find(points, label); }
  const LabeledLines& line_set(const std::string& label) const { return find(lines, label); }

  bool has_conic(const std::string& label) const { return contains(conics, label); }
  bool has_polygon(const std::string& label) const { return contains(polygons, label); }

 private:
  template <class T>
  static const T& find(const std::vector<T>& v, const std::string& label) {
    for (const auto& x : v) {
      if (x.label == label) return x;
    }
    fail(Errc::MissingLabel, "scene has no object labeled '" + label + "'");
  }
  template <class T>
  static bool contains(const std::vector<T>& v, const std::string& label) {
    for (const auto& x : v) {
      if (x.label == label) return true;
    }
    return false;
  }
};

// ---------------------------------------------------------------------------
// canonical JSON

namespace detail {

inline void dump_canonical(const json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump_canonical(it.value(), out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // numeric leaves stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_primitive(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_canonical(j[i], out, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_canonical(j[i], out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) fail(Errc::SchemaError, "non-finite number in document");
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      std::string s(buf);
      // keep floats recognizable as floats on re-read
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

/// Sorted keys, two-space indentation, floats with 17 significant digits.
inline std::string canonical_dump(const json& j) {
  std::string out;
  detail::dump_canonical(j, out, 0);
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// SceneDocument <-> JSON

namespace detail {

template <int N>
json vec_json(const Eigen::Matrix<double, N, 1>& v) {
  json a = json::array();
  for (int i = 0; i < N; ++i) a.push_back(v[i]);
  return a;
}

template <int N>
Eigen::Matrix<double, N, 1> json_vec(const json& a) {
  if (!a.is_array() || a.size() != static_cast<std::size_t>(N)) {
    fail(Errc::SchemaError, "expected an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    if (!a[static_cast<std::size_t>(i)].is_number()) fail(Errc::SchemaError, "expected a number");
    v[i] = a[static_cast<std::size_t>(i)].get<double>();
    if (!std::isfinite(v[i])) fail(Errc::SchemaError, "non-finite number");
  }
  return v;
}

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(Errc::SchemaError, std::string("missing key '") + key + "'");
  return j.at(key);
}

}  // namespace detail

inline json to_json(const SceneDocument& d) {
  json j;
  j["schema"] = kSchemaVersion;
  j["metadata"] = d.metadata;
  j["polygons"] = json::array();
  for (const auto& p : d.polygons) {
    json v = json::array();
    for (const auto& x : p.vertices) v.push_back(detail::vec_json<2>(x));
    j["polygons"].push_back({{"label", p.label}, {"vertices", v}});
  }
  j["conics"] = json::array();
  for (const auto& c : d.conics) {
    j["conics"].push_back({{"label", c.label}, {"coefficients", detail::vec_json<6>(c.coefficients)}});
  }
  j["points"] = json::array();
  for (const auto& s : d.points) {
    json v = json::array();
    for (const auto& x : s.points) v.push_back(detail::vec_json<3>(x));
    j["points"].push_back({{"label", s.label}, {"points", v}});
  }
  j["lines"] = json::array();
  for (const auto& s : d.lines) {
    json v = json::array();
    for (const auto& x : s.lines) v.push_back(detail::vec_json<3>(x));
    j["lines"].push_back({{"label", s.label}, {"lines", v}});
  }
  return j;
}

inline void validate(const SceneDocument& d) {
  std::set<std::string> seen;
  auto claim = [&](const std::string& label) {
    if (label.empty()) fail(Errc::SchemaError, "empty label");
    if (!seen.insert(label).second) fail(Errc::SchemaError, "duplicate label '" + label + "'");
  };
  for (const auto& x : d.polygons) claim(x.label);
  for (const auto& x : d.conics) claim(x.label);
  for (const auto& x : d.points) claim(x.label);
  for (const auto& x : d.lines) claim(x.label);
}

inline SceneDocument scene_from_json(const json& j) {
  const json& schema = detail::require(j, "schema");
  if (!schema.is_number_integer() || schema.get<int>() != kSchemaVersion) {
    fail(Errc::SchemaError, "unsupported schema version");
  }
  SceneDocument d;
  if (j.contains("metadata")) d.metadata = j.at("metadata");
  if (j.contains("polygons")) {
    for (const auto& p : j.at("polygons")) {
      LabeledPolygon lp{detail::require(p, "label").get<std::string>(), {}};
      for (const auto& v : detail::require(p, "vertices")) lp.vertices.push_back(detail::json_vec<2>(v));
      d.polygons.push_back(std::move(lp));
    }
  }
  if (j.contains("conics")) {
    for (const auto& c : j.at("conics")) {
      d.conics.push_back({detail::require(c, "label").get<std::string>(),
                          detail::json_vec<6>(detail::require(c, "coefficients"))});
    }
  }
  if (j.contains("points")) {
    for (const auto& s : j.at("points")) {
      LabeledPoints lp{detail::require(s, "label").get<std::string>(), {}};
      for (const auto& v : detail::require(s, "points")) lp.points.push_back(detail::json_vec<3>(v));
      d.points.push_back(std::move(lp));
    }
  }
  if (j.contains("lines")) {
    for (const auto& s : j.at("lines")) {
      LabeledLines ll{detail::require(s, "label").get<std::string>(), {}};
      for (const auto& v : detail::require(s, "lines")) ll.lines.push_back(detail::json_vec<3>(v));
      d.lines.push_back(std::move(ll));
    }
  }
  validate(d);
  return d;
}

inline std::string write_scene(const SceneDocument& d) {
  validate(d);
  return canonical_dump(to_json(d));
}

inline SceneDocument read_scene(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::SchemaError, e.what());
  }
  return scene_from_json(j);
}

inline SceneDocument load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::SchemaError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return read_scene(ss.str());
}

// ---------------------------------------------------------------------------
// scene construction

struct GenOptions {
  double a2 = 4.0;
  double b2 = 1.0;
  double lambda_outer = 0.0;
  int n = 7;
  int winding = 1;
  double start_angle = 0.4;
  double tol = 1e-12;
};

inline SceneDocument scene_from_poncelet(const PonceletPolygon& p) {
  SceneDocument d;
  d.metadata["kind"] = "poncelet";
  d.metadata["n"] = static_cast<int>(p.n());
  d.metadata["winding"] = p.pair.winding;
  d.metadata["closure_error"] = p.pair.closure_error;
  if (p.pair.confocal) {
    const auto& c = *p.pair.confocal;
    d.metadata["family"] = {{"a2", c.family.a2()}, {"b2", c.family.b2()},
                            {"lambda_outer", c.lambda_outer}, {"lambda_inner", c.lambda_inner}};
  }
  d.conics.push_back({"outer", p.pair.outer.coefficients()});
  d.conics.push_back({"inner", p.pair.inner.coefficients()});
  d.polygons.push_back({"P", std::vector<Eigen::Vector2d>(p.polygon.points().begin(), p.polygon.points().end())});
  LabeledPoints tang{"tangency", {}};
  for (const auto& t : p.tangency_points) tang.points.push_back(t.vec());
  d.points.push_back(std::move(tang));
  LabeledLines sides{"sides", {}};
  for (const auto& l : p.side_lines) sides.lines.push_back(l.vec());
  d.lines.push_back(std::move(sides));
  if (p.n() % 2 == 1) {
    const PonceletGrid g = build_grid(p);
    LabeledPoints grid{"grid", {}};
    for (const auto& q : g.points()) grid.points.push_back(q.vec());
    d.points.push_back(std::move(grid));
  }
  return d;
}

/// Confocal Poncelet polygon plus its grid (odd n), ready to serialize.
inline SceneDocument generate_confocal_scene(const GenOptions& o) {
  const ConfocalFamily f(o.a2, o.b2);
  const PonceletPolygon p = confocal_poncelet_polygon(f, o.lambda_outer, o.n, o.winding, o.start_angle, o.tol);
  SceneDocument d = scene_from_poncelet(p);
  d.metadata["start_angle"] = o.start_angle;
  d.metadata["tolerances"] = {{"closure", o.tol}};
  d.metadata["provenance"] = json::array({"poncelet-lab gen"});
  return d;
}

/// Random convex pentagon inscribed in a random ellipse.
inline SceneDocument generate_pentagon_scene(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Polygon p = random_convex_polygon(rng, 5);
  SceneDocument d = scene_from_poncelet(as_poncelet_pentagon(p));
  d.metadata["kind"] = "pentagon";
  d.metadata["seed"] = seed;
  d.metadata["provenance"] = json::array({"poncelet-lab gen --kind pentagon"});
  return d;
}

/// Rebuilds the Poncelet polygon a scene describes.
inline PonceletPolygon poncelet_from_scene(const SceneDocument& d) {
  const std::string kind = d.metadata.value("kind", std::string("poncelet"));
  const Polygon poly = d.polygon("P").polygon();
  if (kind == "pentagon") return as_poncelet_pentagon(poly);
  if (!d.metadata.contains("n")) fail(Errc::SchemaError, "metadata.n missing");
  PonceletPair pair{d.conic("outer").conic(), d.conic("inner").conic(), d.metadata.at("n").get<int>(),
                    d.metadata.value("winding", 1), d.metadata.value("closure_error", 0.0), std::nullopt};
  if (d.metadata.contains("family")) {
    const json& f = d.metadata.at("family");
    pair.confocal = ConfocalPlacement{ConfocalFamily(f.at("a2").get<double>(), f.at("b2").get<double>()),
                                      f.at("lambda_outer").get<double>(), f.at("lambda_inner").get<double>()};
  }
  return build_polygon(pair, poly.vertex(0));
}

}  // namespace poncelet
