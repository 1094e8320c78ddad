#pragma once

#include <json.hpp>

#include <string>

#include "poncelet/grid.hpp"
#include "poncelet/kasner.hpp"
#include "poncelet/poncelet.hpp"

namespace poncelet {

// Machine-readable verification reports. Every pass/fail carries the
// tolerance it was judged against.

inline nlohmann::json to_json(const CommutationReport& r) {
  return {{"n", r.n},
          {"k", r.k},
          {"max_vertex_error", r.max_vertex_error},
          {"shift", r.shift},
          {"orientation", r.orientation},
          {"tol", r.tol},
          {"passed", r.passed}};
}

inline nlohmann::json to_json(const SetFit& f) {
  nlohmann::json j{{"index", f.index},
                   {"points", f.points},
                   {"class", std::string(to_string(f.cls))},
                   {"expected", std::string(to_string(f.expected))},
                   {"residual", f.residual},
                   {"method", f.method},
                   {"passed", f.passed}};
  if (f.conic) {
    nlohmann::json c = nlohmann::json::array();
    const Vector6d v = f.conic->coefficients();
    for (int i = 0; i < 6; ++i) c.push_back(v[i]);
    j["conic"] = c;
  }
  return j;
}

inline nlohmann::json to_json(const EquivalenceEntry& e) {
  return {{"i", e.i}, {"j", e.j}, {"error", e.error}, {"shift", e.shift}, {"reversed", e.reversed}, {"passed", e.passed}};
}

inline nlohmann::json to_json(const GridReport& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["point_count"] = r.point_count;
  j["ideal_points"] = r.ideal_points;
  j["tolerances"] = {{"fit", r.tol.fit}, {"pencil", r.tol.pencil}, {"equivalence", r.tol.equivalence}};
  for (const auto& f : r.concentric) j["concentric"].push_back(to_json(f));
  for (const auto& f : r.radial) j["radial"].push_back(to_json(f));
  j["q0_inner_distance"] = r.q0_inner_distance;
  j["dual_pencil"] = {{"gap", r.dual_pencil_gap}, {"rank", r.dual_pencil_rank}, {"conics", r.dual_pencil_size},
                      {"passed", r.tangents_ok}};
  for (const auto& e : r.concentric_equivalence) j["concentric_equivalence"].push_back(to_json(e));
  for (const auto& e : r.radial_equivalence) j["radial_equivalence"].push_back(to_json(e));
  j["conics_ok"] = r.conics_ok;
  j["tangents_ok"] = r.tangents_ok;
  j["equivalence_ok"] = r.equivalence_ok;
  j["passed"] = r.passed;
  return j;
}

inline nlohmann::json to_json(const ConfocalGridReport& r) {
  auto sets = [](const std::vector<SetParameter>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& s : v) {
      a.push_back({{"index", s.index}, {"lambda", s.lambda}, {"spread", s.spread}, {"in_range", s.in_range}});
    }
    return a;
  };
  return {{"concentric", sets(r.concentric)}, {"radial", sets(r.radial)}, {"increasing", r.increasing},
          {"passed", r.passed}};
}

inline nlohmann::json to_json(const PencilRemarkReport& r) {
  return {{"rank_gap", r.rank_gap},
          {"negative_rank", r.negative_rank},
          {"negative_gap", r.negative_gap},
          {"delta_fit_residual", r.delta_fit_residual},
          {"big_delta_fit_residual", r.big_delta_fit_residual},
          {"tol", r.tol},
          {"passed", r.passed}};
}

inline nlohmann::json to_json(const PorismResult& r, double tol) {
  return {{"max_error", r.max_error}, {"errors", r.errors}, {"tol", tol}, {"passed", r.max_error < tol}};
}

inline nlohmann::json to_json(const IncircleSurvey& s, double tol) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : s.cells) {
    cells.push_back({{"i", c.i},
                     {"j", c.j},
                     {"center", {c.center.x(), c.center.y()}},
                     {"radius", c.radius},
                     {"discrepancy", c.discrepancy}});
  }
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& [i, j] : s.skipped) skipped.push_back({i, j});
  return {{"cells", cells}, {"skipped_nonconvex", skipped}, {"max_discrepancy", s.max_discrepancy}, {"tol", tol},
          {"passed", s.passed}};
}

}  // namespace poncelet
