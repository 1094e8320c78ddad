// poncelet-lab: generate, verify and render Poncelet configurations.
//
// Exit codes: 0 success, 1 a verification failed numerically,
// 2 invalid input or a construction error.

#include <CLI11.hpp>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "poncelet/acceptance.hpp"
#include "poncelet/report_json.hpp"
#include "poncelet/scene.hpp"
#include "poncelet/svg.hpp"

namespace {

using namespace poncelet;

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kBadInput = 2;

struct SceneSource {
  std::string in;
  std::string kind = "poncelet";
  GenOptions gen;
  std::uint64_t seed = 7;
};

void add_gen_flags(CLI::App* cmd, SceneSource& s) {
  cmd->add_option("--kind", s.kind, "poncelet (confocal pair) or pentagon (random convex pentagon)")
      ->check(CLI::IsMember({"poncelet", "pentagon"}));
  cmd->add_option("--a2", s.gen.a2, "family parameter a^2");
  cmd->add_option("--b2", s.gen.b2, "family parameter b^2");
  cmd->add_option("--lambda-outer", s.gen.lambda_outer, "family parameter of the outer ellipse");
  cmd->add_option("--n", s.gen.n, "number of vertices");
  cmd->add_option("--winding", s.gen.winding, "winding number");
  cmd->add_option("--start-angle", s.gen.start_angle, "polar angle of the first vertex");
}

SceneDocument load_or_generate(const SceneSource& s) {
  if (!s.in.empty()) return load_scene(s.in);
  if (s.kind == "pentagon") return generate_pentagon_scene(s.seed);
  return generate_confocal_scene(s.gen);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

bool use_color() { return std::getenv("NO_COLOR") == nullptr && isatty(fileno(stdout)); }

std::string verdict(bool ok) {
  if (!use_color()) return ok ? "PASS" : "FAIL";
  return ok ? "\033[32mPASS\033[0m" : "\033[31mFAIL\033[0m";
}

bool is_verification_error(Errc c) {
  return c == Errc::NotConfocal || c == Errc::NoSignMatches || c == Errc::MatchFailure;
}

struct VerifyArgs {
  std::string what;
  SceneSource src;
  int k = 2;
  std::optional<double> tol;
  int samples = 20;
  std::string json_path;
};

int run_verify(const VerifyArgs& a) {
  const SceneDocument doc = load_or_generate(a.src);
  const PonceletPolygon p = poncelet_from_scene(doc);
  json report;
  bool ok = false;

  if (a.what == "kasner") {
    const CommutationReport r = commute_check(p, a.k, a.tol.value_or(1e-8));
    std::printf("commutation n=%zu k=%d: max vertex error %.3g (tol %.1g), shift %zu, orientation %+d\n", r.n, r.k,
                r.max_vertex_error, r.tol, r.shift, r.orientation);
    report = to_json(r);
    ok = r.passed;
  } else if (a.what == "grid") {
    GridTolerances t;
    if (a.tol) t = {*a.tol, *a.tol, *a.tol};
    const GridReport r = verify_grid_theorem(build_grid(p), t);
    std::printf("grid n=%d: %zu points (%zu at infinity)\n", r.n, r.point_count, r.ideal_points);
    for (const auto& f : r.concentric) {
      std::printf("  Q%d %-13s residual %.2g  %s\n", f.index, std::string(to_string(f.cls)).c_str(), f.residual,
                  f.passed ? "ok" : "FAIL");
    }
    for (const auto& f : r.radial) {
      std::printf("  R%d %-13s %-11s %s\n", f.index, std::string(to_string(f.cls)).c_str(), f.method.c_str(),
                  f.passed ? "ok" : "FAIL");
    }
    std::printf("  dual pencil: %zu conics, rank %d, gap %.2g\n", r.dual_pencil_size, r.dual_pencil_rank,
                r.dual_pencil_gap);
    double eq = 0.0;
    for (const auto& e : r.concentric_equivalence) eq = std::max(eq, e.error);
    std::printf("  concentric sets projectively equivalent: worst %.2g\n", eq);
    report = to_json(r);
    ok = r.passed;
  } else if (a.what == "porism") {
    const double tol = a.tol.value_or(1e-7);
    const PorismResult r = porism_check(p.pair, a.samples, a.src.seed);
    std::printf("porism: %d starts, worst closure %.3g (tol %.1g)\n", a.samples, r.max_error, tol);
    report = to_json(r, tol);
    ok = r.max_error < tol;
  } else if (a.what == "pencil") {
    const PencilRemarkReport r = pencil_remark_check(p, a.k, a.tol.value_or(1e-8));
    std::printf("pencil k=%d: rank gap %.3g (tol %.1g); outer/inner/Q_k conics rank %d (gap %.3g)\n", a.k, r.rank_gap,
                r.tol, r.negative_rank, r.negative_gap);
    report = to_json(r);
    ok = r.passed;
  } else if (a.what == "incircles") {
    const double tol = a.tol.value_or(1e-8);
    const IncircleSurvey s = incircle_survey(build_grid(p), tol);
    std::printf("incircles: %zu convex cells, %zu non-convex skipped, worst discrepancy %.3g (tol %.1g)\n",
                s.cells.size(), s.skipped.size(), s.max_discrepancy, tol);
    report = to_json(s, tol);
    ok = s.passed;
  } else {
    if (!p.pair.confocal) fail(Errc::DegenerateInput, "transport needs a scene generated from a confocal family");
    const ConfocalFamily& f = p.pair.confocal->family;
    const PonceletGrid g = build_grid(p);
    const ConfocalGridReport c = confocal_grid_check(g, f, a.tol.value_or(1e-8));
    report = to_json(c);
    bool composition = true;
    const int half = (g.n() - 1) / 2;
    for (int i = 0; i <= half; ++i) {
      for (int j = i + 1; j <= half; ++j) {
        const TransportResult t = transport_check(g, f, i, j, a.tol.value_or(1e-9));
        std::printf("  Q%d -> Q%d: sign %+d, error %.2g\n", i, j, t.sign, t.max_error);
        report["transport"].push_back({{"i", i}, {"j", j}, {"sign", t.sign}, {"max_error", t.max_error}});
        composition = composition && t.sign == (((j - i) % 2 == 0) ? 1 : -1);
      }
    }
    for (const auto& s : c.concentric) std::printf("  Q%d lambda %.12f spread %.2g\n", s.index, s.lambda, s.spread);
    for (const auto& s : c.radial) std::printf("  R%d lambda %.12f spread %.2g\n", s.index, s.lambda, s.spread);
    report["parity_consistent"] = composition;
    ok = c.passed && composition;
  }

  std::printf("%s\n", verdict(ok).c_str());
  if (!a.json_path.empty()) write_text(a.json_path, canonical_dump(report));
  return ok ? kOk : kVerifyFailed;
}

int run_selftest(std::optional<double> tol, std::uint64_t seed) {
  acceptance::Options o;
  o.tol_override = tol;
  o.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = acceptance::run_library_criteria(o);
  bool all = true;
  for (const auto& r : results) {
    std::printf("%2d  %s  %7.3fs  %-52s %s\n", r.id, verdict(r.passed).c_str(), r.seconds, r.name.c_str(),
                r.detail.c_str());
    all = all && r.passed;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s in %.2f s\n", all ? "all criteria passed" : "some criteria FAILED", secs);
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poncelet polygons, grids and the diagonal/tangency maps"};
  app.require_subcommand(1);

  SceneSource gen_src;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "write a scene document");
  add_gen_flags(gen, gen_src);
  gen->add_option("--tol", gen_src.gen.tol, "closure tolerance of the bisection");
  gen->add_option("--seed", gen_src.seed, "seed for --kind pentagon");
  gen->add_option("--out", gen_out, "output file (default stdout)");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run a verifier and report pass/fail");
  verify->add_option("what", va.what, "kasner | grid | porism | pencil | incircles | transport")
      ->required()
      ->check(CLI::IsMember({"kasner", "grid", "porism", "pencil", "incircles", "transport"}));
  verify->add_option("--in", va.src.in, "scene document (default: generate one from the flags)");
  add_gen_flags(verify, va.src);
  verify->add_option("--k", va.k, "diagonal order");
  verify->add_option("--tol", va.tol, "override the verifier tolerance");
  verify->add_option("--seed", va.src.seed, "random seed");
  verify->add_option("--samples", va.samples, "porism starting points");
  verify->add_option("--json", va.json_path, "write the machine report here");

  std::string render_in;
  std::string render_out;
  std::string figure_name;
  int render_k = 0;
  auto* render = app.add_subcommand("render", "draw a figure as SVG");
  render->add_option("--in", render_in, "scene document")->required();
  render->add_option("--figure", figure_name, "pentagon | kasner-nk | grid | incircles")
      ->required()
      ->check(CLI::IsMember({"pentagon", "kasner-nk", "grid", "incircles"}));
  render->add_option("--out", render_out, "output file (default stdout)");
  render->add_option("--k", render_k, "diagonal order for kasner-nk");

  std::optional<double> self_tol;
  std::uint64_t self_seed = 7;
  auto* selftest = app.add_subcommand("selftest", "run the acceptance criteria");
  selftest->add_option("--tol", self_tol, "override every tolerance");
  selftest->add_option("--seed", self_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*gen) {
      write_text(gen_out, write_scene(load_or_generate(gen_src)));
      return kOk;
    }
    if (*verify) return run_verify(va);
    if (*render) {
      write_text(render_out, render_figure(load_scene(render_in), *parse_figure(figure_name), render_k));
      return kOk;
    }
    return run_selftest(self_tol, self_seed);
  } catch (const GeometryError& e) {
    std::fprintf(stderr, "poncelet-lab: %s\n", e.what());
    return is_verification_error(e.code()) ? kVerifyFailed : kBadInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "poncelet-lab: %s\n", e.what());
    return kBadInput;
  }
}
