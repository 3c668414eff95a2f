#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opk/opk.hpp"

using namespace opk;
using nlohmann::json;

namespace {

const CheckRecord* find_check(const Report& rep, const std::string& name) {
  for (const CheckRecord& r : rep.checks) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("configurations parse with defaults and validation", "[cli][config]") {
  {
    const ModelConfig cfg = parse_model_config(json::object());
    CHECK(cfg.model == "bidisc");
    CHECK(cfg.sample_count == 10);
    CHECK(cfg.times.empty());
    CHECK(cfg.frame_points.empty());
    CHECK_FALSE(cfg.atoms.has_value());
  }
  CHECK(parse_model_config(json{{"model", "moment"}}).model == "moment:discrete");
  CHECK(parse_model_config(json{{"model", "moment"}, {"measure", {{"kind", "gaussian"}}}}).model ==
        "moment:gaussian");
  {
    const ModelConfig cfg = parse_model_config(
        json{{"model", "moment"},
             {"measure", {{"atoms", {0.7, -0.7}}, {"weights", {0.5, 0.5}}}}});
    CHECK(cfg.model == "moment:discrete");
    REQUIRE(cfg.atoms.has_value());
    CHECK((*cfg.atoms)[0] == 0.7);
  }
  {
    const ModelConfig cfg = parse_model_config(json{
        {"model", "bidisc"},
        {"samples", {{"count", 6}, {"half_width", 0.4}}},
        {"times", {0.2, 0.3}},
        {"frame_points", {{0.1, 0.0, 0.0, 0.0}}}});
    CHECK(cfg.sample_count == 6);
    CHECK(cfg.sample_half_width == 0.4);
    REQUIRE(cfg.times.size() == 2);
    REQUIRE(cfg.frame_points.size() == 1);
    CHECK(cfg.frame_points[0].size() == 4);
  }

  CHECK_THROWS_AS(parse_model_config(json{{"model", "bidisc"}, {"measure", json::object()}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_model_config(json{{"model", "nope"}}), ConfigError);
  CHECK_THROWS_AS(parse_model_config(json{{"model", "moment"}, {"measure", {{"kind", "weird"}}}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_model_config(json{{"measure", {{"kind", "gaussian"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_model_config(json{{"samples", {{"count", 0}}}}), ConfigError);
  CHECK_THROWS_AS(parse_model_config(json{{"samples", {{"count", 2000}}}}), ConfigError);
  CHECK_THROWS_AS(parse_model_config(json{{"samples", {{"count", "six"}}}}), ConfigError);
}

TEST_CASE("models materialize deterministically", "[cli][config]") {
  const ModelConfig cfg = parse_model_config(json::object());
  const ModelData a = make_model(cfg, 123);
  CHECK(a.is_bidisc);
  REQUIRE(a.flows.size() == 3);
  CHECK(a.flows[0].first == "rot1");
  CHECK(a.flows[1].first == "rot2");
  CHECK(a.flows[2].first == "sigma");
  CHECK(static_cast<int>(a.samples.size()) == 10);
  REQUIRE(a.frame_points.size() == bidisc_frame_points().size());
  for (std::size_t i = 0; i < a.frame_points.size(); ++i) {
    CHECK((a.frame_points[i] - bidisc_frame_points()[i]).norm() == 0.0);
  }

  const ModelData b = make_model(cfg, 123);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK((a.samples[i] - b.samples[i]).norm() == 0.0);
  }
  const ModelData c = make_model(cfg, 124);
  CHECK((a.samples[0] - c.samples[0]).norm() > 0.0);

  const ModelData d = make_model(parse_model_config(json{{"model", "moment"}}), 9);
  CHECK_FALSE(d.is_bidisc);
  REQUIRE(d.measure.has_value());
  CHECK(d.measure->kind == MomentMeasure::Kind::Discrete);
  REQUIRE(d.translation_pair.has_value());
  REQUIRE(d.times.size() == 3);

  const ModelData e = make_model(
      json{{"model", "moment"}, {"measure", {{"atoms", {0.7, -0.7}}, {"weights", {0.5, 0.5}}}}},
      9);
  REQUIRE(e.measure.has_value());
  CHECK(e.measure->atoms[0] == 0.7);
}

TEST_CASE("example suites pass on shipped models", "[cli][suite]") {
  RunOptions opts;
  for (const char* model : {"bidisc", "moment:gaussian", "moment:discrete"}) {
    INFO("model " << model);
    const ModelData data = make_model(parse_model_config(json{{"model", model}}), opts.seed);
    const Report rep = run_example(data, opts);
    CHECK(rep.overall_pass());
    CHECK(rep.gating_failures() == 0);
    CHECK_FALSE(rep.checks.empty());
  }
}

TEST_CASE("check suite flags a corrupted kernel", "[cli][suite]") {
  RunOptions opts;
  ModelData data = make_model(parse_model_config(json::object()), opts.seed);
  {
    const Report healthy = run_check(data, opts);
    CHECK(healthy.overall_pass());
  }
  auto base = data.kernel.eval;
  data.kernel.eval = [base](const Point& m, const Point& n) -> CMat {
    CMat v = base(m, n);
    v(0, 1) += 1e-3;
    return v;
  };
  const Report rep = run_check(data, opts);
  CHECK_FALSE(rep.overall_pass());
  const CheckRecord* herm = find_check(rep, "hermitian-symmetry");
  REQUIRE(herm != nullptr);
  CHECK_FALSE(herm->pass);
}

TEST_CASE("tabulated grids run the check suite and refuse the rest", "[cli][tabulated]") {
  RunOptions opts;
  // Two chart points, fiber dimension two; the off-diagonal block carries a
  // genuinely complex entry and its conjugate transpose sits in the mirror
  // slot, so the table is Hermitian and positive definite (least eigenvalue
  // (3 - sqrt(1.36)) / 2, about 0.917).
  const json grid = json::parse(R"({
    "fiber_dim": 2,
    "points": [[0.0, 0.0], [0.5, 0.25]],
    "values": [
      [ [[[2.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
        [[[0.3, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.15, 0.2598076211353316]]] ],
      [ [[[0.3, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.15, -0.2598076211353316]]],
        [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [2.0, 0.0]]] ]
    ]
  })");

  const ModelConfig cfg =
      parse_model_config(json{{"model", "tabulated"}, {"tabulated", {{"kernel", grid}}}});
  const ModelData data = make_model(cfg, opts.seed);
  CHECK(data.kernel.grid_only);
  CHECK(data.kernel.fiber_dim == 2);
  CHECK(data.kernel.chart_dim == 2);
  CHECK(data.rep.kind == GroupKind::U1);
  REQUIRE(data.samples.size() == 2);
  CHECK(data.samples[1][0] == 0.5);

  const Report healthy = run_check(data, opts);
  CHECK(healthy.overall_pass());
  CHECK(healthy.gating_failures() == 0);

  // The grid carries no differentiable structure, so the derivative-based
  // suites refuse it up front instead of producing nonsense.
  CHECK_THROWS_AS(run_geometry(data, opts), ConfigError);
  CHECK_THROWS_AS(run_quantize(data, opts), ConfigError);
  CHECK_THROWS_AS(run_example(data, opts), ConfigError);

  // Off the grid the kernel refuses to evaluate rather than interpolating,
  // even inside the bounding box of the listed points.
  const Point off = 0.5 * (data.samples[0] + data.samples[1]);
  CHECK(data.kernel.domain.contains(off));
  CHECK_THROWS_AS(data.kernel.eval(off, data.samples[0]), std::domain_error);

  // A table that breaks Hermitian symmetry still loads; the check suite
  // reports the defect instead of crashing, and the checks that presuppose a
  // positive kernel are withheld.
  json bad = grid;
  bad["values"][0][1][0][0][0] = 0.31;
  const ModelData corrupted = make_model(
      parse_model_config(json{{"model", "tabulated"}, {"tabulated", {{"kernel", bad}}}}),
      opts.seed);
  const Report flagged = run_check(corrupted, opts);
  CHECK_FALSE(flagged.overall_pass());
  const CheckRecord* gram = find_check(flagged, "gram-positivity");
  REQUIRE(gram != nullptr);
  CHECK_FALSE(gram->pass);
  CHECK(find_check(flagged, "reproducing-property") == nullptr);

  // The same grid loads from a file path.
  const std::string path = "/tmp/opk_tabulated_grid_test.json";
  {
    std::ofstream out(path);
    out << grid.dump(2);
  }
  const ModelData from_file = make_model(
      parse_model_config(json{{"model", "tabulated"}, {"tabulated", {{"file", path}}}}),
      opts.seed);
  CHECK(from_file.kernel.grid_only);
  CHECK(max_abs(CMat(from_file.kernel.eval(from_file.samples[0], from_file.samples[1]) -
                     data.kernel.eval(data.samples[0], data.samples[1]))) == 0.0);
  std::remove(path.c_str());

  // Configuration errors: missing source, two sources, unreadable file,
  // misplaced measure block, and malformed grids.
  CHECK_THROWS_AS(parse_model_config(json{{"model", "tabulated"}}), ConfigError);
  CHECK_THROWS_AS(
      parse_model_config(json{{"model", "tabulated"},
                              {"tabulated", {{"kernel", grid}, {"file", path}}}}),
      ConfigError);
  CHECK_THROWS_AS(
      parse_model_config(json{{"model", "tabulated"},
                              {"tabulated", {{"file", "/tmp/opk_no_such_grid.json"}}}}),
      ConfigError);
  CHECK_THROWS_AS(parse_model_config(json{{"model", "tabulated"},
                                          {"tabulated", {{"kernel", grid}}},
                                          {"measure", {{"kind", "gaussian"}}}}),
                  ConfigError);
  {
    json ragged = grid;
    ragged["values"][0].erase(1);  // blocks no longer form a square grid
    CHECK_THROWS_AS(
        parse_model_config(json{{"model", "tabulated"}, {"tabulated", {{"kernel", ragged}}}}),
        ConfigError);
  }
  {
    json repeated = grid;
    repeated["points"][1] = {0.0, 0.0};  // coincides with the first point
    CHECK_THROWS_AS(
        parse_model_config(json{{"model", "tabulated"}, {"tabulated", {{"kernel", repeated}}}}),
        ConfigError);
  }
  {
    json lopsided = grid;
    lopsided["values"][0][0][0][0] = {1.0};  // an entry that is not an [re, im] pair
    CHECK_THROWS_AS(
        parse_model_config(json{{"model", "tabulated"}, {"tabulated", {{"kernel", lopsided}}}}),
        ConfigError);
  }
}

TEST_CASE("geometry and quantize suites pass and serialize deterministically", "[cli][suite]") {
  RunOptions opts;
  const ModelConfig cfg = parse_model_config(json{{"model", "moment:discrete"}});

  const Report g1 = run_geometry(make_model(cfg, opts.seed), opts);
  const Report g2 = run_geometry(make_model(cfg, opts.seed), opts);
  CHECK(g1.overall_pass());
  CHECK(g1.to_json(false).dump() == g2.to_json(false).dump());

  const Report q = run_quantize(make_model(cfg, opts.seed), opts);
  CHECK(q.overall_pass());
  CHECK(q.extra.contains("spectrum"));
  const CheckRecord* oracle = find_check(q, "spectrum-vs-oracle");
  REQUIRE(oracle != nullptr);
  CHECK(oracle->pass);

  // Off-default atom positions still match the closed-form reference spectrum.
  const Report q2 = run_quantize(
      make_model(json{{"model", "moment"},
                      {"measure", {{"atoms", {0.7, -0.7}}, {"weights", {0.5, 0.5}}}}},
                 opts.seed),
      opts);
  const CheckRecord* oracle2 = find_check(q2, "spectrum-vs-oracle");
  REQUIRE(oracle2 != nullptr);
  CHECK(oracle2->pass);
}

TEST_CASE("bidisc suites pass with the known non-gating discrepancies", "[cli][suite]") {
  RunOptions opts;
  const ModelData data = make_model(parse_model_config(json::object()), opts.seed);

  const Report geo = run_geometry(data, opts);
  CHECK(geo.overall_pass());
  const CheckRecord* quoted_pair = find_check(geo, "hamiltonian-equation-quoted-pair");
  REQUIRE(quoted_pair != nullptr);
  CHECK_FALSE(quoted_pair->pass);
  CHECK_FALSE(quoted_pair->gating);
  const CheckRecord* quoted_family = find_check(geo, "cocycle-quoted-family");
  REQUIRE(quoted_family != nullptr);
  CHECK_FALSE(quoted_family->pass);
  CHECK_FALSE(quoted_family->gating);
  CHECK_FALSE(geo.flags.empty());

  const Report qz = run_quantize(data, opts);
  CHECK(qz.overall_pass());
  CHECK(qz.gating_failures() == 0);
}

TEST_CASE("reports enforce unique names and order their records", "[cli][report]") {
  Report rep;
  rep.command = "unit";
  rep.model = "unit";
  rep.add_residual("beta", "t", "in", 0.0, 1.0);
  rep.add_residual("alpha", "t", "in", 2.0, 1.0, /*gating=*/false, "known issue");
  CHECK(rep.overall_pass());
  CHECK(rep.gating_failures() == 0);
  REQUIRE(rep.flags.size() == 1);

  CheckRecord dup;
  dup.name = "beta";
  CHECK_THROWS_AS(rep.add(dup), std::logic_error);

  rep.add_residual("gamma", "t", "in", 2.0, 1.0);
  CHECK_FALSE(rep.overall_pass());
  CHECK(rep.gating_failures() == 1);

  const json j = rep.to_json(false);
  CHECK_FALSE(j.contains("generated_at"));
  CHECK(rep.to_json(true).contains("generated_at"));
  REQUIRE(j.at("checks").size() == 3);
  CHECK(j.at("checks")[0].at("name") == "alpha");
  CHECK(j.at("checks")[1].at("name") == "beta");
  CHECK(j.at("summary").at("overall_pass") == false);

  const std::string csv = rep.to_csv();
  CHECK(csv.rfind("name,tag,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("report files round-trip through disk", "[cli][report]") {
  Report rep;
  rep.command = "unit";
  rep.model = "unit";
  rep.seed = 7;
  rep.add_residual("alpha", "t", "in", 0.5, 1.0);

  const std::string json_path = "/tmp/opk_report_roundtrip.json";
  const std::string csv_sidecar = "/tmp/opk_report_roundtrip.csv";
  write_report(rep, json_path, /*with_timestamp=*/false);
  {
    std::ifstream in(json_path);
    REQUIRE(in.good());
    json parsed;
    in >> parsed;
    CHECK(parsed.at("summary").at("overall_pass") == true);
    CHECK(parsed.at("environment").at("seed") == 7);
    CHECK(parsed.at("conventions").contains("bracket_curvature_factor"));
  }
  {
    std::ifstream in(csv_sidecar);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("name,tag,", 0) == 0);
  }
  std::remove(json_path.c_str());
  std::remove(csv_sidecar.c_str());

  const std::string csv_path = "/tmp/opk_report_only.csv";
  write_report(rep, csv_path);
  {
    std::ifstream in(csv_path);
    REQUIRE(in.good());
  }
  std::remove(csv_path.c_str());
}
