#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "segreg/config.hpp"
#include "segreg/error.hpp"
#include "segreg/mhd.hpp"
#include "segreg/report.hpp"
#include "tempdir.hpp"

using namespace segreg;

TEST_CASE("registration config json") {
  const RegistrationConfig d = parse_registration_config("{}");
  CHECK(d.lr == 0.1);
  CHECK(d.levels == 5);

  const RegistrationConfig c = parse_registration_config(
      R"({"weights": {"alpha": 0.25, "beta": 0}, "sigmas": [0, 2], "levels": 3, "iters_per_level": 7,
          "convergence_tol": 0, "bending_mixed_terms": true})");
  CHECK(c.weights.alpha == 0.25);
  CHECK(c.weights.beta == 0.0);
  CHECK(c.sigmas.sigmas == std::vector<double>{0.0, 2.0});
  CHECK(c.levels == 3);
  CHECK(c.iters_per_level == 7);
  CHECK(c.bending_mixed_terms);

  const RegistrationConfig back = parse_registration_config(to_json(c));
  CHECK(to_json(back) == to_json(c));

  RegistrationConfig base;
  base.iters_per_level = 11;
  CHECK(parse_registration_config(R"({"lr": 0.05})", base).iters_per_level == 11);

  CHECK_THROWS_AS(parse_registration_config(R"({"learning_rate": 0.1})"), InvalidArgument);
  CHECK_THROWS_AS(parse_registration_config(R"({"weights": {"gamma": 1}})"), InvalidArgument);
  CHECK_THROWS_AS(parse_registration_config(R"({"levels": "five"})"), InvalidArgument);
  CHECK_THROWS_AS(parse_registration_config(R"({"levels": 0})"), InvalidArgument);
  CHECK_THROWS_AS(parse_registration_config("[1, 2]"), InvalidArgument);
  CHECK_THROWS_AS(parse_registration_config("{"), InvalidArgument);
  CHECK_THROWS_AS(load_registration_config("/nonexistent/config.json"), InvalidArgument);
}

TEST_CASE("phantom spec json") {
  PhantomSpec s;
  s.dims = {32, 30, 28};
  s.seed = 17;
  s.translation = {1.0, -2.0, 0.5};
  const PhantomSpec back = parse_phantom_spec(to_json(s));
  CHECK(back.dims == s.dims);
  CHECK(back.seed == 17);
  CHECK(back.translation == s.translation);
  CHECK(back.affine == s.affine);
  CHECK(to_json(back) == to_json(s));
  CHECK_THROWS_AS(parse_phantom_spec(R"({"radius": 3})"), InvalidArgument);
  CHECK_THROWS_AS(parse_phantom_spec(R"({"bump_amplitude": -1})"), InvalidArgument);
}

TEST_CASE("case manifest") {
  oracle::TempDir dir;
  const Grid g({4, 4, 4}, {1, 1, 1});
  const Volume m = oracle::ball(g, {1.5, 1.5, 1.5}, 1.2);
  std::filesystem::create_directories(dir / "c1");
  for (const char* name : {"c1/mm.mhd", "c1/fm.mhd", "c1/ml.mhd", "c1/fl.mhd"}) write_mhd(m, dir / name);
  Volume intensity = m;
  intensity.values[0] = 0.25;
  intensity.kind = VolumeKind::intensity;
  write_mhd(intensity, dir / "c1/img.mhd");

  oracle::spit(dir / "one.json", R"({"case_id": "c1", "moving_mask": "c1/mm.mhd", "fixed_mask": "c1/fm.mhd",
    "landmarks": [{"id": "a", "moving": "c1/ml.mhd", "fixed": "c1/fl.mhd"}]})");
  const auto cases = load_case_manifest(dir / "one.json");
  REQUIRE(cases.size() == 1);
  CHECK(cases[0].case_id == "c1");
  CHECK(cases[0].moving_mask == (dir / "c1/mm.mhd").lexically_normal());
  CHECK(!cases[0].moving_image.has_value());
  REQUIRE(cases[0].landmarks.size() == 1);
  const LandmarkSet lm = load_landmarks(cases[0], true);
  REQUIRE(lm.size() == 1);
  CHECK(lm[0].id == "a");
  CHECK(lm[0].mask.values == m.values);

  SUBCASE("serialized manifest loads back") {
    oracle::spit(dir / "again.json", to_json(cases, dir.path()));
    const auto again = load_case_manifest(dir / "again.json");
    REQUIRE(again.size() == 1);
    CHECK(again[0].fixed_mask == cases[0].fixed_mask);
    CHECK(again[0].landmarks[0].fixed == cases[0].landmarks[0].fixed);
  }
  SUBCASE("errors") {
    oracle::spit(dir / "bad.json", R"({"case_id": "c1", "moving_mask": "c1/none.mhd", "fixed_mask": "c1/fm.mhd"})");
    CHECK_THROWS_AS(load_case_manifest(dir / "bad.json"), InvalidArgument);
    oracle::spit(dir / "bad.json", R"({"case_id": "c1", "fixed_mask": "c1/fm.mhd"})");
    CHECK_THROWS_AS(load_case_manifest(dir / "bad.json"), InvalidArgument);
    oracle::spit(dir / "bad.json", R"({"case_id": "c1", "moving_mask": "c1/mm.mhd", "fixed_mask": "c1/fm.mhd", "x": 1})");
    CHECK_THROWS_AS(load_case_manifest(dir / "bad.json"), InvalidArgument);
    oracle::spit(dir / "bad.json", R"({"cases": [{"case_id": "c1", "moving_mask": "c1/mm.mhd", "fixed_mask": "c1/fm.mhd"},
      {"case_id": "c1", "moving_mask": "c1/mm.mhd", "fixed_mask": "c1/fm.mhd"}]})");
    CHECK_THROWS_AS(load_case_manifest(dir / "bad.json"), InvalidArgument);
    oracle::spit(dir / "bad.json", R"({"case_id": "c1", "moving_mask": "c1/mm.mhd", "fixed_mask": "c1/fm.mhd",
      "landmarks": [{"id": "a", "moving": "c1/img.mhd", "fixed": "c1/fl.mhd"}]})");
    const auto c = load_case_manifest(dir / "bad.json");
    CHECK_THROWS_AS(load_landmarks(c[0], true), InvalidArgument);
  }
}

TEST_CASE("metrics json") {
  MetricsReport m;
  m.dsc_whole = 0.93;
  m.dsc_apex = 0.81;
  m.jac_grad = 0.0123;
  const MetricsReport a = parse_metrics(to_json(m));
  CHECK(a.dsc_whole == 0.93);
  CHECK(a.dsc_apex == 0.81);
  CHECK(a.jac_grad == 0.0123);
  CHECK(!a.tre_mm.has_value());
  m.tre_mm = 1.25;
  CHECK(parse_metrics(to_json(m)).tre_mm.value() == 1.25);
  CHECK(to_json(m).find("\"jac_grad_x100\"") != std::string::npos);
}

TEST_CASE("summarize") {
  const ColumnSummary s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.count == 4);
  CHECK(s.mean == 2.5);
  CHECK(s.median == 2.5);
  CHECK(s.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(summarize({7.0}).sd == 0.0);
  CHECK(summarize({3.0, std::nan(""), 1.0, 2.0}).median == 2.0);
  CHECK(std::isnan(summarize({}).mean));
}

TEST_CASE("report format") {
  RunReport r;
  r.rows.push_back({"case_000", "mix", 0.95, 0.9, 0.96, 0.85, 1.25, 3.5, 150, 2.0});
  r.rows.push_back({"case_001", "mix", 0.97, 0.92, 0.98, 0.89, std::nullopt, 4.5, 120, 3.0});
  r.rows.push_back({"case,2", "sdm", 0.9, 0.8, 0.9, 0.7, 2.0, 9.0, 100, 1.0});
  const std::string text = format_report(r);
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 1 + 3 + 6);
  CHECK(lines[0] == "case_id,mode,dsc_whole,dsc_base,dsc_mid,dsc_apex,tre_mm,jac_grad_x100,iterations,wall_time_s");
  CHECK(lines[1] == "case_000,mix,0.95,0.9,0.96,0.85,1.25,3.5,150,2");
  CHECK(lines[2] == "case_001,mix,0.97,0.92,0.98,0.89,nan,4.5,120,3");
  CHECK(lines[3].rfind("\"case,2\",sdm,", 0) == 0);
  CHECK(lines[4] == "mean,mix,0.96,0.91,0.97,0.87,1.25,4,135,2.5");
  CHECK(lines[5] == "median,mix,0.96,0.91,0.97,0.87,1.25,4,135,2.5");
  CHECK(lines[6].rfind("sd,mix,0.0141421,", 0) == 0);
  CHECK(lines[9].rfind("sd,sdm,0,", 0) == 0);

  oracle::TempDir dir;
  write_report(r, dir / "r.csv");
  CHECK(oracle::slurp(dir / "r.csv") == text);
}
