#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "segreg/segreg.hpp"

namespace segreg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error("short write to " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(tok);
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw InvalidArgument("cannot parse '" + s + "' as a number");
  return v;
}

// Masks may be stored as floats; anything >= 0.5 counts as foreground.
Volume load_mask(const fs::path& path) {
  Volume v = read_volume(path);
  if (v.kind != VolumeKind::binary_mask) v = binarize(v);
  return v;
}

json loss_json(const LossBreakdown& l) {
  return {{"total", l.total}, {"mdsc", l.mdsc}, {"msle", l.msle}, {"bending", l.bending}};
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Progress {
  bool verbose;
};

void print_progress(int stage, int iter, const LossBreakdown& l, void* data) {
  if (!static_cast<Progress*>(data)->verbose || iter % 10 != 0) return;
  std::cerr << "  stage " << stage << " iter " << iter << " total " << l.total << " mdsc " << l.mdsc << " msle "
            << l.msle << " bending " << l.bending << "\n";
}

}  // namespace

Index3 parse_dims(const std::string& text) {
  const auto toks = split_commas(text);
  if (toks.size() != 3) throw InvalidArgument("--dims expects x,y,z, got '" + text + "'");
  Index3 d{};
  for (int a = 0; a < 3; ++a) {
    const double v = to_double(toks[static_cast<std::size_t>(a)]);
    if (v < 1 || v != static_cast<int>(v)) throw InvalidArgument("--dims entries must be positive integers");
    d[a] = static_cast<int>(v);
  }
  return d;
}

Vec3 parse_spacing(const std::string& text) {
  const auto toks = split_commas(text);
  Vec3 s{};
  if (toks.size() == 1) {
    s.fill(to_double(toks[0]));
  } else if (toks.size() == 3) {
    for (int a = 0; a < 3; ++a) s[a] = to_double(toks[static_cast<std::size_t>(a)]);
  } else {
    throw InvalidArgument("--spacing expects s or sx,sy,sz, got '" + text + "'");
  }
  for (double x : s) {
    if (!(x > 0.0)) throw InvalidArgument("--spacing entries must be > 0");
  }
  return s;
}

void run_phantom(const PhantomArgs& args) {
  const PhantomSpec base = load_phantom_spec(args.spec);
  fs::create_directories(args.out);
  std::vector<CaseManifest> cases;
  for (int i = 0; i < args.count; ++i) {
    PhantomSpec spec = base;
    spec.seed = base.seed + static_cast<std::uint64_t>(i);
    const PhantomPair pair = generate_phantom(spec);

    char name[32];
    std::snprintf(name, sizeof(name), "phantom_%03d", i);
    const fs::path dir = fs::absolute(args.out / name);
    fs::create_directories(dir);
    write_mhd(pair.fixed_mask, dir / "fixed_mask.mhd");
    write_mhd(pair.moving_mask, dir / "moving_mask.mhd");
    write_mhd(pair.true_ddf, dir / "true_ddf.mhd");
    write_text(dir / "phantom_spec.json", to_json(spec) + "\n");

    CaseManifest m;
    m.case_id = name;
    m.moving_mask = dir / "moving_mask.mhd";
    m.fixed_mask = dir / "fixed_mask.mhd";
    for (std::size_t l = 0; l < pair.fixed_landmarks.size(); ++l) {
      const std::string& id = pair.fixed_landmarks[l].id;
      LandmarkPaths lp{id, dir / (id + "_moving.mhd"), dir / (id + "_fixed.mhd")};
      write_mhd(pair.moving_landmarks[l].mask, lp.moving);
      write_mhd(pair.fixed_landmarks[l].mask, lp.fixed);
      m.landmarks.push_back(lp);
    }
    write_text(dir / "manifest.json", to_json(m, dir) + "\n");
    cases.push_back(std::move(m));
  }
  write_text(args.out / "manifest.json", to_json(cases, fs::absolute(args.out)) + "\n");
}

void run_prealign(const PrealignArgs& args) {
  const Index3 dims = parse_dims(args.dims);
  const Vec3 spacing = parse_spacing(args.spacing);
  const Volume moving = normalize_intensity(read_volume(args.moving), args.percentile);
  const Volume fixed = normalize_intensity(read_volume(args.fixed), args.percentile);
  const Volume moving_mask = load_mask(args.moving_mask);
  const Volume fixed_mask = load_mask(args.fixed_mask);

  const PrealignResult r = coarse_align(moving, moving_mask, fixed, fixed_mask, dims, spacing);
  fs::create_directories(args.out);
  const fs::path dir = fs::absolute(args.out);
  write_mhd(r.moving_out, dir / "moving.mhd");
  write_mhd(r.moving_mask_out, dir / "moving_mask.mhd");
  write_mhd(r.fixed_out, dir / "fixed.mhd");
  write_mhd(r.fixed_mask_out, dir / "fixed_mask.mhd");
  json t;
  t["translation_mm"] = r.translation;
  t["target_dims"] = dims;
  t["target_spacing"] = spacing;
  t["target_origin"] = r.fixed_out.grid.origin;
  write_text(dir / "translation.json", t.dump(2) + "\n");

  CaseManifest m;
  m.case_id = args.case_id;
  m.moving_image = dir / "moving.mhd";
  m.fixed_image = dir / "fixed.mhd";
  m.moving_mask = dir / "moving_mask.mhd";
  m.fixed_mask = dir / "fixed_mask.mhd";
  write_text(dir / "manifest.json", to_json(m, dir) + "\n");
}

void run_register(const RegisterArgs& args) {
  const RegistrationMode mode = parse_mode(args.mode);
  RegistrationConfig config;
  config.weights = weights_for(mode);
  if (args.config) config = load_registration_config(*args.config, config);
  validate(config);

  for (const CaseManifest& c : load_case_manifest(args.case_manifest)) {
    const Volume moving_mask = load_mask(c.moving_mask);
    const Volume fixed_mask = load_mask(c.fixed_mask);
    const LandmarkSet moving_lms = load_landmarks(c, true);
    const LandmarkSet fixed_lms = load_landmarks(c, false);

    Progress progress{args.verbose};
    RegisterOptions options;
    if (!moving_lms.empty()) {
      options.moving_landmarks = &moving_lms;
      options.fixed_landmarks = &fixed_lms;
    }
    options.progress = print_progress;
    options.progress_data = &progress;

    if (args.verbose) std::cerr << "register " << c.case_id << " (" << to_string(mode) << ")\n";
    const auto start = std::chrono::steady_clock::now();
    const RegistrationResult result = register_masks(moving_mask, fixed_mask, config, options);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const DisplacementField identity(fixed_mask.grid);
    const MetricsReport coarse =
        evaluate_registration(moving_mask, fixed_mask, identity, options.moving_landmarks, options.fixed_landmarks);

    const fs::path dir = args.out / c.case_id / to_string(mode);
    fs::create_directories(dir);
    write_mhd(result.ddf, dir / "ddf.mhd");
    write_mhd(binarize(warp(moving_mask, result.ddf)), dir / "warped_mask.mhd");

    int iterations = 0;
    for (int n : result.iterations_used) iterations += n;
    json metrics;
    metrics["case_id"] = c.case_id;
    metrics["mode"] = to_string(mode);
    metrics["iterations"] = iterations;
    metrics["iterations_per_stage"] = result.iterations_used;
    metrics["metrics"] = json::parse(to_json(result.metrics));
    metrics["coarse"] = json::parse(to_json(coarse));
    metrics["initial_loss"] = loss_json(result.initial_loss);
    metrics["final_loss"] = loss_json(result.final_loss);
    metrics["config"] = json::parse(to_json(config));
    write_text(dir / "metrics.json", metrics.dump(2) + "\n");

    std::string trace = "iteration,stage,total,mdsc,msle,bending\n";
    std::size_t it = 0;
    for (std::size_t stage = 0; stage < result.iterations_used.size(); ++stage) {
      for (int k = 0; k < result.iterations_used[stage]; ++k, ++it) {
        const LossBreakdown& l = result.loss_trace[it];
        trace += std::to_string(it) + "," + std::to_string(stage) + "," + fmt17(l.total) + "," + fmt17(l.mdsc) +
                 "," + fmt17(l.msle) + "," + fmt17(l.bending) + "\n";
      }
    }
    write_text(dir / "loss_trace.csv", trace);
    write_text(dir / "timing.json", json{{"wall_time_s", wall}}.dump(2) + "\n");
  }
}

void run_sdm(const SdmArgs& args) {
  const Volume mask = load_mask(args.mask);
  if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
  write_mhd(signed_distance_map(mask), args.out);
}

void run_evaluate(const EvaluateArgs& args) {
  RunReport report;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(args.runs)) {
    if (entry.is_regular_file() && entry.path().filename() == "metrics.json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    json j;
    try {
      j = json::parse(read_text(f));
    } catch (const json::parse_error& e) {
      throw InvalidArgument(f.string() + ": invalid JSON: " + e.what());
    }
    if (!j.contains("metrics") || !j.contains("case_id") || !j.contains("mode")) {
      throw InvalidArgument(f.string() + ": not a registration metrics file");
    }
    const MetricsReport m = parse_metrics(j["metrics"].dump());
    ReportRow row;
    row.case_id = j["case_id"].get<std::string>();
    row.mode = j["mode"].get<std::string>();
    row.dsc_whole = m.dsc_whole;
    row.dsc_base = m.dsc_base;
    row.dsc_mid = m.dsc_mid;
    row.dsc_apex = m.dsc_apex;
    row.tre_mm = m.tre_mm;
    row.jac_grad_x100 = 100.0 * m.jac_grad;
    row.iterations = j.value("iterations", 0);
    const fs::path timing = f.parent_path() / "timing.json";
    if (fs::exists(timing)) row.wall_time_s = json::parse(read_text(timing)).value("wall_time_s", 0.0);
    report.rows.push_back(std::move(row));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.case_id, a.mode) < std::tie(b.case_id, b.mode);
  });
  if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
  write_report(report, args.out);
}

}  // namespace segreg::cli
