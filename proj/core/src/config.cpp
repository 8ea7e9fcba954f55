#include "segreg/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "segreg/error.hpp"
#include "segreg/mhd.hpp"

namespace segreg {

using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json parse_object(const std::string& text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string(what) + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw InvalidArgument(std::string(what) + ": expected a JSON object");
  return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!ok.count(item.key())) throw InvalidArgument(std::string(what) + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void read_into(const json& j, const char* key, T& dst, const char* what) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string(what) + ": bad value for '" + key + "': " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

std::string relative_to(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (base.empty()) return p.generic_string();
  const std::filesystem::path rel = p.lexically_relative(base);
  return rel.empty() ? p.generic_string() : rel.generic_string();
}

void require_file(const std::filesystem::path& p, const std::string& case_id) {
  if (!std::filesystem::is_regular_file(p)) {
    throw InvalidArgument("case '" + case_id + "': file not found: " + p.string());
  }
}

CaseManifest parse_case(const json& j, const std::filesystem::path& base) {
  constexpr const char* what = "case manifest";
  if (!j.is_object()) throw InvalidArgument("case manifest: each case must be an object");
  reject_unknown(j, {"case_id", "moving_image", "fixed_image", "moving_mask", "fixed_mask", "landmarks"}, what);
  CaseManifest m;
  std::string s;
  read_into(j, "case_id", m.case_id, what);
  if (m.case_id.empty()) throw InvalidArgument("case manifest: case_id is required");
  for (const char* key : {"moving_mask", "fixed_mask"}) {
    if (!j.contains(key)) throw InvalidArgument("case '" + m.case_id + "': " + key + " is required");
  }
  read_into(j, "moving_mask", s, what);
  m.moving_mask = resolve(base, s);
  read_into(j, "fixed_mask", s, what);
  m.fixed_mask = resolve(base, s);
  if (j.contains("moving_image")) {
    read_into(j, "moving_image", s, what);
    m.moving_image = resolve(base, s);
  }
  if (j.contains("fixed_image")) {
    read_into(j, "fixed_image", s, what);
    m.fixed_image = resolve(base, s);
  }
  std::set<std::string> ids;
  if (j.contains("landmarks")) {
    if (!j["landmarks"].is_array()) throw InvalidArgument("case manifest: landmarks must be an array");
    for (const json& lj : j["landmarks"]) {
      if (!lj.is_object()) throw InvalidArgument("case manifest: each landmark must be an object");
      reject_unknown(lj, {"id", "moving", "fixed"}, "landmark");
      LandmarkPaths lp;
      std::string mv;
      std::string fx;
      read_into(lj, "id", lp.id, what);
      read_into(lj, "moving", mv, what);
      read_into(lj, "fixed", fx, what);
      if (lp.id.empty() || mv.empty() || fx.empty()) {
        throw InvalidArgument("case '" + m.case_id + "': landmarks need id, moving and fixed");
      }
      if (!ids.insert(lp.id).second) {
        throw InvalidArgument("case '" + m.case_id + "': duplicate landmark id '" + lp.id + "'");
      }
      lp.moving = resolve(base, mv);
      lp.fixed = resolve(base, fx);
      m.landmarks.push_back(std::move(lp));
    }
  }
  require_file(m.moving_mask, m.case_id);
  require_file(m.fixed_mask, m.case_id);
  if (m.moving_image) require_file(*m.moving_image, m.case_id);
  if (m.fixed_image) require_file(*m.fixed_image, m.case_id);
  for (const LandmarkPaths& lp : m.landmarks) {
    require_file(lp.moving, m.case_id);
    require_file(lp.fixed, m.case_id);
  }
  return m;
}

json case_json(const CaseManifest& m, const std::filesystem::path& base) {
  json j;
  j["case_id"] = m.case_id;
  if (m.moving_image) j["moving_image"] = relative_to(*m.moving_image, base);
  if (m.fixed_image) j["fixed_image"] = relative_to(*m.fixed_image, base);
  j["moving_mask"] = relative_to(m.moving_mask, base);
  j["fixed_mask"] = relative_to(m.fixed_mask, base);
  json lms = json::array();
  for (const LandmarkPaths& lp : m.landmarks) {
    lms.push_back({{"id", lp.id}, {"moving", relative_to(lp.moving, base)}, {"fixed", relative_to(lp.fixed, base)}});
  }
  j["landmarks"] = lms;
  return j;
}

}  // namespace

RegistrationConfig parse_registration_config(const std::string& json_text, const RegistrationConfig& defaults) {
  constexpr const char* what = "registration config";
  const json j = parse_object(json_text, what);
  reject_unknown(j,
                 {"weights", "sigmas", "levels", "iters_per_level", "lr", "adam_beta1", "adam_beta2", "adam_eps",
                  "seed", "convergence_tol", "convergence_window", "bending_mixed_terms"},
                 what);
  RegistrationConfig c = defaults;
  if (j.contains("weights")) {
    const json& w = j["weights"];
    if (!w.is_object()) throw InvalidArgument("registration config: weights must be an object");
    reject_unknown(w, {"alpha", "beta"}, "registration config weights");
    read_into(w, "alpha", c.weights.alpha, what);
    read_into(w, "beta", c.weights.beta, what);
  }
  read_into(j, "sigmas", c.sigmas.sigmas, what);
  read_into(j, "levels", c.levels, what);
  read_into(j, "iters_per_level", c.iters_per_level, what);
  read_into(j, "lr", c.lr, what);
  read_into(j, "adam_beta1", c.adam_beta1, what);
  read_into(j, "adam_beta2", c.adam_beta2, what);
  read_into(j, "adam_eps", c.adam_eps, what);
  read_into(j, "seed", c.seed, what);
  read_into(j, "convergence_tol", c.convergence_tol, what);
  read_into(j, "convergence_window", c.convergence_window, what);
  read_into(j, "bending_mixed_terms", c.bending_mixed_terms, what);
  validate(c);
  return c;
}

RegistrationConfig load_registration_config(const std::filesystem::path& path, const RegistrationConfig& defaults) {
  return parse_registration_config(read_text(path), defaults);
}

std::string to_json(const RegistrationConfig& c) {
  json j;
  j["weights"] = {{"alpha", c.weights.alpha}, {"beta", c.weights.beta}};
  j["sigmas"] = c.sigmas.sigmas;
  j["levels"] = c.levels;
  j["iters_per_level"] = c.iters_per_level;
  j["lr"] = c.lr;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_eps"] = c.adam_eps;
  j["seed"] = c.seed;
  j["convergence_tol"] = c.convergence_tol;
  j["convergence_window"] = c.convergence_window;
  j["bending_mixed_terms"] = c.bending_mixed_terms;
  return j.dump(2);
}

PhantomSpec parse_phantom_spec(const std::string& json_text) {
  constexpr const char* what = "phantom spec";
  const json j = parse_object(json_text, what);
  reject_unknown(j,
                 {"dims", "spacing", "semi_axes", "affine", "translation", "affine_jitter", "translation_jitter_mm",
                  "bump_count", "bump_amplitude", "bump_sigma", "landmark_count", "landmark_radius", "seed"},
                 what);
  PhantomSpec s;
  read_into(j, "dims", s.dims, what);
  read_into(j, "spacing", s.spacing, what);
  read_into(j, "semi_axes", s.semi_axes, what);
  read_into(j, "affine", s.affine, what);
  read_into(j, "translation", s.translation, what);
  read_into(j, "affine_jitter", s.affine_jitter, what);
  read_into(j, "translation_jitter_mm", s.translation_jitter_mm, what);
  read_into(j, "bump_count", s.bump_count, what);
  read_into(j, "bump_amplitude", s.bump_amplitude, what);
  read_into(j, "bump_sigma", s.bump_sigma, what);
  read_into(j, "landmark_count", s.landmark_count, what);
  read_into(j, "landmark_radius", s.landmark_radius, what);
  read_into(j, "seed", s.seed, what);
  validate(s);
  return s;
}

PhantomSpec load_phantom_spec(const std::filesystem::path& path) { return parse_phantom_spec(read_text(path)); }

std::string to_json(const PhantomSpec& s) {
  json j;
  j["dims"] = s.dims;
  j["spacing"] = s.spacing;
  j["semi_axes"] = s.semi_axes;
  j["affine"] = s.affine;
  j["translation"] = s.translation;
  j["affine_jitter"] = s.affine_jitter;
  j["translation_jitter_mm"] = s.translation_jitter_mm;
  j["bump_count"] = s.bump_count;
  j["bump_amplitude"] = s.bump_amplitude;
  j["bump_sigma"] = s.bump_sigma;
  j["landmark_count"] = s.landmark_count;
  j["landmark_radius"] = s.landmark_radius;
  j["seed"] = s.seed;
  return j.dump(2);
}

std::vector<CaseManifest> load_case_manifest(const std::filesystem::path& path) {
  const json j = parse_object(read_text(path), "case manifest");
  const std::filesystem::path base = path.parent_path();
  std::vector<CaseManifest> cases;
  if (j.contains("cases")) {
    reject_unknown(j, {"cases"}, "case manifest");
    if (!j["cases"].is_array()) throw InvalidArgument("case manifest: cases must be an array");
    for (const json& c : j["cases"]) cases.push_back(parse_case(c, base));
  } else {
    cases.push_back(parse_case(j, base));
  }
  std::set<std::string> ids;
  for (const CaseManifest& c : cases) {
    if (!ids.insert(c.case_id).second) throw InvalidArgument("case manifest: duplicate case_id '" + c.case_id + "'");
  }
  return cases;
}

std::string to_json(const CaseManifest& manifest, const std::filesystem::path& base_dir) {
  return case_json(manifest, base_dir).dump(2);
}

std::string to_json(const std::vector<CaseManifest>& cases, const std::filesystem::path& base_dir) {
  json arr = json::array();
  for (const CaseManifest& c : cases) arr.push_back(case_json(c, base_dir));
  return json{{"cases", arr}}.dump(2);
}

LandmarkSet load_landmarks(const CaseManifest& manifest, bool moving_side) {
  LandmarkSet out;
  for (const LandmarkPaths& lp : manifest.landmarks) {
    Volume mask = read_volume(moving_side ? lp.moving : lp.fixed);
    if (mask.kind != VolumeKind::binary_mask) {
      throw InvalidArgument("landmark '" + lp.id + "' is not a binary mask");
    }
    out.push_back({lp.id, std::move(mask)});
  }
  return out;
}

std::string to_json(const MetricsReport& m) {
  json j;
  j["dsc_whole"] = m.dsc_whole;
  j["dsc_base"] = m.dsc_base;
  j["dsc_mid"] = m.dsc_mid;
  j["dsc_apex"] = m.dsc_apex;
  j["tre_mm"] = m.tre_mm ? json(*m.tre_mm) : json(nullptr);
  j["jac_grad"] = m.jac_grad;
  j["jac_grad_x100"] = 100.0 * m.jac_grad;
  j["folding_fraction"] = m.folding_fraction;
  return j.dump(2);
}

MetricsReport parse_metrics(const std::string& json_text) {
  constexpr const char* what = "metrics";
  const json j = parse_object(json_text, what);
  MetricsReport m;
  read_into(j, "dsc_whole", m.dsc_whole, what);
  read_into(j, "dsc_base", m.dsc_base, what);
  read_into(j, "dsc_mid", m.dsc_mid, what);
  read_into(j, "dsc_apex", m.dsc_apex, what);
  if (j.contains("tre_mm") && !j["tre_mm"].is_null()) m.tre_mm = j["tre_mm"].get<double>();
  read_into(j, "jac_grad", m.jac_grad, what);
  read_into(j, "folding_fraction", m.folding_fraction, what);
  return m;
}

}  // namespace segreg
