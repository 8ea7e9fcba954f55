#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "segreg/optimizer.hpp"
#include "segreg/phantom.hpp"

namespace segreg {

// JSON (snake_case keys) <-> configuration structs. Missing keys keep their
// defaults; unknown keys are rejected with InvalidArgument.
RegistrationConfig parse_registration_config(const std::string& json_text,
                                             const RegistrationConfig& defaults = {});
RegistrationConfig load_registration_config(const std::filesystem::path& path,
                                            const RegistrationConfig& defaults = {});
std::string to_json(const RegistrationConfig& config);

PhantomSpec parse_phantom_spec(const std::string& json_text);
PhantomSpec load_phantom_spec(const std::filesystem::path& path);
std::string to_json(const PhantomSpec& spec);

struct LandmarkPaths {
  std::string id;
  std::filesystem::path moving;
  std::filesystem::path fixed;
};

/// File set of one registration case. Paths are absolute after loading.
struct CaseManifest {
  std::string case_id;
  std::optional<std::filesystem::path> moving_image;
  std::optional<std::filesystem::path> fixed_image;
  std::filesystem::path moving_mask;
  std::filesystem::path fixed_mask;
  std::vector<LandmarkPaths> landmarks;
};

/// Accepts a single case object or {"cases": [...]}. Relative paths resolve
/// against the manifest's directory; every referenced file must exist.
std::vector<CaseManifest> load_case_manifest(const std::filesystem::path& path);

/// Serializes with paths written relative to `base_dir` where possible.
std::string to_json(const CaseManifest& manifest, const std::filesystem::path& base_dir);
std::string to_json(const std::vector<CaseManifest>& cases, const std::filesystem::path& base_dir);

LandmarkSet load_landmarks(const CaseManifest& manifest, bool moving_side);

std::string to_json(const MetricsReport& metrics);
MetricsReport parse_metrics(const std::string& json_text);

}  // namespace segreg
