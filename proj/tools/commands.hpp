#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "segreg/grid.hpp"

namespace segreg::cli {

struct PhantomArgs {
  std::filesystem::path spec;
  std::filesystem::path out;
  int count = 1;
};

struct PrealignArgs {
  std::filesystem::path moving;
  std::filesystem::path moving_mask;
  std::filesystem::path fixed;
  std::filesystem::path fixed_mask;
  std::filesystem::path out;
  std::string dims = "96,96,80";
  std::string spacing = "0.88";
  std::string case_id = "case";
  double percentile = 99.0;
};

struct RegisterArgs {
  std::filesystem::path case_manifest;
  std::string mode = "mix";
  std::optional<std::filesystem::path> config;
  std::filesystem::path out;
  bool verbose = false;
};

struct SdmArgs {
  std::filesystem::path mask;
  std::filesystem::path out;
};

struct EvaluateArgs {
  std::filesystem::path runs;
  std::filesystem::path out;
};

void run_phantom(const PhantomArgs& args);
void run_prealign(const PrealignArgs& args);
void run_register(const RegisterArgs& args);
void run_sdm(const SdmArgs& args);
void run_evaluate(const EvaluateArgs& args);

// Parses "a,b,c" (or a single value repeated when allow_scalar).
Index3 parse_dims(const std::string& text);
Vec3 parse_spacing(const std::string& text);

}  // namespace segreg::cli
