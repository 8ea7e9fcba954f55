// segreg: segmentation-driven deformable registration toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 data or numerical error.

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "segreg/error.hpp"
#include "segreg/mhd.hpp"

namespace {

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const segreg::MhdError*>(&e)) return "io";
  if (dynamic_cast<const segreg::NumericalError*>(&e)) return "numerical";
  if (dynamic_cast<const segreg::InvalidArgument*>(&e)) return "invalid_argument";
  if (dynamic_cast<const segreg::Error*>(&e)) return "error";
  return "internal";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace segreg::cli;
  CLI::App app{"Segmentation-driven deformable registration (multiscale Dice + SDM + bending energy)", "segreg"};
  app.require_subcommand(1);

  PhantomArgs phantom;
  auto* sp = app.add_subcommand("phantom", "Generate synthetic mask pairs with a known deformation");
  sp->add_option("--spec", phantom.spec, "Phantom spec JSON")->required()->check(CLI::ExistingFile);
  sp->add_option("--out", phantom.out, "Output directory")->required();
  sp->add_option("--count", phantom.count, "Number of phantoms (seed = spec.seed + index)")
      ->check(CLI::PositiveNumber);

  PrealignArgs pre;
  auto* pa = app.add_subcommand("prealign", "Normalize intensities and center-of-mass align onto a cropped grid");
  pa->add_option("--moving", pre.moving, "Moving image (.mhd)")->required()->check(CLI::ExistingFile);
  pa->add_option("--moving-mask", pre.moving_mask, "Moving mask (.mhd)")->required()->check(CLI::ExistingFile);
  pa->add_option("--fixed", pre.fixed, "Fixed image (.mhd)")->required()->check(CLI::ExistingFile);
  pa->add_option("--fixed-mask", pre.fixed_mask, "Fixed mask (.mhd)")->required()->check(CLI::ExistingFile);
  pa->add_option("--out", pre.out, "Output directory")->required();
  pa->add_option("--dims", pre.dims, "Target grid size x,y,z")->capture_default_str();
  pa->add_option("--spacing", pre.spacing, "Target spacing in mm (s or sx,sy,sz)")->capture_default_str();
  pa->add_option("--case-id", pre.case_id, "case_id written to the output manifest")->capture_default_str();
  pa->add_option("--percentile", pre.percentile, "Intensity normalization percentile")->capture_default_str();

  RegisterArgs reg;
  auto* rg = app.add_subcommand("register", "Optimize the DDF pyramid for every case of a manifest");
  rg->add_option("--case", reg.case_manifest, "Case manifest JSON")->required()->check(CLI::ExistingFile);
  rg->add_option("--mode", reg.mode, "Loss preset")
      ->check(CLI::IsMember({"mdsc", "sdm", "mix"}, CLI::ignore_case))
      ->capture_default_str();
  rg->add_option("--config", reg.config, "Registration config JSON (overrides preset)")->check(CLI::ExistingFile);
  rg->add_option("--out", reg.out, "Output directory")->required();
  rg->add_flag("--verbose", reg.verbose, "Print the loss every 10 iterations");

  SdmArgs sdm;
  auto* sd = app.add_subcommand("sdm", "Signed distance map of a binary mask");
  sd->add_option("--mask", sdm.mask, "Binary mask (.mhd)")->required()->check(CLI::ExistingFile);
  sd->add_option("--out", sdm.out, "Output .mhd")->required();

  EvaluateArgs ev;
  auto* evc = app.add_subcommand("evaluate", "Collect metrics.json files into a CSV report");
  evc->add_option("--runs", ev.runs, "Directory searched recursively")->required()->check(CLI::ExistingDirectory);
  evc->add_option("--out", ev.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  if (name == "prealign") {
    try {
      parse_dims(pre.dims);
      parse_spacing(pre.spacing);
    } catch (const std::exception& e) {
      std::cerr << "segreg prealign: usage: " << e.what() << "\n";
      return 1;
    }
  }
  try {
    if (name == "phantom") run_phantom(phantom);
    if (name == "prealign") run_prealign(pre);
    if (name == "register") run_register(reg);
    if (name == "sdm") run_sdm(sdm);
    if (name == "evaluate") run_evaluate(ev);
  } catch (const std::exception& e) {
    std::cerr << "segreg " << name << ": error[" << error_kind(e) << "]: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
