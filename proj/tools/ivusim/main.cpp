#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ivusim/error.hpp"

namespace {

void add_common(CLI::App* sub, ivusim::cli::CommonOptions& c) {
  sub->add_option("--config", c.config_path, "Key-value config file (default: $IVUSIM_CONFIG)");
  sub->add_option("--set", c.set, "Override one config key, key=value (repeatable)");
  sub->add_option("--seed", c.seed, "Run seed");
  sub->add_option("--jobs", c.jobs, "Worker threads for per-image work")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ivusim::cli;
  const std::vector<std::string> args(argv, argv + argc);

  CLI::App app{"Two-stage adversarial IVUS image simulation"};
  app.set_version_flag("--version", std::string("ivusim ") + IVUSIM_VERSION);
  app.require_subcommand(1);

  CommonOptions common;

  IngestOptions ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Convert annotated frames into a polar corpus");
  add_common(s_ingest, common);
  s_ingest->add_option("--root", ingest.root, "Dataset root");
  s_ingest->add_option("--out", ingest.out, "Output corpus directory")->required();
  s_ingest->add_option("--synthetic", ingest.synthetic,
                       "Render N reference-scanner phantoms instead of reading --root");

  AugmentOptions aug;
  auto* s_aug = app.add_subcommand("augment", "12 rotations x 3 radial shifts per polar mask");
  add_common(s_aug, common);
  s_aug->add_option("--in", aug.in, "Mask directory or manifest")->required();
  s_aug->add_option("--out", aug.out, "Output directory")->required();

  SimulateOptions sim;
  auto* s_sim = app.add_subcommand("simulate-stage0", "Pseudo B-mode images from tissue maps");
  add_common(s_sim, common);
  s_sim->add_option("--maps", sim.maps, "Mask directory or manifest")->required();
  s_sim->add_option("--out", sim.out, "Output directory")->required();
  s_sim->add_option("--psf", sim.psf, "f0,sigma_axial,sigma_lateral")->delimiter(',');
  s_sim->add_option("--dr", sim.dr, "Dynamic range in dB");
  s_sim->add_option("--limit", sim.limit, "Use only the first N maps");

  TrainOptionsCli t1;
  auto* s_t1 = app.add_subcommand("train-stage1", "Train the low-resolution refiner");
  add_common(s_t1, common);
  s_t1->add_option("--synthetic", t1.synthetic, "Stage 0 corpus")->required();
  s_t1->add_option("--real", t1.real, "Real polar corpus")->required();
  s_t1->add_option("--real-split", t1.real_split, "Split of the real corpus to train on");
  s_t1->add_option("--out", t1.out, "Run directory")->required();
  s_t1->add_option("--resume", t1.resume, "Continue from a stage1 checkpoint");
  s_t1->add_option("--limit", t1.limit, "Use only the first N synthetic images");
  s_t1->add_option("--max-iterations", t1.max_iterations, "Cap iterations per epoch (smoke runs)");

  TrainOptionsCli t2;
  auto* s_t2 = app.add_subcommand("train-stage2", "Train the high-resolution generator on frozen Stage I");
  add_common(s_t2, common);
  s_t2->add_option("--synthetic", t2.synthetic, "Stage 0 corpus")->required();
  s_t2->add_option("--real", t2.real, "Real polar corpus")->required();
  s_t2->add_option("--real-split", t2.real_split, "Split of the real corpus to train on");
  s_t2->add_option("--stage1", t2.stage1, "Stage I checkpoint")->required();
  s_t2->add_option("--out", t2.out, "Run directory")->required();
  s_t2->add_option("--resume", t2.resume, "Continue from a stage2 checkpoint");
  s_t2->add_option("--limit", t2.limit, "Use only the first N synthetic images");
  s_t2->add_option("--max-iterations", t2.max_iterations, "Cap iterations per epoch (smoke runs)");

  GenerateOptions gen;
  auto* s_gen = app.add_subcommand("generate", "Tissue maps -> simulated polar and Cartesian frames");
  add_common(s_gen, common);
  s_gen->add_option("--model", gen.model, "Stage II checkpoint")->required();
  s_gen->add_option("--maps", gen.maps, "Mask directory or manifest")->required();
  s_gen->add_option("--out", gen.out, "Output directory")->required();
  s_gen->add_option("--batch", gen.batch, "Images per network batch");
  s_gen->add_option("--limit", gen.limit, "Use only the first N maps");

  EvaluateOptions ev;
  auto* s_ev = app.add_subcommand("evaluate", "Region intensity JS divergences");
  add_common(s_ev, common);
  s_ev->add_option("--real", ev.real, "Annotated real corpus")->required();
  s_ev->add_option("--real-split", ev.real_split, "Split of the real corpus to sample from");
  s_ev->add_option("--sim", ev.sim, "Annotated simulated corpus (repeatable)")->required();
  s_ev->add_option("--name", ev.names, "Report label per --sim");
  s_ev->add_option("--n", ev.n, "Images sampled per corpus");
  s_ev->add_option("--out", ev.out, "Directory for report.txt and report.tsv");

  VttExportOptions vx;
  auto* s_vx = app.add_subcommand("vtt-export", "Randomized real/simulated pairs for a visual Turing test");
  add_common(s_vx, common);
  s_vx->add_option("--real", vx.real, "Real corpus")->required();
  s_vx->add_option("--real-split", vx.real_split, "Split of the real corpus");
  s_vx->add_option("--sim", vx.sim, "Simulated corpus")->required();
  s_vx->add_option("--pairs", vx.pairs, "Number of pairs")->required();
  s_vx->add_option("--out", vx.out, "Directory handed to raters")->required();
  s_vx->add_option("--key", vx.key, "Answer key file, kept apart from --out")->required();

  VttScoreOptions vs;
  auto* s_vs = app.add_subcommand("vtt-score", "Accuracy and Wilson interval of rater responses");
  s_vs->add_option("--key", vs.key, "Answer key written by vtt-export")->required();
  s_vs->add_option("--responses", vs.responses, "TSV with columns pair and response (L or R)")->required();
  s_vs->add_option("--column", vs.column, "Response column name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (dynamic_cast<const CLI::RequiredError*>(&e) && app.get_subcommands().empty()) {
      std::cerr << app.help();
    }
    return 2;
  }

  try {
    if (*s_ingest) return run_ingest(common, ingest, args);
    if (*s_aug) return run_augment(common, aug, args);
    if (*s_sim) return run_simulate(common, sim, args);
    if (*s_t1) return run_train_stage1(common, t1, args);
    if (*s_t2) return run_train_stage2(common, t2, args);
    if (*s_gen) return run_generate(common, gen, args);
    if (*s_ev) return run_evaluate(common, ev, args);
    if (*s_vx) return run_vtt_export(common, vx, args);
    if (*s_vs) return run_vtt_score(vs);
  } catch (const ivusim::Error& e) {
    std::cerr << "ivusim: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ivusim: " << e.what() << '\n';
    return 1;
  }
  std::cerr << app.help();
  return 2;
}
