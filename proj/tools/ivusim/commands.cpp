#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "ivusim/bmode/reference_scanner.hpp"
#include "ivusim/dataset/augment.hpp"
#include "ivusim/dataset/loader.hpp"
#include "ivusim/dataset/phantom.hpp"
#include "ivusim/error.hpp"
#include "ivusim/eval/reports.hpp"
#include "ivusim/eval/vtt.hpp"
#include "ivusim/imaging/image_io.hpp"
#include "ivusim/imaging/scan_conversion.hpp"
#include "ivusim/train/corpus.hpp"
#include "ivusim/train/generate.hpp"
#include "ivusim/train/trainer.hpp"
#include "ivusim/util/format.hpp"
#include "ivusim/util/manifest.hpp"
#include "ivusim/util/seed.hpp"

namespace fs = std::filesystem;

namespace ivusim::cli {
namespace {

constexpr std::uint64_t kPhantomStream = 20;
constexpr std::uint64_t kReferenceStream = 21;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string padded(std::size_t v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, v);
  return buf;
}

std::string relative_to(const fs::path& target, const fs::path& base) {
  return fs::relative(fs::absolute(target), fs::absolute(base)).generic_string();
}

void require_dir_arg(const std::string& v, const char* flag) {
  if (v.empty()) throw ValidationError(std::string(flag) + " is required");
}

std::string epoch_line(const char* stage, std::size_t epoch, std::size_t total, double g, double d) {
  return std::string(stage) + " epoch " + std::to_string(epoch + 1) + "/" + std::to_string(total) +
         "  L_G " + format_fixed(g, 4) + "  L_D " + format_fixed(d, 4);
}

}  // namespace

int run_ingest(const CommonOptions& c, const IngestOptions& o, const std::vector<std::string>& argv) {
  const auto cfg = resolve_config(c);
  const auto& run = cfg.run;
  require_dir_arg(o.out, "--out");
  const fs::path out = o.out;
  fs::create_directories(out / "images");
  fs::create_directories(out / "masks" / "train");
  fs::create_directories(out / "masks" / "test");

  Manifest man({"id", "patient", "split", "image", "mask"});
  std::vector<PolarImage> calib_images;
  std::vector<PolarLabelMask> calib_masks;
  RunManifest rm{"ingest", argv, {}, {}};
  std::size_t n_test = 0;

  auto add = [&](const std::string& id, const std::string& patient, const PolarImage& img,
                 const PolarLabelMask* mask) {
    const bool test = run.test_patients.contains(patient);
    n_test += test;
    const std::string split = test ? "test" : "train";
    const std::string image_rel = "images/" + id + ".polar.png";
    save_image(out / image_rel, img);
    std::string mask_rel = "-";
    if (mask) {
      mask_rel = "masks/" + split + "/" + id + ".polar.pgm";
      save_mask(out / mask_rel, mask->labels);
      if (!test) {
        calib_images.push_back(img);
        calib_masks.push_back(*mask);
      }
    }
    man.add_row({id, patient, split, image_rel, mask_rel});
  };

  if (o.synthetic > 0) {
    // Stand-in clinical corpus: phantoms rendered by the reference scanner.
    PhantomParams pp = run.phantom;
    const ReferenceScannerParams ref;
    for (std::size_t k = 0; k < o.synthetic; ++k) {
      const std::string patient = std::to_string(1 + k % 10);
      const std::string id = "frame_" + patient + "_" + padded(k, 5);
      const auto ph = synth_phantom(derive_seed(run.seed, kPhantomStream, k), pp);
      const auto img = render_reference_frame(ph.mask, ref, derive_seed(run.seed, kReferenceStream, k));
      add(id, patient, img, &ph.mask);
    }
    rm.notes["source"] = "synthetic reference-scanner phantoms, n=" + std::to_string(o.synthetic);
  } else {
    require_dir_arg(o.root, "--root");
    const auto report = load_dataset(o.root, run.layout);
    for (const auto& w : report.warnings) log("warning: " + w);
    for (const auto& f : report.frames) {
      const auto polar = cartesian_to_polar(f.image, run.polar_radial, run.polar_angular);
      if (f.annotation) {
        const auto mask = rasterize_mask_polar(*f.annotation, f.image.side(), run.polar_radial,
                                               run.polar_angular);
        add(f.id, f.patient_id, polar, &mask);
      } else {
        add(f.id, f.patient_id, polar, nullptr);
      }
    }
    rm.inputs["dataset"] = input_hash(o.root);
    rm.notes["images"] = std::to_string(report.n_images);
    rm.notes["annotated"] = std::to_string(report.n_annotated);
    rm.notes["skipped_images"] = std::to_string(report.n_skipped_images);
    rm.notes["rejected_annotations"] = std::to_string(report.n_rejected_annotations);
  }
  man.save(out / "manifest.tsv");

  if (!calib_images.empty()) {
    const auto cal = calibrate_echogenicity(calib_images, calib_masks, run.echogenicity);
    std::ofstream os(out / "echogenicity_estimate.txt");
    os << "# region mean intensities of the annotated training frames\n";
    const char* names[] = {"lumen", "media", "externa"};
    for (auto cls : kAllTissueClasses) {
      os << "echo." << names[static_cast<int>(cls)] << "_mean = " << format_double(cal.params[cls].mean)
         << '\n';
    }
  }
  write_run_manifest(out, cfg, rm);
  std::cout << "ingested " << man.size() << " frames (" << man.size() - n_test << " train, " << n_test
            << " test) into " << out.string() << '\n';
  return 0;
}

int run_augment(const CommonOptions& c, const AugmentOptions& o, const std::vector<std::string>& argv) {
  const auto cfg = resolve_config(c);
  require_dir_arg(o.in, "--in");
  require_dir_arg(o.out, "--out");
  const auto masks = train::load_masks(o.in);
  if (masks.masks.empty()) throw ValidationError("no masks in " + o.in);
  std::vector<AugmentedMask> all;
  all.reserve(masks.masks.size() * 3 * kRotationSteps);
  for (std::size_t i = 0; i < masks.masks.size(); ++i) {
    auto a = augment(masks.masks[i], masks.ids[i]);
    std::move(a.begin(), a.end(), std::back_inserter(all));
  }
  write_augmented_corpus(o.out, all);
  RunManifest rm{"augment", argv, {{"masks", input_hash(o.in)}}, {}};
  rm.notes["inputs"] = std::to_string(masks.masks.size());
  rm.notes["outputs"] = std::to_string(all.size());
  write_run_manifest(o.out, cfg, rm);
  std::cout << masks.masks.size() << " masks -> " << all.size() << " augmented maps in " << o.out << '\n';
  return 0;
}

int run_simulate(const CommonOptions& c, const SimulateOptions& o, const std::vector<std::string>& argv) {
  KvConfig ov;
  if (!o.psf.empty()) {
    if (o.psf.size() != 3) throw ValidationError("--psf expects f0,sigma_axial,sigma_lateral");
    ov.set("psf.f0", format_double(o.psf[0]));
    ov.set("psf.sigma_axial", format_double(o.psf[1]));
    ov.set("psf.sigma_lateral", format_double(o.psf[2]));
  }
  if (o.dr) ov.set("bmode.dynamic_range_db", format_double(*o.dr));
  const auto cfg = resolve_config(c, ov);
  const auto& run = cfg.run;
  require_dir_arg(o.maps, "--maps");
  require_dir_arg(o.out, "--out");
  const fs::path out = o.out;
  fs::create_directories(out / "images");

  const auto masks = train::load_masks(o.maps, o.limit);
  if (masks.masks.empty()) throw ValidationError("no maps in " + o.maps);
  parallel_for(masks.masks.size(), c.jobs, [&](std::size_t i) {
    const auto img = train::simulate_stage0_item(masks.masks[i], run.echogenicity, run.bmode, run.seed, i);
    save_image(out / "images" / (masks.ids[i] + ".polar.png"), img);
  });

  Manifest man({"id", "image", "mask", "index", "echogenicity_seed", "speckle_seed"});
  for (std::size_t i = 0; i < masks.masks.size(); ++i) {
    const auto s = train::stage0_seeds(run.seed, i);
    man.add_row({masks.ids[i], "images/" + masks.ids[i] + ".polar.png", relative_to(masks.paths[i], out),
                 std::to_string(i), std::to_string(s.echogenicity), std::to_string(s.speckle)});
  }
  man.save(out / "manifest.tsv");
  RunManifest rm{"simulate-stage0", argv, {{"maps", input_hash(o.maps)}}, {}};
  rm.notes["psf"] = format_double(run.bmode.psf.f0) + "," + format_double(run.bmode.psf.sigma_axial) + "," +
                    format_double(run.bmode.psf.sigma_lateral);
  rm.notes["dynamic_range_db"] = format_double(run.bmode.dynamic_range_db);
  write_run_manifest(out, cfg, rm);
  std::cout << "simulated " << masks.masks.size() << " Stage 0 images into " << out.string() << '\n';
  return 0;
}

int run_train_stage1(const CommonOptions& c, const TrainOptionsCli& o, const std::vector<std::string>& argv) {
  const auto cfg = resolve_config(c);
  const auto& run = cfg.run;
  require_dir_arg(o.synthetic, "--synthetic");
  require_dir_arg(o.real, "--real");
  require_dir_arg(o.out, "--out");
  const std::size_t s = run.g1.image_size;
  const auto x = train::load_polar_batch(train::CorpusIndex(o.synthetic), s, s, o.limit);
  const auto y = train::load_polar_batch(
      train::CorpusIndex(o.real, train::MaskPolicy::kIgnore, o.real_split), s, s);
  log("stage1: " + std::to_string(x.shape().n) + " synthetic, " + std::to_string(y.shape().n) +
      " real images at " + std::to_string(s) + "x" + std::to_string(s));

  train::Stage1Trainer trainer(run.stage1, run.g1, run.d1, run.seed);
  if (!o.resume.empty()) trainer.resume(train::load_checkpoint(o.resume));
  train::TrainOptions opts;
  opts.checkpoint_dir = o.out;
  opts.config_text = cfg.effective.to_string();
  opts.max_iterations_per_epoch = o.max_iterations;
  opts.on_epoch = [&](std::size_t e, double g, double d) { log(epoch_line("stage1", e, run.stage1.epochs, g, d)); };
  const auto result = trainer.train(x, y, opts);
  train::write_loss_history(fs::path(o.out) / "loss_history.tsv", result.history);
  const auto ckpt = trainer.checkpoint(opts.config_text);
  train::save_checkpoint(fs::path(o.out) / "stage1.ckpt", ckpt);

  RunManifest rm{"train-stage1", argv, {{"synthetic", input_hash(o.synthetic)}, {"real", input_hash(o.real)}}, {}};
  if (!o.resume.empty()) rm.inputs["resume"] = input_hash(o.resume);
  rm.notes["epochs_run"] = std::to_string(result.epochs_run);
  rm.notes["best_epoch"] = std::to_string(result.best_epoch);
  rm.notes["g1_hash"] = ckpt.text.at("g1_hash");
  if (result.gradient_accumulation) {
    rm.notes["deviation"] = "gradient accumulation over micro-batches of " +
                            std::to_string(run.stage1.micro_batch);
  }
  write_run_manifest(o.out, cfg, rm);
  std::cout << "stage1 checkpoint: " << (fs::path(o.out) / "stage1.ckpt").string() << '\n';
  return 0;
}

int run_train_stage2(const CommonOptions& c, const TrainOptionsCli& o, const std::vector<std::string>& argv) {
  const auto cfg = resolve_config(c);
  const auto& run = cfg.run;
  require_dir_arg(o.synthetic, "--synthetic");
  require_dir_arg(o.real, "--real");
  require_dir_arg(o.stage1, "--stage1");
  require_dir_arg(o.out, "--out");
  const auto ck1 = train::load_checkpoint(o.stage1);
  if (ck1.stage != "stage1") throw ValidationError("--stage1 must be a stage1 checkpoint");
  auto g1 = train::load_refiner(ck1, run.g1);
  const auto hash_before = train::parameter_hash(*g1);

  const std::size_t s = run.g1.image_size;
  const std::size_t big = run.g2.output_size();
  const auto x = train::load_polar_batch(train::CorpusIndex(o.synthetic), s, s, o.limit);
  const auto y = train::load_polar_batch(
      train::CorpusIndex(o.real, train::MaskPolicy::kIgnore, o.real_split), big, big);
  log("stage2: " + std::to_string(x.shape().n) + " synthetic, " + std::to_string(y.shape().n) + " real images");

  train::Stage2Trainer trainer(run.stage2, run.g2, run.d2, *g1, run.seed);
  if (!o.resume.empty()) trainer.resume(train::load_checkpoint(o.resume));
  train::TrainOptions opts;
  opts.checkpoint_dir = o.out;
  opts.config_text = cfg.effective.to_string();
  opts.max_iterations_per_epoch = o.max_iterations;
  opts.on_epoch = [&](std::size_t e, double g, double d) { log(epoch_line("stage2", e, run.stage2.epochs, g, d)); };
  const auto result = trainer.train(x, y, opts);
  const auto hash_after = train::parameter_hash(*g1);
  if (hash_after != hash_before) throw Error("stage2 modified the frozen Stage I weights");
  train::write_loss_history(fs::path(o.out) / "loss_history.tsv", result.history);
  train::save_checkpoint(fs::path(o.out) / "stage2.ckpt", trainer.checkpoint(opts.config_text));

  RunManifest rm{"train-stage2", argv,
                 {{"synthetic", input_hash(o.synthetic)}, {"real", input_hash(o.real)}, {"stage1", input_hash(o.stage1)}},
                 {}};
  if (!o.resume.empty()) rm.inputs["resume"] = input_hash(o.resume);
  rm.notes["epochs_run"] = std::to_string(result.epochs_run);
  rm.notes["g1_hash_before"] = hash_before;
  rm.notes["g1_hash_after"] = hash_after;
  if (result.gradient_accumulation) {
    rm.notes["deviation"] = "gradient accumulation over micro-batches of " +
                            std::to_string(run.stage2.micro_batch);
  }
  write_run_manifest(o.out, cfg, rm);
  std::cout << "stage2 checkpoint: " << (fs::path(o.out) / "stage2.ckpt").string() << '\n';
  return 0;
}

int run_generate(const CommonOptions& c, const GenerateOptions& o, const std::vector<std::string>& argv) {
  const auto cfg = resolve_config(c);
  const auto& run = cfg.run;
  require_dir_arg(o.model, "--model");
  require_dir_arg(o.maps, "--maps");
  require_dir_arg(o.out, "--out");
  const fs::path out = o.out;
  for (const char* d : {"polar", "cartesian", "stage0"}) fs::create_directories(out / d);

  const auto t_load = Clock::now();
  auto gen = train::ImageGenerator::from_checkpoint(train::load_checkpoint(o.model), run.g1, run.g2,
                                                    {run.bmode, run.cartesian_side});
  const double load_ms = ms_since(t_load);
  const auto masks = train::load_masks(o.maps, o.limit);
  if (masks.masks.empty()) throw ValidationError("no maps in " + o.maps);

  Manifest man({"id", "image", "mask", "cartesian"});
  Manifest stage0({"id", "image", "mask"});
  Manifest latency({"id", "milliseconds"});
  std::vector<double> ms;
  const std::size_t batch = std::max<std::size_t>(1, o.batch);
  for (std::size_t b = 0; b < masks.masks.size(); b += batch) {
    const std::size_t e = std::min(masks.masks.size(), b + batch);
    std::vector<EchogenicityMap> maps(e - b);
    std::vector<std::uint64_t> seeds(e - b);
    parallel_for(e - b, c.jobs, [&](std::size_t k) {
      const auto s = train::stage0_seeds(run.seed, b + k);
      maps[k] = mask_to_echogenicity(masks.masks[b + k], run.echogenicity, s.echogenicity);
      seeds[k] = s.speckle;
    });
    const auto images = gen.generate_batch(maps, seeds, batch);
    for (std::size_t k = 0; k < images.size(); ++k) {
      const auto& id = masks.ids[b + k];
      const auto mask_rel = relative_to(masks.paths[b + k], out);
      save_image(out / "polar" / (id + ".polar.png"), images[k].polar);
      save_image(out / "cartesian" / (id + ".cart.png"), images[k].cartesian);
      save_image(out / "stage0" / (id + ".polar.png"), images[k].stage0);
      man.add_row({id, "polar/" + id + ".polar.png", mask_rel, "cartesian/" + id + ".cart.png"});
      stage0.add_row({id, id + ".polar.png", "../" + mask_rel});
      latency.add_row({id, format_fixed(images[k].milliseconds, 3)});
      ms.push_back(images[k].milliseconds);
    }
  }
  man.save(out / "manifest.tsv");
  stage0.save(out / "stage0" / "manifest.tsv");
  latency.save(out / "latency.tsv");

  const auto sum = train::summarize_latency(ms);
  std::ostringstream rep;
  rep << "images            " << sum.n << '\n'
      << "batch size        " << batch << '\n'
      << "model load ms     " << format_fixed(load_ms, 3) << '\n'
      << "per image ms      mean " << format_fixed(sum.mean_ms, 3) << "  median " << format_fixed(sum.median_ms, 3)
      << "  p95 " << format_fixed(sum.p95_ms, 3) << "  max " << format_fixed(sum.max_ms, 3) << '\n'
      << "target            < 10 ms per image on GPU-class hardware (informational)\n";
  {
    std::ofstream os(out / "latency_report.txt");
    os << rep.str();
  }
  RunManifest rm{"generate", argv, {{"model", input_hash(o.model)}, {"maps", input_hash(o.maps)}}, {}};
  rm.notes["mean_ms_per_image"] = format_fixed(sum.mean_ms, 3);
  write_run_manifest(out, cfg, rm);
  std::cout << rep.str();
  return 0;
}

int run_evaluate(const CommonOptions& c, const EvaluateOptions& o, const std::vector<std::string>& argv) {
  KvConfig ov;
  if (o.n) ov.set("eval.n_images", std::to_string(*o.n));
  const auto cfg = resolve_config(c, ov);
  const auto& run = cfg.run;
  require_dir_arg(o.real, "--real");
  if (o.sim.empty()) throw ValidationError("at least one --sim corpus is required");
  if (!o.names.empty() && o.names.size() != o.sim.size()) {
    throw ValidationError("--name must be given once per --sim");
  }
  const std::size_t n = run.eval_images;

  // Only the sampled items are read; pooled PMFs do not depend on order.
  auto load = [&](const std::string& path, const std::string& split) {
    const train::CorpusIndex idx(path, train::MaskPolicy::kRequire, split);
    if (idx.size() < n) {
      throw ValidationError("corpus " + path + " has " + std::to_string(idx.size()) +
                            " annotated items, " + std::to_string(n) + " required");
    }
    const auto rows = eval::sample_indices(idx.size(), n, run.seed);
    return train::load_polar_corpus(idx, train::MaskPolicy::kRequire, rows);
  };
  const auto real = load(o.real, o.real_split);
  std::vector<train::PolarCorpus> sims;
  for (const auto& s : o.sim) sims.push_back(load(s, {}));

  const eval::AnnotatedSet real_set{"real", real.images, real.masks};
  std::vector<eval::AnnotatedSet> sim_sets;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    std::string name = o.names.empty() ? fs::path(o.sim[i]).lexically_normal().filename().string() : o.names[i];
    if (name.empty()) name = fs::path(o.sim[i]).lexically_normal().parent_path().filename().string();
    sim_sets.push_back({name, sims[i].images, sims[i].masks});
  }
  const auto report = eval::divergence_report(real_set, sim_sets, n, run.seed);
  const auto text = eval::format_report_text(report);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    std::ofstream(fs::path(o.out) / "report.txt") << text;
    std::ofstream(fs::path(o.out) / "report.tsv") << eval::format_report_tsv(report);
    RunManifest rm{"evaluate", argv, {{"real", input_hash(o.real)}}, {}};
    for (std::size_t i = 0; i < o.sim.size(); ++i) rm.inputs["sim" + std::to_string(i)] = input_hash(o.sim[i]);
    write_run_manifest(o.out, cfg, rm);
  }
  std::cout << text;
  return 0;
}

int run_vtt_export(const CommonOptions& c, const VttExportOptions& o, const std::vector<std::string>& argv) {
  const auto cfg = resolve_config(c);
  const auto& run = cfg.run;
  require_dir_arg(o.real, "--real");
  require_dir_arg(o.sim, "--sim");
  require_dir_arg(o.out, "--out");
  require_dir_arg(o.key, "--key");
  const train::CorpusIndex real(o.real, train::MaskPolicy::kIgnore, o.real_split);
  const train::CorpusIndex sim(o.sim);
  const auto plan = eval::vtt_plan(real.size(), sim.size(), o.pairs, run.seed);
  std::vector<Grid<double>> real_img(real.size());
  std::vector<Grid<double>> sim_img(sim.size());
  for (const auto& p : plan) {
    real_img[p.real_index] = polar_to_cartesian(real.image(p.real_index), run.cartesian_side).grid();
    sim_img[p.sim_index] = polar_to_cartesian(sim.image(p.sim_index), run.cartesian_side).grid();
  }
  eval::vtt_export(o.out, o.key, real_img, sim_img, plan);
  RunManifest rm{"vtt-export", argv, {{"real", input_hash(o.real)}, {"sim", input_hash(o.sim)}}, {}};
  rm.notes["pairs"] = std::to_string(plan.size());
  write_run_manifest(o.out, cfg, rm);
  std::cout << "exported " << plan.size() << " pairs to " << o.out << "; answer key at " << o.key << '\n';
  return 0;
}

int run_vtt_score(const VttScoreOptions& o) {
  require_dir_arg(o.key, "--key");
  require_dir_arg(o.responses, "--responses");
  const auto key = eval::read_sides(o.key, "real_side");
  const auto resp = eval::read_sides(o.responses, o.column);
  const auto s = eval::vtt_score(key, resp);
  std::cout << "correct    " << s.correct << " / " << s.total << '\n'
            << "accuracy   " << format_fixed(s.accuracy, 4) << '\n'
            << "95% CI     [" << format_fixed(s.ci_low, 4) << ", " << format_fixed(s.ci_high, 4)
            << "] (Wilson)\n";
  return 0;
}

}  // namespace ivusim::cli
