#include "ivusim/run_config.hpp"

#include <type_traits>

#include "ivusim/error.hpp"
#include "ivusim/util/format.hpp"

namespace ivusim {
namespace {

std::string num(double v) { return format_double(v); }

std::string num(std::size_t v) { return std::to_string(v); }

template <typename Seq>
std::string list(const Seq& v) {
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += ",";
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, std::string>) {
      s += x;
    } else {
      s += num(x);
    }
  }
  return s;
}

std::size_t count(const KvConfig& kv, const std::string& key, std::size_t fallback) {
  const auto v = kv.get_int(key, static_cast<long long>(fallback));
  if (v < 0) throw ValidationError("config key '" + key + "' must be >= 0");
  return static_cast<std::size_t>(v);
}

const char* class_key(TissueClass c) {
  switch (c) {
    case TissueClass::kLumen:
      return "lumen";
    case TissueClass::kMedia:
      return "media";
    case TissueClass::kExterna:
      return "externa";
  }
  return "";
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out = {
        "seed",
        "dataset.image_dir", "dataset.image_pattern", "dataset.lumen_contour_pattern",
        "dataset.eel_contour_pattern", "dataset.patient_id_regex", "dataset.test_patients",
        "polar.n_radial", "polar.n_angular", "cartesian.side",
        "echo.lumen_mean", "echo.media_mean", "echo.externa_mean",
        "echo.lumen_spread", "echo.media_spread", "echo.externa_spread",
        "phantom.lumen_min", "phantom.lumen_max", "phantom.eel_min", "phantom.eel_max",
        "phantom.harmonics", "phantom.harmonic_fraction",
        "psf.f0", "psf.sigma_axial", "psf.sigma_lateral", "bmode.dynamic_range_db",
        "stage1.learning_rate", "stage1.epochs", "stage1.batch_size", "stage1.micro_batch",
        "stage1.lambda", "stage1.history_batches",
        "stage2.initial_learning_rate", "stage2.decay", "stage2.decay_every", "stage2.epochs",
        "stage2.batch_size", "stage2.micro_batch", "stage2.history_batches",
        "adam.beta1", "adam.beta2", "adam.eps",
        "eval.n_images"};
    const auto& m = nn::model_config_keys();
    out.insert(out.end(), m.begin(), m.end());
    return out;
  }();
  return k;
}

RunConfig RunConfig::from_kv(const KvConfig& kv) {
  kv.require_known(keys());
  RunConfig c;
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", 0));

  KvConfig layout;
  for (const auto& key : DatasetLayout::config_keys()) {
    if (auto v = kv.get("dataset." + key)) layout.set(key, *v);
  }
  c.layout = DatasetLayout::from_config(layout);
  if (auto v = kv.get("dataset.test_patients")) {
    c.test_patients.clear();
    std::size_t pos = 0;
    while (pos <= v->size()) {
      auto next = v->find(',', pos);
      if (next == std::string::npos) next = v->size();
      auto item = v->substr(pos, next - pos);
      if (!item.empty()) c.test_patients.insert(item);
      pos = next + 1;
    }
  }

  c.polar_radial = count(kv, "polar.n_radial", c.polar_radial);
  c.polar_angular = count(kv, "polar.n_angular", c.polar_angular);
  c.cartesian_side = count(kv, "cartesian.side", c.cartesian_side);

  for (auto cls : kAllTissueClasses) {
    const std::string k = class_key(cls);
    c.echogenicity[cls].mean = kv.get_double("echo." + k + "_mean", c.echogenicity[cls].mean);
    c.echogenicity[cls].spread = kv.get_double("echo." + k + "_spread", c.echogenicity[cls].spread);
  }

  auto& ph = c.phantom;
  ph.lumen_min = kv.get_double("phantom.lumen_min", ph.lumen_min);
  ph.lumen_max = kv.get_double("phantom.lumen_max", ph.lumen_max);
  ph.eel_min = kv.get_double("phantom.eel_min", ph.eel_min);
  ph.eel_max = kv.get_double("phantom.eel_max", ph.eel_max);
  ph.n_harmonics = static_cast<int>(kv.get_int("phantom.harmonics", ph.n_harmonics));
  ph.harmonic_fraction = kv.get_double("phantom.harmonic_fraction", ph.harmonic_fraction);
  ph.n_radial = c.polar_radial;
  ph.n_angular = c.polar_angular;
  ph.echogenicity = c.echogenicity;

  c.bmode.psf.f0 = kv.get_double("psf.f0", c.bmode.psf.f0);
  c.bmode.psf.sigma_axial = kv.get_double("psf.sigma_axial", c.bmode.psf.sigma_axial);
  c.bmode.psf.sigma_lateral = kv.get_double("psf.sigma_lateral", c.bmode.psf.sigma_lateral);
  c.bmode.dynamic_range_db = kv.get_double("bmode.dynamic_range_db", c.bmode.dynamic_range_db);
  c.bmode.psf.validate();
  if (!(c.bmode.dynamic_range_db > 0.0)) throw ValidationError("bmode.dynamic_range_db must be > 0");

  c.g1 = nn::RefinerConfig::from_config(kv);
  c.d1 = nn::Discriminator1Config::from_config(kv);
  c.g2 = nn::Generator2Config::from_config(kv);
  c.d2 = nn::Discriminator2Config::from_config(kv);

  train::AdamConfig adam;
  adam.beta1 = kv.get_double("adam.beta1", adam.beta1);
  adam.beta2 = kv.get_double("adam.beta2", adam.beta2);
  adam.eps = kv.get_double("adam.eps", adam.eps);

  auto& s1 = c.stage1;
  s1.learning_rate = kv.get_double("stage1.learning_rate", s1.learning_rate);
  s1.epochs = count(kv, "stage1.epochs", s1.epochs);
  s1.batch_size = count(kv, "stage1.batch_size", s1.batch_size);
  s1.micro_batch = count(kv, "stage1.micro_batch", s1.micro_batch);
  s1.lambda = kv.get_double("stage1.lambda", s1.lambda);
  s1.history_batches = count(kv, "stage1.history_batches", s1.history_batches);
  s1.adam = adam;
  s1.validate();

  auto& s2 = c.stage2;
  s2.initial_learning_rate = kv.get_double("stage2.initial_learning_rate", s2.initial_learning_rate);
  s2.decay = kv.get_double("stage2.decay", s2.decay);
  s2.decay_every = count(kv, "stage2.decay_every", s2.decay_every);
  s2.epochs = count(kv, "stage2.epochs", s2.epochs);
  s2.batch_size = count(kv, "stage2.batch_size", s2.batch_size);
  s2.micro_batch = count(kv, "stage2.micro_batch", s2.micro_batch);
  s2.history_batches = count(kv, "stage2.history_batches", s2.history_batches);
  s2.adam = adam;
  s2.validate();

  c.eval_images = count(kv, "eval.n_images", c.eval_images);
  if (c.polar_radial < 2 || c.polar_angular < 2 || c.cartesian_side < 2) {
    throw ValidationError("polar and cartesian dims must be >= 2");
  }
  return c;
}

KvConfig RunConfig::to_kv() const {
  KvConfig kv;
  kv.set("seed", std::to_string(seed));
  kv.set("dataset.image_dir", layout.image_dir);
  kv.set("dataset.image_pattern", layout.image_pattern);
  kv.set("dataset.lumen_contour_pattern", layout.lumen_contour_pattern);
  kv.set("dataset.eel_contour_pattern", layout.eel_contour_pattern);
  kv.set("dataset.patient_id_regex", layout.patient_id_regex);
  kv.set("dataset.test_patients", list(test_patients));
  kv.set("polar.n_radial", num(polar_radial));
  kv.set("polar.n_angular", num(polar_angular));
  kv.set("cartesian.side", num(cartesian_side));
  for (auto cls : kAllTissueClasses) {
    const std::string k = class_key(cls);
    kv.set("echo." + k + "_mean", num(echogenicity[cls].mean));
    kv.set("echo." + k + "_spread", num(echogenicity[cls].spread));
  }
  kv.set("phantom.lumen_min", num(phantom.lumen_min));
  kv.set("phantom.lumen_max", num(phantom.lumen_max));
  kv.set("phantom.eel_min", num(phantom.eel_min));
  kv.set("phantom.eel_max", num(phantom.eel_max));
  kv.set("phantom.harmonics", std::to_string(phantom.n_harmonics));
  kv.set("phantom.harmonic_fraction", num(phantom.harmonic_fraction));
  kv.set("psf.f0", num(bmode.psf.f0));
  kv.set("psf.sigma_axial", num(bmode.psf.sigma_axial));
  kv.set("psf.sigma_lateral", num(bmode.psf.sigma_lateral));
  kv.set("bmode.dynamic_range_db", num(bmode.dynamic_range_db));
  kv.set("g1.image_size", num(g1.image_size));
  kv.set("g1.width", num(g1.width));
  kv.set("g1.blocks", num(g1.blocks));
  kv.set("g1.batch_norm", g1.batch_norm ? "true" : "false");
  kv.set("d1.widths", list(d1.widths));
  kv.set("d1.stride1", num(d1.stride1));
  kv.set("d1.stride2", num(d1.stride2));
  kv.set("d1.per_patch", d1.per_patch ? "true" : "false");
  kv.set("d1.leak", num(d1.leak));
  kv.set("g2.width", num(g2.width));
  kv.set("g2.blocks", num(g2.blocks));
  kv.set("g2.up_widths", list(g2.up_widths));
  kv.set("g2.batch_norm", g2.batch_norm ? "true" : "false");
  kv.set("d2.widths", list(d2.widths));
  kv.set("d2.head_channels", num(d2.head_channels));
  kv.set("d2.batch_norm", d2.batch_norm ? "true" : "false");
  kv.set("d2.leak", num(d2.leak));
  kv.set("stage1.learning_rate", num(stage1.learning_rate));
  kv.set("stage1.epochs", num(stage1.epochs));
  kv.set("stage1.batch_size", num(stage1.batch_size));
  kv.set("stage1.micro_batch", num(stage1.micro_batch));
  kv.set("stage1.lambda", num(stage1.lambda));
  kv.set("stage1.history_batches", num(stage1.history_batches));
  kv.set("stage2.initial_learning_rate", num(stage2.initial_learning_rate));
  kv.set("stage2.decay", num(stage2.decay));
  kv.set("stage2.decay_every", num(stage2.decay_every));
  kv.set("stage2.epochs", num(stage2.epochs));
  kv.set("stage2.batch_size", num(stage2.batch_size));
  kv.set("stage2.micro_batch", num(stage2.micro_batch));
  kv.set("stage2.history_batches", num(stage2.history_batches));
  kv.set("adam.beta1", num(stage1.adam.beta1));
  kv.set("adam.beta2", num(stage1.adam.beta2));
  kv.set("adam.eps", num(stage1.adam.eps));
  kv.set("eval.n_images", num(eval_images));
  return kv;
}

}  // namespace ivusim
