#pragma once

#include <cstdint>
#include <set>
#include <string>

#include "ivusim/bmode/pseudo_bmode.hpp"
#include "ivusim/dataset/loader.hpp"
#include "ivusim/dataset/phantom.hpp"
#include "ivusim/nn/models.hpp"
#include "ivusim/train/config.hpp"
#include "ivusim/util/kv_config.hpp"

namespace ivusim {

/// Every tunable of a pipeline run, merged from defaults, a config file and
/// command-line overrides (in that order).
struct RunConfig {
  std::uint64_t seed = 0;

  DatasetLayout layout;
  std::set<std::string> test_patients{"10"};

  std::size_t polar_radial = 256;
  std::size_t polar_angular = 256;
  std::size_t cartesian_side = 384;

  EchogenicityParams echogenicity;
  PhantomParams phantom;
  BmodeParams bmode;

  nn::RefinerConfig g1;
  nn::Discriminator1Config d1;
  nn::Generator2Config g2;
  nn::Discriminator2Config d2;

  train::Stage1Config stage1;
  train::Stage2Config stage2;

  std::size_t eval_images = 30;

  /// Rejects unknown keys, then reads every recognised one over the defaults.
  static RunConfig from_kv(const KvConfig& kv);
  /// Every key with its effective value.
  KvConfig to_kv() const;
  static const std::vector<std::string>& keys();
};

}  // namespace ivusim
