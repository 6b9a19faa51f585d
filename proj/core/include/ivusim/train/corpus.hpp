#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ivusim/bmode/pseudo_bmode.hpp"
#include "ivusim/dataset/echogenicity.hpp"
#include "ivusim/dataset/mask.hpp"
#include "ivusim/nn/tensor.hpp"
#include "ivusim/util/manifest.hpp"

namespace ivusim::train {

enum class MaskPolicy {
  kIgnore,   // every row, masks not read
  kRequire,  // only rows with a mask ("-" marks none)
};

/// Rows of a corpus manifest (columns `id`, `image`, optionally `mask` and
/// `split`), read lazily. A non-empty `split` keeps matching rows when the
/// manifest has a split column and is ignored otherwise.
class CorpusIndex {
 public:
  CorpusIndex(const std::filesystem::path& dir_or_manifest, MaskPolicy masks = MaskPolicy::kIgnore,
              const std::string& split = {});

  std::size_t size() const { return rows_.size(); }
  const std::string& id(std::size_t i) const { return manifest_.at(rows_.at(i), "id"); }
  std::filesystem::path image_path(std::size_t i) const { return manifest_.path_at(rows_.at(i), "image"); }
  std::filesystem::path mask_path(std::size_t i) const { return manifest_.path_at(rows_.at(i), "mask"); }
  PolarImage image(std::size_t i) const;
  /// Throws ShapeError if the mask and image grids differ.
  PolarLabelMask mask(std::size_t i) const;

 private:
  Manifest manifest_;
  std::vector<std::size_t> rows_;
  bool has_masks_ = false;
};

/// Polar images with their region masks.
struct PolarCorpus {
  std::vector<std::string> ids;
  std::vector<PolarImage> images;
  std::vector<PolarLabelMask> masks;  // filled only with MaskPolicy::kRequire

  std::size_t size() const { return images.size(); }
};

/// Items `rows` of the index (all when empty), in that order.
PolarCorpus load_polar_corpus(const CorpusIndex& index, MaskPolicy masks,
                              std::span<const std::size_t> rows = {});
PolarCorpus load_polar_corpus(const std::filesystem::path& dir_or_manifest,
                              MaskPolicy masks = MaskPolicy::kIgnore, const std::string& split = {});

/// The first `limit` items (all when 0) as an N x 1 x n_radial x n_angular
/// tensor, resized one image at a time.
nn::Tensor<float> load_polar_batch(const CorpusIndex& index, std::size_t n_radial, std::size_t n_angular,
                                   std::size_t limit = 0);

struct MaskSet {
  std::vector<std::string> ids;
  std::vector<std::filesystem::path> paths;
  std::vector<PolarLabelMask> masks;
};

/// Masks listed in the `mask` column of a manifest, or every .pgm/.png file
/// of a directory without one, in file-name order. `limit` = 0 reads all.
MaskSet load_masks(const std::filesystem::path& dir_or_manifest, std::size_t limit = 0);

struct Stage0Seeds {
  std::uint64_t echogenicity;
  std::uint64_t speckle;
};

/// Seeds of item `index`, so items can be produced in any order.
Stage0Seeds stage0_seeds(std::uint64_t seed, std::uint64_t index);

PolarImage simulate_stage0_item(const PolarLabelMask& mask, const EchogenicityParams& echo,
                                const BmodeParams& bmode, std::uint64_t seed, std::uint64_t index);

std::vector<PolarImage> simulate_stage0(std::span<const PolarLabelMask> masks,
                                        const EchogenicityParams& echo, const BmodeParams& bmode,
                                        std::uint64_t seed);

/// N x 1 x n_radial x n_angular, resizing any image of a different size.
nn::Tensor<float> to_batch(std::span<const PolarImage> images, std::size_t n_radial,
                           std::size_t n_angular);
PolarImage from_batch(const nn::Tensor<float>& batch, std::size_t i);

nn::Tensor<float> gather(const nn::Tensor<float>& all, std::span<const std::size_t> indices);

/// One shuffled pass over n items in chunks of `batch`; the last chunk may be
/// short.
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch,
                                                    std::mt19937_64& rng);

std::string tensor_hash(const nn::Tensor<float>& t);

}  // namespace ivusim::train
