#include "ivusim/train/corpus.hpp"

#include <algorithm>
#include <numeric>

#include "ivusim/error.hpp"
#include "ivusim/imaging/image_io.hpp"
#include "ivusim/imaging/intensity.hpp"
#include "ivusim/util/hash.hpp"
#include "ivusim/util/manifest.hpp"
#include "ivusim/util/seed.hpp"

namespace fs = std::filesystem;

namespace ivusim::train {
namespace {

constexpr std::uint64_t kEchoStream = 1;
constexpr std::uint64_t kSpeckleStream = 2;

fs::path manifest_path(const fs::path& p) {
  return fs::is_directory(p) ? p / "manifest.tsv" : p;
}

}  // namespace

CorpusIndex::CorpusIndex(const fs::path& dir_or_manifest, MaskPolicy masks, const std::string& split)
    : manifest_(Manifest::load(manifest_path(dir_or_manifest))) {
  has_masks_ = manifest_.has_column("mask");
  if (masks == MaskPolicy::kRequire && !has_masks_) {
    throw ValidationError("corpus " + dir_or_manifest.string() + " has no mask column");
  }
  manifest_.column_index("id");
  manifest_.column_index("image");
  const bool use_split = !split.empty() && manifest_.has_column("split");
  for (std::size_t i = 0; i < manifest_.size(); ++i) {
    if (use_split && manifest_.at(i, "split") != split) continue;
    if (masks == MaskPolicy::kRequire && manifest_.at(i, "mask") == "-") continue;
    rows_.push_back(i);
  }
}

PolarImage CorpusIndex::image(std::size_t i) const { return load_image<Domain::kPolar>(image_path(i)); }

PolarLabelMask CorpusIndex::mask(std::size_t i) const {
  if (!has_masks_ || manifest_.at(rows_.at(i), "mask") == "-") {
    throw ValidationError("corpus item " + id(i) + " has no mask");
  }
  PolarLabelMask m{load_mask(mask_path(i))};
  return m;
}

PolarCorpus load_polar_corpus(const CorpusIndex& index, MaskPolicy masks, std::span<const std::size_t> rows) {
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(index.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    rows = all;
  }
  PolarCorpus c;
  for (auto i : rows) {
    c.ids.push_back(index.id(i));
    c.images.push_back(index.image(i));
    if (masks == MaskPolicy::kRequire) {
      auto m = index.mask(i);
      if (m.rows() != c.images.back().rows() || m.cols() != c.images.back().cols()) {
        throw ShapeError("corpus item " + c.ids.back() + ": mask and image sizes differ");
      }
      c.masks.push_back(std::move(m));
    }
  }
  return c;
}

PolarCorpus load_polar_corpus(const fs::path& dir_or_manifest, MaskPolicy masks, const std::string& split) {
  return load_polar_corpus(CorpusIndex(dir_or_manifest, masks, split), masks);
}

nn::Tensor<float> load_polar_batch(const CorpusIndex& index, std::size_t n_radial, std::size_t n_angular,
                                   std::size_t limit) {
  const std::size_t n = limit == 0 ? index.size() : std::min(limit, index.size());
  nn::Tensor<float> t(nn::Shape{n, 1, n_radial, n_angular});
  for (std::size_t i = 0; i < n; ++i) {
    auto img = index.image(i);
    if (img.n_radial() != n_radial || img.n_angular() != n_angular) img = resize(img, n_radial, n_angular);
    std::copy(img.grid().values().begin(), img.grid().values().end(), t.sample(i));
  }
  return t;
}

MaskSet load_masks(const fs::path& dir_or_manifest, std::size_t limit) {
  MaskSet out;
  auto full = [&] { return limit > 0 && out.masks.size() >= limit; };
  const auto mp = manifest_path(dir_or_manifest);
  if (fs::exists(mp)) {
    const auto m = Manifest::load(mp);
    const bool has_id = m.has_column("id");
    for (std::size_t i = 0; i < m.size() && !full(); ++i) {
      if (m.at(i, "mask") == "-") continue;
      const auto path = m.path_at(i, "mask");
      out.ids.push_back(has_id ? m.at(i, "id") : path.stem().stem().string());
      out.paths.push_back(path);
      out.masks.push_back(PolarLabelMask{load_mask(path)});
    }
    return out;
  }
  if (!fs::is_directory(dir_or_manifest)) {
    throw ValidationError("no masks found at " + dir_or_manifest.string());
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir_or_manifest)) {
    const auto ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".pgm" || ext == ".png")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    if (full()) break;
    auto id = f.stem();
    if (id.extension() == ".polar") id = id.stem();
    out.ids.push_back(id.string());
    out.paths.push_back(f);
    out.masks.push_back(PolarLabelMask{load_mask(f)});
  }
  return out;
}

Stage0Seeds stage0_seeds(std::uint64_t seed, std::uint64_t index) {
  return {derive_seed(seed, kEchoStream, index), derive_seed(seed, kSpeckleStream, index)};
}

PolarImage simulate_stage0_item(const PolarLabelMask& mask, const EchogenicityParams& echo,
                                const BmodeParams& bmode, std::uint64_t seed, std::uint64_t index) {
  const auto seeds = stage0_seeds(seed, index);
  return simulate(mask_to_echogenicity(mask, echo, seeds.echogenicity), bmode, seeds.speckle);
}

std::vector<PolarImage> simulate_stage0(std::span<const PolarLabelMask> masks,
                                        const EchogenicityParams& echo, const BmodeParams& bmode,
                                        std::uint64_t seed) {
  std::vector<PolarImage> out;
  out.reserve(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    out.push_back(simulate_stage0_item(masks[i], echo, bmode, seed, i));
  }
  return out;
}

nn::Tensor<float> to_batch(std::span<const PolarImage> images, std::size_t n_radial,
                           std::size_t n_angular) {
  nn::Tensor<float> t(nn::Shape{images.size(), 1, n_radial, n_angular});
  for (std::size_t i = 0; i < images.size(); ++i) {
    const bool same = images[i].n_radial() == n_radial && images[i].n_angular() == n_angular;
    const PolarImage sized = same ? images[i] : resize(images[i], n_radial, n_angular);
    std::copy(sized.grid().values().begin(), sized.grid().values().end(), t.sample(i));
  }
  return t;
}

PolarImage from_batch(const nn::Tensor<float>& batch, std::size_t i) {
  const auto& s = batch.shape();
  if (i >= s.n || s.c != 1) throw ShapeError("from_batch: item " + std::to_string(i) + " of " + s.str());
  Grid<double> g(s.h, s.w);
  std::copy(batch.sample(i), batch.sample(i) + s.plane(), g.values().begin());
  return PolarImage(std::move(g));
}

nn::Tensor<float> gather(const nn::Tensor<float>& all, std::span<const std::size_t> indices) {
  auto s = all.shape();
  s.n = indices.size();
  nn::Tensor<float> out(s);
  const auto per = s.per_sample();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= all.shape().n) throw ShapeError("gather: index out of range");
    std::copy(all.sample(indices[i]), all.sample(indices[i]) + per, out.sample(i));
  }
  return out;
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch,
                                                    std::mt19937_64& rng) {
  if (n == 0 || batch == 0) throw ValidationError("epoch_batches: empty corpus or batch");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Fisher-Yates with an explicit draw so the order does not depend on the
  // standard library's shuffle.
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng() % (i + 1)]);
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t b = 0; b < n; b += batch) {
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(b),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(n, b + batch)));
  }
  return out;
}

std::string tensor_hash(const nn::Tensor<float>& t) {
  Sha256 h;
  h.update(t.shape().str());
  h.update_values<float>(t.values());
  return h.finish();
}

}  // namespace ivusim::train
