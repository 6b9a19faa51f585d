#include "ivusim/dataset/augment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace ivusim {

std::size_t rotation_offset(std::size_t n_angular, int step) {
  const double exact = static_cast<double>(step) * static_cast<double>(n_angular) / kRotationSteps;
  return static_cast<std::size_t>(std::llround(exact)) % n_angular;
}

template <Domain D>
LabelMask<D> shift_columns(const LabelMask<D>& m, std::size_t shift) {
  const std::size_t na = m.cols();
  LabelMask<D> out{Grid<TissueClass>(m.rows(), na)};
  shift %= na;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < na; ++c) out.labels(r, (c + shift) % na) = m(r, c);
  }
  return out;
}

template LabelMask<Domain::kPolar> shift_columns(const LabelMask<Domain::kPolar>&, std::size_t);
template LabelMask<Domain::kCartesian> shift_columns(const LabelMask<Domain::kCartesian>&,
                                                     std::size_t);

PolarLabelMask shift_rows(const PolarLabelMask& m, int rows) {
  const auto nr = static_cast<long>(m.rows());
  PolarLabelMask out{Grid<TissueClass>(m.rows(), m.cols())};
  for (long r = 0; r < nr; ++r) {
    const long src = std::clamp<long>(r - rows, 0, nr - 1);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out.labels(static_cast<std::size_t>(r), c) = m(static_cast<std::size_t>(src), c);
    }
  }
  return out;
}

std::vector<AugmentedMask> augment(const PolarLabelMask& mask, const std::string& source_id) {
  if (mask.rows() < 2 || mask.cols() < 2) throw ShapeError("augment: mask too small");
  const int shift = static_cast<int>(std::lround(kRadialShiftFraction * static_cast<double>(mask.rows())));
  const int shifts[] = {0, shift, -shift};
  std::vector<AugmentedMask> out;
  out.reserve(kRotationSteps * 3);
  for (int step = 0; step < kRotationSteps; ++step) {
    auto rotated = shift_columns(mask, rotation_offset(mask.cols(), step));
    for (int s : shifts) {
      out.push_back({s == 0 ? rotated : shift_rows(rotated, s), source_id, step, s});
    }
  }
  return out;
}

void write_augmented_corpus(const std::filesystem::path& out_dir,
                            const std::vector<AugmentedMask>& items) {
  std::filesystem::create_directories(out_dir);
  std::ofstream manifest(out_dir / "manifest.tsv");
  if (!manifest) throw Error("cannot write " + (out_dir / "manifest.tsv").string());
  manifest << "# source_id\trotation_step\tradial_shift\tmask\n";
  for (const auto& it : items) {
    const std::string name = it.source_id + "_r" + std::to_string(it.rotation_step) + "_s" +
                             std::to_string(it.radial_shift) + ".polar.pgm";
    save_mask(out_dir / name, it.mask.labels);
    manifest << it.source_id << '\t' << it.rotation_step << '\t' << it.radial_shift << '\t'
             << name << '\n';
  }
}

}  // namespace ivusim
