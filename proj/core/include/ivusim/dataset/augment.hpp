#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ivusim/dataset/mask.hpp"

namespace ivusim {

inline constexpr int kRotationSteps = 12;    // 12 x 30 degrees
inline constexpr double kRadialShiftFraction = 0.02;

struct AugmentedMask {
  PolarLabelMask mask;
  std::string source_id;
  int rotation_step = 0;  // 0..11
  int radial_shift = 0;   // rows; positive moves content deeper
};

/// Column offset of rotation step `step`: round(step * n_angular / 12).
std::size_t rotation_offset(std::size_t n_angular, int step);

/// Circular column shift: output column j reads input column (j - shift).
template <Domain D>
LabelMask<D> shift_columns(const LabelMask<D>& m, std::size_t shift);

/// Row translation with edge replication; positive `rows` moves content down.
PolarLabelMask shift_rows(const PolarLabelMask& m, int rows);

/// 12 rotations x {0, +2%, -2%} radial shifts = 36 masks, in
/// (rotation, shift) order with the untouched original first.
std::vector<AugmentedMask> augment(const PolarLabelMask& mask, const std::string& source_id = {});

/// Writes every mask as `<out_dir>/<id>.polar.pgm` plus `manifest.tsv`.
void write_augmented_corpus(const std::filesystem::path& out_dir,
                            const std::vector<AugmentedMask>& items);

}  // namespace ivusim
