#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ivusim/eval/divergence.hpp"

namespace ivusim::eval {

/// Annotated images: masks[i] labels images[i].
struct AnnotatedSet {
  std::string name;
  std::span<const PolarImage> images;
  std::span<const PolarLabelMask> masks;
};

/// n distinct indices out of `total`, in draw order. Depends only on
/// (total, n, seed), so equal-sized corpora are sampled identically.
std::vector<std::size_t> sample_indices(std::size_t total, std::size_t n, std::uint64_t seed);

/// One PMF per class over the pixels of every selected image.
std::array<RegionPmf, 3> pooled_pmfs(const AnnotatedSet& set, std::span<const std::size_t> indices);

/// JS(real, source) per class, ordered lumen, media, externa.
struct Table1Row {
  std::string source;
  std::array<double, 3> js{};
};

/// Pairwise class divergences within one source: lumen-media,
/// media-externa, lumen-externa.
struct Table2Row {
  std::string source;
  std::array<double, 3> js{};
};

struct DivergenceReport {
  std::size_t n_images = 0;
  std::uint64_t seed = 0;
  std::vector<Table1Row> table1;
  std::vector<Table2Row> table2;
};

/// Throws ValidationError when a corpus has fewer than n annotated items.
Table1Row table1_row(const AnnotatedSet& real, const AnnotatedSet& sim, std::size_t n, std::uint64_t seed);
Table2Row table2_row(const AnnotatedSet& set, std::size_t n, std::uint64_t seed);

/// Per-class rows for every simulated source against `real`; between-class
/// rows for `real` followed by every simulated source.
DivergenceReport divergence_report(const AnnotatedSet& real, std::span<const AnnotatedSet> sims,
                                   std::size_t n, std::uint64_t seed);

/// Fixed-layout text tables.
std::string format_report_text(const DivergenceReport& r);
/// `table<TAB>source<TAB>column<TAB>value` lines.
std::string format_report_tsv(const DivergenceReport& r);

}  // namespace ivusim::eval
