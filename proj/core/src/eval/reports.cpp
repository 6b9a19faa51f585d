#include "ivusim/eval/reports.hpp"

#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "ivusim/error.hpp"
#include "ivusim/util/format.hpp"

namespace ivusim::eval {
namespace {

constexpr std::array<const char*, 3> kClassCols{"lumen", "media", "externa"};
constexpr std::array<const char*, 3> kPairCols{"lumen-media", "media-externa", "lumen-externa"};

void require_items(const AnnotatedSet& s, std::size_t n) {
  if (s.images.size() != s.masks.size()) {
    throw ValidationError("corpus " + s.name + ": every image needs a mask");
  }
  if (n == 0) throw ValidationError("evaluation needs n > 0 images");
  if (s.images.size() < n) {
    throw ValidationError("corpus " + s.name + " has " + std::to_string(s.images.size()) +
                          " annotated items, " + std::to_string(n) + " required");
  }
}

}  // namespace

std::vector<std::size_t> sample_indices(std::size_t total, std::size_t n, std::uint64_t seed) {
  if (n > total) throw ValidationError("cannot sample " + std::to_string(n) + " of " + std::to_string(total));
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (total - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

std::array<RegionPmf, 3> pooled_pmfs(const AnnotatedSet& set, std::span<const std::size_t> indices) {
  RegionHistograms h;
  for (auto i : indices) h.add(set.images[i], set.masks[i]);
  return {h.pmf(TissueClass::kLumen), h.pmf(TissueClass::kMedia), h.pmf(TissueClass::kExterna)};
}

Table1Row table1_row(const AnnotatedSet& real, const AnnotatedSet& sim, std::size_t n, std::uint64_t seed) {
  require_items(real, n);
  require_items(sim, n);
  const auto a = pooled_pmfs(real, sample_indices(real.images.size(), n, seed));
  const auto b = pooled_pmfs(sim, sample_indices(sim.images.size(), n, seed));
  Table1Row row{sim.name, {}};
  for (std::size_t k = 0; k < 3; ++k) row.js[k] = js_divergence(a[k], b[k]);
  return row;
}

Table2Row table2_row(const AnnotatedSet& set, std::size_t n, std::uint64_t seed) {
  require_items(set, n);
  const auto p = pooled_pmfs(set, sample_indices(set.images.size(), n, seed));
  return {set.name, {js_divergence(p[0], p[1]), js_divergence(p[1], p[2]), js_divergence(p[0], p[2])}};
}

DivergenceReport divergence_report(const AnnotatedSet& real, std::span<const AnnotatedSet> sims,
                                   std::size_t n, std::uint64_t seed) {
  DivergenceReport r;
  r.n_images = n;
  r.seed = seed;
  for (const auto& s : sims) r.table1.push_back(table1_row(real, s, n, seed));
  r.table2.push_back(table2_row(real, n, seed));
  for (const auto& s : sims) r.table2.push_back(table2_row(s, n, seed));
  return r;
}

std::string format_report_text(const DivergenceReport& r) {
  std::ostringstream os;
  os << "JS divergence, log base 2, 256 bins over [0,1]\n";
  os << "pixels pooled over " << r.n_images << " sampled images per corpus, seed " << r.seed << "\n\n";
  auto table = [&](const char* title, const auto& rows, const auto& cols) {
    os << title << '\n';
    os << std::left << std::setw(16) << "source";
    for (const char* c : cols) os << std::right << std::setw(16) << c;
    os << '\n';
    for (const auto& row : rows) {
      os << std::left << std::setw(16) << row.source;
      for (double v : row.js) os << std::right << std::setw(16) << format_fixed(v, 4);
      os << '\n';
    }
    os << '\n';
  };
  table("Real vs simulated, per tissue class", r.table1, kClassCols);
  table("Between tissue classes, per source", r.table2, kPairCols);
  return os.str();
}

std::string format_report_tsv(const DivergenceReport& r) {
  std::ostringstream os;
  os << "# table\tsource\tcolumn\tjs\n";
  for (const auto& row : r.table1) {
    for (std::size_t k = 0; k < 3; ++k) {
      os << "table1\t" << row.source << '\t' << kClassCols[k] << '\t' << format_double(row.js[k]) << '\n';
    }
  }
  for (const auto& row : r.table2) {
    for (std::size_t k = 0; k < 3; ++k) {
      os << "table2\t" << row.source << '\t' << kPairCols[k] << '\t' << format_double(row.js[k]) << '\n';
    }
  }
  return os.str();
}

}  // namespace ivusim::eval
