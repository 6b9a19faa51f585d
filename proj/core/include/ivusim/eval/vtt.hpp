#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ivusim/imaging/grid.hpp"

namespace ivusim::eval {

enum class Side : char { kLeft = 'L', kRight = 'R' };

struct VttPair {
  std::size_t real_index = 0;
  std::size_t sim_index = 0;
  Side real_side = Side::kLeft;
};

/// n_pairs pairings of distinct real and simulated items, each with a fair
/// coin for the side the real image is shown on.
std::vector<VttPair> vtt_plan(std::size_t n_real, std::size_t n_sim, std::size_t n_pairs,
                              std::uint64_t seed);

/// Writes `pair_NNNN.png` (left | gap | right), `pairs.tsv` listing the
/// presented files, and `answer_key.tsv` with the real side per pair. The
/// key is written to `key_path`, which should lie outside `out_dir` when
/// the directory is handed to raters.
void vtt_export(const std::filesystem::path& out_dir, const std::filesystem::path& key_path,
                const std::vector<Grid<double>>& real, const std::vector<Grid<double>>& sim,
                const std::vector<VttPair>& plan);

struct VttScore {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Wilson score interval at 95% (z = 1.959964).
VttScore wilson_score(std::size_t correct, std::size_t total);

/// Responses name the side picked as real for every pair of the key.
/// Throws ValidationError if pairs are missing, duplicated or unknown.
VttScore vtt_score(const std::vector<Side>& key, const std::vector<Side>& responses);

std::vector<Side> read_sides(const std::filesystem::path& tsv, const std::string& column);

}  // namespace ivusim::eval
