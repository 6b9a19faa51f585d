#include "ivusim/eval/vtt.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>

#include "ivusim/error.hpp"
#include "ivusim/eval/reports.hpp"
#include "ivusim/imaging/image_io.hpp"
#include "ivusim/util/manifest.hpp"

namespace fs = std::filesystem;

namespace ivusim::eval {
namespace {

constexpr double kZ95 = 1.959964;
constexpr std::size_t kGap = 8;

std::string pair_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "pair_%04zu", i + 1);
  return buf;
}

Side parse_side(const std::string& s) {
  if (s == "L" || s == "l" || s == "left") return Side::kLeft;
  if (s == "R" || s == "r" || s == "right") return Side::kRight;
  throw ValidationError("expected L or R, got '" + s + "'");
}

}  // namespace

std::vector<VttPair> vtt_plan(std::size_t n_real, std::size_t n_sim, std::size_t n_pairs,
                              std::uint64_t seed) {
  if (n_pairs == 0) throw ValidationError("vtt: need at least one pair");
  const auto r = sample_indices(n_real, n_pairs, seed);
  const auto s = sample_indices(n_sim, n_pairs, seed ^ 0x5bd1e995ull);
  std::mt19937_64 coin(seed ^ 0x27d4eb2f165667c5ull);
  std::vector<VttPair> out;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    out.push_back({r[i], s[i], (coin() >> 63) ? Side::kRight : Side::kLeft});
  }
  return out;
}

void vtt_export(const fs::path& out_dir, const fs::path& key_path, const std::vector<Grid<double>>& real,
                const std::vector<Grid<double>>& sim, const std::vector<VttPair>& plan) {
  fs::create_directories(out_dir);
  Manifest pairs({"pair", "image"});
  Manifest key({"pair", "real_side"});
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& p = plan[i];
    if (p.real_index >= real.size() || p.sim_index >= sim.size()) {
      throw ValidationError("vtt: plan refers to a missing image");
    }
    const auto& a = p.real_side == Side::kLeft ? real[p.real_index] : sim[p.sim_index];
    const auto& b = p.real_side == Side::kLeft ? sim[p.sim_index] : real[p.real_index];
    if (a.rows() != b.rows()) throw ShapeError("vtt: paired images differ in height");
    Grid<double> both(a.rows(), a.cols() + kGap + b.cols(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      for (std::size_t c = 0; c < a.cols(); ++c) both(r, c) = a(r, c);
      for (std::size_t c = 0; c < b.cols(); ++c) both(r, a.cols() + kGap + c) = b(r, c);
    }
    const auto name = pair_name(i);
    write_gray8(out_dir / (name + ".png"), both);
    pairs.add_row({name, name + ".png"});
    key.add_row({name, std::string(1, static_cast<char>(p.real_side))});
  }
  pairs.save(out_dir / "pairs.tsv");
  key.save(key_path);
}

VttScore wilson_score(std::size_t correct, std::size_t total) {
  if (total == 0) throw ValidationError("vtt: no responses");
  if (correct > total) throw ValidationError("vtt: more correct answers than responses");
  VttScore s;
  s.correct = correct;
  s.total = total;
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(correct) / n;
  s.accuracy = p;
  const double z2 = kZ95 * kZ95;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = kZ95 * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  s.ci_low = std::max(0.0, centre - half);
  s.ci_high = std::min(1.0, centre + half);
  return s;
}

VttScore vtt_score(const std::vector<Side>& key, const std::vector<Side>& responses) {
  if (key.size() != responses.size()) {
    throw ValidationError("vtt: " + std::to_string(responses.size()) + " responses for " +
                          std::to_string(key.size()) + " pairs");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < key.size(); ++i) correct += key[i] == responses[i];
  return wilson_score(correct, key.size());
}

std::vector<Side> read_sides(const fs::path& tsv, const std::string& column) {
  const auto m = Manifest::load(tsv);
  std::map<std::string, Side> by_pair;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& pair = m.at(i, "pair");
    if (!by_pair.emplace(pair, parse_side(m.at(i, column))).second) {
      throw ValidationError(tsv.string() + ": pair " + pair + " listed twice");
    }
  }
  std::vector<Side> out;
  for (std::size_t i = 0; i < by_pair.size(); ++i) {
    auto it = by_pair.find(pair_name(i));
    if (it == by_pair.end()) throw ValidationError(tsv.string() + ": missing " + pair_name(i));
    out.push_back(it->second);
  }
  return out;
}

}  // namespace ivusim::eval
