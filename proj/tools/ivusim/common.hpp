#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ivusim/run_config.hpp"

namespace ivusim::cli {

inline constexpr const char* kConfigEnv = "IVUSIM_CONFIG";

/// Options every subcommand accepts.
struct CommonOptions {
  std::string config_path;
  std::vector<std::string> set;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
};

/// Defaults, then the config file (flag or $IVUSIM_CONFIG), then `--set`
/// pairs, then subcommand flags in `overrides`.
struct ResolvedConfig {
  RunConfig run;
  KvConfig effective;
  std::string source;
};

ResolvedConfig resolve_config(const CommonOptions& common, const KvConfig& overrides = {});

/// Writes `<out>/run_config.txt` (loadable with --config) and
/// `<out>/run_manifest.txt`.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::map<std::string, std::string> inputs;  // role -> sha256
  std::map<std::string, std::string> notes;
};
void write_run_manifest(const std::filesystem::path& out_dir, const ResolvedConfig& cfg,
                        const RunManifest& m);

/// SHA-256 of a corpus: its manifest if present, otherwise the sorted file
/// names and sizes. Plain files hash their contents.
std::string input_hash(const std::filesystem::path& p);

/// Runs f(i) for i in [0, n) on `jobs` threads with static interleaving.
/// Results must be written to per-index slots.
template <typename F>
void parallel_for(std::size_t n, std::size_t jobs, F&& f) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += jobs) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void log(const std::string& msg);

}  // namespace ivusim::cli
