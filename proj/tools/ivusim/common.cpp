#include "common.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "ivusim/error.hpp"
#include "ivusim/util/hash.hpp"

namespace fs = std::filesystem;

namespace ivusim::cli {

ResolvedConfig resolve_config(const CommonOptions& common, const KvConfig& overrides) {
  ResolvedConfig r;
  KvConfig kv;
  std::string path = common.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
  }
  if (!path.empty()) {
    kv = KvConfig::load(path);
    r.source = path;
  }
  for (const auto& s : common.set) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got '" + s + "'");
    auto key = s.substr(0, eq);
    auto value = s.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    kv.set(key, value);
  }
  kv.merge(overrides);
  if (common.seed) kv.set("seed", std::to_string(*common.seed));
  r.run = RunConfig::from_kv(kv);
  r.effective = r.run.to_kv();
  return r;
}

std::string input_hash(const fs::path& p) {
  if (fs::is_regular_file(p)) return sha256_file(p);
  if (!fs::is_directory(p)) throw ValidationError("input not found: " + p.string());
  if (fs::is_regular_file(p / "manifest.tsv")) return sha256_file(p / "manifest.tsv");
  std::vector<std::pair<std::string, std::uintmax_t>> files;
  for (const auto& e : fs::directory_iterator(p)) {
    if (e.is_regular_file()) files.emplace_back(e.path().filename().string(), e.file_size());
  }
  std::sort(files.begin(), files.end());
  Sha256 h;
  for (const auto& [name, size] : files) {
    h.update(name);
    h.update("\t" + std::to_string(size) + "\n");
  }
  return h.finish();
}

void write_run_manifest(const fs::path& out_dir, const ResolvedConfig& cfg, const RunManifest& m) {
  fs::create_directories(out_dir);
  {
    std::ofstream os(out_dir / "run_config.txt");
    os << "# effective configuration of `ivusim " << m.command << "`\n" << cfg.effective.to_string();
    if (!os) throw Error("cannot write run_config.txt");
  }
  std::ofstream os(out_dir / "run_manifest.txt");
  os << "tool = ivusim " << IVUSIM_VERSION << '\n';
  os << "command = " << m.command << '\n';
  os << "argv =";
  for (const auto& a : m.argv) os << ' ' << a;
  os << '\n';
  os << "seed = " << cfg.run.seed << '\n';
  os << "config_source = " << (cfg.source.empty() ? "defaults" : cfg.source) << '\n';
  os << "config_file = run_config.txt\n";
  for (const auto& [role, hash] : m.inputs) os << "input." << role << ".sha256 = " << hash << '\n';
  for (const auto& [k, v] : m.notes) os << "note." << k << " = " << v << '\n';
  if (!os) throw Error("cannot write run_manifest.txt");
}

void log(const std::string& msg) { std::cerr << "ivusim: " << msg << '\n'; }

}  // namespace ivusim::cli
