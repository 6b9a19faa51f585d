#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ivusim {

/// Flat `key = value` configuration. Lines starting with '#' are comments.
/// Keys may contain dots to namespace them (e.g. `stage1.learning_rate`).
class KvConfig {
 public:
  KvConfig() = default;

  static KvConfig parse(std::string_view text, std::string_view origin = "<string>");
  static KvConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.contains(key); }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  /// Later entries win.
  void merge(const KvConfig& other);

  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const;

  /// Throws ValidationError listing every key not in `allowed`.
  void require_known(const std::vector<std::string>& allowed) const;

  /// Sorted `key = value` lines.
  std::string to_string() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::vector<double> parse_double_list(std::string_view text);

}  // namespace ivusim
