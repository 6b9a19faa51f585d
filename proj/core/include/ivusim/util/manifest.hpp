#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ivusim {

/// Tab-separated table whose first line is `# col1<TAB>col2...`. Further
/// lines starting with '#' are comments. Relative paths in a manifest are
/// resolved against the manifest's directory.
class Manifest {
 public:
  Manifest() = default;
  explicit Manifest(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  static Manifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t size() const { return rows_.size(); }
  bool has_column(const std::string& name) const;
  std::size_t column_index(const std::string& name) const;

  const std::string& at(std::size_t row, const std::string& column) const;
  std::filesystem::path path_at(std::size_t row, const std::string& column) const;
  void add_row(std::vector<std::string> row);

  const std::filesystem::path& base_dir() const { return base_; }
  void set_base_dir(std::filesystem::path dir) { base_ = std::move(dir); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::filesystem::path base_;
};

}  // namespace ivusim
