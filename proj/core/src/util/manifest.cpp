#include "ivusim/util/manifest.hpp"

#include <algorithm>
#include <fstream>

#include "ivusim/error.hpp"

namespace fs = std::filesystem;

namespace ivusim {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find('\t', pos);
    out.push_back(line.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

Manifest Manifest::load(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read manifest " + path.string());
  Manifest m;
  m.base_ = path.parent_path();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (m.columns_.empty()) {
        auto body = line.substr(1);
        body.erase(0, body.find_first_not_of(' '));
        m.columns_ = split_tabs(body);
      }
      continue;
    }
    if (m.columns_.empty()) throw ValidationError(path.string() + ": missing '# columns' header");
    auto row = split_tabs(line);
    if (row.size() != m.columns_.size()) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(m.columns_.size()) + " fields, got " +
                            std::to_string(row.size()));
    }
    m.rows_.push_back(std::move(row));
  }
  return m;
}

void Manifest::save(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << "# ";
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "\t" : "") << columns_[i];
  os << '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "\t" : "") << r[i];
    os << '\n';
  }
  if (!os) throw Error("write failed: " + path.string());
}

bool Manifest::has_column(const std::string& name) const {
  return std::find(columns_.begin(), columns_.end(), name) != columns_.end();
}

std::size_t Manifest::column_index(const std::string& name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw ValidationError("manifest has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

const std::string& Manifest::at(std::size_t row, const std::string& column) const {
  return rows_.at(row)[column_index(column)];
}

fs::path Manifest::path_at(std::size_t row, const std::string& column) const {
  fs::path p = at(row, column);
  return p.is_absolute() ? p : base_ / p;
}

void Manifest::add_row(std::vector<std::string> row) {
  if (row.size() != columns_.size()) throw ValidationError("manifest row width mismatch");
  for (const auto& f : row) {
    if (f.find_first_of("\t\n") != std::string::npos) {
      throw ValidationError("manifest field contains a tab or newline: " + f);
    }
  }
  rows_.push_back(std::move(row));
}

}  // namespace ivusim
