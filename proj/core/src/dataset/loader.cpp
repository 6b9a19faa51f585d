#include "ivusim/dataset/loader.hpp"

#include <algorithm>
#include <regex>

#include "ivusim/imaging/image_io.hpp"

namespace ivusim {
namespace {

namespace fs = std::filesystem;

std::string expand(std::string pattern, const std::string& stem) {
  const std::string key = "{stem}";
  for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key)) {
    pattern.replace(pos, key.size(), stem);
  }
  return pattern;
}

}  // namespace

const std::vector<std::string>& DatasetLayout::config_keys() {
  static const std::vector<std::string> keys = {"image_dir", "image_pattern",
                                                "lumen_contour_pattern", "eel_contour_pattern",
                                                "patient_id_regex"};
  return keys;
}

DatasetLayout DatasetLayout::from_config(const KvConfig& cfg) {
  DatasetLayout l;
  l.image_dir = cfg.get_string("image_dir", l.image_dir);
  l.image_pattern = cfg.get_string("image_pattern", l.image_pattern);
  l.lumen_contour_pattern = cfg.get_string("lumen_contour_pattern", l.lumen_contour_pattern);
  l.eel_contour_pattern = cfg.get_string("eel_contour_pattern", l.eel_contour_pattern);
  l.patient_id_regex = cfg.get_string("patient_id_regex", l.patient_id_regex);
  return l;
}

DatasetLoadReport load_dataset(const fs::path& root, const DatasetLayout& layout) {
  if (!fs::is_directory(root)) throw ValidationError("dataset root not found: " + root.string());
  const fs::path image_dir = root / layout.image_dir;
  if (!fs::is_directory(image_dir)) {
    throw ValidationError("image directory not found: " + image_dir.string());
  }
  std::regex image_re;
  std::regex patient_re;
  try {
    image_re = std::regex(layout.image_pattern);
    patient_re = std::regex(layout.patient_id_regex);
  } catch (const std::regex_error& e) {
    throw ValidationError(std::string("dataset layout: bad regex: ") + e.what());
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(image_dir)) {
    if (!entry.is_regular_file()) continue;
    if (std::regex_match(entry.path().filename().string(), image_re)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  DatasetLoadReport report;
  for (const auto& file : files) {
    const std::string stem = file.stem().string();
    LoadedFrame frame;
    frame.id = stem;
    try {
      auto g = read_gray8(file);
      if (g.rows() != g.cols()) throw Error("frame is not square");
      frame.image = CartesianImage(std::move(g));
    } catch (const Error& e) {
      ++report.n_skipped_images;
      report.warnings.push_back("skipped " + file.string() + ": " + e.what());
      continue;
    }
    std::smatch m;
    if (std::regex_search(stem, m, patient_re) && m.size() > 1) frame.patient_id = m[1].str();

    const fs::path lum = root / expand(layout.lumen_contour_pattern, stem);
    const fs::path eel = root / expand(layout.eel_contour_pattern, stem);
    if (fs::exists(lum) && fs::exists(eel)) {
      ContourAnnotation ann{read_contour_file(lum), read_contour_file(eel), stem};
      try {
        validate_annotation(ann);
        frame.annotation = std::move(ann);
        ++report.n_annotated;
      } catch (const ValidationError& e) {
        ++report.n_rejected_annotations;
        report.warnings.push_back("rejected annotation: " + std::string(e.what()));
      }
    }
    ++report.n_images;
    report.frames.push_back(std::move(frame));
  }
  return report;
}

DatasetSplit split_by_patient(const std::vector<LoadedFrame>& frames,
                              const std::set<std::string>& test_patients) {
  DatasetSplit s;
  for (const auto& f : frames) {
    (test_patients.contains(f.patient_id) ? s.test_ids : s.train_ids).push_back(f.id);
  }
  return s;
}

}  // namespace ivusim
