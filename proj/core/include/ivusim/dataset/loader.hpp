#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ivusim/dataset/contour.hpp"
#include "ivusim/imaging/image.hpp"
#include "ivusim/util/kv_config.hpp"

namespace ivusim {

/// Where frames and contour files live under a dataset root.
///
/// Contour patterns are paths relative to the root in which `{stem}` is
/// replaced by the image file name without extension.
struct DatasetLayout {
  std::string image_dir = ".";
  std::string image_pattern = R"(.*\.(png|pgm))";
  std::string lumen_contour_pattern = "lum_{stem}.txt";
  std::string eel_contour_pattern = "med_{stem}.txt";
  std::string patient_id_regex = R"(frame_(\d+)_)";

  static DatasetLayout from_config(const KvConfig& cfg);
  static const std::vector<std::string>& config_keys();
};

struct LoadedFrame {
  std::string id;
  std::string patient_id;
  CartesianImage image;
  std::optional<ContourAnnotation> annotation;
};

struct DatasetLoadReport {
  std::vector<LoadedFrame> frames;
  std::size_t n_images = 0;
  std::size_t n_annotated = 0;
  std::size_t n_skipped_images = 0;
  std::size_t n_rejected_annotations = 0;
  std::vector<std::string> warnings;
};

/// Loads every frame under `root` matching the layout, in file-name order.
/// Unreadable or non-square images are skipped; annotations with a missing
/// file are absent; annotations that fail validation are rejected.
DatasetLoadReport load_dataset(const std::filesystem::path& root, const DatasetLayout& layout);

struct DatasetSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

/// Frames of patients in `test_patients` go to the test side.
DatasetSplit split_by_patient(const std::vector<LoadedFrame>& frames,
                              const std::set<std::string>& test_patients);

}  // namespace ivusim
