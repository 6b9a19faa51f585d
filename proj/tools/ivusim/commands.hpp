#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"

namespace ivusim::cli {

struct IngestOptions {
  std::string root;
  std::string out;
  std::size_t synthetic = 0;
};

struct AugmentOptions {
  std::string in;
  std::string out;
};

struct SimulateOptions {
  std::string maps;
  std::string out;
  std::vector<double> psf;
  std::optional<double> dr;
  std::size_t limit = 0;
};

struct TrainOptionsCli {
  std::string synthetic;
  std::string real;
  std::string out;
  std::string stage1;
  std::string resume;
  std::string real_split = "train";
  std::size_t limit = 0;
  std::size_t max_iterations = 0;
};

struct GenerateOptions {
  std::string model;
  std::string maps;
  std::string out;
  std::size_t batch = 16;
  std::size_t limit = 0;
};

struct EvaluateOptions {
  std::string real;
  std::vector<std::string> sim;
  std::vector<std::string> names;
  std::string real_split;
  std::optional<std::size_t> n;
  std::string out;
};

struct VttExportOptions {
  std::string real;
  std::string sim;
  std::size_t pairs = 0;
  std::string out;
  std::string key;
  std::string real_split;
};

struct VttScoreOptions {
  std::string key;
  std::string responses;
  std::string column = "response";
};

int run_ingest(const CommonOptions& c, const IngestOptions& o, const std::vector<std::string>& argv);
int run_augment(const CommonOptions& c, const AugmentOptions& o, const std::vector<std::string>& argv);
int run_simulate(const CommonOptions& c, const SimulateOptions& o, const std::vector<std::string>& argv);
int run_train_stage1(const CommonOptions& c, const TrainOptionsCli& o, const std::vector<std::string>& argv);
int run_train_stage2(const CommonOptions& c, const TrainOptionsCli& o, const std::vector<std::string>& argv);
int run_generate(const CommonOptions& c, const GenerateOptions& o, const std::vector<std::string>& argv);
int run_evaluate(const CommonOptions& c, const EvaluateOptions& o, const std::vector<std::string>& argv);
int run_vtt_export(const CommonOptions& c, const VttExportOptions& o, const std::vector<std::string>& argv);
int run_vtt_score(const VttScoreOptions& o);

}  // namespace ivusim::cli
