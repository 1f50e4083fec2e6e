#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace webqa {

// Exit code 2: bad usage or missing/invalid inputs.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // Paths.
  std::filesystem::path dataset;
  std::filesystem::path embeddings;
  std::filesystem::path idf;
  std::filesystem::path model;
  std::filesystem::path annotations;
  std::filesystem::path out;
  std::filesystem::path predictions;
  std::filesystem::path stopwords;
  std::filesystem::path aliases;
  std::filesystem::path report;
  std::filesystem::path questions;
  std::filesystem::path search_config;

  // Hyperparameters (defaults mirror the reference setting).
  int k_candidates = 140;
  double margin = 0.5;
  double lambda = 1e-3;
  std::uint64_t seed = 1;
  int splits = 0;  // 0 = no split protocol
  int context_window = 6;
  double decay_base = 0.5;

  // Flags.
  bool subset_only = false;
  bool normalize = false;
  std::vector<std::string> ablate_templates;  // empty = every template
  std::string provider = "heuristic";         // or "sidecar"
};

int run_train(const RunConfig& config);
int run_predict(const RunConfig& config);
int run_eval(const RunConfig& config);
int run_ablate(const RunConfig& config);
int run_analyze(const RunConfig& config);
int run_scrape(const RunConfig& config);

}  // namespace webqa
