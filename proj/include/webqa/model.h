#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "webqa/candidates.h"
#include "webqa/features.h"

namespace webqa {

// Frozen vocabulary artifacts serialized with the weights.
struct ModelResources {
  CommonWords common_words;
  TfidfBinTable tfidf_bins;
  FeatureConfig config;
  std::string idf_ref;  // path of the idf table used, or "dataset"
};

struct Model {
  static constexpr int kFormatVersion = 1;

  double lambda = 1e-3;
  FeatureIndex index;
  std::vector<double> weights;  // aligned to index
  ModelResources resources;

  double dot(const SparseVector& features) const;
};

struct ScoredCandidate {
  Candidate candidate;
  double score = 0.0;        // phi . theta
  double probability = 0.0;  // softmax over the example's candidate set
};

// Max-shifted softmax; probabilities sum to 1 up to rounding.
std::vector<double> softmax(std::span<const double> scores);

// Scores and normalizes one example's candidates; output sorted by descending
// score, ties by candidate text ascending. Unknown feature names are dropped.
std::vector<ScoredCandidate> score(
    const Model& model, const std::vector<std::pair<Candidate, FeatureVector>>& candidates);

struct FeaturizedCandidate {
  Candidate candidate;
  FeatureVector named;    // named form, kept until the index is frozen
  SparseVector features;  // indexed form used for scoring
  bool is_gold = false;
};

struct FeaturizedExample {
  std::string id;
  std::vector<FeaturizedCandidate> candidates;
};

struct LossGrad {
  double loss = 0.0;               // -log sum_{gold} p(a)
  std::vector<double> gradient;    // E_p[phi] - E_{p|gold}[phi]
};

// Data term of the negative marginal log-likelihood for one example.
// Throws when the example has no gold-matching candidate.
LossGrad loss_and_gradient(const Model& model, const FeaturizedExample& example);

struct TrainSettings {
  int max_iterations = 500;
  double rel_tol = 1e-6;   // relative objective change
  int lbfgs_memory = 10;
  std::uint64_t seed = 1;  // kept for interface stability; training is deterministic
};

struct TrainReport {
  int iterations = 0;
  bool converged = false;
  double final_objective = 0.0;          // maximized penalized log-likelihood
  std::vector<double> objective_trace;   // value after each accepted iteration
};

// Full-batch L-BFGS on the L2-penalized conditional log-likelihood,
// theta initialized to zero, fixed example order.
Model train(const std::vector<FeaturizedExample>& examples, double lambda,
            const FeatureIndex& index, ModelResources resources,
            const TrainSettings& settings = {}, TrainReport* report = nullptr);

// Versioned structured text; load rejects unknown versions and corrupt files.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace webqa
