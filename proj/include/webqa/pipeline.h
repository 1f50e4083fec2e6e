#pragma once

#include <memory>
#include <string>
#include <vector>

#include "webqa/candidates.h"
#include "webqa/corpus.h"
#include "webqa/eval.h"
#include "webqa/features.h"
#include "webqa/model.h"
#include "webqa/predict.h"

namespace webqa {

struct PipelineConfig {
  int top_k = 140;
  double margin = 0.5;
  double lambda = 1e-3;
  FeatureConfig features;
  TrainSettings train;
};

struct PipelineResources {
  const StopWords* stoplist = &StopWords::builtin();
  EmbeddingTable embeddings;  // empty table means all-zero vectors
  std::shared_ptr<const AnnotationProvider> provider = std::make_shared<HeuristicAnnotator>();
  IdfTable idf;
  std::string idf_ref = "dataset";
};

struct PreparedExample {
  const Example* example = nullptr;
  ExampleAnnotation annotation;
  std::vector<Candidate> candidates;   // top-K, scored
  std::vector<std::string> gold_keys;  // canonical forms
  bool passed = false;                 // some gold survives into the candidates
};

// Annotation + candidate extraction for every example (parallel, slot-ordered).
std::vector<PreparedExample> prepare_examples(const std::vector<Example>& examples,
                                              const PipelineResources& resources,
                                              const PipelineConfig& config);

// Tf-idf bin edges over the training candidates, one sample per candidate.
TfidfBinTable fit_bins_over(const std::vector<const PreparedExample*>& prepared, int bins);

std::vector<FeaturizedExample> featurize_prepared(
    const std::vector<const PreparedExample*>& prepared, const FeatureResources& resources);

struct TrainOutput {
  Model model;
  TrainReport report;
  std::vector<std::string> kept_ids;
  std::vector<std::string> dropped_ids;
};

// load -> annotate -> extract -> filter -> featurize -> train, over
// already-prepared examples so splits and ablations can reuse extraction.
TrainOutput train_over(const std::vector<const PreparedExample*>& prepared,
                       const PipelineConfig& config, const PipelineResources& resources);

std::vector<PredictionRecord> predict_over(const Model& model,
                                           const std::vector<const PreparedExample*>& prepared,
                                           const PipelineResources& resources, double margin);

// Train/evaluate on seeded 70/30 splits of `examples`; returns per-split
// subset-condition and all-condition metrics on the dev side.
struct SplitMetrics {
  Metrics all;
  Metrics subset;
};

std::vector<SplitMetrics> run_split_evaluations(const std::vector<PreparedExample>& prepared,
                                                const SplitSpec& splits,
                                                const PipelineConfig& config,
                                                const PipelineResources& resources,
                                                const MatchOptions& match = {});

struct AblationRow {
  std::string template_name;
  double f1 = 0.0;     // dev subset F1 averaged over splits
  double delta = 0.0;  // f1 - base f1
};

struct AblationTable {
  double base_f1 = 0.0;
  std::vector<AblationRow> rows;  // sorted by delta descending (smallest drop first)
};

AblationTable run_ablations(const std::vector<PreparedExample>& prepared,
                            const std::vector<std::string>& templates, const SplitSpec& splits,
                            const PipelineConfig& config, const PipelineResources& resources,
                            const MatchOptions& match = {});

}  // namespace webqa
