#include "webqa/pipeline.h"

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace webqa {

namespace {

// Deterministic parallel map: each index writes only its own slot.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < n_threads; ++t) {
    threads.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<PreparedExample> prepare_examples(const std::vector<Example>& examples,
                                              const PipelineResources& resources,
                                              const PipelineConfig& config) {
  std::vector<PreparedExample> prepared(examples.size());
  parallel_for(examples.size(), [&](std::size_t i) {
    PreparedExample& pe = prepared[i];
    pe.example = &examples[i];
    pe.annotation = annotate_example(examples[i], *resources.provider);
    pe.candidates = extract_candidates(examples[i], pe.annotation, resources.idf, config.top_k);
    pe.gold_keys = gold_keys(examples[i]);
    pe.passed = false;
    for (const auto& c : pe.candidates)
      if (std::find(pe.gold_keys.begin(), pe.gold_keys.end(), c.text) != pe.gold_keys.end()) {
        pe.passed = true;
        break;
      }
  });
  return prepared;
}

TfidfBinTable fit_bins_over(const std::vector<const PreparedExample*>& prepared, int bins) {
  std::array<std::vector<double>, 4> samples;
  for (const auto* pe : prepared)
    for (const auto& c : pe->candidates)
      if (c.n >= 1 && c.n <= 4) samples[c.n - 1].push_back(c.tfidf);
  return fit_tfidf_bins(samples, bins);
}

std::vector<FeaturizedExample> featurize_prepared(
    const std::vector<const PreparedExample*>& prepared, const FeatureResources& resources) {
  std::vector<FeaturizedExample> out(prepared.size());
  parallel_for(prepared.size(), [&](std::size_t i) {
    const PreparedExample& pe = *prepared[i];
    FeaturizedExample fe;
    fe.id = pe.example->id;
    const QuestionContext ctx = make_question_context(pe.annotation.question, resources);
    fe.candidates.reserve(pe.candidates.size());
    for (const auto& c : pe.candidates) {
      FeaturizedCandidate fc;
      fc.candidate = c;
      // Features stay in named form here; vectorization happens against the
      // frozen index right before training or scoring.
      fc.named = featurize(ctx, c, pe.annotation, resources);
      fc.is_gold = std::find(pe.gold_keys.begin(), pe.gold_keys.end(), c.text) !=
                   pe.gold_keys.end();
      fe.candidates.push_back(std::move(fc));
    }
    out[i] = std::move(fe);
  });
  return out;
}

TrainOutput train_over(const std::vector<const PreparedExample*>& prepared,
                       const PipelineConfig& config, const PipelineResources& resources) {
  TrainOutput out;

  std::vector<const PreparedExample*> kept;
  for (const auto* pe : prepared) {
    if (pe->passed) {
      kept.push_back(pe);
      out.kept_ids.push_back(pe->example->id);
    } else {
      out.dropped_ids.push_back(pe->example->id);
    }
  }
  if (kept.empty()) throw std::runtime_error("train: no trainable examples after filtering");

  ModelResources model_resources;
  std::vector<std::string> questions;
  for (const auto* pe : kept) questions.push_back(pe->example->question);
  model_resources.common_words = compute_common_words(questions, *resources.stoplist);
  model_resources.tfidf_bins = fit_bins_over(kept, config.features.tfidf_bins);
  model_resources.config = config.features;
  model_resources.idf_ref = resources.idf_ref;

  FeatureResources feature_resources;
  feature_resources.common_words = &model_resources.common_words;
  feature_resources.embeddings = &resources.embeddings;
  feature_resources.stoplist = resources.stoplist;
  feature_resources.tfidf_bins = &model_resources.tfidf_bins;
  feature_resources.config = config.features;

  std::vector<FeaturizedExample> featurized = featurize_prepared(kept, feature_resources);

  FeatureIndex index;
  for (const auto& fe : featurized)
    for (const auto& fc : fe.candidates) index.observe(fc.named);
  index.freeze();

  for (auto& fe : featurized)
    for (auto& fc : fe.candidates) fc.features = vectorize(fc.named, index);

  TrainSettings settings = config.train;
  out.model = train(featurized, config.lambda, index, std::move(model_resources), settings,
                    &out.report);
  return out;
}

std::vector<PredictionRecord> predict_over(const Model& model,
                                           const std::vector<const PreparedExample*>& prepared,
                                           const PipelineResources& resources, double margin) {
  FeatureResources feature_resources;
  feature_resources.common_words = &model.resources.common_words;
  feature_resources.embeddings = &resources.embeddings;
  feature_resources.stoplist = resources.stoplist;
  feature_resources.tfidf_bins = &model.resources.tfidf_bins;
  feature_resources.config = model.resources.config;

  std::vector<PredictionRecord> records(prepared.size());
  parallel_for(prepared.size(), [&](std::size_t i) {
    const PreparedExample& pe = *prepared[i];
    PredictionRecord rec;
    rec.id = pe.example->id;
    if (!pe.candidates.empty()) {
      const QuestionContext ctx = make_question_context(pe.annotation.question, feature_resources);
      std::vector<std::pair<Candidate, FeatureVector>> scored_input;
      scored_input.reserve(pe.candidates.size());
      for (const auto& c : pe.candidates)
        scored_input.emplace_back(c, featurize(ctx, c, pe.annotation, feature_resources));
      rec.prediction = predict_set(score(model, scored_input), margin);
    }
    records[i] = std::move(rec);
  });
  return records;
}

std::vector<SplitMetrics> run_split_evaluations(const std::vector<PreparedExample>& prepared,
                                                const SplitSpec& splits,
                                                const PipelineConfig& config,
                                                const PipelineResources& resources,
                                                const MatchOptions& match) {
  const auto split_list = make_splits(prepared.size(), splits);
  std::vector<SplitMetrics> out;
  for (const auto& split : split_list) {
    std::vector<const PreparedExample*> train_side, dev_side;
    std::vector<Example> dev_examples;
    for (auto i : split.train) train_side.push_back(&prepared[i]);
    for (auto i : split.dev) {
      dev_side.push_back(&prepared[i]);
      dev_examples.push_back(*prepared[i].example);
    }
    const TrainOutput trained = train_over(train_side, config, resources);
    const auto records = predict_over(trained.model, dev_side, resources, config.margin);
    SplitMetrics sm;
    EvalOptions all_options;
    all_options.match = match;
    sm.all = evaluate(records, dev_examples, all_options);
    EvalOptions subset_options = all_options;
    subset_options.subset_only = true;
    sm.subset = evaluate(records, dev_examples, subset_options);
    out.push_back(sm);
  }
  return out;
}

namespace {

double mean_subset_f1(const std::vector<SplitMetrics>& metrics) {
  if (metrics.empty()) return 0.0;
  double sum = 0;
  for (const auto& m : metrics) sum += m.subset.avg_f1;
  return sum / metrics.size();
}

}  // namespace

AblationTable run_ablations(const std::vector<PreparedExample>& prepared,
                            const std::vector<std::string>& templates, const SplitSpec& splits,
                            const PipelineConfig& config, const PipelineResources& resources,
                            const MatchOptions& match) {
  AblationTable table;
  table.base_f1 = mean_subset_f1(run_split_evaluations(prepared, splits, config, resources, match));

  for (const auto& name : templates) {
    PipelineConfig ablated = config;
    ablated.features = ablate(ablated.features, name);
    AblationRow row;
    row.template_name = name;
    row.f1 = mean_subset_f1(run_split_evaluations(prepared, splits, ablated, resources, match));
    row.delta = row.f1 - table.base_f1;
    table.rows.push_back(std::move(row));
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const AblationRow& a, const AblationRow& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    return a.template_name < b.template_name;
  });
  return table;
}

}  // namespace webqa
