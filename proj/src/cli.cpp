#include "webqa/cli.h"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "webqa/pipeline.h"
#include "webqa/websearch.h"

namespace webqa {

using nlohmann::json;

namespace {

void require_file(const std::filesystem::path& path, const char* flag) {
  if (path.empty())
    throw UsageError(std::string("missing required flag ") + flag);
  if (!std::filesystem::exists(path))
    throw UsageError(std::string(flag) + ": file not found: " + path.string());
}

void require_out(const std::filesystem::path& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string("missing required flag ") + flag);
}

struct LoadedResources {
  StopWords stoplist;
  PipelineResources pipeline;
};

// Shared setup: stop words, embeddings, annotation provider, idf table.
std::unique_ptr<LoadedResources> load_resources(const RunConfig& config,
                                                const std::vector<Example>* examples) {
  auto out = std::make_unique<LoadedResources>();
  out->stoplist =
      config.stopwords.empty() ? StopWords::builtin() : StopWords::from_file(config.stopwords);
  out->pipeline.stoplist = &out->stoplist;

  if (!config.embeddings.empty()) {
    require_file(config.embeddings, "--embeddings");
    out->pipeline.embeddings = EmbeddingTable::load(config.embeddings);
  }

  if (config.provider == "sidecar") {
    require_file(config.annotations, "--annotations");
    out->pipeline.provider = std::make_shared<SidecarAnnotator>(config.annotations);
  } else if (config.provider == "heuristic") {
    out->pipeline.provider = std::make_shared<HeuristicAnnotator>();
  } else {
    throw UsageError("--provider must be 'heuristic' or 'sidecar'");
  }

  if (!config.idf.empty()) {
    require_file(config.idf, "--idf");
    out->pipeline.idf = IdfTable::load(config.idf);
    out->pipeline.idf_ref = config.idf.string();
  } else {
    if (!examples)
      throw UsageError("--idf is required when no dataset is available to build one");
    out->pipeline.idf = build_idf_from_examples(*examples);
    out->pipeline.idf_ref = "dataset";
  }
  return out;
}

PipelineConfig pipeline_config(const RunConfig& config) {
  PipelineConfig pc;
  pc.top_k = config.k_candidates;
  pc.margin = config.margin;
  pc.lambda = config.lambda;
  pc.features.context_window = config.context_window;
  pc.features.decay_base = config.decay_base;
  pc.train.seed = config.seed;
  return pc;
}

MatchOptions match_options(const RunConfig& config, const AliasTable* aliases) {
  MatchOptions match;
  match.normalize = config.normalize;
  match.aliases = aliases;
  return match;
}

json metrics_to_json(const std::string& condition, const Metrics& m) {
  json j;
  j["condition"] = condition;
  j["avg_f1"] = m.avg_f1;
  j["p_at_1"] = m.p_at_1;
  j["mrr"] = m.mrr;
  j["n"] = m.n_examples;
  j["candidate_recall"] = m.candidate_recall;
  return j;
}

void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void emit(const std::filesystem::path& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text_atomically(out_path, text);
}

}  // namespace

int run_train(const RunConfig& config) {
  require_file(config.dataset, "--dataset");
  require_out(config.model, "--model");

  const auto examples = load_dataset(config.dataset);
  const auto resources = load_resources(config, &examples);
  const PipelineConfig pc = pipeline_config(config);

  const auto prepared = prepare_examples(examples, resources->pipeline, pc);
  std::vector<const PreparedExample*> pointers;
  for (const auto& pe : prepared) pointers.push_back(&pe);

  const TrainOutput trained = train_over(pointers, pc, resources->pipeline);
  save_model(trained.model, config.model);

  // Sidecar with the dropped examples keeps the filter accounting reproducible.
  std::vector<Example> dropped;
  for (const auto& pe : prepared)
    if (!pe.passed) dropped.push_back(*pe.example);
  const std::filesystem::path dropped_path = config.model.string() + ".dropped.jsonl";
  store_dataset(dropped_path, dropped);

  json report;
  report["examples"] = examples.size();
  report["kept"] = trained.kept_ids.size();
  report["dropped"] = trained.dropped_ids.size();
  report["dropped_ids"] = trained.dropped_ids;
  report["iterations"] = trained.report.iterations;
  report["converged"] = trained.report.converged;
  report["final_objective"] = trained.report.final_objective;
  report["features"] = trained.model.index.size();
  report["lambda"] = config.lambda;
  if (!config.report.empty()) write_text_atomically(config.report, report.dump(1) + "\n");

  std::cout << "trained on " << trained.kept_ids.size() << " of " << examples.size()
            << " examples (" << trained.dropped_ids.size() << " dropped, see "
            << dropped_path.string() << ")\n"
            << "features: " << trained.model.index.size()
            << "  iterations: " << trained.report.iterations
            << "  objective: " << trained.report.final_objective << "\n"
            << "model written to " << config.model.string() << "\n";
  return 0;
}

int run_predict(const RunConfig& config) {
  require_file(config.dataset, "--dataset");
  require_file(config.model, "--model");
  require_out(config.out, "--out");

  const auto examples = load_dataset(config.dataset);
  const auto resources = load_resources(config, &examples);
  const Model model = load_model(config.model);

  PipelineConfig pc = pipeline_config(config);
  pc.features = model.resources.config;

  const auto prepared = prepare_examples(examples, resources->pipeline, pc);
  std::vector<const PreparedExample*> pointers;
  for (const auto& pe : prepared) pointers.push_back(&pe);

  const auto records = predict_over(model, pointers, resources->pipeline, config.margin);
  store_predictions(config.out, records);
  std::cout << "wrote " << records.size() << " predictions to " << config.out.string() << "\n";
  return 0;
}

int run_eval(const RunConfig& config) {
  require_file(config.dataset, "--dataset");
  const auto examples = load_dataset(config.dataset);

  AliasTable aliases;
  if (!config.aliases.empty()) {
    require_file(config.aliases, "--aliases");
    aliases = AliasTable::load(config.aliases);
  }
  const MatchOptions match = match_options(config, config.aliases.empty() ? nullptr : &aliases);

  std::string out_text;
  if (config.splits > 0) {
    // Split protocol: train on 70%, evaluate on the held-out 30%, average.
    const auto resources = load_resources(config, &examples);
    const PipelineConfig pc = pipeline_config(config);
    const auto prepared = prepare_examples(examples, resources->pipeline, pc);
    SplitSpec spec;
    spec.seed = config.seed;
    spec.n_splits = config.splits;
    const auto per_split = run_split_evaluations(prepared, spec, pc, resources->pipeline, match);

    Metrics all, subset;
    for (const auto& sm : per_split) {
      all.avg_f1 += sm.all.avg_f1 / per_split.size();
      all.p_at_1 += sm.all.p_at_1 / per_split.size();
      all.mrr += sm.all.mrr / per_split.size();
      all.candidate_recall += sm.all.candidate_recall / per_split.size();
      all.n_examples += sm.all.n_examples;
      subset.avg_f1 += sm.subset.avg_f1 / per_split.size();
      subset.p_at_1 += sm.subset.p_at_1 / per_split.size();
      subset.mrr += sm.subset.mrr / per_split.size();
      subset.candidate_recall += sm.subset.candidate_recall / per_split.size();
      subset.n_examples += sm.subset.n_examples;
    }
    if (!config.subset_only) out_text += metrics_to_json("all", all).dump() + "\n";
    out_text += metrics_to_json("subset", subset).dump() + "\n";
  } else {
    require_file(config.predictions, "--predictions");
    const auto records = load_predictions(config.predictions);
    EvalOptions options;
    options.match = match;
    if (!config.subset_only) {
      options.subset_only = false;
      out_text += metrics_to_json("all", evaluate(records, examples, options)).dump() + "\n";
    }
    options.subset_only = true;
    out_text += metrics_to_json("subset", evaluate(records, examples, options)).dump() + "\n";
  }
  emit(config.out, out_text);
  return 0;
}

int run_ablate(const RunConfig& config) {
  require_file(config.dataset, "--dataset");
  const auto examples = load_dataset(config.dataset);
  const auto resources = load_resources(config, &examples);
  const PipelineConfig pc = pipeline_config(config);

  std::vector<std::string> templates = config.ablate_templates;
  if (templates.empty()) templates = feature_templates();
  for (const auto& name : templates) ablate(pc.features, name);  // validate names up front

  const auto prepared = prepare_examples(examples, resources->pipeline, pc);
  SplitSpec spec;
  spec.seed = config.seed;
  spec.n_splits = config.splits > 0 ? config.splits : 5;

  AliasTable aliases;
  if (!config.aliases.empty()) aliases = AliasTable::load(config.aliases);
  const MatchOptions match = match_options(config, config.aliases.empty() ? nullptr : &aliases);

  const AblationTable table = run_ablations(prepared, templates, spec, pc, resources->pipeline,
                                            match);
  std::string out_text = "template\tf1\tdelta\n";
  {
    std::ostringstream line;
    line << "(base)\t" << table.base_f1 << "\t0\n";
    out_text += line.str();
  }
  for (const auto& row : table.rows) {
    std::ostringstream line;
    line << row.template_name << '\t' << row.f1 << '\t' << row.delta << '\n';
    out_text += line.str();
  }
  emit(config.out, out_text);
  return 0;
}

int run_analyze(const RunConfig& config) {
  require_file(config.dataset, "--dataset");
  require_file(config.predictions, "--predictions");
  const auto examples = load_dataset(config.dataset);
  const auto records = load_predictions(config.predictions);

  AliasTable aliases;
  if (!config.aliases.empty()) aliases = AliasTable::load(config.aliases);
  const MatchOptions match = match_options(config, config.aliases.empty() ? nullptr : &aliases);

  const auto report = compositionality_report(records, examples, match);
  std::string out_text = "type\tpassed\tfailed\tavg_f1\n";
  for (const auto& [tag, stats] : report) {
    std::ostringstream line;
    line << tag_name(tag) << '\t' << stats.passed << '\t' << stats.failed << '\t'
         << stats.avg_f1 << '\n';
    out_text += line.str();
  }
  emit(config.out, out_text);
  return 0;
}

int run_scrape(const RunConfig& config) {
  require_file(config.questions, "--questions");
  require_file(config.search_config, "--config");
  require_out(config.out, "--out");

  SearchConfig search = SearchConfig::load(config.search_config);
  if (const char* key = std::getenv("WEBQA_API_KEY")) search.api_key = key;

  const auto inputs = load_scrape_inputs(config.questions);
  HttpSearchBackend backend(search);
  const ScrapeStats stats = build_dataset(inputs, search, &backend, config.out, nullptr,
                                          [](const std::string& line) {
                                            std::cerr << line << "\n";
                                          });
  std::cout << "fetched " << stats.fetched << ", cached " << stats.from_cache << ", failed "
            << stats.failed << "; corpus written to " << config.out.string() << "\n";
  return stats.failed == static_cast<int>(inputs.size()) && !inputs.empty() ? 1 : 0;
}

}  // namespace webqa
