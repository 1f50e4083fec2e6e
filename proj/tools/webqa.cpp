#include <iostream>

#include "CLI11.hpp"

#include "webqa/cli.h"

namespace {

void add_common_flags(CLI::App* cmd, webqa::RunConfig* config) {
  cmd->add_option("--dataset", config->dataset, "Corpus file (one example per line)");
  cmd->add_option("--embeddings", config->embeddings, "Word embedding file (text format)");
  cmd->add_option("--idf", config->idf, "Precomputed idf table (default: built from the dataset)");
  cmd->add_option("--model", config->model, "Model file");
  cmd->add_option("--annotations", config->annotations, "Sidecar annotation file");
  cmd->add_option("--out", config->out, "Output file");
  cmd->add_option("--stopwords", config->stopwords, "Stop-word list (default: built-in)");
  cmd->add_option("--aliases", config->aliases, "Alias table for answer normalization");
  cmd->add_option("--seed", config->seed, "Random seed");
  cmd->add_option("--lambda", config->lambda, "L2 regularization strength");
  cmd->add_option("--k", config->k_candidates, "Candidates kept per example");
  cmd->add_option("--margin", config->margin, "Answer-set margin on raw scores");
  cmd->add_option("--window", config->context_window, "Context window size");
  cmd->add_option("--decay", config->decay_base, "Context distance decay base");
  cmd->add_option("--provider", config->provider, "Annotation provider: heuristic|sidecar");
  cmd->add_flag("--normalize", config->normalize, "Normalize answers before matching");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Web-snippet question answering: extract, rank and evaluate n-gram answers"};
  app.require_subcommand(1);

  webqa::RunConfig config;
  int (*command)(const webqa::RunConfig&) = nullptr;

  auto* train = app.add_subcommand("train", "Train a ranking model on a corpus");
  add_common_flags(train, &config);
  train->add_option("--report", config.report, "Training report file");
  train->callback([&] { command = webqa::run_train; });

  auto* predict = app.add_subcommand("predict", "Rank candidates and emit answer sets");
  add_common_flags(predict, &config);
  predict->callback([&] { command = webqa::run_predict; });

  auto* eval = app.add_subcommand("eval", "Compute avg F1, p@1 and MRR");
  add_common_flags(eval, &config);
  eval->add_option("--predictions", config.predictions, "Predictions file to score");
  eval->add_option("--splits", config.splits, "Train/dev split count for the dev protocol");
  eval->add_flag("--subset-only", config.subset_only,
                 "Report only examples that passed candidate extraction");
  eval->callback([&] { command = webqa::run_eval; });

  auto* ablate = app.add_subcommand("ablate", "Feature-template ablation experiments");
  add_common_flags(ablate, &config);
  ablate->add_option("--ablate", config.ablate_templates,
                     "Template(s) to ablate (default: every template)");
  ablate->add_option("--splits", config.splits, "Split count (default 5)");
  ablate->callback([&] { command = webqa::run_ablate; });

  auto* analyze = app.add_subcommand("analyze", "Per-compositionality-type breakdown");
  add_common_flags(analyze, &config);
  analyze->add_option("--predictions", config.predictions, "Predictions file to analyze");
  analyze->callback([&] { command = webqa::run_analyze; });

  auto* scrape = app.add_subcommand("scrape", "Fetch snippets and build a corpus file");
  scrape->add_option("--questions", config.questions, "Questions file (id, question, answers)");
  scrape->add_option("--out", config.out, "Corpus output file");
  scrape->add_option("--config", config.search_config, "Search backend config file");
  scrape->callback([&] { command = webqa::run_scrape; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return command(config);
  } catch (const webqa::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
