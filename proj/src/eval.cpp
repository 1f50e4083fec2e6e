#include "webqa/eval.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "webqa/annotate.h"

namespace webqa {

AliasTable AliasTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open alias file: " + path.string());
  AliasTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("alias file line " + std::to_string(lineno) + ": missing tab");
    const std::string key = normalize_answer(line.substr(0, tab));
    const std::string value = normalize_answer(line.substr(tab + 1));
    table.aliases[key] = value;
  }
  // Resolve chains so one lookup is enough.
  for (auto& [key, value] : table.aliases) {
    std::set<std::string> seen = {key};
    while (table.aliases.count(value) && !seen.count(value)) {
      seen.insert(value);
      value = table.aliases.at(value);
    }
  }
  return table;
}

std::string normalize_answer(std::string_view text, const AliasTable* aliases) {
  std::string lower = lowercase(text);

  // Collapse whitespace into single spaces, trimming the ends.
  std::string collapsed;
  bool pending_space = false;
  for (char c : lower) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed += ' ';
    pending_space = false;
    collapsed += c;
  }

  // Strip leading articles repeatedly so the result is a fixpoint.
  bool stripped = true;
  while (stripped) {
    stripped = false;
    for (std::string_view article : {"a ", "an ", "the "}) {
      if (collapsed.size() > article.size() && collapsed.compare(0, article.size(), article) == 0) {
        collapsed.erase(0, article.size());
        stripped = true;
      }
    }
  }

  // Strip terminal punctuation.
  while (!collapsed.empty()) {
    const char c = collapsed.back();
    if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == ' ')
      collapsed.pop_back();
    else
      break;
  }

  if (aliases) {
    auto it = aliases->aliases.find(collapsed);
    if (it != aliases->aliases.end()) return it->second;
  }
  return collapsed;
}

std::string match_key(std::string_view text, const MatchOptions& options) {
  std::string key = canonical_form(text);
  if (options.normalize) key = normalize_answer(key, options.aliases);
  return key;
}

double f1_for_example(const std::vector<std::string>& predicted,
                      const std::vector<std::string>& gold, const MatchOptions& options) {
  std::set<std::string> pred_keys, gold_keys;
  for (const auto& p : predicted) pred_keys.insert(match_key(p, options));
  for (const auto& g : gold) gold_keys.insert(match_key(g, options));
  if (pred_keys.empty() || gold_keys.empty()) return 0.0;

  std::size_t overlap = 0;
  for (const auto& p : pred_keys)
    if (gold_keys.count(p)) ++overlap;
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / pred_keys.size();
  const double recall = static_cast<double>(overlap) / gold_keys.size();
  return 2 * precision * recall / (precision + recall);
}

namespace {

struct PerExample {
  double f1 = 0.0;
  bool top1_hit = false;
  double reciprocal_rank = 0.0;
  bool passed = false;  // some gold appears in the full ranking
};

PerExample score_example(const Prediction& pred, const Example& ex,
                         const MatchOptions& options) {
  PerExample out;
  std::set<std::string> gold;
  for (const auto& g : ex.gold_answers) gold.insert(match_key(g, options));

  out.f1 = f1_for_example(pred.answers, ex.gold_answers, options);
  for (std::size_t i = 0; i < pred.full_ranking.size(); ++i) {
    if (gold.count(match_key(pred.full_ranking[i].candidate.text, options))) {
      out.passed = true;
      if (out.reciprocal_rank == 0.0) out.reciprocal_rank = 1.0 / static_cast<double>(i + 1);
      if (i == 0) out.top1_hit = true;
    }
  }
  return out;
}

}  // namespace

Metrics evaluate(const std::vector<PredictionRecord>& predictions,
                 const std::vector<Example>& examples, const EvalOptions& options) {
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& rec : predictions) {
    if (!by_id.emplace(rec.id, &rec.prediction).second)
      throw std::runtime_error("evaluate: duplicate prediction for id '" + rec.id + "'");
  }
  std::set<std::string> example_ids;
  for (const auto& ex : examples) example_ids.insert(ex.id);
  for (const auto& rec : predictions)
    if (!example_ids.count(rec.id))
      throw std::runtime_error("evaluate: prediction id '" + rec.id +
                               "' matches no example");

  Metrics metrics;
  double f1_sum = 0, rr_sum = 0;
  int top1 = 0, passed = 0, counted = 0;
  for (const auto& ex : examples) {
    auto it = by_id.find(ex.id);
    if (it == by_id.end())
      throw std::runtime_error("evaluate: no prediction for example id '" + ex.id + "'");
    const PerExample pe = score_example(*it->second, ex, options.match);
    if (options.subset_only && !pe.passed) continue;
    ++counted;
    if (pe.passed) ++passed;
    f1_sum += pe.f1;
    rr_sum += pe.reciprocal_rank;
    if (pe.top1_hit) ++top1;
  }
  metrics.n_examples = counted;
  if (counted > 0) {
    metrics.avg_f1 = f1_sum / counted;
    metrics.p_at_1 = static_cast<double>(top1) / counted;
    metrics.mrr = rr_sum / counted;
    metrics.candidate_recall = static_cast<double>(passed) / counted;
  }
  return metrics;
}

namespace {

// Portable Fisher-Yates; std::shuffle is implementation-defined.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace

std::vector<Split> make_splits(std::size_t n_examples, const SplitSpec& spec) {
  if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0)
    throw std::invalid_argument("make_splits: train_fraction must be in (0, 1)");
  std::vector<Split> splits;
  for (int s = 0; s < spec.n_splits; ++s) {
    std::vector<std::size_t> order(n_examples);
    for (std::size_t i = 0; i < n_examples; ++i) order[i] = i;
    std::mt19937_64 rng(spec.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s + 1));
    seeded_shuffle(order, rng);
    std::size_t n_train =
        static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n_examples)));
    if (n_examples >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n_examples - 1);
    Split split;
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.dev.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    splits.push_back(std::move(split));
  }
  return splits;
}

std::map<CompositionalityTag, TypeStats> compositionality_report(
    const std::vector<PredictionRecord>& predictions, const std::vector<Example>& examples,
    const MatchOptions& options) {
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& rec : predictions) by_id[rec.id] = &rec.prediction;

  std::map<CompositionalityTag, TypeStats> report;
  std::map<CompositionalityTag, double> f1_sums;
  for (const auto& ex : examples) {
    if (!ex.tags || ex.tags->empty()) {
      std::cerr << "warning: example '" << ex.id
                << "' has no compositionality tags; excluded from report\n";
      continue;
    }
    auto it = by_id.find(ex.id);
    if (it == by_id.end())
      throw std::runtime_error("compositionality_report: no prediction for id '" + ex.id + "'");
    const PerExample pe = score_example(*it->second, ex, options);
    for (const auto tag : *ex.tags) {
      TypeStats& stats = report[tag];
      if (pe.passed) {
        ++stats.passed;
        f1_sums[tag] += pe.f1;
      } else {
        ++stats.failed;
      }
    }
  }
  for (auto& [tag, stats] : report)
    if (stats.passed > 0) stats.avg_f1 = f1_sums[tag] / stats.passed;
  return report;
}

}  // namespace webqa
