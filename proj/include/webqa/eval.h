#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "webqa/corpus.h"
#include "webqa/predict.h"

namespace webqa {

// Optional surface-form unification ("hillary rodham clinton" -> "hillary
// clinton"). Keys and values are normalized at load; chains are resolved so
// a single lookup is a fixpoint.
struct AliasTable {
  std::unordered_map<std::string, std::string> aliases;

  // Line-delimited `surface<TAB>canonical`.
  static AliasTable load(const std::filesystem::path& path);
};

// lowercase, strip leading articles, strip terminal punctuation, collapse
// whitespace, then apply the alias table. Idempotent.
std::string normalize_answer(std::string_view text, const AliasTable* aliases = nullptr);

struct MatchOptions {
  bool normalize = false;
  const AliasTable* aliases = nullptr;
};

// Canonical comparison key: lowercased token-normalized form, optionally
// normalized further.
std::string match_key(std::string_view text, const MatchOptions& options = {});

// Set F1 between predicted and gold answers under exact key match.
double f1_for_example(const std::vector<std::string>& predicted,
                      const std::vector<std::string>& gold,
                      const MatchOptions& options = {});

struct Metrics {
  double avg_f1 = 0.0;
  double p_at_1 = 0.0;
  double mrr = 0.0;
  double candidate_recall = 0.0;
  int n_examples = 0;
};

struct EvalOptions {
  bool subset_only = false;  // restrict to examples whose extraction found a gold
  MatchOptions match;
};

// Predictions are matched to examples by id; any id mismatch is an error.
// Examples with no candidates score 0 everywhere in the all-examples condition.
Metrics evaluate(const std::vector<PredictionRecord>& predictions,
                 const std::vector<Example>& examples, const EvalOptions& options = {});

struct SplitSpec {
  std::uint64_t seed = 1;
  int n_splits = 5;
  double train_fraction = 0.7;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> dev;
};

// Seeded random 70/30 partitions, reproducible across platforms.
std::vector<Split> make_splits(std::size_t n_examples, const SplitSpec& spec);

struct TypeStats {
  int passed = 0;   // candidate extraction found a gold
  int failed = 0;
  double avg_f1 = 0.0;  // over the passed examples of this type
};

// Per-compositionality-type extraction and F1 breakdown; a multi-tagged
// example contributes to every one of its types. Untagged examples are
// excluded with a warning.
std::map<CompositionalityTag, TypeStats> compositionality_report(
    const std::vector<PredictionRecord>& predictions, const std::vector<Example>& examples,
    const MatchOptions& options = {});

}  // namespace webqa
