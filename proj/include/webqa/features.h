#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "webqa/annotate.h"
#include "webqa/candidates.h"

namespace webqa {

// All feature template names, in the order they are emitted.
const std::vector<std::string>& feature_templates();

struct FeatureVector {
  std::map<std::string, double> entries;  // no zero values stored

  void add(const std::string& name, double value);  // ignores 0, rejects non-finite
  double get(const std::string& name) const;
};

class FeatureIndex {
 public:
  // Insert if unseen (pre-freeze); after freezing unknown names map to -1.
  int add(const std::string& name);
  int find(const std::string& name) const;  // -1 if absent
  void observe(const FeatureVector& fv);

  // Sorts names lexicographically and stops accepting new ones.
  void freeze();
  bool frozen() const { return frozen_; }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  static FeatureIndex from_names(std::vector<std::string> names);  // frozen

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> ids_;
  bool frozen_ = false;
};

FeatureIndex build_index(const std::vector<FeatureVector>& vectors);

// Sparse dense-indexed vector, items sorted by feature id.
struct SparseVector {
  std::vector<std::pair<int, double>> items;
};

// Drops names missing from the (frozen) index.
SparseVector vectorize(const FeatureVector& fv, const FeatureIndex& index);

struct FeatureConfig {
  int context_window = 6;
  double decay_base = 0.5;
  int tfidf_bins = 10;
  // Inclusive snippet-rank intervals.
  std::vector<std::pair<int, int>> rank_bins = {{1, 1},   {2, 5},   {6, 10},
                                                {11, 20}, {21, 50}, {51, 100}};
  // Era boundaries: bins are (-inf,1900), [1900,1950), [1950,1980), [1980,2000),
  // [2000,2010), [2010,+inf).
  std::vector<int> year_bin_edges = {1900, 1950, 1980, 2000, 2010};
  std::set<std::string> disabled_templates;

  bool enabled(const std::string& template_name) const {
    return disabled_templates.find(template_name) == disabled_templates.end();
  }
};

// Returns a config under which featurize emits nothing for that template.
// Throws listing the valid names when the template is unknown.
FeatureConfig ablate(FeatureConfig config, const std::string& template_name);

// Per-span-length equal-frequency bin edges for tf-idf scores, fit on the
// training candidates and frozen into the model.
struct TfidfBinTable {
  int bins = 10;
  std::array<std::vector<double>, 4> edges;  // edges[n-1], ascending

  int bin_for(int n, double score) const;
};

TfidfBinTable fit_tfidf_bins(const std::array<std::vector<double>, 4>& scores_per_n,
                             int bins = 10);

struct FeatureResources {
  const CommonWords* common_words = nullptr;
  const EmbeddingTable* embeddings = nullptr;
  const StopWords* stoplist = nullptr;
  const TfidfBinTable* tfidf_bins = nullptr;  // optional; no binned features when null
  FeatureConfig config;
};

// Question-side signals shared by every candidate of one example.
struct QuestionContext {
  const Annotation* annotation = nullptr;
  std::optional<std::string> wh;
  std::vector<std::string> lower_tokens;            // all tokens, lowercased
  std::unordered_set<std::string> word_set;         // non-punct lowers
  std::vector<std::string> word_types;              // distinct non-punct lowers, first-seen order
  std::vector<std::string> content_words;           // distinct non-stop non-punct lowers
  std::vector<std::string> common_in_q;             // common words present in the question
  std::vector<std::string> ne_labels;               // distinct NE labels, sorted
  std::vector<std::vector<std::string>> ne_texts;   // lowercased token runs of NE spans
};

QuestionContext make_question_context(const Annotation& question,
                                      const FeatureResources& resources);

// Mean over the candidate's mentions of the per-mention feature vector.
// Throws when a mention lies outside its segment annotation.
FeatureVector featurize(const QuestionContext& question, const Candidate& candidate,
                        const ExampleAnnotation& annotation,
                        const FeatureResources& resources);

}  // namespace webqa
