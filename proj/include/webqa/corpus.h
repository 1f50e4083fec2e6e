#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace webqa {

struct Snippet {
  std::string title;
  std::string body;
  int rank = 1;  // 1-based position in the result set
};

struct ResultSet {
  std::vector<Snippet> snippets;  // ascending unique ranks, at most 100
};

enum class CompositionalityTag { Simple, Filter, Nary, Conjunction, Composition, Superlative, Other };

std::string_view tag_name(CompositionalityTag t);
std::optional<CompositionalityTag> tag_from_name(std::string_view name);

struct Example {
  std::string id;
  std::string question;
  std::vector<std::string> gold_answers;  // verbatim casing, non-empty
  ResultSet result_set;
  std::optional<std::set<CompositionalityTag>> tags;
};

class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::size_t line, std::string_view field, std::string_view message);
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Line-delimited records, one example per line:
//   {"id":..., "question":..., "answers":[...],
//    "snippets":[{"title":...,"body":...,"rank":...}], "tags":[...]?}
// Every record is validated; errors carry the line number and field.
std::vector<Example> load_dataset(const std::filesystem::path& path);

// Inverse of load_dataset: snippets serialized in rank order, tags only when
// present. Writes to a temp file and renames.
void store_dataset(const std::filesystem::path& path, const std::vector<Example>& examples);

// Canonical (lowercased, token-normalized) forms of the gold answers, deduplicated.
std::vector<std::string> gold_keys(const Example& example);

// True iff some gold answer matches one of the candidate texts (which are
// already canonical lowercased forms).
bool gold_reachable(const Example& example, const std::vector<std::string>& candidate_texts);

using CandidateTextsFn = std::function<std::vector<std::string>(const Example&)>;

struct FilterResult {
  std::vector<Example> kept;
  std::vector<Example> dropped;
};

// Keeps examples whose gold answer appears among the extractor's top-K
// candidate texts; order preserved on both sides.
FilterResult filter_trainable(const std::vector<Example>& examples,
                              const CandidateTextsFn& extractor);

}  // namespace webqa
