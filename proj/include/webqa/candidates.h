#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "webqa/annotate.h"
#include "webqa/corpus.h"

namespace webqa {

struct Mention {
  int snippet_rank = 1;
  Segment segment = Segment::Body;
  int start = 0;  // token index within the segment
  int end = 0;    // exclusive
};

struct Candidate {
  std::string text;  // lowercased tokens joined with spaces
  int n = 1;         // token count, in [1, 4]
  int tf = 0;        // total occurrences across all snippets (== mentions.size())
  double tfidf = 0.0;
  std::vector<Mention> mentions;
};

struct IdfTable {
  std::int64_t doc_count = 0;
  std::unordered_map<std::string, std::int64_t> df;

  // idf(w) = ln((1 + doc_count) / (1 + df(w))) + 1; unseen words have df 0.
  double idf(std::string_view word) const;

  // Line-delimited `word<TAB>df` with a `doc_count<TAB>N` header.
  void save(const std::filesystem::path& path) const;
  static IdfTable load(const std::filesystem::path& path);
};

// Each document is a list of lowercased tokens; df counts documents containing
// the word at least once. Throws on an empty corpus.
IdfTable build_idf(const std::vector<std::vector<std::string>>& documents);

// Every snippet of every example counts as one document (title + body).
IdfTable build_idf_from_examples(const std::vector<Example>& examples);

struct SnippetAnnotation {
  int rank = 1;
  Annotation title;
  Annotation body;
};

struct ExampleAnnotation {
  Annotation question;
  std::vector<SnippetAnnotation> snippets;  // aligned to result_set.snippets
};

ExampleAnnotation annotate_example(const Example& example, const AnnotationProvider& provider);

// All distinct lowercased 1..max_n-grams over the snippet annotations, with
// every occurrence recorded as a mention. N-grams never cross the title/body
// boundary and never start or end on a punctuation token.
std::vector<Candidate> extract_ngrams(const ResultSet& result_set,
                                      const std::vector<SnippetAnnotation>& annotations,
                                      int max_n = 4);

// Drops candidates whose token sequence occurs contiguously in the question.
std::vector<Candidate> filter_question_overlap(std::vector<Candidate> candidates,
                                               const Annotation& question);

// tfidf(c) = tf(c) * mean token idf; keeps the k best, ties broken by
// (longer n, then text ascending); output sorted by descending tfidf.
std::vector<Candidate> score_and_truncate(std::vector<Candidate> candidates,
                                          const IdfTable& idf, int k = 140);

// Convenience wrapper running the full extraction pipeline for one example.
std::vector<Candidate> extract_candidates(const Example& example,
                                          const ExampleAnnotation& annotation,
                                          const IdfTable& idf, int k = 140);

// Fraction of examples whose gold answer survives into the top-k candidates.
double candidate_recall(const std::vector<Example>& examples,
                        const AnnotationProvider& provider, const IdfTable& idf, int k);

}  // namespace webqa
