#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace webqa {

enum class Segment { Title, Body, Question };

std::string_view segment_name(Segment s);
std::optional<Segment> segment_from_name(std::string_view name);

struct Token {
  std::string text;   // original casing
  std::string lower;
  int index = 0;      // position within its segment
  Segment segment = Segment::Body;
  bool is_punct = false;
};

// ASCII lowercasing; bytes >= 0x80 pass through untouched.
std::string lowercase(std::string_view text);

// Deterministic whitespace + punctuation splitting. Runs of alphanumeric
// bytes (including any byte >= 0x80, so UTF-8 sequences stay intact) form
// word tokens; every other non-space byte becomes a single punctuation token.
std::vector<Token> tokenize(std::string_view text, Segment segment);

// Lowercased texts of the non-punctuation tokens of `text`.
std::vector<std::string> lower_words(std::string_view text);

// Lowercased token texts joined with single spaces. This is the string form
// used whenever candidate texts and gold answers are compared.
std::string canonical_form(std::string_view text);

struct NeSpan {
  int start = 0;
  int end = 0;          // exclusive
  std::string label;
  bool maximal = true;  // not strictly contained in another span
};

struct Annotation {
  std::vector<Token> tokens;
  std::vector<std::string> pos_tags;  // aligned to tokens
  std::vector<NeSpan> ne_spans;
};

struct AnnotationKey {
  std::string example_id;
  Segment segment = Segment::Question;
  int snippet_rank = 0;  // 0 for the question segment
};

class AnnotationProvider {
 public:
  virtual ~AnnotationProvider() = default;
  virtual Annotation annotate(const AnnotationKey& key, std::string_view text) const = 0;
};

// Dependency-free tagger: capitalized token runs become PERSON spans (a lone
// sentence-initial capitalized token does not), digit tokens become DATE
// (years) or NUMBER spans, and POS tags come from a small function-word
// lexicon plus suffix rules.
class HeuristicAnnotator : public AnnotationProvider {
 public:
  Annotation annotate(const AnnotationKey& key, std::string_view text) const override;
};

// Reads precomputed tags from a line-delimited file keyed by
// (example id, segment, snippet rank) and returns them verbatim.
class SidecarAnnotator : public AnnotationProvider {
 public:
  explicit SidecarAnnotator(const std::filesystem::path& file);
  Annotation annotate(const AnnotationKey& key, std::string_view text) const override;

 private:
  std::map<std::string, Annotation> records_;
};

class StopWords {
 public:
  StopWords() = default;
  explicit StopWords(std::vector<std::string> words);

  // The list shipped in resources/stopwords.txt, compiled into the binary.
  static const StopWords& builtin();
  static StopWords from_file(const std::filesystem::path& path);

  bool contains(std::string_view lower_word) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return list_; }

 private:
  std::unordered_set<std::string> words_;
  std::vector<std::string> list_;
};

struct CommonWords {
  std::vector<std::string> words;  // most frequent first

  bool contains(std::string_view w) const;
};

// The `limit` most frequent non-stop, non-punctuation lowercased tokens over
// all questions; ties broken lexicographically.
CommonWords compute_common_words(const std::vector<std::string>& questions,
                                 const StopWords& stoplist, std::size_t limit = 50);

struct EmbeddingTable {
  int dimension = 0;
  std::unordered_map<std::string, std::vector<float>> vectors;

  // Text format: one word per line followed by space-separated floats.
  static EmbeddingTable load(const std::filesystem::path& path);

  // nullptr for out-of-vocabulary words (treated as the zero vector).
  const std::vector<float>* find(std::string_view lower_word) const;
};

// dot(u,v) / (|u||v|); 0 when either norm is zero. Throws on dimension mismatch.
double cosine(std::span<const float> u, std::span<const float> v);

// First token of the question in {who, what, where, when, which, why, how,
// whom, whose}, if any.
std::optional<std::string> wh_word(const Annotation& question);

// A token is a year iff it is 4 digits in [1000, 2099].
bool is_year_token(std::string_view lower_word, int* year = nullptr);

}  // namespace webqa
