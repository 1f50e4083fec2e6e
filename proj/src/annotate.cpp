#include "webqa/annotate.h"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace webqa {

namespace {

bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::string_view segment_name(Segment s) {
  switch (s) {
    case Segment::Title:
      return "title";
    case Segment::Body:
      return "body";
    case Segment::Question:
      return "question";
  }
  return "body";
}

std::optional<Segment> segment_from_name(std::string_view name) {
  if (name == "title") return Segment::Title;
  if (name == "body") return Segment::Body;
  if (name == "question") return Segment::Question;
  return std::nullopt;
}

std::string lowercase(std::string_view text) {
  std::string out(text);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + ('a' - 'A'));
  return out;
}

std::vector<Token> tokenize(std::string_view text, Segment segment) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_space_byte(c)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    const bool word = is_word_byte(c);
    if (word)
      while (j < n && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
    Token t;
    t.text = std::string(text.substr(i, j - i));
    t.lower = lowercase(t.text);
    t.index = static_cast<int>(out.size());
    t.segment = segment;
    t.is_punct = !word;
    out.push_back(std::move(t));
    i = j;
  }
  return out;
}

std::vector<std::string> lower_words(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text, Segment::Body))
    if (!t.is_punct) out.push_back(std::move(t.lower));
  return out;
}

std::string canonical_form(std::string_view text) {
  std::string out;
  for (const auto& t : tokenize(text, Segment::Body)) {
    if (!out.empty()) out += ' ';
    out += t.lower;
  }
  return out;
}

// --- heuristic annotation -------------------------------------------------

namespace {

bool starts_uppercase(const Token& t) {
  return !t.text.empty() && t.text[0] >= 'A' && t.text[0] <= 'Z';
}

bool sentence_initial(const std::vector<Token>& tokens, int i) {
  if (i == 0) return true;
  const Token& prev = tokens[i - 1];
  return prev.is_punct && (prev.text == "." || prev.text == "?" || prev.text == "!");
}

const std::unordered_map<std::string, std::string>& pos_lexicon() {
  static const std::unordered_map<std::string, std::string> lex = {
      {"a", "DT"},     {"an", "DT"},    {"the", "DT"},   {"this", "DT"},   {"that", "DT"},
      {"these", "DT"}, {"those", "DT"}, {"in", "IN"},    {"on", "IN"},     {"at", "IN"},
      {"of", "IN"},    {"for", "IN"},   {"from", "IN"},  {"by", "IN"},     {"with", "IN"},
      {"about", "IN"}, {"as", "IN"},    {"into", "IN"},  {"over", "IN"},   {"after", "IN"},
      {"before", "IN"},{"between", "IN"},{"during", "IN"},{"against", "IN"},
      {"and", "CC"},   {"or", "CC"},    {"but", "CC"},   {"nor", "CC"},
      {"i", "PRP"},    {"you", "PRP"},  {"he", "PRP"},   {"she", "PRP"},   {"it", "PRP"},
      {"we", "PRP"},   {"they", "PRP"}, {"him", "PRP"},  {"her", "PRP"},   {"them", "PRP"},
      {"me", "PRP"},   {"us", "PRP"},
      {"can", "MD"},   {"could", "MD"}, {"will", "MD"},  {"would", "MD"},  {"should", "MD"},
      {"may", "MD"},   {"might", "MD"}, {"must", "MD"},  {"shall", "MD"},
      {"is", "VBZ"},   {"are", "VBP"},  {"was", "VBD"},  {"were", "VBD"},  {"be", "VB"},
      {"been", "VBN"}, {"am", "VBP"},   {"has", "VBZ"},  {"have", "VBP"},  {"had", "VBD"},
      {"do", "VBP"},   {"does", "VBZ"}, {"did", "VBD"},  {"played", "VBD"},
      {"to", "TO"},    {"not", "RB"},
      {"who", "WP"},   {"whom", "WP"},  {"whose", "WP$"},{"what", "WP"},   {"which", "WDT"},
      {"when", "WRB"}, {"where", "WRB"},{"why", "WRB"},  {"how", "WRB"},
  };
  return lex;
}

std::string pos_tag_for(const Token& t) {
  if (t.is_punct) return "PUNCT";
  if (all_digits(t.lower)) return "CD";
  auto it = pos_lexicon().find(t.lower);
  if (it != pos_lexicon().end()) return it->second;
  if (starts_uppercase(t)) return "NNP";
  const std::string& w = t.lower;
  auto ends_with = [&w](std::string_view suf) {
    return w.size() > suf.size() && w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends_with("ly")) return "RB";
  if (ends_with("ing")) return "VBG";
  if (ends_with("ed")) return "VBD";
  if (ends_with("est")) return "JJS";
  if (ends_with("s")) return "NNS";
  return "NN";
}

}  // namespace

Annotation HeuristicAnnotator::annotate(const AnnotationKey& key, std::string_view text) const {
  Annotation ann;
  ann.tokens = tokenize(text, key.segment);
  ann.pos_tags.reserve(ann.tokens.size());
  for (const auto& t : ann.tokens) ann.pos_tags.push_back(pos_tag_for(t));

  const int n = static_cast<int>(ann.tokens.size());
  int i = 0;
  while (i < n) {
    const Token& t = ann.tokens[i];
    if (t.is_punct) {
      ++i;
      continue;
    }
    if (all_digits(t.lower)) {
      NeSpan span;
      span.start = i;
      span.end = i + 1;
      span.label = is_year_token(t.lower) ? "DATE" : "NUMBER";
      ann.ne_spans.push_back(std::move(span));
      ++i;
      continue;
    }
    if (starts_uppercase(t)) {
      int j = i + 1;
      while (j < n && starts_uppercase(ann.tokens[j])) ++j;
      // A lone capitalized token at a sentence start carries no entity signal.
      if (!(j - i == 1 && sentence_initial(ann.tokens, i))) {
        NeSpan span;
        span.start = i;
        span.end = j;
        span.label = "PERSON";
        ann.ne_spans.push_back(std::move(span));
      }
      i = j;
      continue;
    }
    ++i;
  }
  return ann;
}

// --- sidecar annotation ----------------------------------------------------

namespace {

std::string sidecar_key(const AnnotationKey& key) {
  std::string k = key.example_id;
  k += '\x1f';
  k += segment_name(key.segment);
  k += '\x1f';
  k += std::to_string(key.snippet_rank);
  return k;
}

bool looks_punct(std::string_view text) {
  return !text.empty() && std::none_of(text.begin(), text.end(), [](unsigned char c) {
    return is_word_byte(c);
  });
}

void mark_maximal_spans(std::vector<NeSpan>& spans) {
  for (auto& a : spans) {
    a.maximal = true;
    for (const auto& b : spans)
      if ((b.start < a.start && a.end <= b.end) || (b.start <= a.start && a.end < b.end))
        a.maximal = false;
  }
}

}  // namespace

SidecarAnnotator::SidecarAnnotator(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open annotation file: " + file.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("annotation file " + file.string() + " line " +
                               std::to_string(lineno) + ": " + e.what());
    }
    AnnotationKey key;
    key.example_id = rec.at("id").get<std::string>();
    auto seg = segment_from_name(rec.at("segment").get<std::string>());
    if (!seg)
      throw std::runtime_error("annotation file line " + std::to_string(lineno) +
                               ": unknown segment");
    key.segment = *seg;
    key.snippet_rank = rec.value("rank", 0);

    Annotation ann;
    const auto& toks = rec.at("tokens");
    ann.tokens.reserve(toks.size());
    for (const auto& tj : toks) {
      Token t;
      t.text = tj.get<std::string>();
      t.lower = lowercase(t.text);
      t.index = static_cast<int>(ann.tokens.size());
      t.segment = key.segment;
      t.is_punct = looks_punct(t.text);
      ann.tokens.push_back(std::move(t));
    }
    ann.pos_tags = rec.at("pos").get<std::vector<std::string>>();
    if (ann.pos_tags.size() != ann.tokens.size())
      throw std::runtime_error("annotation file line " + std::to_string(lineno) +
                               ": pos/token length mismatch");
    if (rec.contains("ne")) {
      for (const auto& sj : rec["ne"]) {
        NeSpan span;
        span.start = sj.at("start").get<int>();
        span.end = sj.at("end").get<int>();
        span.label = sj.at("label").get<std::string>();
        if (span.start < 0 || span.end > static_cast<int>(ann.tokens.size()) ||
            span.start >= span.end)
          throw std::runtime_error("annotation file line " + std::to_string(lineno) +
                                   ": ne span out of bounds");
        ann.ne_spans.push_back(std::move(span));
      }
      mark_maximal_spans(ann.ne_spans);
    }
    records_[sidecar_key(key)] = std::move(ann);
  }
}

Annotation SidecarAnnotator::annotate(const AnnotationKey& key, std::string_view) const {
  auto it = records_.find(sidecar_key(key));
  if (it == records_.end())
    throw std::runtime_error("no sidecar annotation for id '" + key.example_id + "' segment '" +
                             std::string(segment_name(key.segment)) + "' rank " +
                             std::to_string(key.snippet_rank));
  return it->second;
}

// --- stop words -------------------------------------------------------------

extern const char* kBuiltinStopwordsText;

StopWords::StopWords(std::vector<std::string> words) : list_(std::move(words)) {
  for (const auto& w : list_) words_.insert(w);
}

const StopWords& StopWords::builtin() {
  static const StopWords instance = [] {
    std::vector<std::string> words;
    std::istringstream in(kBuiltinStopwordsText);
    std::string w;
    while (in >> w) words.push_back(lowercase(w));
    return StopWords(std::move(words));
  }();
  return instance;
}

StopWords StopWords::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stop-word file: " + path.string());
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(lowercase(w));
  return StopWords(std::move(words));
}

bool StopWords::contains(std::string_view lower_word) const {
  return words_.count(std::string(lower_word)) > 0;
}

// --- common words -----------------------------------------------------------

bool CommonWords::contains(std::string_view w) const {
  return std::find(words.begin(), words.end(), w) != words.end();
}

CommonWords compute_common_words(const std::vector<std::string>& questions,
                                 const StopWords& stoplist, std::size_t limit) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& q : questions)
    for (const auto& w : lower_words(q))
      if (!stoplist.contains(w)) ++counts[w];

  std::vector<std::pair<std::string, std::int64_t>> items(counts.begin(), counts.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  CommonWords out;
  for (const auto& [w, c] : items) {
    if (out.words.size() >= limit) break;
    out.words.push_back(w);
  }
  return out;
}

// --- embeddings ---------------------------------------------------------------

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path.string());
  EmbeddingTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos)
      throw std::runtime_error("embedding file line " + std::to_string(lineno) +
                               ": missing vector");
    std::string word = lowercase(line.substr(0, sp));
    std::vector<float> vec;
    const char* p = line.data() + sp;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p >= end) break;
      float v = 0.f;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc())
        throw std::runtime_error("embedding file line " + std::to_string(lineno) +
                                 ": bad float");
      vec.push_back(v);
      p = next;
    }
    if (table.dimension == 0)
      table.dimension = static_cast<int>(vec.size());
    else if (static_cast<int>(vec.size()) != table.dimension)
      throw std::runtime_error("embedding file line " + std::to_string(lineno) +
                               ": dimension mismatch");
    table.vectors[std::move(word)] = std::move(vec);
  }
  return table;
}

const std::vector<float>* EmbeddingTable::find(std::string_view lower_word) const {
  auto it = vectors.find(std::string(lower_word));
  return it == vectors.end() ? nullptr : &it->second;
}

double cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size())
    throw std::invalid_argument("cosine: dimension mismatch (" + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()) + ")");
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<double>(u[i]) * v[i];
    nu += static_cast<double>(u[i]) * u[i];
    nv += static_cast<double>(v[i]) * v[i];
  }
  if (nu == 0 || nv == 0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::optional<std::string> wh_word(const Annotation& question) {
  static const std::unordered_set<std::string> wh = {"who",   "what", "where", "when", "which",
                                                     "why",   "how",  "whom",  "whose"};
  for (const auto& t : question.tokens)
    if (wh.count(t.lower)) return t.lower;
  return std::nullopt;
}

bool is_year_token(std::string_view lower_word, int* year) {
  if (lower_word.size() != 4 || !all_digits(lower_word)) return false;
  int y = 0;
  std::from_chars(lower_word.data(), lower_word.data() + 4, y);
  if (y < 1000 || y > 2099) return false;
  if (year) *year = y;
  return true;
}

}  // namespace webqa
