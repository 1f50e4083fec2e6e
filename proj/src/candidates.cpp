#include "webqa/candidates.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace webqa {

double IdfTable::idf(std::string_view word) const {
  auto it = df.find(std::string(word));
  const std::int64_t d = it == df.end() ? 0 : it->second;
  return std::log(static_cast<double>(1 + doc_count) / static_cast<double>(1 + d)) + 1.0;
}

void IdfTable::save(const std::filesystem::path& path) const {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write idf file: " + tmp.string());
    out << "doc_count\t" << doc_count << '\n';
    std::map<std::string, std::int64_t> sorted(df.begin(), df.end());
    for (const auto& [w, d] : sorted) out << w << '\t' << d << '\n';
  }
  std::filesystem::rename(tmp, path);
}

IdfTable IdfTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open idf file: " + path.string());
  IdfTable table;
  std::string line;
  if (!std::getline(in, line) || line.rfind("doc_count\t", 0) != 0)
    throw std::runtime_error("idf file " + path.string() + ": missing doc_count header");
  table.doc_count = std::stoll(line.substr(10));
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("idf file line " + std::to_string(lineno) + ": missing tab");
    const std::int64_t d = std::stoll(line.substr(tab + 1));
    if (d < 1 || d > table.doc_count)
      throw std::runtime_error("idf file line " + std::to_string(lineno) +
                               ": df out of [1, doc_count]");
    table.df[line.substr(0, tab)] = d;
  }
  return table;
}

IdfTable build_idf(const std::vector<std::vector<std::string>>& documents) {
  if (documents.empty()) throw std::invalid_argument("build_idf: empty corpus");
  IdfTable table;
  table.doc_count = static_cast<std::int64_t>(documents.size());
  for (const auto& doc : documents) {
    std::unordered_map<std::string, bool> seen;
    for (const auto& w : doc)
      if (seen.emplace(w, true).second) ++table.df[w];
  }
  return table;
}

IdfTable build_idf_from_examples(const std::vector<Example>& examples) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& ex : examples) {
    for (const auto& s : ex.result_set.snippets) {
      std::vector<std::string> doc;
      for (const auto& t : tokenize(s.title, Segment::Title)) doc.push_back(t.lower);
      for (const auto& t : tokenize(s.body, Segment::Body)) doc.push_back(t.lower);
      docs.push_back(std::move(doc));
    }
  }
  if (docs.empty()) throw std::invalid_argument("build_idf_from_examples: no snippets");
  return build_idf(docs);
}

ExampleAnnotation annotate_example(const Example& example, const AnnotationProvider& provider) {
  ExampleAnnotation ann;
  AnnotationKey key;
  key.example_id = example.id;
  key.segment = Segment::Question;
  key.snippet_rank = 0;
  ann.question = provider.annotate(key, example.question);
  ann.snippets.reserve(example.result_set.snippets.size());
  for (const auto& s : example.result_set.snippets) {
    SnippetAnnotation sa;
    sa.rank = s.rank;
    key.segment = Segment::Title;
    key.snippet_rank = s.rank;
    sa.title = provider.annotate(key, s.title);
    key.segment = Segment::Body;
    sa.body = provider.annotate(key, s.body);
    ann.snippets.push_back(std::move(sa));
  }
  return ann;
}

std::vector<Candidate> extract_ngrams(const ResultSet& result_set,
                                      const std::vector<SnippetAnnotation>& annotations,
                                      int max_n) {
  if (annotations.size() != result_set.snippets.size())
    throw std::invalid_argument("extract_ngrams: annotations do not cover every snippet");

  std::unordered_map<std::string, Candidate> by_text;
  std::string key;
  for (std::size_t si = 0; si < result_set.snippets.size(); ++si) {
    const int rank = result_set.snippets[si].rank;
    for (const Segment segment : {Segment::Title, Segment::Body}) {
      const Annotation& ann =
          segment == Segment::Title ? annotations[si].title : annotations[si].body;
      const auto& tokens = ann.tokens;
      const int len = static_cast<int>(tokens.size());
      for (int start = 0; start < len; ++start) {
        if (tokens[start].is_punct) continue;
        for (int n = 1; n <= max_n && start + n <= len; ++n) {
          const int end = start + n;
          if (tokens[end - 1].is_punct) continue;
          key.clear();
          for (int i = start; i < end; ++i) {
            if (i > start) key += ' ';
            key += tokens[i].lower;
          }
          Candidate& c = by_text[key];
          if (c.mentions.empty()) {
            c.text = key;
            c.n = n;
          }
          c.mentions.push_back(Mention{rank, segment, start, end});
          c.tf = static_cast<int>(c.mentions.size());
        }
      }
    }
  }

  std::vector<Candidate> out;
  out.reserve(by_text.size());
  for (auto& [_, c] : by_text) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(),
            [](const Candidate& a, const Candidate& b) { return a.text < b.text; });
  return out;
}

std::vector<Candidate> filter_question_overlap(std::vector<Candidate> candidates,
                                               const Annotation& question) {
  std::vector<std::string> q_tokens;
  q_tokens.reserve(question.tokens.size());
  for (const auto& t : question.tokens) q_tokens.push_back(t.lower);

  auto in_question = [&q_tokens](const Candidate& c) {
    std::vector<std::string> ct;
    std::istringstream split(c.text);
    std::string tok;
    while (split >> tok) ct.push_back(tok);
    if (ct.empty() || ct.size() > q_tokens.size()) return false;
    return std::search(q_tokens.begin(), q_tokens.end(), ct.begin(), ct.end()) !=
           q_tokens.end();
  };

  candidates.erase(std::remove_if(candidates.begin(), candidates.end(), in_question),
                   candidates.end());
  return candidates;
}

std::vector<Candidate> score_and_truncate(std::vector<Candidate> candidates,
                                          const IdfTable& idf, int k) {
  for (auto& c : candidates) {
    double sum = 0;
    int count = 0;
    std::istringstream split(c.text);
    std::string tok;
    while (split >> tok) {
      sum += idf.idf(tok);
      ++count;
    }
    c.tfidf = count == 0 ? 0.0 : c.tf * (sum / count);
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.tfidf != b.tfidf) return a.tfidf > b.tfidf;
    if (a.n != b.n) return a.n > b.n;
    return a.text < b.text;
  });
  if (k >= 0 && candidates.size() > static_cast<std::size_t>(k)) candidates.resize(k);
  return candidates;
}

std::vector<Candidate> extract_candidates(const Example& example,
                                          const ExampleAnnotation& annotation,
                                          const IdfTable& idf, int k) {
  auto candidates = extract_ngrams(example.result_set, annotation.snippets);
  candidates = filter_question_overlap(std::move(candidates), annotation.question);
  return score_and_truncate(std::move(candidates), idf, k);
}

double candidate_recall(const std::vector<Example>& examples,
                        const AnnotationProvider& provider, const IdfTable& idf, int k) {
  if (examples.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& ex : examples) {
    const auto ann = annotate_example(ex, provider);
    const auto candidates = extract_candidates(ex, ann, idf, k);
    std::vector<std::string> texts;
    texts.reserve(candidates.size());
    for (const auto& c : candidates) texts.push_back(c.text);
    if (gold_reachable(ex, texts)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(examples.size());
}

}  // namespace webqa
