#include "webqa/corpus.h"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "json.hpp"

#include "webqa/annotate.h"

namespace webqa {

using nlohmann::json;

std::string_view tag_name(CompositionalityTag t) {
  switch (t) {
    case CompositionalityTag::Simple: return "Simple";
    case CompositionalityTag::Filter: return "Filter";
    case CompositionalityTag::Nary: return "Nary";
    case CompositionalityTag::Conjunction: return "Conjunction";
    case CompositionalityTag::Composition: return "Composition";
    case CompositionalityTag::Superlative: return "Superlative";
    case CompositionalityTag::Other: return "Other";
  }
  return "Other";
}

std::optional<CompositionalityTag> tag_from_name(std::string_view name) {
  static const std::vector<CompositionalityTag> all = {
      CompositionalityTag::Simple,      CompositionalityTag::Filter,
      CompositionalityTag::Nary,        CompositionalityTag::Conjunction,
      CompositionalityTag::Composition, CompositionalityTag::Superlative,
      CompositionalityTag::Other};
  for (auto t : all)
    if (tag_name(t) == name) return t;
  // Accept the hyphenated spelling used in prose.
  if (name == "N-ary") return CompositionalityTag::Nary;
  return std::nullopt;
}

CorpusError::CorpusError(std::size_t line, std::string_view field, std::string_view message)
    : std::runtime_error("line " + std::to_string(line) + ": field '" + std::string(field) +
                         "': " + std::string(message)),
      line_(line),
      field_(std::string(field)) {}

namespace {

Example parse_example(const json& rec, std::size_t lineno) {
  Example ex;
  if (!rec.is_object()) throw CorpusError(lineno, "-", "record is not an object");
  if (!rec.contains("id") || !rec["id"].is_string())
    throw CorpusError(lineno, "id", "missing or not a string");
  ex.id = rec["id"].get<std::string>();
  if (ex.id.empty()) throw CorpusError(lineno, "id", "must be non-empty");
  if (!rec.contains("question") || !rec["question"].is_string())
    throw CorpusError(lineno, "question", "missing or not a string");
  ex.question = rec["question"].get<std::string>();
  if (!rec.contains("answers") || !rec["answers"].is_array())
    throw CorpusError(lineno, "answers", "missing or not an array");
  for (const auto& a : rec["answers"]) {
    if (!a.is_string()) throw CorpusError(lineno, "answers", "entries must be strings");
    ex.gold_answers.push_back(a.get<std::string>());
  }
  if (ex.gold_answers.empty()) throw CorpusError(lineno, "answers", "must be non-empty");
  if (!rec.contains("snippets") || !rec["snippets"].is_array())
    throw CorpusError(lineno, "snippets", "missing or not an array");
  const auto& snippets = rec["snippets"];
  if (snippets.size() > 100) throw CorpusError(lineno, "snippets", "more than 100 snippets");
  int prev_rank = 0;
  for (const auto& sj : snippets) {
    Snippet s;
    if (!sj.is_object()) throw CorpusError(lineno, "snippets", "entries must be objects");
    if (!sj.contains("title") || !sj["title"].is_string())
      throw CorpusError(lineno, "title", "missing or not a string");
    if (!sj.contains("body") || !sj["body"].is_string())
      throw CorpusError(lineno, "body", "missing or not a string");
    if (!sj.contains("rank") || !sj["rank"].is_number_integer())
      throw CorpusError(lineno, "rank", "missing or not an integer");
    s.title = sj["title"].get<std::string>();
    s.body = sj["body"].get<std::string>();
    s.rank = sj["rank"].get<int>();
    if (s.rank < 1 || s.rank > 100) throw CorpusError(lineno, "rank", "must be in [1, 100]");
    if (s.rank <= prev_rank)
      throw CorpusError(lineno, "rank", "snippets must be in strictly ascending rank order");
    prev_rank = s.rank;
    ex.result_set.snippets.push_back(std::move(s));
  }
  if (rec.contains("tags")) {
    if (!rec["tags"].is_array()) throw CorpusError(lineno, "tags", "not an array");
    std::set<CompositionalityTag> tags;
    for (const auto& tj : rec["tags"]) {
      if (!tj.is_string()) throw CorpusError(lineno, "tags", "entries must be strings");
      auto t = tag_from_name(tj.get<std::string>());
      if (!t)
        throw CorpusError(lineno, "tags", "unknown tag '" + tj.get<std::string>() + "'");
      tags.insert(*t);
    }
    ex.tags = std::move(tags);
  }
  return ex;
}

}  // namespace

std::vector<Example> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());
  std::vector<Example> out;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw CorpusError(lineno, "-", e.what());
    }
    Example ex = parse_example(rec, lineno);
    if (!seen_ids.insert(ex.id).second)
      throw CorpusError(lineno, "id", "duplicate id '" + ex.id + "'");
    out.push_back(std::move(ex));
  }
  return out;
}

namespace {

json example_to_json(const Example& ex) {
  json rec;
  rec["id"] = ex.id;
  rec["question"] = ex.question;
  rec["answers"] = ex.gold_answers;
  json snippets = json::array();
  for (const auto& s : ex.result_set.snippets) {
    json sj;
    sj["title"] = s.title;
    sj["body"] = s.body;
    sj["rank"] = s.rank;
    snippets.push_back(std::move(sj));
  }
  rec["snippets"] = std::move(snippets);
  if (ex.tags) {
    json tags = json::array();
    for (auto t : *ex.tags) tags.push_back(std::string(tag_name(t)));
    rec["tags"] = std::move(tags);
  }
  return rec;
}

}  // namespace

void store_dataset(const std::filesystem::path& path, const std::vector<Example>& examples) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write dataset file: " + tmp.string());
    for (const auto& ex : examples) out << example_to_json(ex).dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::string> gold_keys(const Example& example) {
  std::vector<std::string> keys;
  for (const auto& g : example.gold_answers) {
    std::string k = canonical_form(g);
    if (!k.empty() && std::find(keys.begin(), keys.end(), k) == keys.end())
      keys.push_back(std::move(k));
  }
  return keys;
}

bool gold_reachable(const Example& example, const std::vector<std::string>& candidate_texts) {
  const auto keys = gold_keys(example);
  for (const auto& text : candidate_texts)
    if (std::find(keys.begin(), keys.end(), text) != keys.end()) return true;
  return false;
}

FilterResult filter_trainable(const std::vector<Example>& examples,
                              const CandidateTextsFn& extractor) {
  FilterResult result;
  for (const auto& ex : examples) {
    if (gold_reachable(ex, extractor(ex)))
      result.kept.push_back(ex);
    else
      result.dropped.push_back(ex);
  }
  return result;
}

}  // namespace webqa
