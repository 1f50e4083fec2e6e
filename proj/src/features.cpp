#include "webqa/features.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace webqa {

const std::vector<std::string>& feature_templates() {
  static const std::vector<std::string> templates = {
      "span_length",   "tfidf_feats", "capitalized",  "stop_frac",       "in_quest",
      "in_quest_common", "in_quest_dist", "wh_ne",    "wh_pos",          "ne_ne",
      "ne_common",     "max_ne",      "year_bin",     "ctxt_match",      "ctxt_similarity",
      "in_title",      "ctxt_entity", "google_rank"};
  return templates;
}

void FeatureVector::add(const std::string& name, double value) {
  if (value == 0.0) return;
  if (!std::isfinite(value))
    throw std::invalid_argument("non-finite value for feature '" + name + "'");
  entries[name] = value;
}

double FeatureVector::get(const std::string& name) const {
  auto it = entries.find(name);
  return it == entries.end() ? 0.0 : it->second;
}

int FeatureIndex::add(const std::string& name) {
  auto it = ids_.find(name);
  if (it != ids_.end()) return it->second;
  if (frozen_) return -1;
  const int id = static_cast<int>(names_.size());
  names_.push_back(name);
  ids_.emplace(name, id);
  return id;
}

int FeatureIndex::find(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

void FeatureIndex::observe(const FeatureVector& fv) {
  for (const auto& [name, _] : fv.entries) add(name);
}

void FeatureIndex::freeze() {
  std::sort(names_.begin(), names_.end());
  ids_.clear();
  for (std::size_t i = 0; i < names_.size(); ++i) ids_[names_[i]] = static_cast<int>(i);
  frozen_ = true;
}

FeatureIndex FeatureIndex::from_names(std::vector<std::string> names) {
  FeatureIndex index;
  index.names_ = std::move(names);
  for (std::size_t i = 0; i < index.names_.size(); ++i)
    index.ids_[index.names_[i]] = static_cast<int>(i);
  index.frozen_ = true;
  return index;
}

FeatureIndex build_index(const std::vector<FeatureVector>& vectors) {
  FeatureIndex index;
  for (const auto& fv : vectors) index.observe(fv);
  index.freeze();
  return index;
}

SparseVector vectorize(const FeatureVector& fv, const FeatureIndex& index) {
  SparseVector out;
  out.items.reserve(fv.entries.size());
  for (const auto& [name, value] : fv.entries) {
    const int id = index.find(name);
    if (id >= 0) out.items.emplace_back(id, value);
  }
  std::sort(out.items.begin(), out.items.end());
  return out;
}

FeatureConfig ablate(FeatureConfig config, const std::string& template_name) {
  const auto& valid = feature_templates();
  if (std::find(valid.begin(), valid.end(), template_name) == valid.end()) {
    std::string msg = "unknown feature template '" + template_name + "'; valid templates:";
    for (const auto& t : valid) msg += " " + t;
    throw std::invalid_argument(msg);
  }
  config.disabled_templates.insert(template_name);
  return config;
}

int TfidfBinTable::bin_for(int n, double score) const {
  const auto& e = edges.at(static_cast<std::size_t>(n - 1));
  return static_cast<int>(std::upper_bound(e.begin(), e.end(), score) - e.begin());
}

TfidfBinTable fit_tfidf_bins(const std::array<std::vector<double>, 4>& scores_per_n, int bins) {
  TfidfBinTable table;
  table.bins = bins;
  for (std::size_t ni = 0; ni < 4; ++ni) {
    std::vector<double> scores = scores_per_n[ni];
    std::sort(scores.begin(), scores.end());
    auto& edges = table.edges[ni];
    if (scores.empty()) continue;
    for (int b = 1; b < bins; ++b) {
      const std::size_t pos = scores.size() * static_cast<std::size_t>(b) / bins;
      edges.push_back(scores[std::min(pos, scores.size() - 1)]);
    }
  }
  return table;
}

QuestionContext make_question_context(const Annotation& question,
                                      const FeatureResources& resources) {
  QuestionContext ctx;
  ctx.annotation = &question;
  ctx.wh = wh_word(question);
  for (const auto& t : question.tokens) {
    ctx.lower_tokens.push_back(t.lower);
    if (t.is_punct) continue;
    if (ctx.word_set.insert(t.lower).second) ctx.word_types.push_back(t.lower);
    if (resources.stoplist && !resources.stoplist->contains(t.lower) &&
        std::find(ctx.content_words.begin(), ctx.content_words.end(), t.lower) ==
            ctx.content_words.end())
      ctx.content_words.push_back(t.lower);
  }
  if (resources.common_words)
    for (const auto& w : resources.common_words->words)
      if (ctx.word_set.count(w)) ctx.common_in_q.push_back(w);
  std::set<std::string> labels;
  for (const auto& span : question.ne_spans) {
    labels.insert(span.label);
    std::vector<std::string> text;
    for (int i = span.start; i < span.end; ++i) text.push_back(question.tokens[i].lower);
    if (std::find(ctx.ne_texts.begin(), ctx.ne_texts.end(), text) == ctx.ne_texts.end())
      ctx.ne_texts.push_back(std::move(text));
  }
  ctx.ne_labels.assign(labels.begin(), labels.end());
  return ctx;
}

namespace {

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream split(text);
  std::string tok;
  while (split >> tok) out.push_back(tok);
  return out;
}

bool token_is_punct(const std::string& tok) {
  return !tok.empty() && std::none_of(tok.begin(), tok.end(), [](unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           c >= 0x80;
  });
}

bool token_capitalized(const Token& t) {
  if (t.is_punct) return true;  // neutral for interior punctuation
  if (t.text.empty()) return false;
  const char c = t.text[0];
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

double safe_cosine(const EmbeddingTable* emb, const std::string& a, const std::string& b) {
  if (!emb || emb->dimension == 0) return 0.0;
  const auto* va = emb->find(a);
  const auto* vb = emb->find(b);
  if (!va || !vb) return 0.0;
  return cosine(*va, *vb);
}

std::string rank_bin_label(int rank, const std::vector<std::pair<int, int>>& bins) {
  for (const auto& [lo, hi] : bins)
    if (rank >= lo && rank <= hi)
      return lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
  const auto& [lo, hi] = bins.back();
  return lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
}

std::string year_bin_label(int year, const std::vector<int>& edges) {
  if (year < edges.front()) return "<" + std::to_string(edges.front());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (year >= edges[i] && year < edges[i + 1])
      return std::to_string(edges[i]) + "-" + std::to_string(edges[i + 1] - 1);
  return ">=" + std::to_string(edges.back());
}

struct MentionView {
  const Annotation* segment_annotation;
  const Mention* mention;
};

// Labels of NE spans that cover the whole mention.
std::vector<std::string> covering_ne_labels(const MentionView& mv) {
  std::vector<std::string> labels;
  for (const auto& span : mv.segment_annotation->ne_spans)
    if (span.start <= mv.mention->start && mv.mention->end <= span.end)
      if (std::find(labels.begin(), labels.end(), span.label) == labels.end())
        labels.push_back(span.label);
  return labels;
}

void mention_features(const QuestionContext& q, const Candidate& cand,
                      const MentionView& mv, const FeatureResources& res,
                      FeatureVector& out) {
  const FeatureConfig& cfg = res.config;
  const Annotation& seg = *mv.segment_annotation;
  const Mention& m = *mv.mention;
  const auto cand_tokens = split_tokens(cand.text);
  std::vector<std::string> cand_words;
  for (const auto& t : cand_tokens)
    if (!token_is_punct(t)) cand_words.push_back(t);

  if (cfg.enabled("span_length")) out.add("span_length=" + std::to_string(cand.n), 1.0);

  if (cfg.enabled("tfidf_feats")) {
    out.add("tfidf:n=" + std::to_string(cand.n) + ":raw", cand.tfidf);
    if (res.tfidf_bins && cand.n >= 1 && cand.n <= 4)
      out.add("tfidf:n=" + std::to_string(cand.n) +
                  ":bin=" + std::to_string(res.tfidf_bins->bin_for(cand.n, cand.tfidf)),
              1.0);
  }

  if (cfg.enabled("stop_frac") && res.stoplist && !cand_tokens.empty()) {
    int stop = 0;
    for (const auto& t : cand_tokens)
      if (res.stoplist->contains(t)) ++stop;
    out.add("stop_frac", static_cast<double>(stop) / cand_tokens.size());
  }

  double in_quest = 0.0;
  if (!cand_words.empty()) {
    int hits = 0;
    for (const auto& w : cand_words)
      if (q.word_set.count(w)) ++hits;
    in_quest = static_cast<double>(hits) / cand_words.size();
  }
  if (cfg.enabled("in_quest")) out.add("in_quest", in_quest);

  if (cfg.enabled("in_quest_common") && in_quest != 0.0)
    for (const auto& w : q.common_in_q) out.add("in_quest_common:" + w, in_quest);

  if (cfg.enabled("in_quest_dist") && !cand_words.empty() && !q.word_types.empty()) {
    double best = -2.0, sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& cw : cand_words)
      for (const auto& qw : q.word_types) {
        const double c = safe_cosine(res.embeddings, cw, qw);
        best = std::max(best, c);
        sum += c;
        ++pairs;
      }
    out.add("in_quest_dist:max", best);
    out.add("in_quest_dist:avg", sum / pairs);
  }

  const auto mention_ne = covering_ne_labels(mv);

  if (cfg.enabled("wh_ne") && q.wh)
    for (const auto& label : mention_ne) out.add("wh_ne:" + *q.wh + ":" + label, 1.0);

  if (cfg.enabled("wh_pos") && q.wh) {
    std::string seq;
    for (int i = m.start; i < m.end; ++i) {
      if (i > m.start) seq += '+';
      seq += seg.pos_tags[i];
    }
    out.add("wh_pos:" + *q.wh + ":" + seq, 1.0);
  }

  if (cfg.enabled("ne_ne"))
    for (const auto& ql : q.ne_labels)
      for (const auto& ml : mention_ne) out.add("ne_ne:" + ql + ":" + ml, 1.0);

  if (cfg.enabled("ne_common"))
    for (const auto& ml : mention_ne)
      for (const auto& w : q.common_in_q) out.add("ne_common:" + ml + ":" + w, 1.0);

  if (cfg.enabled("max_ne"))
    for (const auto& span : seg.ne_spans)
      if (span.start == m.start && span.end == m.end && span.maximal) {
        out.add("max_ne", 1.0);
        break;
      }

  if (cfg.enabled("year_bin") && cand.n == 1) {
    int year = 0;
    if (is_year_token(cand.text, &year))
      out.add("year_bin:" + year_bin_label(year, cfg.year_bin_edges), 1.0);
  }

  // Context tokens within the window, with distance 1 adjacent to the mention.
  const int len = static_cast<int>(seg.tokens.size());
  std::vector<std::pair<int, int>> context;  // (token index, distance)
  for (int p = std::max(0, m.start - cfg.context_window); p < m.start; ++p)
    context.emplace_back(p, m.start - p);
  for (int p = m.end; p < std::min(len, m.end + cfg.context_window); ++p)
    context.emplace_back(p, p - m.end + 1);

  if (cfg.enabled("ctxt_match") && !q.content_words.empty()) {
    double best = 0.0, sum = 0.0;
    for (const auto& w : q.content_words) {
      double value = 0.0;
      for (const auto& [p, dist] : context)
        if (seg.tokens[p].lower == w)
          value = std::max(value, std::pow(cfg.decay_base, dist));
      best = std::max(best, value);
      sum += value;
    }
    out.add("ctxt_match:max", best);
    out.add("ctxt_match:avg", sum / q.content_words.size());
  }

  if (cfg.enabled("ctxt_similarity") && !q.content_words.empty() && !context.empty()) {
    double best = 0.0, sum = 0.0;
    for (const auto& w : q.content_words) {
      double value = 0.0;
      for (const auto& [p, dist] : context) {
        if (seg.tokens[p].is_punct) continue;
        const double c =
            safe_cosine(res.embeddings, w, seg.tokens[p].lower) * std::pow(cfg.decay_base, dist);
        value = std::max(value, c);
      }
      best = std::max(best, value);
      sum += value;
    }
    out.add("ctxt_similarity:max", best);
    out.add("ctxt_similarity:avg", sum / q.content_words.size());
  }

  if (cfg.enabled("in_title") && m.segment == Segment::Title) out.add("in_title", 1.0);

  if (cfg.enabled("ctxt_entity") && res.common_words) {
    bool hit = false;
    for (const auto& ne_text : q.ne_texts) {
      if (hit || ne_text.empty()) break;
      const int nlen = static_cast<int>(ne_text.size());
      for (int p = 0; p + nlen <= len && !hit; ++p) {
        bool match = true;
        for (int i = 0; i < nlen; ++i)
          if (seg.tokens[p + i].lower != ne_text[i]) {
            match = false;
            break;
          }
        if (!match) continue;
        int gap_lo, gap_hi;  // token range strictly between mention and occurrence
        if (p + nlen <= m.start) {
          gap_lo = p + nlen;
          gap_hi = m.start;
        } else if (m.end <= p) {
          gap_lo = m.end;
          gap_hi = p;
        } else {
          continue;  // overlapping
        }
        for (int i = gap_lo; i < gap_hi && !hit; ++i)
          if (res.common_words->contains(seg.tokens[i].lower)) hit = true;
      }
    }
    if (hit) out.add("ctxt_entity", 1.0);
  }

  if (cfg.enabled("google_rank"))
    out.add("google_rank:" + rank_bin_label(m.snippet_rank, cfg.rank_bins), 1.0);
}

}  // namespace

FeatureVector featurize(const QuestionContext& question, const Candidate& candidate,
                        const ExampleAnnotation& annotation,
                        const FeatureResources& resources) {
  if (candidate.mentions.empty())
    throw std::invalid_argument("featurize: candidate '" + candidate.text + "' has no mentions");

  std::unordered_map<int, const SnippetAnnotation*> by_rank;
  for (const auto& sa : annotation.snippets) by_rank[sa.rank] = &sa;

  std::map<std::string, double> sums;
  int caps_votes = 0;
  for (const auto& m : candidate.mentions) {
    auto it = by_rank.find(m.snippet_rank);
    if (it == by_rank.end())
      throw std::out_of_range("featurize: no annotation for snippet rank " +
                              std::to_string(m.snippet_rank));
    const Annotation& seg =
        m.segment == Segment::Title ? it->second->title : it->second->body;
    if (m.start < 0 || m.end > static_cast<int>(seg.tokens.size()) || m.start >= m.end)
      throw std::out_of_range("featurize: mention [" + std::to_string(m.start) + ", " +
                              std::to_string(m.end) + ") outside annotation of rank " +
                              std::to_string(m.snippet_rank));

    FeatureVector per_mention;
    mention_features(question, candidate, MentionView{&seg, &m}, resources, per_mention);
    for (const auto& [name, value] : per_mention.entries) sums[name] += value;

    bool caps = true;
    for (int i = m.start; i < m.end; ++i)
      if (!token_capitalized(seg.tokens[i])) {
        caps = false;
        break;
      }
    if (caps) ++caps_votes;
  }

  const double inv = 1.0 / static_cast<double>(candidate.mentions.size());
  FeatureVector out;
  for (const auto& [name, sum] : sums) out.add(name, sum * inv);

  // Majority casing across mentions, ties counting as capitalized.
  if (resources.config.enabled("capitalized") &&
      2 * caps_votes >= static_cast<int>(candidate.mentions.size()))
    out.add("capitalized", 1.0);

  return out;
}

}  // namespace webqa
