#include "webqa/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "webqa/optim.h"

namespace webqa {

using nlohmann::json;

double Model::dot(const SparseVector& features) const {
  double s = 0;
  for (const auto& [id, value] : features.items) s += weights[id] * value;
  return s;
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> probs(scores.size(), 0.0);
  if (scores.empty()) return probs;
  double max_score = -std::numeric_limits<double>::infinity();
  for (double s : scores) max_score = std::max(max_score, s);
  double sum = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    probs[i] = std::exp(scores[i] - max_score);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

std::vector<ScoredCandidate> score(
    const Model& model, const std::vector<std::pair<Candidate, FeatureVector>>& candidates) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& [_, fv] : candidates)
    scores.push_back(model.dot(vectorize(fv, model.index)));
  const auto probs = softmax(scores);

  std::vector<ScoredCandidate> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    out.push_back(ScoredCandidate{candidates[i].first, scores[i], probs[i]});
  std::sort(out.begin(), out.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.candidate.text < b.candidate.text;
  });
  return out;
}

namespace {

double logsumexp(std::span<const double> values) {
  double max_value = -std::numeric_limits<double>::infinity();
  for (double v : values) max_value = std::max(max_value, v);
  if (!std::isfinite(max_value)) return max_value;
  double sum = 0;
  for (double v : values) sum += std::exp(v - max_value);
  return max_value + std::log(sum);
}

}  // namespace

LossGrad loss_and_gradient(const Model& model, const FeaturizedExample& example) {
  const std::size_t m = example.candidates.size();
  if (m == 0)
    throw std::invalid_argument("loss_and_gradient: example '" + example.id +
                                "' has no candidates");

  std::vector<double> scores(m), gold_scores;
  for (std::size_t i = 0; i < m; ++i) {
    scores[i] = model.dot(example.candidates[i].features);
    if (example.candidates[i].is_gold) gold_scores.push_back(scores[i]);
  }
  if (gold_scores.empty())
    throw std::invalid_argument("loss_and_gradient: example '" + example.id +
                                "' has no gold-matching candidate");

  const double lse_all = logsumexp(scores);
  const double lse_gold = logsumexp(gold_scores);

  LossGrad out;
  out.loss = lse_all - lse_gold;
  out.gradient.assign(model.weights.size(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double p = std::exp(scores[i] - lse_all);
    double coeff = p;
    if (example.candidates[i].is_gold) coeff -= std::exp(scores[i] - lse_gold);
    if (coeff == 0.0) continue;
    for (const auto& [id, value] : example.candidates[i].features.items)
      out.gradient[id] += coeff * value;
  }
  return out;
}

Model train(const std::vector<FeaturizedExample>& examples, double lambda,
            const FeatureIndex& index, ModelResources resources,
            const TrainSettings& settings, TrainReport* report) {
  Model model;
  model.lambda = lambda;
  model.index = index;
  model.resources = std::move(resources);
  model.weights.assign(index.size(), 0.0);

  // Minimized objective: sum_i loss_i + lambda * |theta|^2.
  auto objective = [&](const std::vector<double>& theta, std::vector<double>& grad) {
    model.weights = theta;
    std::fill(grad.begin(), grad.end(), 0.0);
    double total = 0;
    for (const auto& ex : examples) {
      const LossGrad lg = loss_and_gradient(model, ex);
      if (!std::isfinite(lg.loss))
        throw std::runtime_error("train: non-finite objective at example '" + ex.id + "'");
      total += lg.loss;
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += lg.gradient[i];
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
      total += lambda * theta[i] * theta[i];
      grad[i] += 2.0 * lambda * theta[i];
    }
    return total;
  };

  LbfgsSettings opt;
  opt.max_iterations = settings.max_iterations;
  opt.rel_tol = settings.rel_tol;
  opt.memory = settings.lbfgs_memory;
  LbfgsResult result = lbfgs_minimize(objective, std::vector<double>(index.size(), 0.0), opt);

  model.weights = std::move(result.x);
  if (report) {
    report->iterations = result.iterations;
    report->converged = result.converged;
    report->final_objective = -result.f;
    report->objective_trace.clear();
    report->objective_trace.reserve(result.trace.size());
    for (double f : result.trace) report->objective_trace.push_back(-f);
  }
  return model;
}

// --- serialization ----------------------------------------------------------

namespace {

json config_to_json(const FeatureConfig& cfg) {
  json j;
  j["context_window"] = cfg.context_window;
  j["decay_base"] = cfg.decay_base;
  j["tfidf_bins"] = cfg.tfidf_bins;
  json rb = json::array();
  for (const auto& [lo, hi] : cfg.rank_bins) rb.push_back(json::array({lo, hi}));
  j["rank_bins"] = std::move(rb);
  j["year_bin_edges"] = cfg.year_bin_edges;
  j["disabled_templates"] = std::vector<std::string>(cfg.disabled_templates.begin(),
                                                     cfg.disabled_templates.end());
  return j;
}

FeatureConfig config_from_json(const json& j) {
  FeatureConfig cfg;
  cfg.context_window = j.at("context_window").get<int>();
  cfg.decay_base = j.at("decay_base").get<double>();
  cfg.tfidf_bins = j.at("tfidf_bins").get<int>();
  cfg.rank_bins.clear();
  for (const auto& b : j.at("rank_bins"))
    cfg.rank_bins.emplace_back(b.at(0).get<int>(), b.at(1).get<int>());
  cfg.year_bin_edges = j.at("year_bin_edges").get<std::vector<int>>();
  for (const auto& t : j.at("disabled_templates"))
    cfg.disabled_templates.insert(t.get<std::string>());
  return cfg;
}

}  // namespace

void save_model(const Model& model, const std::filesystem::path& path) {
  json j;
  j["format"] = "webqa-model";
  j["version"] = Model::kFormatVersion;
  j["lambda"] = model.lambda;
  j["feature_config"] = config_to_json(model.resources.config);
  j["common_words"] = model.resources.common_words.words;
  json bins;
  bins["bins"] = model.resources.tfidf_bins.bins;
  json edges = json::array();
  for (const auto& e : model.resources.tfidf_bins.edges) edges.push_back(e);
  bins["edges"] = std::move(edges);
  j["tfidf_bins"] = std::move(bins);
  j["idf_ref"] = model.resources.idf_ref;
  json features = json::array();
  for (int i = 0; i < model.index.size(); ++i)
    features.push_back(json::array({model.index.names()[i], model.weights[i]}));
  j["features"] = std::move(features);

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write model file: " + tmp.string());
    out << j.dump(1) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("model file " + path.string() + " is corrupt: " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "webqa-model")
    throw std::runtime_error("model file " + path.string() + ": not a webqa model");
  if (j.at("version").get<int>() != Model::kFormatVersion)
    throw std::runtime_error("model file " + path.string() + ": unsupported version " +
                             std::to_string(j.at("version").get<int>()) + " (expected " +
                             std::to_string(Model::kFormatVersion) + ")");

  Model model;
  model.lambda = j.at("lambda").get<double>();
  model.resources.config = config_from_json(j.at("feature_config"));
  model.resources.common_words.words = j.at("common_words").get<std::vector<std::string>>();
  const auto& bins = j.at("tfidf_bins");
  model.resources.tfidf_bins.bins = bins.at("bins").get<int>();
  const auto& edges = bins.at("edges");
  if (edges.size() != 4)
    throw std::runtime_error("model file " + path.string() + ": malformed tfidf bins");
  for (std::size_t i = 0; i < 4; ++i)
    model.resources.tfidf_bins.edges[i] = edges[i].get<std::vector<double>>();
  model.resources.idf_ref = j.value("idf_ref", "");

  std::vector<std::string> names;
  std::vector<double> weights;
  for (const auto& f : j.at("features")) {
    names.push_back(f.at(0).get<std::string>());
    weights.push_back(f.at(1).get<double>());
  }
  model.index = FeatureIndex::from_names(std::move(names));
  model.weights = std::move(weights);
  for (double w : model.weights)
    if (!std::isfinite(w))
      throw std::runtime_error("model file " + path.string() + ": non-finite weight");
  return model;
}

}  // namespace webqa
