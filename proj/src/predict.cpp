#include "webqa/predict.h"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace webqa {

using nlohmann::json;

Prediction predict_set(const std::vector<ScoredCandidate>& scored, double margin) {
  if (scored.empty())
    throw std::invalid_argument("predict_set: empty candidate list");

  Prediction out;
  out.full_ranking = scored;
  std::sort(out.full_ranking.begin(), out.full_ranking.end(),
            [](const ScoredCandidate& a, const ScoredCandidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.candidate.text < b.candidate.text;
            });

  const double best = out.full_ranking.front().score;
  for (const auto& sc : out.full_ranking) {
    if (best - sc.score < margin) {
      out.answers.push_back(sc.candidate.text);
      out.scores.push_back(sc.score);
    }
  }
  return out;
}

void store_predictions(const std::filesystem::path& path,
                       const std::vector<PredictionRecord>& records) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write predictions file: " + tmp.string());
    for (const auto& rec : records) {
      json j;
      j["id"] = rec.id;
      j["answers"] = rec.prediction.answers;
      j["scores"] = rec.prediction.scores;
      json ranking = json::array();
      for (const auto& sc : rec.prediction.full_ranking)
        ranking.push_back(json::array({sc.candidate.text, sc.score}));
      j["ranking"] = std::move(ranking);
      out << j.dump() << '\n';
    }
  }
  std::filesystem::rename(tmp, path);
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open predictions file: " + path.string());
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("predictions file line " + std::to_string(lineno) + ": " +
                               e.what());
    }
    PredictionRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.prediction.answers = j.at("answers").get<std::vector<std::string>>();
    rec.prediction.scores = j.at("scores").get<std::vector<double>>();
    if (j.contains("ranking")) {
      for (const auto& r : j["ranking"]) {
        ScoredCandidate sc;
        sc.candidate.text = r.at(0).get<std::string>();
        sc.score = r.at(1).get<double>();
        rec.prediction.full_ranking.push_back(std::move(sc));
      }
    } else {
      // Fall back to the answer set when no ranking was stored.
      for (std::size_t i = 0; i < rec.prediction.answers.size(); ++i) {
        ScoredCandidate sc;
        sc.candidate.text = rec.prediction.answers[i];
        sc.score = i < rec.prediction.scores.size() ? rec.prediction.scores[i] : 0.0;
        rec.prediction.full_ranking.push_back(std::move(sc));
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace webqa
