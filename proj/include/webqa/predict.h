#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "webqa/model.h"

namespace webqa {

struct Prediction {
  std::vector<std::string> answers;          // best first
  std::vector<double> scores;                // aligned to answers
  std::vector<ScoredCandidate> full_ranking; // all scored candidates, best first
};

// The most probable answer plus every answer within `margin` of it on the raw
// linear score (strictly; a gap equal to the margin is excluded).
// Throws on an empty candidate list.
Prediction predict_set(const std::vector<ScoredCandidate>& scored, double margin = 0.5);

struct PredictionRecord {
  std::string id;
  Prediction prediction;
};

// Line-delimited {"id", "answers", "scores", "ranking"} records; the ranking
// carries [text, score] pairs for the full candidate list.
void store_predictions(const std::filesystem::path& path,
                       const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

}  // namespace webqa
