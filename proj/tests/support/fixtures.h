#pragma once

#include <filesystem>
#include <vector>

#include "webqa/annotate.h"
#include "webqa/corpus.h"

namespace webqa::testing {

// Deterministic 20-example corpus: 17 examples whose gold answer appears in
// the snippets and 3 whose gold is absent everywhere.
const std::vector<Example>& toy_corpus();

// Small embedding table covering the toy corpus vocabulary.
EmbeddingTable toy_embeddings();

std::filesystem::path fixture_dir();

// Unique scratch directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& label);

}  // namespace webqa::testing
