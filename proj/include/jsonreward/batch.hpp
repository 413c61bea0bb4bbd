#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "jsonreward/reward.hpp"

namespace jsonreward {

struct ScoreRequest {
    std::string_view text;
    const SchemaDoc* schema = nullptr;
    ScoreMode mode          = ScoreMode::Strict;
};

/// Scores every request; results are in request order. Uses OpenMP when
/// available. A request without a schema scores as an empty result.
std::vector<RewardScore> score_batch(std::span<const ScoreRequest> requests);
/// Single-threaded reference for score_batch.
std::vector<RewardScore> score_batch_serial(std::span<const ScoreRequest> requests);

/// Number of worker threads score_batch would use.
int batch_threads();

}  // namespace jsonreward
