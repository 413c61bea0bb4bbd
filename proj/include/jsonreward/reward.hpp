#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "jsonreward/schema.hpp"
#include "jsonreward/validator.hpp"

namespace jsonreward {

enum class ScoreMode {
    Strict,  // JSON
    ToS,     // JSON5; comments are reasoning and carry no weight
};

std::string_view to_string(ScoreMode mode);
std::optional<ScoreMode> score_mode_from_string(std::string_view name);

struct RewardScore {
    double ratio                 = 0.0;
    std::size_t total_tokens     = 0;  // scored original tokens + padded tokens
    std::size_t correct_tokens   = 0;
    std::size_t padded_tokens    = 0;
    bool parse_ok                = false;
    bool schema_ok               = false;
    /// Set whenever the text is not a conformant document.
    std::optional<FailureCategory> category;

    bool operator==(const RewardScore&) const = default;
};

/// Fraction of correct lexical tokens.
///
/// A token is incorrect when it is an ERROR token, when it is not carried
/// into the repaired document, or when it lies in the span of a node that
/// violates the schema (for a missing required property, the braces of the
/// object). Tokens added by repair count in the denominator only.
RewardScore fine_grained_score(std::string_view text, const SchemaDoc& schema, ScoreMode mode = ScoreMode::Strict,
                               const ValidateOptions& options = {});

/// 1.0 iff the text parses without repair and validates; otherwise 0.0.
double outcome_score(std::string_view text, const SchemaDoc& schema, ScoreMode mode = ScoreMode::Strict,
                     const ValidateOptions& options = {});

/// Leave-one-out advantages: r_i minus the mean of the other K-1 rewards.
/// Throws std::invalid_argument for fewer than two rewards.
std::vector<double> rloo_advantages(std::span<const double> rewards);

/// Elementwise sum. Throws std::invalid_argument on a length mismatch.
std::vector<double> combine_advantages(std::span<const double> validator_adv, std::span<const double> model_adv);

class ClipConfig {
   public:
    /// Throws std::invalid_argument unless 0 < epsilon < 1.
    explicit ClipConfig(double epsilon = 0.2);
    double epsilon() const { return epsilon_; }

   private:
    double epsilon_;
};

/// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A). Throws
/// std::invalid_argument unless ratio is finite and positive.
double ppo_clip_term(double ratio, double advantage, const ClipConfig& cfg);

}  // namespace jsonreward
