#include "jsonreward/reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jsonreward {

std::string_view to_string(ScoreMode mode) { return mode == ScoreMode::ToS ? "tos" : "strict"; }

std::optional<ScoreMode> score_mode_from_string(std::string_view name) {
    if (name == "strict" || name == "Strict") return ScoreMode::Strict;
    if (name == "tos" || name == "ToS" || name == "TOS") return ScoreMode::ToS;
    return std::nullopt;
}

RewardScore fine_grained_score(std::string_view text, const SchemaDoc& schema, ScoreMode mode,
                               const ValidateOptions& options) {
    const Dialect dialect = mode == ScoreMode::ToS ? Dialect::Json5 : Dialect::Json;
    RewardScore score;

    auto parsed = parse(text, dialect);
    score.parse_ok = parsed.ok();

    // Original tokens, and how many leading ones survive into the scored tree.
    const TokenStream original = parsed.ok() ? parsed.tree().tokens() : lex(text, dialect);
    std::size_t kept           = original.tokens.size();
    std::optional<JsonTree> repaired;
    const JsonTree* tree = nullptr;
    if (parsed.ok()) {
        tree = &parsed.tree();
    } else {
        const auto fix      = repair(text, parsed.failure());
        score.padded_tokens = fix.padded_token_count;
        kept                = std::min(fix.kept_tokens, original.tokens.size());
        auto reparsed       = parse(fix.repaired_text, dialect);
        if (reparsed.ok()) {
            repaired = std::move(reparsed.tree());
            tree     = &*repaired;
        } else {
            kept = 0;
        }
        score.category = FailureCategory::ParserError;
    }

    std::vector<char> correct(original.tokens.size(), 1);
    for (std::size_t i = kept; i < correct.size(); ++i) correct[i] = 0;
    for (std::size_t i = 0; i < correct.size(); ++i) {
        if (original.tokens[i].kind == TokenKind::Error) correct[i] = 0;
    }

    if (tree) {
        const auto report = validate(*tree, schema, options);
        if (score.parse_ok) {
            score.schema_ok = report.empty();
            if (!report.empty()) score.category = classify(report);
        }
        // Tree token indices below `kept` coincide with original indices.
        auto mark = [&](std::size_t i) {
            if (i < kept) correct[i] = 0;
        };
        for (const auto& v : report) {
            const JsonNode& n = tree->node(v.node);
            if (v.category == FailureCategory::RequiredError) {
                mark(n.first_token);
                mark(n.last_token);
            } else {
                for (std::size_t i = n.first_token; i <= n.last_token; ++i) mark(i);
            }
        }
    }

    std::size_t counted = 0;
    for (std::size_t i = 0; i < original.tokens.size(); ++i) {
        const Token& t = original.tokens[i];
        if (mode == ScoreMode::ToS && t.kind == TokenKind::Comment && t.complete) continue;
        ++counted;
        score.correct_tokens += correct[i];
    }
    score.total_tokens = counted + score.padded_tokens;
    score.ratio = score.total_tokens == 0 ? 0.0
                                          : static_cast<double>(score.correct_tokens) /
                                                static_cast<double>(score.total_tokens);
    return score;
}

double outcome_score(std::string_view text, const SchemaDoc& schema, ScoreMode mode, const ValidateOptions& options) {
    auto parsed = parse(text, mode == ScoreMode::ToS ? Dialect::Json5 : Dialect::Json);
    if (!parsed.ok()) return 0.0;
    return is_valid(parsed.tree(), schema, options) ? 1.0 : 0.0;
}

std::vector<double> rloo_advantages(std::span<const double> rewards) {
    const std::size_t k = rewards.size();
    if (k < 2) throw std::invalid_argument("leave-one-out advantages need at least two rewards");
    // Neumaier summation keeps the zero-sum property tight for long groups.
    double sum = 0.0, carry = 0.0;
    for (double r : rewards) {
        const double t = sum + r;
        carry += std::fabs(sum) >= std::fabs(r) ? (sum - t) + r : (r - t) + sum;
        sum = t;
    }
    sum += carry;
    const double denom = static_cast<double>(k - 1);
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = rewards[i] - (sum - rewards[i]) / denom;
    return out;
}

std::vector<double> combine_advantages(std::span<const double> validator_adv, std::span<const double> model_adv) {
    if (validator_adv.size() != model_adv.size()) {
        throw std::invalid_argument("advantage vectors differ in length: " + std::to_string(validator_adv.size()) +
                                    " vs " + std::to_string(model_adv.size()));
    }
    std::vector<double> out(validator_adv.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = validator_adv[i] + model_adv[i];
    return out;
}

ClipConfig::ClipConfig(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("clip epsilon must lie in (0, 1)");
}

double ppo_clip_term(double ratio, double advantage, const ClipConfig& cfg) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) throw std::invalid_argument("probability ratio must be positive");
    const double clipped = std::clamp(ratio, 1.0 - cfg.epsilon(), 1.0 + cfg.epsilon());
    return std::min(ratio * advantage, clipped * advantage);
}

}  // namespace jsonreward
