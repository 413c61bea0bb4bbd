#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jsonreward/result.hpp"
#include "jsonreward/schema.hpp"

namespace jsonreward {

enum class RuleKind { Phone, LinuxPath, WindowsPath, StrongPassword, RgbColor, Base64, ConstLiteral, RegexPattern };

inline constexpr RuleKind kAllRuleKinds[] = {RuleKind::Phone,          RuleKind::LinuxPath, RuleKind::WindowsPath,
                                             RuleKind::StrongPassword, RuleKind::RgbColor,  RuleKind::Base64,
                                             RuleKind::ConstLiteral,   RuleKind::RegexPattern};

/// Snake-case name used in the rule table and in task records.
std::string_view to_string(RuleKind kind);
std::optional<RuleKind> rule_kind_from_string(std::string_view name);

/// A syntactic check plus the natural-language instruction describing it.
/// Immutable; the regex is compiled once at construction.
class CustomRule {
   public:
    /// Table-backed rule for the six fixed kinds.
    static CustomRule fixed(RuleKind kind);
    static CustomRule const_literal(std::string value);
    /// Throws std::invalid_argument for an invalid expression.
    static CustomRule regex_pattern(std::string pattern, std::string example = {});

    RuleKind kind() const { return kind_; }
    /// Regex inserted as `pattern`; empty for ConstLiteral.
    const std::string& pattern() const { return pattern_.source(); }
    /// Value inserted as `const` (ConstLiteral only).
    const std::optional<std::string>& literal() const { return literal_; }
    const std::string& instruction() const { return instruction_; }
    /// A value satisfying the rule.
    const std::string& example() const { return example_; }

    bool check(std::string_view value) const;

    Json to_json() const;
    /// Throws std::invalid_argument for malformed records.
    static CustomRule from_json(const Json& record);

   private:
    RuleKind kind_ = RuleKind::ConstLiteral;
    Pattern pattern_;
    std::optional<std::string> literal_;
    std::string instruction_;
    std::string example_;
};

bool check_custom(std::string_view value, const CustomRule& rule);

/// Regex/example pairs offered for RegexPattern rules.
struct RegexTemplate {
    std::string pattern;
    std::string example;
};
const std::vector<RegexTemplate>& regex_templates();

struct InjectError {
    std::string reason;
};

enum class InjectMode {
    Full,             // add pattern/const and the description sentence
    DescriptionOnly,  // add only the description sentence (the prompted schema)
};

/// Modifies the string subschema at `field_path` (a schema pointer).
Result<Json, InjectError> inject_rule(const Json& schema, std::string_view field_path, const CustomRule& rule,
                                      InjectMode mode = InjectMode::Full);
Result<SchemaDoc, InjectError> inject_rule(const SchemaDoc& schema, std::string_view field_path,
                                           const CustomRule& rule);

}  // namespace jsonreward
