#include "jsonreward/custom_rules.hpp"

#include <stdexcept>

#include "jsonreward/embedded.hpp"

namespace jsonreward {

namespace {

constexpr std::pair<RuleKind, std::string_view> kRuleNames[] = {
    {RuleKind::Phone, "phone"},
    {RuleKind::LinuxPath, "linux_path"},
    {RuleKind::WindowsPath, "windows_path"},
    {RuleKind::StrongPassword, "strong_password"},
    {RuleKind::RgbColor, "rgb_color"},
    {RuleKind::Base64, "base64"},
    {RuleKind::ConstLiteral, "const_literal"},
    {RuleKind::RegexPattern, "regex_pattern"},
};

const Json& table() {
    static const Json t = Json::parse(embedded::custom_rules());
    return t;
}

std::string substitute(std::string text, std::string_view slot, std::string_view value) {
    const auto at = text.find(slot);
    if (at != std::string::npos) text.replace(at, slot.size(), value);
    return text;
}

}  // namespace

std::string_view to_string(RuleKind kind) {
    for (const auto& [k, name] : kRuleNames) {
        if (k == kind) return name;
    }
    return "const_literal";
}

std::optional<RuleKind> rule_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kRuleNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

CustomRule CustomRule::fixed(RuleKind kind) {
    if (kind == RuleKind::ConstLiteral || kind == RuleKind::RegexPattern) {
        throw std::invalid_argument("rule kind " + std::string(to_string(kind)) + " needs a parameter");
    }
    static const auto build = [] {
        std::vector<CustomRule> rules;
        for (const auto& [k, name] : kRuleNames) {
            if (k == RuleKind::ConstLiteral || k == RuleKind::RegexPattern) break;
            const Json& entry = table().at(std::string(name));
            CustomRule r;
            r.kind_        = k;
            r.pattern_     = Pattern(entry.at("pattern").get<std::string>());
            r.instruction_ = entry.at("instruction").get<std::string>();
            r.example_     = entry.at("example").get<std::string>();
            rules.push_back(std::move(r));
        }
        return rules;
    }();
    return build.at(static_cast<std::size_t>(kind));
}

CustomRule CustomRule::const_literal(std::string value) {
    CustomRule r;
    r.kind_        = RuleKind::ConstLiteral;
    r.instruction_ = substitute(table().at("const_literal").at("instruction").get<std::string>(), "{value}", value);
    r.example_     = value;
    r.literal_     = std::move(value);
    return r;
}

CustomRule CustomRule::regex_pattern(std::string pattern, std::string example) {
    CustomRule r;
    r.kind_        = RuleKind::RegexPattern;
    r.instruction_ = substitute(table().at("regex_pattern").at("instruction").get<std::string>(), "{pattern}", pattern);
    r.pattern_     = Pattern(std::move(pattern));
    r.example_     = std::move(example);
    return r;
}

bool CustomRule::check(std::string_view value) const {
    if (kind_ == RuleKind::ConstLiteral) return literal_ && value == *literal_;
    return pattern_.search(value);
}

Json CustomRule::to_json() const {
    Json out;
    out["kind"] = std::string(to_string(kind_));
    if (kind_ == RuleKind::ConstLiteral) {
        out["value"] = *literal_;
    } else if (kind_ == RuleKind::RegexPattern) {
        out["pattern"] = pattern_.source();
        out["example"] = example_;
    }
    return out;
}

CustomRule CustomRule::from_json(const Json& record) {
    if (!record.is_object() || !record.contains("kind") || !record["kind"].is_string()) {
        throw std::invalid_argument("custom rule record needs a string \"kind\"");
    }
    auto kind = rule_kind_from_string(record["kind"].get<std::string>());
    if (!kind) throw std::invalid_argument("unknown custom rule kind " + record["kind"].get<std::string>());
    try {
        switch (*kind) {
            case RuleKind::ConstLiteral: return const_literal(record.at("value").get<std::string>());
            case RuleKind::RegexPattern:
                return regex_pattern(record.at("pattern").get<std::string>(), record.value("example", std::string()));
            default: return fixed(*kind);
        }
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("malformed custom rule: ") + e.what());
    }
}

bool check_custom(std::string_view value, const CustomRule& rule) { return rule.check(value); }

const std::vector<RegexTemplate>& regex_templates() {
    static const std::vector<RegexTemplate> templates = [] {
        std::vector<RegexTemplate> out;
        for (const auto& t : table().at("regex_pattern").at("templates")) {
            out.push_back({t.at("pattern").get<std::string>(), t.at("example").get<std::string>()});
        }
        return out;
    }();
    return templates;
}

namespace {

bool is_string_schema(const Json& s) {
    if (!s.is_object() || !s.contains("type")) return false;
    const Json& t = s["type"];
    if (t.is_string()) return t == "string";
    if (t.is_array()) {
        for (const auto& x : t) {
            if (x == "string") return true;
        }
    }
    return false;
}

}  // namespace

Result<Json, InjectError> inject_rule(const Json& schema, std::string_view field_path, const CustomRule& rule,
                                      InjectMode mode) {
    std::string ptr(field_path);
    if (!ptr.empty() && ptr.front() == '#') ptr.erase(ptr.begin());
    if (!ptr.empty() && ptr.front() != '/') return InjectError{"field path must be a JSON pointer: " + ptr};
    Json out = schema;
    Json* target;
    try {
        target = &out.at(Json::json_pointer(ptr));
    } catch (const Json::exception&) {
        return InjectError{"no subschema at " + ptr};
    }
    if (!is_string_schema(*target)) return InjectError{"subschema at " + ptr + " is not string-typed"};

    if (mode == InjectMode::Full) {
        if (rule.kind() == RuleKind::ConstLiteral) {
            (*target)["const"] = *rule.literal();
        } else if (target->contains("pattern")) {
            // Keep the existing pattern; both must hold.
            Json& all = (*target)["allOf"];
            if (!all.is_array()) all = Json::array();
            all.push_back({{"pattern", rule.pattern()}});
        } else {
            (*target)["pattern"] = rule.pattern();
        }
    }
    std::string description;
    if (auto it = target->find("description"); it != target->end() && it->is_string()) {
        description = it->get<std::string>();
    }
    if (!description.empty()) description += " ";
    (*target)["description"] = description + rule.instruction();
    return out;
}

Result<SchemaDoc, InjectError> inject_rule(const SchemaDoc& schema, std::string_view field_path,
                                           const CustomRule& rule) {
    auto injected = inject_rule(schema.document(), field_path, rule, InjectMode::Full);
    if (!injected) return injected.error();
    auto compiled = compile(injected.value());
    if (!compiled) return InjectError{compiled.error().reason};
    return compiled.value();
}

}  // namespace jsonreward
