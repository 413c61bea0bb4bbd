#include "jsonreward/validator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace jsonreward {

namespace {

constexpr std::pair<FailureCategory, std::string_view> kCategoryNames[] = {
    {FailureCategory::ParserError, "ParserError"},
    {FailureCategory::ValidationError, "ValidationError"},
    {FailureCategory::PatternError, "PatternError"},
    {FailureCategory::TypeError, "TypeError"},
    {FailureCategory::EnumError, "EnumError"},
    {FailureCategory::RequiredError, "RequiredError"},
    {FailureCategory::FormatError, "FormatError"},
    {FailureCategory::LengthBoundError, "LengthBoundError"},
    {FailureCategory::CompositionError, "CompositionError"},
    {FailureCategory::Other, "Other"},
};

}  // namespace

std::string_view to_string(FailureCategory category) {
    for (const auto& [c, name] : kCategoryNames) {
        if (c == category) return name;
    }
    return "Other";
}

std::optional<FailureCategory> failure_category_from_string(std::string_view name) {
    for (const auto& [c, n] : kCategoryNames) {
        if (n == name) return c;
    }
    return std::nullopt;
}

namespace {

/// (X * 10^e) / (M * 10^f) is an integer, for M of at most 18 digits.
std::optional<bool> exact_multiple(const Decimal& x, const Decimal& m) {
    if (x.special != Decimal::Special::None || m.special != Decimal::Special::None) return std::nullopt;
    if (m.digits.empty() || m.digits.size() > 18) return std::nullopt;
    if (x.digits.empty()) return true;
    const long long shift = x.exponent - m.exponent;
    // Normalized digits carry no trailing zeros, so 10 never divides X.
    if (shift < 0) return false;
    const unsigned long long mod = std::stoull(m.digits);
    unsigned long long r = 0;  // r < 1e18, so r * 10 + 9 fits
    for (char c : x.digits) r = (r * 10 + static_cast<unsigned>(c - '0')) % mod;
    // Past 64 factors of ten every power of 2 and 5 in M is covered.
    for (long long i = 0; i < std::min<long long>(shift, 64); ++i) r = (r * 10) % mod;
    return r == 0;
}

class Evaluator {
   public:
    Evaluator(const JsonTree& tree, const SchemaDoc& schema, const ValidateOptions& options)
        : tree_(tree), schema_(schema), options_(options) {}

    /// Evaluates `sid` against `nid`. With `out == nullptr` only the verdict
    /// is needed and evaluation stops at the first failure.
    bool eval(SchemaId sid, NodeId nid, ValidationReport* out, std::string_view via = "not") {
        const SchemaNode& s = schema_.node(sid);
        if (s.boolean_schema) {
            if (*s.boolean_schema) return true;
            if (out) {
                add(*out, nid, s.pointer.substr(1), std::string(via), category_of(via),
                    "no value is allowed here");
            }
            return false;
        }
        const auto key = std::make_pair(sid, nid);
        if (active_.count(key)) return true;
        active_.insert(key);
        const bool ok = eval_keywords(s, nid, out);
        active_.erase(key);
        return ok;
    }

   private:
    static FailureCategory category_of(std::string_view keyword) {
        if (keyword == "type") return FailureCategory::TypeError;
        if (keyword == "enum" || keyword == "const") return FailureCategory::EnumError;
        if (keyword == "pattern") return FailureCategory::PatternError;
        if (keyword == "required") return FailureCategory::RequiredError;
        if (keyword == "format") return FailureCategory::FormatError;
        if (keyword == "oneOf" || keyword == "anyOf" || keyword == "not") return FailureCategory::CompositionError;
        static const std::set<std::string_view> bounds = {
            "minLength",      "maxLength",        "minItems",         "maxItems",  "minProperties",
            "maxProperties",  "minimum",          "maximum",          "exclusiveMinimum",
            "exclusiveMaximum", "multipleOf"};
        if (bounds.count(keyword)) return FailureCategory::LengthBoundError;
        return FailureCategory::Other;
    }

    void add(ValidationReport& out, NodeId nid, std::string schema_path, std::string keyword, FailureCategory cat,
             std::string detail) {
        Violation v;
        v.instance_path = tree_.node(nid).pointer;
        v.schema_path   = std::move(schema_path);
        v.keyword       = std::move(keyword);
        v.category      = cat;
        v.detail        = std::move(detail);
        v.node          = nid;
        v.offset        = tree_.offset(nid);
        out.push_back(std::move(v));
    }

    /// Records a failing keyword. Returns false so callers can `return fail(...)`
    /// in verdict-only mode.
    bool fail(ValidationReport* out, const SchemaNode& s, NodeId nid, const char* keyword, std::string detail) {
        if (out) add(*out, nid, s.pointer.substr(1) + "/" + keyword, keyword, category_of(keyword), std::move(detail));
        return false;
    }

    static bool has_type(const JsonNode& n, unsigned mask) {
        switch (n.kind) {
            case ValueKind::Object: return mask & kTypeObject;
            case ValueKind::Array: return mask & kTypeArray;
            case ValueKind::String: return mask & kTypeString;
            case ValueKind::Boolean: return mask & kTypeBoolean;
            case ValueKind::Null: return mask & kTypeNull;
            case ValueKind::Number:
                if (mask & kTypeNumber) return true;
                return (mask & kTypeInteger) && to_decimal(n.number_text).is_integer();
        }
        return false;
    }

    bool eval_keywords(const SchemaNode& s, NodeId nid, ValidationReport* out) {
        const JsonNode& n = tree_.node(nid);
        bool ok           = true;
        // In verdict-only mode any failure ends evaluation.
        auto step = [&](bool passed) {
            ok = ok && passed;
            return passed || out;
        };

        if (s.ref && !step(eval(*s.ref, nid, out, "$ref"))) return false;

        if (s.types && !has_type(n, *s.types)) {
            if (!step(fail(out, s, nid, "type",
                           "expected " + type_names(*s.types) + ", got " + std::string(to_string(n.kind))))) {
                return false;
            }
        }
        if (s.enum_values) {
            bool found = false;
            for (const auto& e : *s.enum_values) {
                if (equal(tree_, nid, e)) {
                    found = true;
                    break;
                }
            }
            if (!found && !step(fail(out, s, nid, "enum", "value is not one of the allowed values"))) return false;
        }
        if (s.const_value && !equal(tree_, nid, *s.const_value)) {
            if (!step(fail(out, s, nid, "const", "value must equal " + to_text(*s.const_value)))) return false;
        }

        switch (n.kind) {
            case ValueKind::String:
                if (!string_keywords(s, nid, out, step)) return false;
                break;
            case ValueKind::Number:
                if (!number_keywords(s, nid, out, step)) return false;
                break;
            case ValueKind::Array:
                if (!array_keywords(s, nid, out, step)) return false;
                break;
            case ValueKind::Object:
                if (!object_keywords(s, nid, out, step)) return false;
                break;
            default: break;
        }

        for (SchemaId sub : s.all_of) {
            if (!step(eval(sub, nid, out, "allOf"))) return false;
        }
        if (!s.any_of.empty()) {
            bool any = false;
            for (SchemaId sub : s.any_of) {
                if (eval(sub, nid, nullptr)) {
                    any = true;
                    break;
                }
            }
            if (!any && !step(fail(out, s, nid, "anyOf", "value matches none of the alternatives"))) return false;
        }
        if (!s.one_of.empty()) {
            std::size_t matches = 0;
            for (SchemaId sub : s.one_of) {
                if (eval(sub, nid, nullptr) && ++matches > 1) break;
            }
            if (matches != 1) {
                const std::string detail = matches == 0 ? "value matches none of the alternatives"
                                                        : "value matches more than one alternative";
                if (!step(fail(out, s, nid, "oneOf", detail))) return false;
            }
        }
        if (s.not_schema && eval(*s.not_schema, nid, nullptr)) {
            if (!step(fail(out, s, nid, "not", "value matches a forbidden schema"))) return false;
        }
        if (s.if_schema) {
            const bool cond = eval(*s.if_schema, nid, nullptr);
            const auto& branch = cond ? s.then_schema : s.else_schema;
            if (branch && !step(eval(*branch, nid, out, cond ? "then" : "else"))) return false;
        }
        return ok;
    }

    template <class Step>
    bool string_keywords(const SchemaNode& s, NodeId nid, ValidationReport* out, Step& step) {
        const std::string& v = tree_.node(nid).string_value;
        if (s.min_length || s.max_length) {
            const std::size_t len = utf8::length(v);
            if (s.min_length && len < *s.min_length &&
                !step(fail(out, s, nid, "minLength", "shorter than " + std::to_string(*s.min_length)))) {
                return false;
            }
            if (s.max_length && len > *s.max_length &&
                !step(fail(out, s, nid, "maxLength", "longer than " + std::to_string(*s.max_length)))) {
                return false;
            }
        }
        if (s.pattern && !s.pattern->search(v)) {
            if (!step(fail(out, s, nid, "pattern", "does not match " + s.pattern->source()))) return false;
        }
        if (s.format) {
            auto hook = options_.format_hooks.find(*s.format);
            if (hook != options_.format_hooks.end() && !hook->second(v)) {
                if (!step(fail(out, s, nid, "format", "not a valid " + *s.format))) return false;
            }
        }
        return true;
    }

    template <class Step>
    bool number_keywords(const SchemaNode& s, NodeId nid, ValidationReport* out, Step& step) {
        const JsonNode& n = tree_.node(nid);
        const double x    = n.number_value;
        auto bound        = [&](bool violated, const char* kw, std::string detail) {
            return !violated || step(fail(out, s, nid, kw, std::move(detail)));
        };
        auto text = [](double d) { return to_text(Json(d)); };
        if (s.minimum && !bound(x < *s.minimum, "minimum", "less than " + text(*s.minimum))) return false;
        if (s.maximum && !bound(x > *s.maximum, "maximum", "greater than " + text(*s.maximum))) return false;
        if (s.exclusive_minimum &&
            !bound(x <= *s.exclusive_minimum, "exclusiveMinimum", "not greater than " + text(*s.exclusive_minimum))) {
            return false;
        }
        if (s.exclusive_maximum &&
            !bound(x >= *s.exclusive_maximum, "exclusiveMaximum", "not less than " + text(*s.exclusive_maximum))) {
            return false;
        }
        if (s.multiple_of) {
            bool multiple = false;
            if (auto exact = exact_multiple(to_decimal(n.number_text), *s.multiple_of_exact)) {
                multiple = *exact;
            } else {
                const double q = x / *s.multiple_of;
                multiple       = std::isfinite(q) && std::fabs(q - std::round(q)) <= 1e-9 * std::max(1.0, std::fabs(q));
            }
            if (!bound(!multiple, "multipleOf", "not a multiple of " + text(*s.multiple_of))) return false;
        }
        return true;
    }

    template <class Step>
    bool array_keywords(const SchemaNode& s, NodeId nid, ValidationReport* out, Step& step) {
        const auto& items   = tree_.node(nid).children;
        const std::size_t n = items.size();
        if (s.min_items && n < *s.min_items &&
            !step(fail(out, s, nid, "minItems", "fewer than " + std::to_string(*s.min_items) + " items"))) {
            return false;
        }
        if (s.max_items && n > *s.max_items &&
            !step(fail(out, s, nid, "maxItems", "more than " + std::to_string(*s.max_items) + " items"))) {
            return false;
        }
        if (s.unique_items) {
            bool dup = false;
            for (std::size_t i = 0; i < n && !dup; ++i) {
                for (std::size_t j = i + 1; j < n && !dup; ++j) dup = equal(tree_, items[i], tree_, items[j]);
            }
            if (dup && !step(fail(out, s, nid, "uniqueItems", "items are not unique"))) return false;
        }
        const std::size_t prefix = std::min(n, s.prefix_items.size());
        for (std::size_t i = 0; i < prefix; ++i) {
            if (!step(eval(s.prefix_items[i], items[i], out, "prefixItems"))) return false;
        }
        const auto& rest = s.items ? s.items : s.additional_items;
        if (rest) {
            const char* via = s.items ? "items" : "additionalItems";
            for (std::size_t i = prefix; i < n; ++i) {
                if (!step(eval(*rest, items[i], out, via))) return false;
            }
        }
        return true;
    }

    template <class Step>
    bool object_keywords(const SchemaNode& s, NodeId nid, ValidationReport* out, Step& step) {
        const JsonNode& obj = tree_.node(nid);
        // Duplicate keys resolve to their last occurrence.
        std::vector<std::size_t> members;
        {
            std::set<std::string_view> seen;
            for (std::size_t i = obj.keys.size(); i-- > 0;) {
                if (seen.insert(obj.keys[i]).second) members.push_back(i);
            }
            std::reverse(members.begin(), members.end());
        }
        for (const auto& name : s.required) {
            const bool present =
                std::any_of(members.begin(), members.end(), [&](std::size_t i) { return obj.keys[i] == name; });
            if (!present && !step(fail(out, s, nid, "required", "missing property \"" + name + "\""))) return false;
        }
        if (s.min_properties && members.size() < *s.min_properties &&
            !step(fail(out, s, nid, "minProperties", "fewer than " + std::to_string(*s.min_properties) + " properties"))) {
            return false;
        }
        if (s.max_properties && members.size() > *s.max_properties &&
            !step(fail(out, s, nid, "maxProperties", "more than " + std::to_string(*s.max_properties) + " properties"))) {
            return false;
        }
        for (std::size_t i : members) {
            const std::string& key = obj.keys[i];
            const NodeId child     = obj.children[i];
            bool matched           = false;
            for (const auto& [name, sub] : s.properties) {
                if (name == key) {
                    matched = true;
                    if (!step(eval(sub, child, out, "properties"))) return false;
                }
            }
            for (const auto& [pattern, sub] : s.pattern_properties) {
                if (pattern.search(key)) {
                    matched = true;
                    if (!step(eval(sub, child, out, "patternProperties"))) return false;
                }
            }
            if (!matched && s.additional_properties) {
                if (!step(eval(*s.additional_properties, child, out, "additionalProperties"))) return false;
            }
        }
        return true;
    }

    const JsonTree& tree_;
    const SchemaDoc& schema_;
    const ValidateOptions& options_;
    std::set<std::pair<SchemaId, NodeId>> active_;
};

}  // namespace

void sort_document_order(ValidationReport& report) {
    std::stable_sort(report.begin(), report.end(), [](const Violation& a, const Violation& b) {
        return std::tie(a.offset, a.instance_path, a.schema_path, a.keyword) <
               std::tie(b.offset, b.instance_path, b.schema_path, b.keyword);
    });
}

ValidationReport validate_node(const JsonTree& tree, NodeId node, const SchemaDoc& schema, SchemaId schema_node,
                               const ValidateOptions& options) {
    ValidationReport report;
    if (tree.node_count() == 0) return report;
    Evaluator(tree, schema, options).eval(schema_node, node, &report);
    sort_document_order(report);
    return report;
}

ValidationReport validate(const JsonTree& tree, const SchemaDoc& schema, const ValidateOptions& options) {
    return validate_node(tree, tree.root(), schema, schema.root(), options);
}

bool is_valid(const JsonTree& tree, const SchemaDoc& schema, const ValidateOptions& options) {
    if (tree.node_count() == 0) return true;
    return Evaluator(tree, schema, options).eval(schema.root(), tree.root(), nullptr);
}

FailureCategory classify(const ParseFailure&) { return FailureCategory::ParserError; }

FailureCategory classify(const ValidationReport& report) {
    if (report.empty()) throw std::invalid_argument("cannot classify an empty validation report");
    ValidationReport sorted = report;
    sort_document_order(sorted);
    switch (sorted.front().category) {
        case FailureCategory::PatternError:
        case FailureCategory::TypeError:
        case FailureCategory::EnumError:
        case FailureCategory::RequiredError: return sorted.front().category;
        default: return FailureCategory::ValidationError;
    }
}

}  // namespace jsonreward
