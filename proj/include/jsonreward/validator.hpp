#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jsonreward/schema.hpp"
#include "jsonreward/tree.hpp"

namespace jsonreward {

enum class FailureCategory {
    ParserError,
    ValidationError,
    PatternError,
    TypeError,
    EnumError,
    RequiredError,
    FormatError,
    LengthBoundError,
    CompositionError,
    Other,
};

std::string_view to_string(FailureCategory category);
std::optional<FailureCategory> failure_category_from_string(std::string_view name);

struct Violation {
    /// RFC 6901 pointer; the document root is "".
    std::string instance_path;
    /// Location of the failing keyword in the schema document.
    std::string schema_path;
    std::string keyword;
    FailureCategory category = FailureCategory::Other;
    std::string detail;
    /// Node charged for the violation (the parent object for `required`).
    NodeId node = 0;
    /// Source offset of `node`, for document ordering.
    std::size_t offset = 0;
};

using ValidationReport = std::vector<Violation>;

using FormatHook = std::function<bool(std::string_view)>;

struct ValidateOptions {
    /// `format` values with a registered checker; all others are annotations.
    std::map<std::string, FormatHook, std::less<>> format_hooks;
};

/// Evaluates every applicable keyword; sibling keywords never short-circuit.
/// The report is sorted in document order.
ValidationReport validate(const JsonTree& tree, const SchemaDoc& schema, const ValidateOptions& options = {});
ValidationReport validate_node(const JsonTree& tree, NodeId node, const SchemaDoc& schema, SchemaId schema_node,
                               const ValidateOptions& options = {});
bool is_valid(const JsonTree& tree, const SchemaDoc& schema, const ValidateOptions& options = {});

/// Sorts by (source offset, instance path, schema path, keyword).
void sort_document_order(ValidationReport& report);

FailureCategory classify(const ParseFailure& failure);
/// Category of the first violation in document order, with only the pattern,
/// type, enum and required buckets reported specifically. Throws
/// std::invalid_argument for an empty report.
FailureCategory classify(const ValidationReport& report);

}  // namespace jsonreward
