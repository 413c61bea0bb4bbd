#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jsonreward/result.hpp"
#include "jsonreward/tree.hpp"

namespace jsonreward {

struct ToolDef {
    std::string name;
    std::string description;
    /// Missing parameters convert as an empty object schema.
    std::optional<Json> parameters;

    /// Accepts `{name, description, parameters}` or the wrapped
    /// `{"type": "function", "function": {...}}` form. Throws
    /// std::invalid_argument without a non-empty string name.
    static ToolDef from_json(const Json& record);
};

/// Rewrites informal type names ("dict", "list", "str", ...) to JSON Schema
/// types in every schema position. Unknown names are left alone.
Json normalize_types(const Json& node);

/// RFC 6901 token escaping: "~" to "~0", then "/" to "~1".
std::string pointer_escape(std::string_view name);

struct ToolconvError {
    std::string reason;
};

/// Builds the tool-calling schema: a `$defs.tools` union of one object per
/// tool, accepted alone, as an array of two or more calls, or replaced by a
/// free-text explanation. The result is checked by compiling it.
Result<Json, ToolconvError> convert(std::span<const ToolDef> tools);

}  // namespace jsonreward
