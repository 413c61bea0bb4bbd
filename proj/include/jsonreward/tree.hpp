#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "jsonreward/lex.hpp"

namespace jsonreward {

using Json = nlohmann::ordered_json;

enum class ValueKind { Object, Array, String, Number, Boolean, Null };

std::string_view to_string(ValueKind kind);

using NodeId = std::size_t;

/// One value in a parsed document.
///
/// `first_token`/`last_token` are inclusive indices into the tree's token
/// stream. Object children are stored in source order alongside their keys
/// (duplicate keys are kept; lookups resolve to the last occurrence).
struct JsonNode {
    ValueKind kind = ValueKind::Null;
    std::size_t first_token = 0;
    std::size_t last_token  = 0;
    std::optional<NodeId> parent;
    std::string pointer;
    std::vector<NodeId> children;
    std::vector<std::string> keys;
    std::string string_value;
    /// Exact source text for numbers; `number_value` is its double reading.
    std::string number_text;
    double number_value = 0.0;
    bool bool_value     = false;
};

/// Parsed document with every node linked to its lexical tokens.
class JsonTree {
   public:
    JsonTree() = default;
    JsonTree(std::string source, TokenStream tokens, std::vector<JsonNode> nodes, Dialect dialect);

    NodeId root() const { return 0; }
    const JsonNode& node(NodeId id) const { return nodes_[id]; }
    std::size_t node_count() const { return nodes_.size(); }
    const std::vector<JsonNode>& nodes() const { return nodes_; }
    const TokenStream& tokens() const { return tokens_; }
    const std::string& source() const { return source_; }
    Dialect dialect() const { return dialect_; }

    /// Source byte offset at which the node begins.
    std::size_t offset(NodeId id) const { return tokens_.tokens[nodes_[id].first_token].span.begin; }

    std::optional<NodeId> find(std::string_view pointer) const;
    std::optional<NodeId> member(NodeId object, std::string_view key) const;

    /// Comment tokens, in source order.
    std::vector<Token> trivia() const;

    Json to_json(NodeId id) const;
    Json to_json() const { return to_json(root()); }

   private:
    std::string source_;
    TokenStream tokens_;
    std::vector<JsonNode> nodes_;
    Dialect dialect_ = Dialect::Json;
};

enum class Construct { Object, Array, String };

/// What the parser expected next when it stopped.
enum class Expect {
    Value,          // top level, nothing parsed yet
    KeyOrEnd,       // after '{'
    Key,            // after ',' inside an object
    Colon,          // after a key
    MemberValue,    // after ':'
    ObjectNext,     // after a member value
    ElementOrEnd,   // after '['
    Element,        // after ',' inside an array
    ArrayNext,      // after an element
    End,            // root value complete
};

struct ParseFailure {
    std::size_t error_offset = 0;
    std::vector<Construct> open_stack;
    std::vector<Token> partial_tokens;
    /// Parser state before the last partial token (if any) was considered.
    Expect pending = Expect::Value;
    /// True when the last entry of `partial_tokens` is an incomplete token
    /// the parser accepted as a viable prefix.
    bool partial_last = false;
    Dialect dialect   = Dialect::Json;
    std::string message;
};

class ParseResult {
   public:
    ParseResult(JsonTree tree) : value_(std::move(tree)) {}
    ParseResult(ParseFailure failure) : value_(std::move(failure)) {}

    bool ok() const { return std::holds_alternative<JsonTree>(value_); }
    explicit operator bool() const { return ok(); }
    const JsonTree& tree() const { return std::get<JsonTree>(value_); }
    JsonTree& tree() { return std::get<JsonTree>(value_); }
    const ParseFailure& failure() const { return std::get<ParseFailure>(value_); }

   private:
    std::variant<JsonTree, ParseFailure> value_;
};

/// Containers nested deeper than this are rejected as a parse failure.
inline constexpr std::size_t kMaxNesting = 512;

ParseResult parse(std::string_view text, Dialect dialect);

struct RepairResult {
    std::string repaired_text;
    std::size_t padded_token_count = 0;
    /// Number of leading tokens of the original stream carried into the
    /// repaired text (an open string counts as carried).
    std::size_t kept_tokens = 0;
};

/// Truncates at the failure, drops the trailing partial token and any
/// dangling key/colon/comma, then appends closers for every open construct.
RepairResult repair(std::string_view text, const ParseFailure& failure);

/// Compact canonical JSON for a node (strings re-encoded, numbers as source text
/// when it is valid JSON, otherwise the shortest double form; NaN/Infinity become null).
std::string serialize(const JsonTree& tree, NodeId id);
inline std::string serialize(const JsonTree& tree) { return serialize(tree, tree.root()); }

/// Compact JSON text for a document model value, strings through encode_string.
std::string to_text(const Json& value);

std::string escape_pointer_token(std::string_view token);
std::string unescape_pointer_token(std::string_view token);
std::vector<std::string> split_pointer(std::string_view pointer);

/// Semantic equality with numbers compared by exact decimal value and
/// objects compared as key sets (last duplicate wins).
bool equal(const JsonTree& tree, NodeId id, const Json& value);
bool equal(const JsonTree& a, NodeId x, const JsonTree& b, NodeId y);
bool equal(const Json& a, const Json& b);

/// Exact decimal form of a number: sign, significant digits without leading or
/// trailing zeros, and a base-10 exponent. Non-finite values are flagged.
struct Decimal {
    bool negative = false;
    std::string digits;  // empty for zero
    long long exponent = 0;
    enum class Special { None, PosInf, NegInf, NaN } special = Special::None;

    bool is_integer() const { return special == Special::None && (digits.empty() || exponent >= 0); }
    bool operator==(const Decimal&) const = default;
};

Decimal to_decimal(std::string_view number_text);
Decimal json_decimal(const Json& number);

}  // namespace jsonreward
