#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jsonreward/result.hpp"
#include "jsonreward/tree.hpp"

namespace jsonreward {

/// Maps a URI (without fragment) to a schema document, or nothing when the
/// URI is inaccessible. Implementations may throw; callers record the
/// exception as an unresolvable URI.
using Resolver = std::function<std::optional<Json>(const std::string& uri)>;

/// Resolves relative paths against a directory. Absolute http(s) URIs map to
/// `<root>/<host>/<path>`. Paths escaping the root are unresolvable.
class DirectoryResolver {
   public:
    explicit DirectoryResolver(std::filesystem::path root) : root_(std::move(root)) {}
    std::optional<Json> operator()(const std::string& uri) const;

   private:
    std::filesystem::path root_;
};

class MapResolver {
   public:
    MapResolver() = default;
    explicit MapResolver(std::map<std::string, Json> docs) : docs_(std::move(docs)) {}
    void add(std::string uri, Json doc) { docs_[std::move(uri)] = std::move(doc); }
    std::optional<Json> operator()(const std::string& uri) const;

   private:
    std::map<std::string, Json> docs_;
};

enum TypeBit : unsigned {
    kTypeNull    = 1u << 0,
    kTypeBoolean = 1u << 1,
    kTypeObject  = 1u << 2,
    kTypeArray   = 1u << 3,
    kTypeNumber  = 1u << 4,
    kTypeString  = 1u << 5,
    kTypeInteger = 1u << 6,
};

std::optional<unsigned> type_bit(std::string_view name);
std::string type_names(unsigned mask);

struct CompiledRegex;

/// ECMAScript-style regular expression compiled once and shared read-only.
/// Matching is byte-oriented: `.` and character classes see UTF-8 bytes.
class Pattern {
   public:
    Pattern() = default;
    /// Throws std::invalid_argument for invalid expressions.
    explicit Pattern(std::string source);

    const std::string& source() const { return source_; }
    /// Unanchored search, as JSON Schema `pattern` requires. Matcher
    /// failures (complexity limits) count as no match.
    bool search(std::string_view text) const;

   private:
    std::string source_;
    std::shared_ptr<const CompiledRegex> regex_;
};

using SchemaId = std::size_t;

struct SchemaNode {
    std::string pointer;  // canonical "#/..." location in the document
    std::optional<bool> boolean_schema;

    std::optional<unsigned> types;
    std::vector<std::pair<std::string, SchemaId>> properties;
    std::vector<std::pair<Pattern, SchemaId>> pattern_properties;
    std::optional<SchemaId> additional_properties;
    std::vector<std::string> required;
    std::optional<std::uint64_t> min_properties, max_properties;

    std::optional<SchemaId> items;
    std::vector<SchemaId> prefix_items;
    std::optional<SchemaId> additional_items;
    std::optional<std::uint64_t> min_items, max_items;
    bool unique_items = false;

    std::optional<Json> enum_values;
    std::optional<Json> const_value;
    std::optional<Pattern> pattern;
    std::optional<std::string> format;
    std::optional<std::uint64_t> min_length, max_length;

    std::optional<double> minimum, maximum, exclusive_minimum, exclusive_maximum, multiple_of;
    std::optional<Decimal> multiple_of_exact;

    std::vector<SchemaId> all_of, any_of, one_of;
    std::optional<SchemaId> not_schema, if_schema, then_schema, else_schema;

    std::optional<SchemaId> ref;
    std::string ref_text;

    std::optional<std::string> description;
};

struct CompileError {
    std::string reason;
};

/// A compiled, ref-resolved schema. Immutable; copies share storage.
class SchemaDoc {
   public:
    SchemaId root() const { return 0; }
    const SchemaNode& node(SchemaId id) const { return impl_->nodes[id]; }
    std::size_t node_count() const { return impl_->nodes.size(); }

    /// The (merged) schema document this was compiled from.
    const Json& document() const { return impl_->document; }
    const std::map<std::string, SchemaId>& defs() const { return impl_->defs; }
    /// Canonical pointer ("#", "#/properties/a", ...) to compiled subschema.
    const std::map<std::string, SchemaId>& resolved() const { return impl_->resolved; }
    /// `$ref` edges (from, to) that close a cycle.
    const std::vector<std::pair<SchemaId, SchemaId>>& cyclic_edges() const { return impl_->cyclic; }

    std::optional<SchemaId> lookup(std::string_view pointer) const;

    std::size_t source_len() const { return impl_->source_len; }
    std::size_t desc_len() const { return impl_->desc_len; }
    std::size_t depth() const { return impl_->depth; }

    static const std::set<std::string, std::less<>>& dialect_keywords();

   private:
    struct Impl {
        Json document;
        std::vector<SchemaNode> nodes;
        std::map<std::string, SchemaId> defs;
        std::map<std::string, SchemaId> resolved;
        std::vector<std::pair<SchemaId, SchemaId>> cyclic;
        std::size_t source_len = 0;
        std::size_t desc_len   = 0;
        std::size_t depth      = 0;
    };
    std::shared_ptr<const Impl> impl_;

    friend class SchemaCompiler;
};

using CompileResult = Result<SchemaDoc, CompileError>;

CompileResult compile(const JsonTree& schema_json, const Resolver& resolver = {});
/// `source_len` defaults to the code point length of the compact serialization.
CompileResult compile(const Json& schema, const Resolver& resolver = {}, std::optional<std::size_t> source_len = {});
CompileResult compile_text(std::string_view text, const Resolver& resolver = {});

struct ResolverResult {
    enum class Status { Merged, Unresolvable };
    Status status = Status::Merged;
    std::optional<Json> merged_schema;
    std::vector<std::string> failed_uris;
};

/// Inlines every external `$ref` target under a fresh `$defs` entry and
/// rewrites the reference to point at it.
ResolverResult merge_external_refs(const Json& schema, const Resolver& resolver);
ResolverResult merge_external_refs(const JsonTree& schema_json, const Resolver& resolver);

bool has_external_refs(const Json& schema);

/// Definition nesting depth: the root counts 1 and each subschema reached
/// through properties, patternProperties, items, prefixItems, $defs,
/// definitions, oneOf, anyOf, allOf, not, if, then or else adds 1.
/// `$ref` edges are not followed.
std::size_t depth(const Json& schema);

/// Total code point length of every `description` string in schema position.
std::size_t description_length(const Json& schema);

/// Visits each direct subschema of `schema` with its relative pointer
/// (for example "/properties/a" or "/anyOf/2").
void for_each_subschema(const Json& schema, const std::function<void(std::string_view keyword, const std::string& rel_pointer, const Json& sub)>& fn);

/// Looks up a JSON pointer (or "#"-prefixed URI fragment) in a document.
const Json* resolve_pointer(const Json& document, std::string_view pointer);
/// Canonical "#/..." form of a pointer or fragment.
std::string canonical_pointer(std::string_view pointer);

struct CorpusStats {
    std::size_t count = 0;
    double mean_source_len = 0;
    double mean_desc_len   = 0;
    double mean_depth      = 0;
    /// Cumulative length buckets.
    std::size_t under_2k  = 0;
    std::size_t under_4k  = 0;
    std::size_t under_10k = 0;
};

/// Throws std::invalid_argument on an empty list.
CorpusStats corpus_stats(std::span<const SchemaDoc> schemas);
Json to_json(const CorpusStats& stats);

}  // namespace jsonreward
