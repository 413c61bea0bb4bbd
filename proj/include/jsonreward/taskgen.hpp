#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "jsonreward/custom_rules.hpp"
#include "jsonreward/reward.hpp"
#include "jsonreward/schema.hpp"

namespace jsonreward {

enum class TaskKind { ComplexSchema, CustomFormats, EscapeTranslation, Reasoning };
enum class ReasoningKind { GSM8K, MATH500, MMLU, ARC };

std::string_view to_string(TaskKind kind);
std::optional<TaskKind> task_kind_from_string(std::string_view name);
std::string_view to_string(ReasoningKind kind);
std::optional<ReasoningKind> reasoning_kind_from_string(std::string_view name);

struct Prompt {
    std::string system;
    std::string user;
};

/// A schema location (pointer into the schema document) and the instance
/// location it governs. Only `properties` chains are used, so the two are
/// in one-to-one correspondence.
struct FieldRef {
    std::string field_path;     // "#/properties/a/properties/b"
    std::string instance_path;  // "/a/b"
};

struct CustomField {
    FieldRef field;
    CustomRule rule;
};

struct CustomHidden {
    std::vector<CustomField> fields;
};

struct EscapeHidden {
    std::string special_string;
    FieldRef target;
};

struct ReasoningHidden {
    ReasoningKind dataset = ReasoningKind::GSM8K;
    Json gold;  // null when unknown
};

using Hidden = std::variant<std::monostate, CustomHidden, EscapeHidden, ReasoningHidden>;

struct TaskInstance {
    TaskKind kind = TaskKind::ComplexSchema;
    SchemaDoc schema;  // judging schema
    Prompt prompt;
    Hidden hidden;
    std::uint64_t seed = 0;

    /// `{id, kind, seed, schema, system_prompt, user_prompt, hidden}`.
    Json to_json(std::string_view id) const;
    /// Throws std::invalid_argument for malformed records.
    static TaskInstance from_json(const Json& record);
};

struct TaskgenError {
    std::string reason;
};

using TaskResult = Result<TaskInstance, TaskgenError>;

/// The fixed system prompt with the schema in its slot.
std::string system_prompt(const Json& prompted_schema);

/// Serialization used for the `{schema}` slot.
std::string prompt_schema_text(const Json& schema);

/// String fields reachable from the root through `properties` alone whose
/// subschemas carry no constraints besides `type` and annotations, and which
/// are not `$ref` targets. Document order.
std::vector<FieldRef> plain_string_fields(const SchemaDoc& schema);

TaskInstance gen_complex(const SchemaDoc& schema);

struct CustomFormatsConfig {
    std::size_t max_fields = 3;
};

TaskResult gen_custom_formats(const SchemaDoc& schema, std::uint64_t seed, const CustomFormatsConfig& config = {});

/// Length 8..64 code points over the weighted escape-heavy alphabet.
std::string special_string(std::uint64_t seed);

TaskResult gen_escape(const SchemaDoc& schema, std::uint64_t seed);

TaskInstance wrap_reasoning(ReasoningKind kind, std::string question, Json gold = nullptr);

/// The answer schema for a reasoning dataset.
const Json& reasoning_schema(ReasoningKind kind);

struct Verdict {
    bool correct = false;
    std::optional<FailureCategory> category;
    RewardScore score;
};

Verdict judge(const TaskInstance& task, std::string_view response_text, ScoreMode mode = ScoreMode::Strict);

/// Builds a value conforming to `schema` with small, mostly minimal choices.
/// `overrides` fixes values at given instance paths (properties chains only).
/// Returns nothing when no candidate validates.
std::optional<Json> satisfying_instance(const SchemaDoc& schema,
                                        const std::map<std::string, Json>& overrides = {});

/// A response the task's judge accepts, or nothing if none was found.
std::optional<std::string> self_test_response(const TaskInstance& task);

}  // namespace jsonreward
