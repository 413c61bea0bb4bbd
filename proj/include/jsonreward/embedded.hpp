#pragma once

#include <string_view>

/// Data tables compiled in from data/*.json.
namespace jsonreward::embedded {

std::string_view custom_rules();
std::string_view type_aliases();
std::string_view reasoning_schemas();

}  // namespace jsonreward::embedded
