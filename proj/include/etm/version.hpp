#pragma once

namespace etm {

inline constexpr const char* version_string = "0.1.0";
inline constexpr int output_schema_version = 1;

}  // namespace etm
