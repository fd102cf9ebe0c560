#pragma once

namespace compbf {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCsvSchema = "compbf-csv/1";

}  // namespace compbf
