#pragma once

namespace fracpass {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kReportSchemaVersion = "fracpass-report-1";
inline constexpr const char* kFieldFormatTag = "fracpass-field v1";

}  // namespace fracpass
