#pragma once

// Library / verification-suite version identifiers.  The suite version is
// stamped into verification reports so two reports can be compared knowing
// they came from the same generation logic.
namespace nucalc {

inline constexpr const char* kLibraryVersion = "1.0.0";
inline constexpr const char* kSuiteVersion = "nucalc-verify/1.0";

}  // namespace nucalc
