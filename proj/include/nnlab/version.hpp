// Version identifiers stamped into result records and reproducibility headers.
#pragma once

namespace nnlab {

inline constexpr const char* version_string = "0.1.0";
inline constexpr const char* rng_family = "philox4x64-10/v1";

} // namespace nnlab
