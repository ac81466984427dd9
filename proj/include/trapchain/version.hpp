#pragma once

namespace trapchain {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace trapchain
