#pragma once

namespace routechoice {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace routechoice
