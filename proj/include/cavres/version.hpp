#pragma once

namespace cavres {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cavres
