#pragma once

namespace wperm {

inline constexpr const char* version = "0.1.0";

}  // namespace wperm
