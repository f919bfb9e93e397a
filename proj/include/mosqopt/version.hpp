#pragma once

namespace mosqopt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mosqopt
