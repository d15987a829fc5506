#pragma once

namespace sbcn {

inline constexpr const char* kVersion = "sbcn 0.1.0";

}  // namespace sbcn
