#pragma once

namespace faz {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace faz
