#pragma once

namespace catune {

inline constexpr const char* kCatuneVersion = "0.1.0";

}  // namespace catune
