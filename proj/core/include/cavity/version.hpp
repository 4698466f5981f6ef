#pragma once

namespace cavity {

inline constexpr const char* kToolVersion = "0.1.0";

}
