#pragma once

namespace netrate {

inline constexpr const char* kVersion = "1.0.0";

}
