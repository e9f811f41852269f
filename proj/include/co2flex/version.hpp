#pragma once

namespace co2flex {

inline constexpr const char* kVersion = "0.1.0";

}
