#pragma once

#include <string_view>

namespace dropcol {
inline constexpr std::string_view kVersion = "0.1.0";
}
