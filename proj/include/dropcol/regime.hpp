#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace dropcol {

/// Collision outcome. Integer codes are the canonical confusion-matrix axis order.
enum class RegimeLabel : std::uint8_t {
    Coalescence = 0,
    Bouncing = 1,
    Stretching = 2,
    Reflexive = 3,
};

inline constexpr std::size_t kNumRegimes = 4;

inline constexpr std::array<RegimeLabel, kNumRegimes> kAllRegimes{
    RegimeLabel::Coalescence, RegimeLabel::Bouncing, RegimeLabel::Stretching, RegimeLabel::Reflexive};

constexpr std::size_t code(RegimeLabel label) noexcept { return static_cast<std::size_t>(label); }

constexpr RegimeLabel regime_from_code(std::size_t c) noexcept { return static_cast<RegimeLabel>(c); }

constexpr std::string_view to_string(RegimeLabel label) noexcept {
    switch (label) {
    case RegimeLabel::Coalescence: return "coalescence";
    case RegimeLabel::Bouncing: return "bouncing";
    case RegimeLabel::Stretching: return "stretching";
    case RegimeLabel::Reflexive: return "reflexive";
    }
    return "?";
}

/// Accepts the canonical lower-case names plus the long forms
/// ("stretching separation", "reflexive separation", ...).
std::optional<RegimeLabel> parse_regime(std::string_view text);

/// Index of the largest entry; ties resolve toward the lower class code.
template <typename Range> std::size_t argmax_low(const Range& values) {
    std::size_t best = 0;
    std::size_t i = 0;
    for (auto v : values) {
        if (v > values[best]) best = i;
        ++i;
    }
    return best;
}

using ClassVector = std::array<double, kNumRegimes>;

} // namespace dropcol
