#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "catune/errors.hpp"

namespace catune {

enum class VerticalAction : std::uint8_t { Climb = 0, Clear = 1, Descend = 2 };
enum class HorizontalAction : std::uint8_t { Left = 0, Clear = 1, Right = 2 };

inline constexpr int kNumActions = 9;

// One of the nine combined advisories. index = 3 * vertical + horizontal,
// so index 4 is CLEAR/CLEAR.
struct CombinedAction {
    VerticalAction vertical = VerticalAction::Clear;
    HorizontalAction horizontal = HorizontalAction::Clear;

    constexpr CombinedAction() = default;
    constexpr CombinedAction(VerticalAction v, HorizontalAction h) : vertical(v), horizontal(h) {}

    static CombinedAction from_index(int index) {
        if (index < 0 || index >= kNumActions)
            throw ContractError("action index out of range: " + std::to_string(index));
        return CombinedAction(static_cast<VerticalAction>(index / 3),
                              static_cast<HorizontalAction>(index % 3));
    }

    constexpr int index() const {
        return 3 * static_cast<int>(vertical) + static_cast<int>(horizontal);
    }

    constexpr bool is_clear() const {
        return vertical == VerticalAction::Clear && horizontal == HorizontalAction::Clear;
    }

    constexpr bool operator==(const CombinedAction& o) const {
        return vertical == o.vertical && horizontal == o.horizontal;
    }
};

inline constexpr CombinedAction kClearClear{VerticalAction::Clear, HorizontalAction::Clear};

inline std::string to_string(const CombinedAction& a) {
    static const std::array<const char*, 3> v = {"CLIMB", "CLEAR", "DESCEND"};
    static const std::array<const char*, 3> h = {"LEFT", "CLEAR", "RIGHT"};
    return std::string(v[static_cast<int>(a.vertical)]) + "/" +
           h[static_cast<int>(a.horizontal)];
}

}  // namespace catune
