#pragma once

#include "wgb/errors.hpp"

#include <charconv>
#include <string>
#include <string_view>

namespace wgb {

/// Particle spin stored as the integer 2S, so half-integers stay exact.
class Spin {
public:
    constexpr Spin() = default;

    static constexpr Spin from_twice(int twice_spin) {
        if (twice_spin < 0) throw InputError("spin must be nonnegative");
        Spin s;
        s.twice_ = twice_spin;
        return s;
    }

    static constexpr Spin half() { return from_twice(1); }

    /// Parses "0", "1", "1/2", "3/2", ...; the denominator must be 1 or 2.
    static Spin parse(std::string_view text) {
        auto to_int = [&](std::string_view part) {
            int value = 0;
            auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
            if (ec != std::errc() || ptr != part.data() + part.size() || part.empty())
                throw InputError("malformed spin '" + std::string(text) + "'");
            return value;
        };
        const auto slash = text.find('/');
        if (slash == std::string_view::npos) return from_twice(2 * to_int(text));
        const int num = to_int(text.substr(0, slash));
        const int den = to_int(text.substr(slash + 1));
        if (den == 1) return from_twice(2 * num);
        if (den == 2) return from_twice(num);
        throw InputError("spin must be an integer or half-integer, got '" + std::string(text) + "'");
    }

    constexpr int twice() const noexcept { return twice_; }
    constexpr int multiplicity() const noexcept { return twice_ + 1; }
    constexpr double value() const noexcept { return 0.5 * twice_; }

    std::string str() const {
        return twice_ % 2 == 0 ? std::to_string(twice_ / 2) : std::to_string(twice_) + "/2";
    }

    friend constexpr bool operator==(Spin, Spin) = default;

private:
    int twice_ = 1;
};

} // namespace wgb
