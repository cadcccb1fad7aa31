#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <optional>
#include <string>
#include <vector>

namespace mdpstab {

/// Exact rational scalar used by all solver modules. Only the simulator
/// works in floating point.
using Rat = boost::multiprecision::mpq_rational;

inline double to_double(const Rat& x) { return x.convert_to<double>(); }

/// Parses "p/q", plain integers and decimal literals ("0.25", "-3", "1/3").
/// Returns std::nullopt on malformed input.
std::optional<Rat> parse_rational(const std::string& text);

/// Canonical text form: integer when the denominator is 1, otherwise "p/q".
std::string format_rational(const Rat& x);

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

inline const Rat& rat_min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline const Rat& rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

inline Rat clamp(const Rat& x, const Rat& lo, const Rat& hi) {
    if (x < lo) return lo;
    if (x > hi) return hi;
    return x;
}

/// Largest integer k with k*step <= x (step > 0).
Rat floor_to_multiple(const Rat& x, const Rat& step);

}  // namespace mdpstab
