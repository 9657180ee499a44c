#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace pcs {

/// Exact rational number. All arithmetic in the toolkit bottoms out here.
using Rat = mpq_class;

/// Parses "a", "-a", or "a/b" with b > 0 after canonicalization.
/// Throws std::invalid_argument on malformed input or zero denominator.
Rat rat_from_string(const std::string& s);

/// Canonical form: "a" for integers, "a/b" otherwise, b > 0, gcd(a,b) = 1.
std::string rat_to_string(const Rat& q);

inline long rat_to_long(const Rat& q) {
    if (q.get_den() != 1) throw std::invalid_argument("not an integer: " + rat_to_string(q));
    if (!q.get_num().fits_slong_p()) throw std::overflow_error("integer out of range");
    return q.get_num().get_si();
}

}  // namespace pcs
