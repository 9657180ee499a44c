#pragma once

#include <map>
#include <string>
#include <utility>

#include "pcs/rational.hpp"

namespace pcs {

/// Bivariate polynomial over the rationals, sparse map (deg_x, deg_y) -> coeff.
struct Poly2 {
    std::map<std::pair<int, int>, Rat> c;

    static Poly2 zero() { return {}; }
    static Poly2 constant(const Rat& q);
    static Poly2 monomial(int a, int b, const Rat& q = Rat(1));

    bool is_zero() const { return c.empty(); }
    /// Total degree, -1 for the zero polynomial.
    int degree() const;
    /// Order of vanishing at the origin (min total degree), -1 for zero.
    int order() const;

    Poly2 operator+(const Poly2& o) const;
    Poly2 operator-(const Poly2& o) const;
    Poly2 operator*(const Poly2& o) const;
    Poly2 pow(int n) const;
    bool operator==(const Poly2& o) const { return c == o.c; }

    Poly2 dx() const;
    Poly2 dy() const;

    std::string str() const;
};

/// Parses expressions in x and y with + - * ^ and parentheses; rational
/// coefficients as integers or "a/b". Explicit '*' required between factors.
Poly2 parse_poly2(const std::string& text);

/// Greatest common divisor up to a rational unit.
Poly2 poly2_gcd(const Poly2& a, const Poly2& b);

/// True when the polynomial has no repeated factor.
bool poly2_squarefree(const Poly2& f);

/// Dimension of the Jacobian quotient at the origin by exact linear algebra on
/// truncated jets; the truncation degree doubles until two successive bounds
/// agree. Throws std::runtime_error("non-isolated or cap exceeded") when the
/// dimension keeps growing past the cap.
int milnor_number_poly(const Poly2& f);

}  // namespace pcs
