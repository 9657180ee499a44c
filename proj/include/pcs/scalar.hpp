#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "pcs/rational.hpp"

namespace pcs {

/// Thrown when a computation meets a symbol that was never declared.
struct UnknownSymbol : std::runtime_error {
    explicit UnknownSymbol(const std::string& name)
        : std::runtime_error("unknown symbol: " + name) {}
};

/// Process-wide registry of period symbols. The symbol "tau" (the full-turn
/// period, 2*pi*i under any numeric instantiation) is always present and is
/// the only symbol allowed to carry negative exponents.
class SymbolTable {
public:
    static int declare(const std::string& name);
    static int lookup(const std::string& name);
    static const std::string& name(int id);
    static bool is_declared(const std::string& name);
    static int tau_id();
};

/// A monomial in declared symbols: (symbol id, exponent) pairs, sorted by id,
/// all exponents nonzero, negative exponents only on tau.
using Mono = std::vector<std::pair<int, int>>;

/// Element of the coefficient ring: Laurent polynomial in tau tensored with a
/// polynomial ring over the remaining declared symbols, rational coefficients.
/// Always kept in canonical (expanded, sorted, zero-free) form, so operator==
/// is exact equality in the ring.
class Scalar {
public:
    Scalar() = default;
    Scalar(long v);  // NOLINT: implicit by design
    explicit Scalar(const Rat& v);

    static Scalar symbol(const std::string& name);
    static Scalar tau(int power = 1);

    bool is_zero() const { return terms_.empty(); }
    bool is_rational() const;
    /// Value as a rational; throws if a symbol is present.
    Rat rational_value() const;

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    Scalar& operator*=(const Rat& c);
    friend Scalar operator*(Scalar a, const Rat& c) { return a *= c; }
    friend Scalar operator*(const Rat& c, Scalar a) { return a *= c; }
    Scalar operator/(const Scalar& o) const { return *this * o.inverse(); }
    Scalar operator/(const Rat& c) const;

    bool operator==(const Scalar& o) const { return terms_ == o.terms_; }
    bool operator!=(const Scalar& o) const { return terms_ != o.terms_; }
    bool operator<(const Scalar& o) const { return cmp(o) < 0; }  // for map keys
    int cmp(const Scalar& o) const;

    /// Multiplicative inverse. Defined exactly for single-term elements whose
    /// monomial involves tau alone; anything else throws.
    Scalar inverse() const;

    /// Substitutes scalars for symbols (tau included).
    Scalar substitute(const std::map<std::string, Scalar>& values) const;

    /// Numeric instantiation; tau maps to 2*pi*i unless overridden.
    std::complex<double> to_complex(
        const std::map<std::string, std::complex<double>>& values = {}) const;

    /// Canonical string, terms sorted by symbol names: "3/2*rho*tau^-1 + 1".
    std::string str() const;
    static Scalar parse(const std::string& text);

    const std::map<Mono, Rat>& terms() const { return terms_; }

private:
    void add_term(const Mono& m, const Rat& c);
    std::map<Mono, Rat> terms_;
};

inline Scalar operator*(long a, Scalar b) { return b *= Rat(a); }

}  // namespace pcs
