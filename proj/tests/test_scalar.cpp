#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcs/scalar.hpp"

using namespace pcs;

TEST_CASE("rational parsing and printing") {
    CHECK(rat_to_string(rat_from_string("3/6")) == "1/2");
    CHECK(rat_to_string(rat_from_string("-4/2")) == "-2");
    CHECK(rat_to_string(rat_from_string("7")) == "7");
    CHECK(rat_from_string("0/5") == 0);
    CHECK_THROWS_AS(rat_from_string("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string("x"), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string(""), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string("1.5"), std::invalid_argument);
}

TEST_CASE("undeclared symbols are rejected") {
    CHECK_THROWS_AS(Scalar::symbol("never_declared_xyz"), UnknownSymbol);
    SymbolTable::declare("rho");
    CHECK_NOTHROW(Scalar::symbol("rho"));
}

TEST_CASE("canonical form and equality") {
    SymbolTable::declare("rho");
    SymbolTable::declare("sigma");
    Scalar rho = Scalar::symbol("rho");
    Scalar sigma = Scalar::symbol("sigma");

    Scalar a = (rho + sigma) * (rho - sigma);
    Scalar b = rho * rho - sigma * sigma;
    CHECK(a == b);

    Scalar c = rho * sigma - sigma * rho;
    CHECK(c.is_zero());

    CHECK((rho - rho).is_zero());
    CHECK(Scalar(0).is_zero());
    CHECK_FALSE(rho.is_zero());
}

TEST_CASE("tau is the only invertible symbol") {
    SymbolTable::declare("rho");
    Scalar t = Scalar::tau();
    CHECK(t * t.inverse() == Scalar(1));
    CHECK(Scalar::tau(-3) * Scalar::tau(3) == Scalar(1));

    Scalar half_tau = t * Rat(1, 2);
    CHECK(half_tau.inverse() == Scalar::tau(-1) * Rat(2));

    Scalar rho = Scalar::symbol("rho");
    CHECK_THROWS_AS(rho.inverse(), std::domain_error);
    CHECK_THROWS_AS((t + Scalar(1)).inverse(), std::domain_error);
    CHECK_THROWS_AS(Scalar(0).inverse(), std::domain_error);
}

TEST_CASE("canonical strings") {
    SymbolTable::declare("rho");
    Scalar rho = Scalar::symbol("rho");
    Scalar t = Scalar::tau();

    CHECK(Scalar(0).str() == "0");
    CHECK(Scalar(Rat(-3, 2)).str() == "-3/2");
    CHECK(rho.str() == "rho");
    CHECK((-rho).str() == "-rho");
    CHECK((rho * Rat(3, 2) * Scalar::tau(-1)).str() == "3/2*rho*tau^-1");
    CHECK((Scalar(1) + rho * rho).str() == "1 + rho^2");
    CHECK((t - Scalar(2)).str() == "-2 + tau");
}

TEST_CASE("parse round trip") {
    SymbolTable::declare("rho");
    SymbolTable::declare("sigma");
    Scalar rho = Scalar::symbol("rho");
    Scalar sigma = Scalar::symbol("sigma");
    std::vector<Scalar> samples = {
        Scalar(0),
        Scalar(Rat(7, 3)),
        rho,
        -rho * sigma,
        Scalar::tau(-2) * Rat(5, 4) + rho * rho * sigma - Scalar(3),
    };
    for (const auto& s : samples) {
        CAPTURE(s.str());
        CHECK(Scalar::parse(s.str()) == s);
    }
    CHECK_THROWS(Scalar::parse("rho + unknown_sym"));
    CHECK_THROWS(Scalar::parse("rho rho"));
}

TEST_CASE("substitution and numeric instantiation") {
    SymbolTable::declare("rho");
    Scalar rho = Scalar::symbol("rho");
    Scalar expr = rho * rho * Rat(2) + Scalar::tau() * rho;

    Scalar inst = expr.substitute({{"rho", Scalar(3)}});
    CHECK(inst == Scalar(18) + Scalar::tau() * Rat(3));

    auto z = expr.to_complex({{"rho", {1.0, 0.0}}});
    CHECK(std::abs(z.real() - 2.0) < 1e-12);
    CHECK(std::abs(z.imag() - 2.0 * 3.14159265358979323846) < 1e-9);

    CHECK_THROWS_AS(expr.to_complex({}), std::domain_error);

    Scalar with_inverse = Scalar::tau(-1);
    auto w = with_inverse.to_complex({});
    CHECK(std::abs(w.imag() + 1.0 / (2.0 * 3.14159265358979323846)) < 1e-12);
}

TEST_CASE("division") {
    SymbolTable::declare("rho");
    Scalar rho = Scalar::symbol("rho");
    CHECK(rho / Rat(2) + rho / Rat(2) == rho);
    CHECK((rho * Scalar::tau()) / Scalar::tau() == rho);
    CHECK_THROWS_AS(rho / Scalar(0), std::domain_error);
    CHECK_THROWS_AS(rho / Rat(0), std::domain_error);
}

TEST_CASE("rational value extraction") {
    SymbolTable::declare("rho");
    CHECK(Scalar(Rat(5, 2)).rational_value() == Rat(5, 2));
    CHECK(Scalar(0).rational_value() == 0);
    CHECK_THROWS_AS(Scalar::symbol("rho").rational_value(), std::domain_error);
}
