#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcs/curve.hpp"
#include "pcs/poly2.hpp"
#include "pcs/resolution.hpp"

using namespace pcs;

namespace {

BranchSpec branch(std::initializer_list<const char*> exps) {
    BranchSpec b;
    for (const char* e : exps) b.exponents.push_back(rat_from_string(e));
    return b;
}

CurveSpec two_branch(BranchSpec a, BranchSpec b, long I) {
    CurveSpec c;
    c.branches = {std::move(a), std::move(b)};
    c.intersections = {{0, I}, {I, 0}};
    return c;
}

}  // namespace

TEST_CASE("polynomial parser") {
    Poly2 f = parse_poly2("(y^2-x^3)^2-4*x^5*y-x^7");
    CHECK(f.degree() == 7);
    CHECK(f.order() == 4);
    Poly2 g = parse_poly2("y^4 - 2*x^3*y^2 + x^6 - 4*x^5*y - x^7");
    CHECK(f == g);

    CHECK(parse_poly2("1/2*x + 1/2*x") == parse_poly2("x"));
    CHECK_THROWS_AS(parse_poly2("x + * y"), std::invalid_argument);
    CHECK_THROWS_AS(parse_poly2("z"), std::invalid_argument);
    CHECK_THROWS_AS(parse_poly2("x^"), std::invalid_argument);
    CHECK_THROWS_AS(parse_poly2("(x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_poly2("2x"), std::invalid_argument);
}

TEST_CASE("gcd and square-free detection") {
    Poly2 f = parse_poly2("x*y");
    CHECK(poly2_squarefree(f));
    CHECK(poly2_squarefree(parse_poly2("y^2-x^3")));
    CHECK(poly2_squarefree(parse_poly2("x")));
    CHECK(poly2_squarefree(parse_poly2("y")));
    CHECK_FALSE(poly2_squarefree(parse_poly2("x^2*y")));
    CHECK_FALSE(poly2_squarefree(parse_poly2("(y^2-x^3)^2")));
    CHECK_FALSE(poly2_squarefree(parse_poly2("(x+y)^2-(x^2+2*x*y+y^2)+x^2")));  // = x^2

    Poly2 g = poly2_gcd(parse_poly2("(x+y)*(y^2-x^3)"), parse_poly2("(x+y)*y"));
    CHECK(g.degree() == 1);  // x + y up to a unit
}

TEST_CASE("milnor oracle on jets") {
    CHECK(milnor_number_poly(parse_poly2("x*y")) == 1);
    CHECK(milnor_number_poly(parse_poly2("y^2-x^3")) == 2);
    CHECK(milnor_number_poly(parse_poly2("y^2-x^4")) == 3);
    CHECK(milnor_number_poly(parse_poly2("y^2-x^5")) == 4);
    CHECK(milnor_number_poly(parse_poly2("x^3-y^3")) == 4);
    CHECK(milnor_number_poly(parse_poly2("x")) == 0);
    CHECK_THROWS_WITH_AS(milnor_number_poly(parse_poly2("y^2")),
                         "non-isolated or cap exceeded", std::runtime_error);
}

TEST_CASE("milnor oracle reproduces 16 for the two-pair branch") {
    CHECK(milnor_number_poly(parse_poly2("(y^2-x^3)^2-4*x^5*y-x^7")) == 16);
}

TEST_CASE("puiseux pairs from exponents") {
    CHECK(puiseux_pairs_from_exponents(branch({"3/2"})).pairs ==
          std::vector<std::pair<long, long>>{{2, 3}});
    CHECK(puiseux_pairs_from_exponents(branch({"3/2", "7/4"})).pairs ==
          std::vector<std::pair<long, long>>{{2, 3}, {2, 7}});
    CHECK(puiseux_pairs_from_exponents(branch({})).pairs.empty());
    CHECK(puiseux_pairs_from_exponents(branch({"5/2"})).pairs ==
          std::vector<std::pair<long, long>>{{2, 5}});
    CHECK(puiseux_pairs_from_exponents(branch({"4/3", "13/9"})).pairs ==
          std::vector<std::pair<long, long>>{{3, 4}, {3, 13}});

    CHECK_THROWS_AS(puiseux_pairs_from_exponents(branch({"1/2"})), std::invalid_argument);
    CHECK_THROWS_AS(puiseux_pairs_from_exponents(branch({"3/2", "5/4", "7/4"})),
                    std::invalid_argument);  // not increasing
    CHECK_THROWS_AS(puiseux_pairs_from_exponents(branch({"3/2", "5/2"})),
                    std::invalid_argument);  // no new denominator factor
    CHECK_THROWS_AS(puiseux_pairs_from_exponents(branch({"2"})), std::invalid_argument);
}

TEST_CASE("pairs round trip") {
    std::vector<PuiseuxPairs> samples = {
        {{{2, 3}}},
        {{{2, 3}, {2, 7}}},
        {{{3, 4}, {2, 9}}},
        {{{2, 5}, {3, 16}, {2, 33}}},
        {{}},
    };
    for (const auto& p : samples) {
        auto b = exponents_from_pairs(p);
        CHECK(puiseux_pairs_from_exponents(b).pairs == p.pairs);
    }
    CHECK_THROWS_AS(exponents_from_pairs(PuiseuxPairs{{{2, 4}}}), std::invalid_argument);
    CHECK_THROWS_AS(exponents_from_pairs(PuiseuxPairs{{{1, 3}}}), std::invalid_argument);
    CHECK_THROWS_AS(exponents_from_pairs(PuiseuxPairs{{{2, 3}, {2, 5}}}),
                    std::invalid_argument);  // needs k2 > k1*m2
}

TEST_CASE("monstrance order") {
    auto d = monstrance_order(branch({"3/2", "7/4"}));
    CHECK(d.m == 4);
    CHECK(d.k == 6);
    CHECK(d.order == 24);
    CHECK_FALSE(d.k_le_m);

    auto cusp = monstrance_order(branch({"3/2"}));
    CHECK(cusp.m == 2);
    CHECK(cusp.k == 3);
    CHECK(cusp.order == 6);

    auto smooth = monstrance_order(branch({}));
    CHECK(smooth.m == 1);
    CHECK(smooth.k == 1);
    CHECK(smooth.order == 1);
    CHECK(smooth.k_le_m);  // outside the singular regime, flagged

    // m equals the lcm of exponent denominators
    auto e = monstrance_order(branch({"5/2", "13/4", "27/8"}));
    CHECK(e.m == 8);
}

TEST_CASE("curve spec validation") {
    CurveSpec node = two_branch(branch({}), branch({}), 1);
    CHECK_NOTHROW(validate_curve_spec(node));

    CurveSpec bad = node;
    bad.intersections[0][1] = 2;  // asymmetric
    CHECK_THROWS_AS(validate_curve_spec(bad), std::invalid_argument);

    bad = node;
    bad.intersections = {{0, 0}, {0, 0}};
    CHECK_THROWS_AS(validate_curve_spec(bad), std::invalid_argument);

    bad = node;
    bad.intersections[0][0] = 1;
    CHECK_THROWS_AS(validate_curve_spec(bad), std::invalid_argument);

    CurveSpec square;
    square.branches = {branch({"3/2"})};
    square.polynomial = "(y^2-x^3)^2";
    CHECK_THROWS_AS(validate_curve_spec(square), std::invalid_argument);

    CurveSpec empty;
    CHECK_THROWS_AS(validate_curve_spec(empty), std::invalid_argument);
}

TEST_CASE("milnor from branch data") {
    CHECK(milnor_from_branch_data(two_branch(branch({}), branch({}), 1)) == 1);

    CurveSpec cusp;
    cusp.branches = {branch({"3/2"})};
    CHECK(milnor_from_branch_data(cusp) == 2);

    CurveSpec fl;
    fl.branches = {branch({"3/2", "7/4"})};
    CHECK(milnor_from_branch_data(fl) == 16);

    CurveSpec b25;
    b25.branches = {branch({"5/2"})};
    CHECK(milnor_from_branch_data(b25) == 4);

    // tacnode: two smooth branches with contact 2
    CHECK(milnor_from_branch_data(two_branch(branch({}), branch({}), 2)) == 3);

    // two transverse cusps
    CHECK(milnor_from_branch_data(two_branch(branch({"3/2"}), branch({"3/2"}), 4)) == 11);

    // infeasible contact surfaces the resolution error
    CHECK_THROWS_AS(milnor_from_branch_data(two_branch(branch({"3/2"}), branch({"3/2"}), 5)),
                    ContactError);
}

TEST_CASE("branch-data and jet oracles agree") {
    struct Case {
        CurveSpec spec;
        const char* poly;
    };
    std::vector<Case> cases;
    cases.push_back({two_branch(branch({}), branch({}), 1), "x*y"});
    CurveSpec cusp;
    cusp.branches = {branch({"3/2"})};
    cases.push_back({cusp, "y^2-x^3"});
    cases.push_back({two_branch(branch({}), branch({}), 2), "y^2-x^4"});
    CurveSpec fl;
    fl.branches = {branch({"3/2", "7/4"})};
    cases.push_back({fl, "(y^2-x^3)^2-4*x^5*y-x^7"});
    CurveSpec b25;
    b25.branches = {branch({"5/2"})};
    cases.push_back({b25, "y^2-x^5"});
    // node with a vertical tangent pair: y^2 - x^2 has two smooth branches, contact 1
    cases.push_back({two_branch(branch({}), branch({}), 1), "y^2-x^2"});

    for (auto& [spec, poly] : cases) {
        CAPTURE(poly);
        CHECK(milnor_from_branch_data(spec) == milnor_number_poly(parse_poly2(poly)));
    }
}

TEST_CASE("curve json round trip") {
    Json j;
    j["branches"] = Json::array({Json{{"exponents", Json::array({"3/2", "7/4"})}}});
    j["intersections"] = Json::array();
    auto c = curve_from_json(Json{{"branches", j["branches"]}});
    CHECK(c.num_branches() == 1);
    CHECK(c.branches[0].exponents == std::vector<Rat>{Rat(3, 2), Rat(7, 4)});

    Json full;
    full["branches"] = Json::array({
        Json{{"exponents", Json::array({"3/2"})}},
        Json{{"exponents", Json::array()}},
    });
    full["intersections"] = Json::array({Json::array({0, 3}), Json::array({3, 0})});
    full["polynomial"] = "(y^2-x^3)*y";
    auto c2 = curve_from_json(full);
    CHECK(curve_to_json(c2) == full);

    Json bad = full;
    bad["polynomial"] = "(y^2-x^3)^2";
    CHECK_THROWS_AS(curve_from_json(bad), std::invalid_argument);
}
