#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "pcs/bar.hpp"
#include "pcs/dga.hpp"
#include "pcs/hodge.hpp"

using namespace pcs;

namespace {

/// Disk + triangle, the smallest fiber graph with a cycle.
CentralFiberGraph one_cycle_fiber() {
    CentralFiberGraph cf;
    cf.d = 4;
    cf.graph.vertices = {{0, 0, VertexKind::Disk, 0},
                         {1, 0, VertexKind::Compact, -1},
                         {2, 0, VertexKind::Compact, -1},
                         {3, 0, VertexKind::Compact, -1}};
    cf.graph.edges = {{0, 0, 1}, {1, 1, 2}, {2, 2, 3}, {3, 1, 3}};
    return cf;
}

DgaElement surf_el(int v, const std::string& name, int degree = 1) {
    DgaElement el;
    el.degree = degree;
    el.surf[v][name] = Scalar(1);
    return el;
}

DgaElement dxi_el(int e) {
    DgaElement el;
    el.degree = 1;
    EdgeOne prof;
    prof.H = XiU(1);
    el.one[e] = prof;
    return el;
}

DgaElement global_const(const DgaModel& m, const Scalar& c) {
    DgaElement el;
    el.degree = 0;
    for (const auto& vx : m.fiber.graph.vertices) el.surf[vx.id]["1"] = c;
    for (const auto& ed : m.fiber.graph.edges) el.p[ed.id] = XiU(c);
    return el;
}

DgaElement vertex_const(const DgaModel& m, int v) {
    DgaElement el;
    el.degree = 0;
    el.surf[v]["1"] = Scalar(1);
    const auto& g = m.fiber.graph;
    for (int e : g.incident_edges(v))
        el.p[e] = (g.edges[static_cast<size_t>(e)].k == v) ? XiU(1) - XiU::xi() : XiU::xi();
    return el;
}

DgaElement bump(int e, const XiU& q) {
    DgaElement el;
    el.degree = 0;
    el.p[e] = XiU::xi() * (XiU(1) - XiU::xi()) * q;
    return el;
}

bool bar_equal(const BarTensor& a, const BarTensor& b) {
    return bar_add(a, bar_scale(Scalar(-1), b)).is_zero();
}

/// The chain model with the genus-1 far end and its declared correction
/// forms, as assembled by the scenario.
OmegaReport chain_report(int segments = 7, long d_scale = 156, long mk_scale = 24) {
    SymbolTable::declare("rho");
    return scenario_omega(make_chain_fiber(segments), Scalar::symbol("rho"), d_scale, mk_scale);
}

}  // namespace

TEST_CASE("tensor containers") {
    DgaModel m = make_model(one_cycle_fiber());
    BarTensor t = bar_term(2, Scalar(3), {dxi_el(3), dxi_el(1)});
    CHECK_FALSE(t.is_zero());
    CHECK(bar_add(t, bar_scale(Scalar(-1), t)).is_zero());
    CHECK(bar_scale(Scalar(), t).is_zero());

    BarTensor sum = bar_add(t, bar_term(2, Scalar(-3), {dxi_el(3), dxi_el(1)}));
    CHECK(sum.is_zero());
    CHECK(sum.terms.empty());

    BarTensor c = bar_term(1, Scalar(5), {});
    CHECK_FALSE(c.is_zero());
    CHECK(c.constant == Scalar(5));

    CHECK_THROWS_WITH_AS(bar_term(1, Scalar(1), {dxi_el(0), dxi_el(1)}),
                         "tensor length exceeds the bound", std::invalid_argument);

    // Distinct factor lists representing the same multilinear content.
    BarTensor split = bar_add(bar_term(1, Scalar(1), {dxi_el(0)}),
                              bar_term(1, Scalar(1), {dxi_el(1)}));
    DgaElement both = dga_add(dxi_el(0), dxi_el(1));
    CHECK(bar_equal(split, bar_term(1, Scalar(1), {both})));
    (void)m;
}

TEST_CASE("chen differential") {
    OmegaReport rep = chain_report();
    const DgaModel& m = rep.model;
    DgaElement om = surf_el(7, "omega1");
    DgaElement omb = surf_el(7, "omegabar1");

    // Closed single factors and tensors of closed factors with vanishing
    // wedges have zero differential on the nose.
    CHECK(chen_differential(m, bar_term(1, Scalar(1), {om})).is_zero());
    CHECK(chen_differential(m, bar_term(2, Scalar(1), {dxi_el(0), dxi_el(5)})).is_zero());

    // The pair rule inserts the wedge of the neighbours.
    BarTensor pair_diff = chen_differential(m, bar_term(2, Scalar(1), {om, omb}));
    CHECK(bar_equal(pair_diff, bar_term(1, Scalar(1), {surf_el(7, "vol", 2)})));

    // The slot rule inserts the differential without signs.
    DgaElement mu = surf_el(7, "mu");
    BarTensor mu_diff = chen_differential(m, bar_term(2, Scalar(1), {om, mu}));
    BarTensor expected = bar_add(bar_term(2, Scalar(-1), {om, surf_el(7, "vol", 2)}),
                                 bar_term(1, Scalar(1), {wedge(m, om, mu)}));
    CHECK(bar_equal(mu_diff, expected));
}

TEST_CASE("normal form rewriting") {
    OmegaReport rep = chain_report();
    const DgaModel& m = rep.model;
    DgaElement om = surf_el(7, "omega1");

    // An exact length-1 tensor drops.
    DgaElement h = bump(3, XiU(1) + XiU::u());
    CHECK(reduce_normal_form(m, bar_term(1, Scalar(1), {d(m, h)})).is_zero());

    // A trailing exact slot trades for the value of its primitive.
    DgaElement b7 = vertex_const(m, 7);
    BarTensor nf = reduce_normal_form(m, bar_term(2, Scalar(1), {om, d(m, b7)}));
    CHECK(bar_equal(nf, bar_term(1, Scalar(-1), {om})));

    // A leading exact slot trades with a plus sign.
    BarTensor nf_front = reduce_normal_form(m, bar_term(2, Scalar(1), {d(m, b7), om}));
    CHECK(bar_equal(nf_front, bar_term(1, Scalar(1), {om})));

    // Already-normal tensors pass through unchanged and the map is
    // idempotent and linear.
    BarTensor keep = bar_term(2, Scalar(2), {om, surf_el(7, "omegabar1")});
    CHECK(bar_equal(reduce_normal_form(m, keep), keep));
    BarTensor mixed = bar_add(keep, bar_term(2, Scalar(5), {om, d(m, b7)}));
    BarTensor once = reduce_normal_form(m, mixed);
    CHECK(bar_equal(reduce_normal_form(m, once), once));
    CHECK(bar_equal(once, bar_add(keep, bar_term(1, Scalar(-5), {om}))));

    // Tree-edge dxi classes are exact, cycle-edge ones survive.
    DgaModel cyc = make_model(one_cycle_fiber());
    CHECK(reduce_normal_form(cyc, bar_term(1, Scalar(1), {dxi_el(0)})).is_zero());
    BarTensor loop = bar_term(1, Scalar(1), {dxi_el(3)});
    CHECK(bar_equal(reduce_normal_form(cyc, loop), loop));
}

TEST_CASE("relation generators vanish in the quotient") {
    OmegaReport rep = chain_report();
    const DgaModel& m = rep.model;
    std::mt19937_64 rng(11u);

    std::vector<DgaElement> pool = {surf_el(7, "omega1"), surf_el(7, "omegabar1"),
                                    surf_el(3, "eta"),    dxi_el(2),
                                    make_theta(m, 4, true), make_theta(m, 0, true)};
    auto random_f = [&](int which) {
        switch (which % 4) {
            case 0: return global_const(m, Scalar(3));
            case 1: return vertex_const(m, 2);
            case 2: return bump(5, XiU(2) + XiU::xi() * XiU::u());
            default:
                return dga_add(vertex_const(m, 6), dga_scale(Scalar(-2), bump(1, XiU::u())));
        }
    };

    std::uniform_int_distribution<int> len(1, 3);
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    for (int iter = 0; iter < 24; ++iter) {
        int r = len(rng);
        std::vector<DgaElement> u;
        for (int i = 0; i < r; ++i) u.push_back(pool[pick(rng)]);
        std::uniform_int_distribution<int> pos(1, r);
        int i = pos(rng);
        BarTensor rel = relation_element(m, u, random_f(iter), i);
        CHECK(reduce_normal_form(m, rel).is_zero());
    }

    CHECK_THROWS_WITH_AS(relation_element(m, pool, surf_el(7, "omega1"), 1),
                         "relation multiplier must have degree 0", std::invalid_argument);
    CHECK_THROWS_WITH_AS(relation_element(m, pool, global_const(m, Scalar(1)), 9),
                         "relation position out of range", std::invalid_argument);
}

TEST_CASE("closedness detection") {
    OmegaReport rep = chain_report();
    const DgaModel& m = rep.model;
    DgaElement om = surf_el(7, "omega1");
    DgaElement omb = surf_el(7, "omegabar1");

    // Exact forms are closed, the bare genus pair is not, the corrected
    // extension is.
    CHECK(is_chen_closed(m, bar_term(1, Scalar(1), {d(m, bump(2, XiU(1)))})));
    BarTensor bare = bar_term(2, Scalar(1), {om, omb});
    CHECK_FALSE(is_chen_closed(m, bare));
    BarTensor ext = extend_closed_family(m, {om, omb});
    CHECK(is_chen_closed(m, ext));

    // Adding relation generators changes neither verdict.
    BarTensor rel = relation_element(m, {om, omb}, vertex_const(m, 4), 2);
    CHECK(is_chen_closed(m, bar_add(ext, bar_scale(Scalar(7), rel))));
    CHECK_FALSE(is_chen_closed(m, bar_add(bare, rel)));
}

TEST_CASE("closed families extend") {
    OmegaReport rep = chain_report();
    const DgaModel& m = rep.model;
    DgaElement om = surf_el(7, "omega1");
    DgaElement omb = surf_el(7, "omegabar1");

    // Length one: the family is its own extension.
    CHECK(bar_equal(extend_closed_family(m, {om}), bar_term(1, Scalar(1), {om})));

    // Vanishing wedges need no corrections.
    DgaModel cyc = make_model(one_cycle_fiber());
    BarTensor plain = extend_closed_family(cyc, {dxi_el(3), dxi_el(3)});
    CHECK(bar_equal(plain, bar_term(2, Scalar(1), {dxi_el(3), dxi_el(3)})));
    CHECK(is_chen_closed(cyc, plain));

    // The genus pair acquires exactly one correction term.
    BarTensor ext = extend_closed_family(m, {om, omb});
    REQUIRE(ext.terms.size() == 2);
    for (const auto& [c, fs] : ext.terms) {
        if (fs.size() != 1) continue;
        CHECK(d(m, fs[0]) == dga_scale(Scalar(-1), wedge(m, om, omb)));
        CHECK(compat_check(m, fs[0]).empty());
    }

    CHECK_THROWS_WITH_AS(extend_closed_family(m, {}), "family must not be empty",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(extend_closed_family(m, {surf_el(7, "mu")}),
                         "family members must be closed", std::invalid_argument);
    CHECK_THROWS_WITH_AS(extend_closed_family(m, {global_const(m, Scalar(1))}),
                         "family members must be 1-forms", std::invalid_argument);

    // Without a declared primitive for the wedge the extension fails.
    DgaModel plain_chain = make_model(make_chain_fiber(4));
    declare_two_form(plain_chain, 4, "vol", 2, 1);
    declare_wedge(plain_chain, 4, "omega1", "omegabar1", {{"vol", Scalar(1)}});
    CHECK_THROWS_WITH_AS(
        extend_closed_family(plain_chain, {surf_el(4, "omega1"), surf_el(4, "omegabar1")}),
        "primitive unavailable: phi[1..2]", std::invalid_argument);
}

TEST_CASE("the chain scenario") {
    OmegaReport rep = chain_report();
    const DgaModel& m = rep.model;
    Scalar rho = Scalar::symbol("rho");

    CHECK(rep.omega.terms.size() == 2);
    CHECK(is_chen_closed(m, rep.omega));
    CHECK(rep.n_coeff == Scalar(7) * rho);
    CHECK(rep.m_coeff == rho);
    CHECK(rep.l_coeff == Scalar(Rat(1, 312)) * rho);
    CHECK(rep.n_class.terms.size() == 1);
    CHECK(rep.m_class.terms.size() == 1);
    CHECK_FALSE(rep.l_class.is_zero());

    // The twisted combination scales with the chain length.
    OmegaReport shorter = chain_report(3);
    CHECK(shorter.n_coeff == Scalar(3) * rho);
    CHECK(shorter.m_coeff == rho);

    // Degenerate inputs are rejected.
    CHECK_THROWS_WITH_AS(scenario_omega(make_chain_fiber(7), Scalar(), 156, 24),
                         "degenerate input: rho must be nonzero", std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        scenario_omega(one_cycle_fiber(), rho, 156, 24),
        "degenerate input: expected a disk-ended chain with a genus carrier at the far end",
        std::invalid_argument);
    CHECK_THROWS_WITH_AS(scenario_omega(make_chain_fiber(7), rho, 168, 24),
                         "degenerate input: the twisted combination vanishes",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(scenario_omega(make_chain_fiber(7), rho, 0, 24),
                         "degenerate input: the scales must be positive", std::invalid_argument);
}

TEST_CASE("filtration levels of tensors") {
    OmegaReport rep = chain_report();
    const DgaModel& m = rep.model;
    DgaElement om = surf_el(7, "omega1");
    DgaElement omb = surf_el(7, "omegabar1");

    BarLevels pair = bar_filtrations(m, bar_term(2, Scalar(1), {om, omb}));
    CHECK(pair.w == 2);
    CHECK(pair.f == 1);
    CHECK(pair.f_top == 1);

    BarLevels theta = bar_filtrations(m, bar_term(1, Scalar(1), {make_theta(m, 2, true)}));
    CHECK(theta.w == 2);
    CHECK(theta.f == 1);

    DgaModel cyc = make_model(one_cycle_fiber());
    BarLevels loop = bar_filtrations(cyc, bar_term(1, Scalar(1), {dxi_el(3)}));
    CHECK(loop.w == 0);
    CHECK(loop.f == 0);

    BarLevels full = bar_filtrations(m, rep.omega);
    CHECK(full.w == 3);
    CHECK(full.f == 1);
    CHECK(full.f_top == 2);

    CHECK(bar_filtrations(m, bar_scale(Scalar(), rep.omega)).w == 0);

    // Levels agree with the weight grading of the cohomology basis.
    for (const auto& cls : h1_basis(cyc)) {
        BarLevels lv = bar_filtrations(cyc, bar_term(1, Scalar(1), {cls.rep}));
        CHECK(lv.w == cls.weight);
    }
}

TEST_CASE("slotwise operators") {
    OmegaReport rep = chain_report();
    const DgaModel& m = rep.model;
    SymbolTable::declare("loglam");
    Scalar loglam = Scalar::symbol("loglam");

    DgaElement th0 = make_theta(m, 0, true);
    DgaElement th4 = make_theta(m, 4, true);
    BarTensor tt = bar_term(2, Scalar(1), {th0, th4});

    // Leibniz expansion, with a nonzero square through the cross terms.
    BarTensor once = apply_N_bar(m, tt);
    BarTensor expected = bar_add(bar_term(2, Scalar(1), {apply_N(m, th0), th4}),
                                 bar_term(2, Scalar(1), {th0, apply_N(m, th4)}));
    CHECK(bar_equal(once, expected));
    BarTensor twice = apply_N_bar(m, once);
    CHECK_FALSE(twice.is_zero());
    CHECK(apply_N_bar(m, twice).is_zero());

    // N and the branch operators commute.
    BarTensor nm = apply_N_bar(m, apply_M_bar(m, tt, 0));
    BarTensor mn = apply_M_bar(m, apply_N_bar(m, tt), 0);
    CHECK(bar_equal(nm, mn));

    // The one-parameter action is the exponential of the slot sum and acts
    // slotwise.
    BarTensor flowed = lambda_n_bar(m, tt, loglam);
    BarTensor series = bar_add(tt, bar_add(bar_scale(loglam, once),
                                           bar_scale(loglam * loglam * Rat(1, 2), twice)));
    CHECK(bar_equal(flowed, series));
    CHECK(lambda_n(m, th0, loglam) == dga_add(th0, dga_scale(loglam, apply_N(m, th0))));

    // The N image of the scenario class reduces like the class itself.
    BarTensor n_again = reduce_normal_form(m, apply_N_bar(m, apply_N_bar(m, rep.omega)));
    CHECK(n_again.is_zero());
}

TEST_CASE("power series connections") {
    OmegaReport rep = chain_report();
    const DgaModel& m = rep.model;
    DgaElement om = surf_el(7, "omega1");
    DgaElement omb = surf_el(7, "omegabar1");

    // Extract the correction form of the genus pair.
    BarTensor ext = extend_closed_family(m, {om, omb});
    DgaElement psi;
    for (const auto& [c, fs] : ext.terms)
        if (fs.size() == 1) psi = fs[0];
    REQUIRE_FALSE(psi.is_zero());

    Fpsc conn;
    conn.length = 2;
    conn.words[{1}] = om;
    conn.words[{2}] = omb;
    conn.words[{1, 2}] = psi;
    conn.words[{2, 1}] = dga_scale(Scalar(-1), psi);
    CHECK(fpsc_flat(fpsc_curvature(m, conn)));

    // Dropping the reversed word leaves curvature in that word.
    conn.words.erase({2, 1});
    Fpsc kappa = fpsc_curvature(m, conn);
    CHECK_FALSE(fpsc_flat(kappa));
    CHECK(kappa.words.count({2, 1}) == 1);
    CHECK(kappa.words.count({1, 2}) == 0);

    // A single non-closed coefficient is curved in its own word.
    Fpsc curved;
    curved.length = 1;
    curved.words[{1}] = surf_el(7, "mu");
    Fpsc kc = fpsc_curvature(m, curved);
    CHECK_FALSE(fpsc_flat(kc));
    CHECK(kc.words.count({1}) == 1);

    // Closed coefficients with vanishing wedges are flat.
    DgaModel cyc = make_model(one_cycle_fiber());
    Fpsc flat;
    flat.length = 2;
    flat.words[{1}] = dxi_el(3);
    flat.words[{2}] = dxi_el(3);
    CHECK(fpsc_flat(fpsc_curvature(cyc, flat)));

    CHECK_THROWS_WITH_AS(fpsc_curvature(m, [] {
                             Fpsc bad;
                             bad.length = 1;
                             bad.words[{1, 2}] = DgaElement{};
                             return bad;
                         }()),
                         "word exceeds the length bound", std::invalid_argument);
}

TEST_CASE("serialization round trips") {
    OmegaReport rep = chain_report();
    const DgaModel& m = rep.model;

    Json j = bar_to_json(rep.omega);
    BarTensor back = bar_from_json(j);
    CHECK(bar_equal(back, rep.omega));
    CHECK(j.at("s") == 3);

    BarTensor c = bar_term(1, Scalar(Rat(5, 3)), {});
    CHECK(bar_from_json(bar_to_json(c)).constant == Scalar(Rat(5, 3)));

    Fpsc conn;
    conn.length = 2;
    conn.words[{1}] = surf_el(7, "omega1");
    conn.words[{1, 2}] = surf_el(7, "mu");
    Fpsc fback = fpsc_from_json(fpsc_to_json(conn));
    CHECK(fback.length == 2);
    REQUIRE(fback.words.size() == 2);
    CHECK(fback.words.at({1}) == conn.words.at({1}));
    CHECK(fback.words.at({1, 2}) == conn.words.at({1, 2}));
    (void)m;
}
