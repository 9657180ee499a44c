#include "pcs/bar.hpp"

#include <algorithm>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace pcs {

namespace {

// Coordinate of one monomial of a DgaElement: (0, vertex, name, 0, 0, 0) for
// surface entries, (1, edge, "", part, xi deg, u deg) for edge entries with
// part codes K=0, L=1, H=2, R=3, S=4, T=5, P=6, Q=7.
using CoordKey = std::tuple<int, int, std::string, int, int, int>;
using CoordMap = std::map<CoordKey, Scalar>;

void add_coord(CoordMap& out, CoordKey k, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = out.find(k);
    if (it == out.end()) {
        out.emplace(std::move(k), c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) out.erase(it);
}

void add_poly_coords(CoordMap& out, int e, int part, const XiU& p) {
    for (const auto& [deg, c] : p.terms())
        add_coord(out, {1, e, "", part, deg.first, deg.second}, c);
}

CoordMap element_coords(const DgaElement& el) {
    CoordMap out;
    for (const auto& [v, gens] : el.surf)
        for (const auto& [name, c] : gens) add_coord(out, {0, v, name, 0, 0, 0}, c);
    for (const auto& [e, p] : el.p) add_poly_coords(out, e, 6, p);
    for (const auto& [e, o] : el.one) {
        add_poly_coords(out, e, 0, o.K);
        add_poly_coords(out, e, 1, o.L);
        add_poly_coords(out, e, 2, o.H);
    }
    for (const auto& [e, t] : el.two) {
        add_poly_coords(out, e, 3, t.R);
        add_poly_coords(out, e, 4, t.S);
        add_poly_coords(out, e, 5, t.T);
    }
    for (const auto& [e, q] : el.three) add_poly_coords(out, e, 7, q);
    return out;
}

// Full multilinear expansion over the coordinate monomials; the canonical
// zero test for tensors whose summands share factors only partially.
std::map<std::vector<CoordKey>, Scalar> multilinear(const BarTensor& t) {
    std::map<std::vector<CoordKey>, Scalar> out;
    if (!t.constant.is_zero()) out[{}] = t.constant;
    for (const auto& [c, factors] : t.terms) {
        if (c.is_zero()) continue;
        if (factors.empty()) {
            auto it = out.find({});
            if (it == out.end()) out.emplace(std::vector<CoordKey>{}, c);
            else it->second += c;
            continue;
        }
        std::vector<std::vector<std::pair<CoordKey, Scalar>>> fc;
        bool zero = false;
        for (const auto& f : factors) {
            CoordMap cm = element_coords(f);
            if (cm.empty()) {
                zero = true;
                break;
            }
            fc.emplace_back(cm.begin(), cm.end());
        }
        if (zero) continue;
        std::vector<size_t> idx(fc.size(), 0);
        while (true) {
            Scalar prod = c;
            std::vector<CoordKey> key;
            key.reserve(fc.size());
            for (size_t i = 0; i < fc.size(); ++i) {
                prod *= fc[i][idx[i]].second;
                key.push_back(fc[i][idx[i]].first);
            }
            auto it = out.find(key);
            if (it == out.end()) out.emplace(std::move(key), prod);
            else it->second += prod;
            size_t i = 0;
            for (; i < idx.size(); ++i) {
                if (++idx[i] < fc[i].size()) break;
                idx[i] = 0;
            }
            if (i == idx.size()) break;
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

std::string factor_key(const std::vector<DgaElement>& factors) {
    std::string key;
    for (const auto& f : factors) {
        key += dga_element_to_json(f).dump();
        key += '\n';
    }
    return key;
}

// Merge summands with identical factor lists and drop zeros.
void merge_terms(BarTensor& t) {
    std::map<std::string, std::pair<Scalar, std::vector<DgaElement>>> acc;
    for (auto& [c, fs] : t.terms) {
        if (c.is_zero()) continue;
        bool zero = false;
        for (const auto& f : fs)
            if (f.is_zero()) {
                zero = true;
                break;
            }
        if (zero) continue;
        if (fs.empty()) {
            t.constant += c;
            continue;
        }
        std::string key = factor_key(fs);
        auto it = acc.find(key);
        if (it == acc.end()) acc.emplace(std::move(key), std::make_pair(c, std::move(fs)));
        else it->second.first += c;
    }
    t.terms.clear();
    for (auto& [key, term] : acc)
        if (!term.first.is_zero()) t.terms.emplace_back(std::move(term.first), std::move(term.second));
}

Scalar surf_coeff(const DgaElement& el, int v, const std::string& name) {
    auto vit = el.surf.find(v);
    if (vit == el.surf.end()) return Scalar();
    auto git = vit->second.find(name);
    return git == vit->second.end() ? Scalar() : git->second;
}

// Coefficient of the constant dxi term on edge e.
Scalar h_const_coeff(const DgaElement& el, int e) {
    auto it = el.one.find(e);
    if (it == el.one.end()) return Scalar();
    auto t = it->second.H.terms().find({0, 0});
    return t == it->second.H.terms().end() ? Scalar() : t->second;
}

DgaElement global_constant(const DgaModel& m, const Scalar& c) {
    DgaElement out;
    out.degree = 0;
    if (c.is_zero()) return out;
    for (const auto& vx : m.fiber.graph.vertices) out.surf[vx.id]["1"] = c;
    for (const auto& ed : m.fiber.graph.edges) out.p[ed.id] = XiU(c);
    return out;
}

// The vertex constant extended by linear interpolation along every incident
// edge; these sum to the global constant.
DgaElement vertex_constant(const DgaModel& m, int v) {
    DgaElement out;
    out.degree = 0;
    out.surf[v]["1"] = Scalar(1);
    const auto& g = m.fiber.graph;
    XiU one_minus_xi = XiU(1) - XiU::xi();
    for (int e : g.incident_edges(v))
        out.p[e] = (g.edges[static_cast<size_t>(e)].k == v) ? one_minus_xi : XiU::xi();
    return out;
}

// A declared function extended by interpolating its puncture values to zero
// at the far end of each incident edge.
DgaElement function_extension(const DgaModel& m, int v, const std::string& name) {
    const auto& gen = m.comp(v).gens.at(name);
    DgaElement out;
    out.degree = 0;
    out.surf[v][name] = Scalar(1);
    const auto& g = m.fiber.graph;
    XiU one_minus_xi = XiU(1) - XiU::xi();
    for (const auto& [e, val] : gen.values) {
        if (val.is_zero()) continue;
        XiU ramp = (g.edges[static_cast<size_t>(e)].k == v) ? one_minus_xi : XiU::xi();
        ramp *= val;
        out.p[e] = ramp;
    }
    return out;
}

bool try_inverse(const Scalar& c, Scalar& inv) {
    try {
        inv = c.inverse();
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

// el = d(h) + remainder, with h of augmentation zero and the remainder in a
// fixed complement of the exact 1-forms: each edge profile is flattened to
// its xi average, surface parts are reduced against the span of the declared
// function differentials, and the leftover constant dxi profiles against the
// vertex constants. Idempotent on its own remainders.
std::pair<DgaElement, DgaElement> split_exact(const DgaModel& m, const DgaElement& el) {
    DgaElement h;
    h.degree = 0;
    if (el.degree != 1) return {h, el};
    DgaElement rem = el;
    auto take = [&](const DgaElement& gen, const Scalar& c) {
        if (c.is_zero()) return;
        h = dga_add(h, dga_scale(c, gen));
        rem = dga_add(rem, dga_scale(-c, d(m, gen)));
    };

    // Edge profiles: subtract d of the unique bump vanishing at both ends
    // whose dxi part carries the xi-dependent piece of H.
    for (const auto& [e, part] : el.one) {
        XiU anti = part.H.integrate_xi();
        XiU q = anti - XiU::xi() * anti.at_xi(1);
        if (q.is_zero()) continue;
        DgaElement bump;
        bump.degree = 0;
        bump.p[e] = q;
        take(bump, Scalar(1));
    }

    // Surface parts against the function differentials, one component at a
    // time; the eliminations also adjust the constant dxi profiles through
    // the interpolating extensions.
    for (const auto& cm : m.comps) {
        struct Row {
            std::map<std::string, Scalar> img;
            std::map<std::string, Scalar> combo;
            std::string pivot;
        };
        std::vector<Row> rows;
        for (const auto& [name, gen] : cm.gens) {
            if (gen.degree != 0 || gen.diff.empty()) continue;
            Row r;
            r.img = gen.diff;
            r.combo[name] = Scalar(1);
            for (const auto& prev : rows) {
                auto it = r.img.find(prev.pivot);
                if (it == r.img.end() || it->second.is_zero()) continue;
                Scalar c = it->second;
                for (const auto& [n, pc] : prev.img) r.img[n] -= c * pc;
                for (const auto& [n, pc] : prev.combo) r.combo[n] -= c * pc;
            }
            std::string pivot;
            Scalar inv;
            for (const auto& [n, c] : r.img) {
                if (c.is_zero()) continue;
                if (try_inverse(c, inv)) {
                    pivot = n;
                    break;
                }
            }
            if (pivot.empty()) continue;
            for (auto& [n, c] : r.img) c *= inv;
            for (auto& [n, c] : r.combo) c *= inv;
            r.pivot = pivot;
            for (auto& prev : rows) {
                auto it = prev.img.find(pivot);
                if (it == prev.img.end() || it->second.is_zero()) continue;
                Scalar c = it->second;
                for (const auto& [n, rc] : r.img) prev.img[n] -= c * rc;
                for (const auto& [n, rc] : r.combo) prev.combo[n] -= c * rc;
            }
            rows.push_back(std::move(r));
        }
        for (const auto& row : rows) {
            Scalar c = surf_coeff(rem, cm.vertex, row.pivot);
            if (c.is_zero()) continue;
            for (const auto& [name, cg] : row.combo) {
                if (cg.is_zero()) continue;
                take(function_extension(m, cm.vertex, name), c * cg);
            }
        }
    }

    // Constant dxi profiles against the vertex constants and the locally
    // constant declared functions.
    {
        struct Row {
            std::map<int, Scalar> img;
            DgaElement combo;
            int pivot = -1;
        };
        std::vector<DgaElement> family;
        for (const auto& vx : m.fiber.graph.vertices) family.push_back(vertex_constant(m, vx.id));
        for (const auto& cm : m.comps)
            for (const auto& [name, gen] : cm.gens)
                if (gen.degree == 0 && gen.diff.empty())
                    family.push_back(function_extension(m, cm.vertex, name));
        std::vector<Row> rows;
        for (const auto& gen : family) {
            Row r;
            r.combo = gen;
            DgaElement img = d(m, gen);
            for (const auto& [e, part] : img.one) {
                Scalar c = h_const_coeff(img, e);
                if (!c.is_zero()) r.img[e] = c;
            }
            for (const auto& prev : rows) {
                auto it = r.img.find(prev.pivot);
                if (it == r.img.end() || it->second.is_zero()) continue;
                Scalar c = it->second;
                for (const auto& [e, pc] : prev.img) r.img[e] -= c * pc;
                r.combo = dga_add(r.combo, dga_scale(-c, prev.combo));
            }
            int pivot = -1;
            Scalar inv;
            for (const auto& [e, c] : r.img) {
                if (c.is_zero()) continue;
                if (try_inverse(c, inv)) {
                    pivot = e;
                    break;
                }
            }
            if (pivot < 0) continue;
            for (auto& [e, c] : r.img) c *= inv;
            r.combo = dga_scale(inv, r.combo);
            r.pivot = pivot;
            for (auto& prev : rows) {
                auto it = prev.img.find(pivot);
                if (it == prev.img.end() || it->second.is_zero()) continue;
                Scalar c = it->second;
                for (const auto& [e, rc] : r.img) prev.img[e] -= c * rc;
                prev.combo = dga_add(prev.combo, dga_scale(-c, r.combo));
            }
            rows.push_back(std::move(r));
        }
        for (const auto& row : rows) {
            Scalar c = h_const_coeff(rem, row.pivot);
            if (!c.is_zero()) take(row.combo, c);
        }
    }

    if (!h.is_zero()) {
        Scalar a = augmentation(m, h);
        if (!a.is_zero()) h = dga_add(h, global_constant(m, -a));
    }
    return {h, rem};
}

// Reduced class on a single generator; anything else in the expansion is an
// internal error of the caller's scenario.
Scalar single_gen_coeff(const BarTensor& reduced, int v, const std::string& name,
                        const std::string& what) {
    CoordKey want{0, v, name, 0, 0, 0};
    Scalar out;
    for (const auto& [key, c] : multilinear(reduced)) {
        if (key.size() == 1 && key[0] == want) out = c;
        else throw std::logic_error("internal error: unexpected term in " + what);
    }
    return out;
}

DgaElement gen_element(const DgaModel& m, int v, const std::string& name) {
    DgaElement el;
    el.degree = m.comp(v).gens.at(name).degree;
    el.surf[v][name] = Scalar(1);
    return el;
}

// Solves d(psi) = target in the compatible complex: surface coefficients on
// the declared 1-form generators plus one balanced edge profile per edge.
DgaElement solve_correction(const DgaModel& m, const DgaElement& target, const std::string& what) {
    if (!target.two.empty() || !target.three.empty())
        throw std::invalid_argument("primitive unavailable: " + what);

    std::vector<std::pair<int, std::string>> gvars;
    for (const auto& cm : m.comps)
        for (const auto& [name, gen] : cm.gens)
            if (gen.degree == 1) gvars.emplace_back(cm.vertex, name);
    const size_t n_gen = gvars.size();
    const size_t n_edge = m.fiber.graph.edges.size();
    const size_t n_vars = n_gen + n_edge;

    struct Eq {
        std::map<size_t, Scalar> lhs;
        Scalar rhs;
    };
    std::vector<Eq> eqs;

    // One row per surface 2-form coordinate.
    std::map<std::pair<int, std::string>, Eq> srows;
    for (size_t gi = 0; gi < n_gen; ++gi) {
        const auto& gen = m.comp(gvars[gi].first).gens.at(gvars[gi].second);
        for (const auto& [dn, dc] : gen.diff)
            if (!dc.is_zero()) srows[{gvars[gi].first, dn}].lhs[gi] += dc;
    }
    for (const auto& [v, names] : target.surf)
        for (const auto& [n, c] : names) srows[{v, n}].rhs = c;
    for (auto& [coord, eq] : srows) eqs.push_back(std::move(eq));

    // Two rows per edge: the residue sums at either end against the balanced
    // profile coefficient.
    for (const auto& ed : m.fiber.graph.edges) {
        Eq at_k, at_l;
        for (size_t gi = 0; gi < n_gen; ++gi) {
            const auto& gen = m.comp(gvars[gi].first).gens.at(gvars[gi].second);
            auto rit = gen.residues.find(ed.id);
            if (rit == gen.residues.end() || rit->second.is_zero()) continue;
            if (gvars[gi].first == ed.k) at_k.lhs[gi] += rit->second;
            if (gvars[gi].first == ed.l) at_l.lhs[gi] += rit->second;
        }
        at_k.lhs[n_gen + static_cast<size_t>(ed.id)] += Scalar(-1);
        at_l.lhs[n_gen + static_cast<size_t>(ed.id)] += Scalar(1);
        eqs.push_back(std::move(at_k));
        eqs.push_back(std::move(at_l));
    }
    for (auto& eq : eqs)
        for (auto it = eq.lhs.begin(); it != eq.lhs.end();)
            it = it->second.is_zero() ? eq.lhs.erase(it) : std::next(it);

    std::map<size_t, Eq> pivoted;
    for (size_t var = 0; var < n_vars; ++var) {
        size_t found = eqs.size();
        Scalar inv;
        for (size_t r = 0; r < eqs.size(); ++r) {
            auto it = eqs[r].lhs.find(var);
            if (it == eqs[r].lhs.end() || it->second.is_zero()) continue;
            if (try_inverse(it->second, inv)) {
                found = r;
                break;
            }
        }
        if (found == eqs.size()) continue;
        Eq piv = std::move(eqs[found]);
        eqs.erase(eqs.begin() + static_cast<long>(found));
        for (auto& [w, c] : piv.lhs) c *= inv;
        piv.rhs *= inv;
        auto eliminate = [&](Eq& eq) {
            auto it = eq.lhs.find(var);
            if (it == eq.lhs.end() || it->second.is_zero()) return;
            Scalar c = it->second;
            for (const auto& [w, pc] : piv.lhs) {
                eq.lhs[w] -= c * pc;
                if (eq.lhs[w].is_zero()) eq.lhs.erase(w);
            }
            eq.rhs -= c * piv.rhs;
        };
        for (auto& eq : eqs) eliminate(eq);
        for (auto& [w, pe] : pivoted) eliminate(pe);
        pivoted.emplace(var, std::move(piv));
    }
    for (const auto& eq : eqs)
        if (!eq.rhs.is_zero()) throw std::invalid_argument("primitive unavailable: " + what);

    std::vector<Scalar> sol(n_vars);
    for (const auto& [var, eq] : pivoted) sol[var] = eq.rhs;

    DgaElement psi;
    psi.degree = 1;
    for (size_t gi = 0; gi < n_gen; ++gi)
        if (!sol[gi].is_zero()) psi.surf[gvars[gi].first][gvars[gi].second] = sol[gi];
    XiU one_minus_xi = XiU(1) - XiU::xi();
    for (size_t e = 0; e < n_edge; ++e) {
        const Scalar& c = sol[n_gen + e];
        if (c.is_zero()) continue;
        EdgeOne prof;
        prof.K = c * one_minus_xi;
        prof.L = c * (XiU() - XiU::xi());
        prof.H = c * (XiU() - XiU::u());
        psi.one[static_cast<int>(e)] = prof;
    }
    if (!(d(m, psi) == target) || !compat_check(m, psi).empty())
        throw std::logic_error("internal error: correction verification failed");
    return psi;
}

}  // namespace

bool BarTensor::is_zero() const { return multilinear(*this).empty(); }

BarTensor bar_term(int s, const Scalar& c, std::vector<DgaElement> factors) {
    if (static_cast<int>(factors.size()) > s)
        throw std::invalid_argument("tensor length exceeds the bound");
    BarTensor t;
    t.s = s;
    if (factors.empty()) {
        t.constant = c;
        return t;
    }
    t.terms.emplace_back(c, std::move(factors));
    merge_terms(t);
    return t;
}

BarTensor bar_add(const BarTensor& a, const BarTensor& b) {
    BarTensor out;
    out.s = std::max(a.s, b.s);
    out.constant = a.constant + b.constant;
    out.terms = a.terms;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    merge_terms(out);
    return out;
}

BarTensor bar_scale(const Scalar& c, const BarTensor& a) {
    BarTensor out;
    out.s = a.s;
    out.constant = c * a.constant;
    if (c.is_zero()) return out;
    out.terms = a.terms;
    for (auto& [tc, fs] : out.terms) tc *= c;
    merge_terms(out);
    return out;
}

BarTensor chen_differential(const DgaModel& m, const BarTensor& t) {
    BarTensor out;
    out.s = t.s;
    for (const auto& [c, factors] : t.terms) {
        if (c.is_zero()) continue;
        for (size_t i = 0; i < factors.size(); ++i) {
            auto fs = factors;
            fs[i] = d(m, fs[i]);
            out.terms.emplace_back(c, std::move(fs));
        }
        for (size_t i = 0; i + 1 < factors.size(); ++i) {
            std::vector<DgaElement> fs;
            fs.reserve(factors.size() - 1);
            for (size_t j = 0; j < factors.size(); ++j) {
                if (j == i) fs.push_back(wedge(m, factors[i], factors[i + 1]));
                else if (j != i + 1) fs.push_back(factors[j]);
            }
            out.terms.emplace_back(c, std::move(fs));
        }
    }
    merge_terms(out);
    return out;
}

BarTensor relation_element(const DgaModel& m, const std::vector<DgaElement>& u,
                           const DgaElement& f, int i) {
    const int r = static_cast<int>(u.size());
    if (i < 1 || i > r) throw std::invalid_argument("relation position out of range");
    if (f.degree != 0) throw std::invalid_argument("relation multiplier must have degree 0");
    DgaElement f_shift = dga_add(f, global_constant(m, -augmentation(m, f)));

    BarTensor out;
    out.s = r;
    if (r == 1) {
        out.terms.emplace_back(Scalar(1), std::vector<DgaElement>{d(m, f)});
        merge_terms(out);
        return out;
    }
    if (i == 1) {
        auto fs = u;
        fs[0] = d(m, f);
        out.terms.emplace_back(Scalar(1), std::move(fs));
        std::vector<DgaElement> fs2(u.begin() + 1, u.end());
        fs2[0] = wedge(m, f_shift, fs2[0]);
        out.terms.emplace_back(Scalar(-1), std::move(fs2));
    } else if (i == r) {
        auto fs = u;
        fs[static_cast<size_t>(r - 1)] = d(m, f);
        out.terms.emplace_back(Scalar(1), std::move(fs));
        std::vector<DgaElement> fs2(u.begin(), u.end() - 1);
        fs2[static_cast<size_t>(r - 2)] = wedge(m, f_shift, fs2[static_cast<size_t>(r - 2)]);
        out.terms.emplace_back(Scalar(1), std::move(fs2));
    } else {
        auto fs = u;
        fs[static_cast<size_t>(i - 1)] = d(m, f);
        out.terms.emplace_back(Scalar(1), std::move(fs));
        auto left = u;
        left.erase(left.begin() + (i - 1));
        left[static_cast<size_t>(i - 2)] = wedge(m, f, left[static_cast<size_t>(i - 2)]);
        out.terms.emplace_back(Scalar(1), std::move(left));
        auto right = u;
        right.erase(right.begin() + (i - 1));
        right[static_cast<size_t>(i - 1)] = wedge(m, f, right[static_cast<size_t>(i - 1)]);
        out.terms.emplace_back(Scalar(-1), std::move(right));
    }
    merge_terms(out);
    return out;
}

BarTensor reduce_normal_form(const DgaModel& m, const BarTensor& t) {
    struct Item {
        Scalar c;
        std::vector<DgaElement> fs;
        size_t start = 0;
    };
    std::vector<Item> work;
    work.reserve(t.terms.size());
    for (const auto& [c, fs] : t.terms) work.push_back({c, fs, 0});

    BarTensor out;
    out.s = t.s;
    out.constant = t.constant;
    std::map<std::string, std::pair<Scalar, std::vector<DgaElement>>> acc;

    while (!work.empty()) {
        Item item = std::move(work.back());
        work.pop_back();
        if (item.c.is_zero()) continue;
        bool zero = false;
        for (const auto& f : item.fs)
            if (f.is_zero()) {
                zero = true;
                break;
            }
        if (zero) continue;
        if (item.fs.empty()) {
            out.constant += item.c;
            continue;
        }

        bool rewritten = false;
        for (size_t i = item.start; i < item.fs.size(); ++i) {
            if (item.fs[i].degree != 1) continue;
            auto [h, rem] = split_exact(m, item.fs[i]);
            if (h.is_zero()) continue;
            const size_t r = item.fs.size();
            if (!rem.is_zero()) {
                Item keep{item.c, item.fs, i + 1};
                keep.fs[i] = rem;
                work.push_back(std::move(keep));
            }
            // The slot now holds d(h); trade it for h times a neighbour.
            if (r == 1) {
                rewritten = true;
                break;
            }
            if (i == 0) {
                Item nw{item.c, std::vector<DgaElement>(item.fs.begin() + 1, item.fs.end()), 0};
                nw.fs[0] = wedge(m, h, nw.fs[0]);
                work.push_back(std::move(nw));
            } else if (i + 1 == r) {
                Item nw{-item.c, std::vector<DgaElement>(item.fs.begin(), item.fs.end() - 1),
                        i - 1};
                nw.fs[i - 1] = wedge(m, h, nw.fs[i - 1]);
                work.push_back(std::move(nw));
            } else {
                Item lw{-item.c, item.fs, i - 1};
                lw.fs.erase(lw.fs.begin() + static_cast<long>(i));
                lw.fs[i - 1] = wedge(m, h, lw.fs[i - 1]);
                work.push_back(std::move(lw));
                Item rw{item.c, item.fs, i};
                rw.fs.erase(rw.fs.begin() + static_cast<long>(i));
                rw.fs[i] = wedge(m, h, rw.fs[i]);
                work.push_back(std::move(rw));
            }
            rewritten = true;
            break;
        }
        if (rewritten) continue;

        std::string key = factor_key(item.fs);
        auto it = acc.find(key);
        if (it == acc.end()) acc.emplace(std::move(key), std::make_pair(item.c, std::move(item.fs)));
        else it->second.first += item.c;
    }
    for (auto& [key, term] : acc)
        if (!term.first.is_zero()) out.terms.emplace_back(std::move(term.first), std::move(term.second));
    return out;
}

bool is_chen_closed(const DgaModel& m, const BarTensor& t) {
    return reduce_normal_form(m, chen_differential(m, t)).is_zero();
}

BarTensor extend_closed_family(const DgaModel& m, const std::vector<DgaElement>& phis) {
    const int s = static_cast<int>(phis.size());
    if (s == 0) throw std::invalid_argument("family must not be empty");
    if (s > 16) throw std::invalid_argument("family too long");
    for (const auto& f : phis) {
        if (f.degree != 1) throw std::invalid_argument("family members must be 1-forms");
        if (!d(m, f).is_zero()) throw std::invalid_argument("family members must be closed");
    }

    std::vector<std::vector<DgaElement>> psi(static_cast<size_t>(s),
                                             std::vector<DgaElement>(static_cast<size_t>(s)));
    for (int i = 0; i < s; ++i) psi[static_cast<size_t>(i)][static_cast<size_t>(i)] = phis[static_cast<size_t>(i)];
    for (int len = 2; len <= s; ++len) {
        for (int i = 0; i + len - 1 < s; ++i) {
            const int j = i + len - 1;
            DgaElement target;
            target.degree = 2;
            for (int k = i; k < j; ++k)
                target = dga_add(target, wedge(m, psi[static_cast<size_t>(i)][static_cast<size_t>(k)],
                                               psi[static_cast<size_t>(k + 1)][static_cast<size_t>(j)]));
            target = dga_scale(Scalar(-1), target);
            auto& slot = psi[static_cast<size_t>(i)][static_cast<size_t>(j)];
            slot.degree = 1;
            if (!target.is_zero())
                slot = solve_correction(m, target,
                                        "phi[" + std::to_string(i + 1) + ".." + std::to_string(j + 1) + "]");
        }
    }

    BarTensor out;
    out.s = s;
    for (unsigned mask = 0; mask < (1u << (s - 1)); ++mask) {
        std::vector<DgaElement> fs;
        int start = 0;
        bool zero = false;
        for (int pos = 0; pos < s; ++pos) {
            bool cut = (pos == s - 1) || ((mask >> pos) & 1u);
            if (!cut) continue;
            const auto& block = psi[static_cast<size_t>(start)][static_cast<size_t>(pos)];
            if (block.is_zero()) {
                zero = true;
                break;
            }
            fs.push_back(block);
            start = pos + 1;
        }
        if (!zero) out.terms.emplace_back(Scalar(1), std::move(fs));
    }
    merge_terms(out);
    return out;
}

BarLevels bar_filtrations(const DgaModel& m, const BarTensor& t) {
    BarTensor nf = reduce_normal_form(m, t);
    BarLevels out;
    if (nf.terms.empty()) return out;
    size_t maxlen = 0;
    for (const auto& [c, fs] : nf.terms) maxlen = std::max(maxlen, fs.size());
    bool first = true, first_top = true;
    for (const auto& [c, fs] : nf.terms) {
        int wsum = static_cast<int>(fs.size());
        int fsum = 0;
        for (const auto& f : fs) {
            wsum += weight_level(m, f);
            fsum += hodge_level(m, f);
        }
        out.w = first ? wsum : std::max(out.w, wsum);
        out.f = first ? fsum : std::min(out.f, fsum);
        first = false;
        if (fs.size() == maxlen) {
            out.f_top = first_top ? fsum : std::min(out.f_top, fsum);
            first_top = false;
        }
    }
    return out;
}

BarTensor apply_N_bar(const DgaModel& m, const BarTensor& t) {
    BarTensor out;
    out.s = t.s;
    for (const auto& [c, factors] : t.terms) {
        for (size_t i = 0; i < factors.size(); ++i) {
            auto fs = factors;
            fs[i] = apply_N(m, fs[i]);
            out.terms.emplace_back(c, std::move(fs));
        }
    }
    merge_terms(out);
    return out;
}

BarTensor apply_M_bar(const DgaModel& m, const BarTensor& t, int branch) {
    BarTensor out;
    out.s = t.s;
    for (const auto& [c, factors] : t.terms) {
        for (size_t i = 0; i < factors.size(); ++i) {
            auto fs = factors;
            fs[i] = apply_M(m, fs[i], branch);
            out.terms.emplace_back(c, std::move(fs));
        }
    }
    merge_terms(out);
    return out;
}

DgaElement lambda_n(const DgaModel& m, const DgaElement& el, const Scalar& log_lambda) {
    DgaElement out = el;
    DgaElement cur = el;
    Scalar coef(1);
    for (long k = 1;; ++k) {
        cur = apply_N(m, cur);
        if (cur.is_zero()) break;
        coef = coef * log_lambda * Rat(1, k);
        out = dga_add(out, dga_scale(coef, cur));
    }
    return out;
}

BarTensor lambda_n_bar(const DgaModel& m, const BarTensor& t, const Scalar& log_lambda) {
    BarTensor out;
    out.s = t.s;
    out.constant = t.constant;
    for (const auto& [c, factors] : t.terms) {
        std::vector<DgaElement> fs;
        fs.reserve(factors.size());
        for (const auto& f : factors) fs.push_back(lambda_n(m, f, log_lambda));
        out.terms.emplace_back(c, std::move(fs));
    }
    merge_terms(out);
    return out;
}

Fpsc fpsc_curvature(const DgaModel& m, const Fpsc& conn) {
    std::set<int> alphabet;
    for (const auto& [w, f] : conn.words) {
        if (w.empty()) throw std::invalid_argument("empty word in connection");
        if (static_cast<int>(w.size()) > conn.length)
            throw std::invalid_argument("word exceeds the length bound");
        for (int x : w) alphabet.insert(x);
    }
    std::vector<std::vector<int>> words{{}};
    for (size_t qi = 0; qi < words.size(); ++qi) {
        if (static_cast<int>(words[qi].size()) >= conn.length) continue;
        for (int x : alphabet) {
            auto w = words[qi];
            w.push_back(x);
            words.push_back(std::move(w));
        }
    }
    Fpsc out;
    out.length = conn.length;
    for (const auto& w : words) {
        if (w.empty()) continue;
        DgaElement kap;
        kap.degree = 2;
        auto it = conn.words.find(w);
        if (it != conn.words.end()) kap = d(m, it->second);
        for (size_t cut = 1; cut < w.size(); ++cut) {
            auto iu = conn.words.find(std::vector<int>(w.begin(), w.begin() + static_cast<long>(cut)));
            auto iv = conn.words.find(std::vector<int>(w.begin() + static_cast<long>(cut), w.end()));
            if (iu == conn.words.end() || iv == conn.words.end()) continue;
            kap = dga_add(kap, wedge(m, iu->second, iv->second));
        }
        if (!kap.is_zero()) out.words[w] = std::move(kap);
    }
    return out;
}

bool fpsc_flat(const Fpsc& kappa) {
    for (const auto& [w, f] : kappa.words)
        if (!f.is_zero()) return false;
    return true;
}

CentralFiberGraph make_chain_fiber(int segments) {
    if (segments < 1) throw std::invalid_argument("chain needs at least one segment");
    CentralFiberGraph cf;
    cf.d = 1;
    cf.graph.vertices.push_back({0, 0, VertexKind::Disk, 0});
    for (int i = 1; i <= segments; ++i)
        cf.graph.vertices.push_back({i, i == segments ? 1 : 0, VertexKind::Compact, -1});
    for (int i = 0; i < segments; ++i) cf.graph.edges.push_back({i, i, i + 1});
    return cf;
}

OmegaReport scenario_omega(const CentralFiberGraph& chain, const Scalar& rho, long d_scale,
                           long mk_scale) {
    if (rho.is_zero()) throw std::invalid_argument("degenerate input: rho must be nonzero");
    if (d_scale <= 0 || mk_scale <= 0)
        throw std::invalid_argument("degenerate input: the scales must be positive");
    const auto& g = chain.graph;
    const int n_edges = static_cast<int>(g.edges.size());
    bool shape_ok = n_edges >= 2 && g.vertices.size() == g.edges.size() + 1;
    if (shape_ok)
        for (int i = 0; i < n_edges; ++i)
            shape_ok = shape_ok && g.edges[static_cast<size_t>(i)].k == i &&
                       g.edges[static_cast<size_t>(i)].l == i + 1;
    shape_ok = shape_ok && g.vertices[0].kind == VertexKind::Disk &&
               g.vertices.back().genus >= 1;
    if (!shape_ok)
        throw std::invalid_argument(
            "degenerate input: expected a disk-ended chain with a genus carrier at the far end");

    OmegaReport rep;
    rep.model = make_model(chain);
    DgaModel& m = rep.model;
    const int top = n_edges;

    declare_two_form(m, top, "vol", 2, 1);
    declare_wedge(m, top, "omega1", "omegabar1", {{"vol", Scalar(1)}});
    declare_one_form(m, top, "mu", {{n_edges - 1, rho}}, {{"vol", Scalar(-1)}}, 1, 0);
    declare_wedge(m, top, "omega1", "mu", {});
    for (int i = 1; i < top; ++i)
        declare_one_form(m, i, "eta", {{i - 1, Scalar(1)}, {i, Scalar(-1)}}, {}, 1, 1);

    DgaElement om = gen_element(m, top, "omega1");
    DgaElement omb = gen_element(m, top, "omegabar1");
    rep.omega = extend_closed_family(m, {om, om, omb});
    if (!is_chen_closed(m, rep.omega))
        throw std::logic_error("internal error: the extension is not closed");

    rep.n_class = reduce_normal_form(m, apply_N_bar(m, rep.omega));
    rep.m_class = reduce_normal_form(m, apply_M_bar(m, rep.omega, 0));
    rep.l_class = bar_add(bar_scale(Scalar(Rat(1, d_scale)), rep.n_class),
                          bar_scale(-Scalar(Rat(1, mk_scale)), rep.m_class));
    rep.n_coeff = single_gen_coeff(rep.n_class, top, "omega1", "the N class");
    rep.m_coeff = single_gen_coeff(rep.m_class, top, "omega1", "the M class");
    rep.l_coeff = single_gen_coeff(rep.l_class, top, "omega1", "the twisted class");
    if (rep.l_coeff.is_zero())
        throw std::invalid_argument("degenerate input: the twisted combination vanishes");
    return rep;
}

Json bar_to_json(const BarTensor& t) {
    Json j;
    j["s"] = t.s;
    j["constant"] = t.constant.str();
    j["terms"] = Json::array();
    for (const auto& [c, fs] : t.terms) {
        Json tj;
        tj["coef"] = c.str();
        tj["factors"] = Json::array();
        for (const auto& f : fs) tj["factors"].push_back(dga_element_to_json(f));
        j["terms"].push_back(std::move(tj));
    }
    return j;
}

BarTensor bar_from_json(const Json& j) {
    BarTensor t;
    t.s = j.value("s", 1);
    t.constant = Scalar::parse(j.value("constant", std::string("0")));
    if (j.contains("terms")) {
        for (const auto& tj : j.at("terms")) {
            Scalar c = Scalar::parse(tj.at("coef").get<std::string>());
            std::vector<DgaElement> fs;
            for (const auto& fj : tj.at("factors")) fs.push_back(dga_element_from_json(fj));
            t.terms.emplace_back(std::move(c), std::move(fs));
        }
    }
    merge_terms(t);
    return t;
}

Json fpsc_to_json(const Fpsc& w) {
    Json j;
    j["length"] = w.length;
    j["words"] = Json::array();
    for (const auto& [word, form] : w.words) {
        Json wj;
        wj["word"] = word;
        wj["form"] = dga_element_to_json(form);
        j["words"].push_back(std::move(wj));
    }
    return j;
}

Fpsc fpsc_from_json(const Json& j) {
    Fpsc w;
    w.length = j.value("length", 1);
    if (j.contains("words")) {
        for (const auto& wj : j.at("words")) {
            std::vector<int> word = wj.at("word").get<std::vector<int>>();
            w.words[word] = dga_element_from_json(wj.at("form"));
        }
    }
    return w;
}

}  // namespace pcs
