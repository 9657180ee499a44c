#include "pcs/dga.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pcs/hodge.hpp"

namespace pcs {

namespace {

constexpr int kXiCap = 64;
constexpr int kUCap = 32;

const SurfaceGen& gen_at(const DgaModel& m, int v, const std::string& name) {
    const ComponentModel& cm = m.comp(v);
    auto it = cm.gens.find(name);
    if (it == cm.gens.end())
        throw std::invalid_argument("unknown generator: " + name + " on component " +
                                    std::to_string(v));
    return it->second;
}

void prune(DgaElement& el) {
    for (auto it = el.surf.begin(); it != el.surf.end();) {
        for (auto jt = it->second.begin(); jt != it->second.end();)
            jt = jt->second.is_zero() ? it->second.erase(jt) : std::next(jt);
        it = it->second.empty() ? el.surf.erase(it) : std::next(it);
    }
    for (auto it = el.p.begin(); it != el.p.end();)
        it = it->second.is_zero() ? el.p.erase(it) : std::next(it);
    for (auto it = el.one.begin(); it != el.one.end();)
        it = (it->second == EdgeOne{}) ? el.one.erase(it) : std::next(it);
    for (auto it = el.two.begin(); it != el.two.end();)
        it = (it->second == EdgeTwo{}) ? el.two.erase(it) : std::next(it);
    for (auto it = el.three.begin(); it != el.three.end();)
        it = it->second.is_zero() ? el.three.erase(it) : std::next(it);
}

Scalar parse_scalar(const Json& j) {
    if (j.is_string()) return Scalar::parse(j.get<std::string>());
    return Scalar(j.get<long>());
}

std::map<int, Scalar> parse_edge_map(const Json& j) {
    std::map<int, Scalar> out;
    for (auto it = j.begin(); it != j.end(); ++it)
        out[std::stoi(it.key())] = parse_scalar(it.value());
    return out;
}

std::map<std::string, Scalar> parse_name_map(const Json& j) {
    std::map<std::string, Scalar> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = parse_scalar(it.value());
    return out;
}

}  // namespace

XiU::XiU(long c) {
    if (c != 0) terms_[{0, 0}] = Scalar(c);
}

XiU::XiU(const Scalar& c) {
    if (!c.is_zero()) terms_[{0, 0}] = c;
}

XiU XiU::xi() {
    XiU out;
    out.terms_[{1, 0}] = Scalar(1);
    return out;
}

XiU XiU::u() {
    XiU out;
    out.terms_[{0, 1}] = Scalar(1);
    return out;
}

void XiU::add_term(int xd, int ud, const Scalar& c) {
    if (c.is_zero()) return;
    if (xd > kXiCap) throw std::overflow_error("xi degree cap 64 exceeded");
    if (ud > kUCap) throw std::overflow_error("u degree cap 32 exceeded");
    auto key = std::make_pair(xd, ud);
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_[key] = c;
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

XiU XiU::operator-() const {
    XiU out;
    for (const auto& [k, c] : terms_) out.terms_[k] = -c;
    return out;
}

XiU& XiU::operator+=(const XiU& o) {
    for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
    return *this;
}

XiU& XiU::operator-=(const XiU& o) {
    for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, -c);
    return *this;
}

XiU& XiU::operator*=(const XiU& o) {
    XiU out;
    for (const auto& [ka, ca] : terms_)
        for (const auto& [kb, cb] : o.terms_)
            out.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb);
    terms_ = std::move(out.terms_);
    return *this;
}

XiU& XiU::operator*=(const Scalar& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= c;
        it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
    }
    return *this;
}

XiU XiU::dxi() const {
    XiU out;
    for (const auto& [k, c] : terms_)
        if (k.first > 0) out.add_term(k.first - 1, k.second, c * Rat(k.first));
    return out;
}

XiU XiU::du() const {
    XiU out;
    for (const auto& [k, c] : terms_)
        if (k.second > 0) out.add_term(k.first, k.second - 1, c * Rat(k.second));
    return out;
}

XiU XiU::integrate_xi() const {
    XiU out;
    for (const auto& [k, c] : terms_) out.add_term(k.first + 1, k.second, c / Rat(k.first + 1));
    return out;
}

XiU XiU::at_xi(long v) const {
    XiU out;
    for (const auto& [k, c] : terms_) {
        Rat pw = 1;
        for (int i = 0; i < k.first; ++i) pw *= Rat(v);
        out.add_term(0, k.second, c * pw);
    }
    return out;
}

Scalar XiU::eval(const Scalar& xi_val, const Scalar& u_val) const {
    Scalar out;
    for (const auto& [k, c] : terms_) {
        Scalar term = c;
        for (int i = 0; i < k.first; ++i) term *= xi_val;
        for (int i = 0; i < k.second; ++i) term *= u_val;
        out += term;
    }
    return out;
}

int XiU::xi_degree() const {
    int best = -1;
    for (const auto& [k, c] : terms_) best = std::max(best, k.first);
    return best;
}

int XiU::u_degree() const {
    int best = -1;
    for (const auto& [k, c] : terms_) best = std::max(best, k.second);
    return best;
}

std::string XiU::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [k, c] = *it;
        if (!first) out << " + ";
        first = false;
        std::string cs = c.str();
        std::vector<std::string> parts;
        if (k.first == 1)
            parts.push_back("xi");
        else if (k.first > 1)
            parts.push_back("xi^" + std::to_string(k.first));
        if (k.second == 1)
            parts.push_back("u");
        else if (k.second > 1)
            parts.push_back("u^" + std::to_string(k.second));
        if (parts.empty()) {
            out << cs;
            continue;
        }
        if (cs != "1") {
            if (cs.find(' ') != std::string::npos)
                out << "(" << cs << ")*";
            else
                out << cs << "*";
        }
        for (size_t i = 0; i < parts.size(); ++i) {
            if (i) out << "*";
            out << parts[i];
        }
    }
    return out.str();
}

Json XiU::to_json() const {
    Json out = Json::array();
    for (const auto& [k, c] : terms_) out.push_back(Json::array({k.first, k.second, c.str()}));
    return out;
}

XiU XiU::from_json(const Json& j) {
    XiU out;
    for (const auto& t : j)
        out.add_term(t.at(0).get<int>(), t.at(1).get<int>(), Scalar::parse(t.at(2).get<std::string>()));
    return out;
}

int DgaModel::disk_edge(int branch) const {
    for (const auto& v : fiber.graph.vertices) {
        if (v.kind != VertexKind::Disk || v.branch != branch) continue;
        std::vector<int> inc = fiber.graph.incident_edges(v.id);
        if (inc.size() == 1) return inc[0];
    }
    throw std::invalid_argument("branch " + std::to_string(branch) + " has no disk edge");
}

DgaModel make_model(const CentralFiberGraph& g) {
    DgaModel m;
    m.fiber = g;
    m.comps.resize(g.graph.vertices.size());
    for (const auto& v : g.graph.vertices) {
        ComponentModel& cm = m.comps[static_cast<size_t>(v.id)];
        cm.vertex = v.id;
        cm.disk = v.kind == VertexKind::Disk;
        cm.genus = v.genus;
        if (cm.disk) {
            SurfaceGen dp;
            dp.name = "dp/p";
            dp.degree = 1;
            dp.w = 1;
            dp.f = 1;
            for (int e : g.graph.incident_edges(v.id)) dp.residues[e] = Scalar(1);
            cm.gens[dp.name] = dp;
            continue;
        }
        for (int j = 1; j <= v.genus; ++j) {
            SurfaceGen om;
            om.name = "omega" + std::to_string(j);
            om.degree = 1;
            om.w = 0;
            om.f = 1;
            cm.gens[om.name] = om;
            SurfaceGen ob = om;
            ob.name = "omegabar" + std::to_string(j);
            ob.f = 0;
            cm.gens[ob.name] = ob;
        }
        SurfaceGen sg;
        sg.name = "sigma";
        sg.degree = 2;
        sg.w = 2;
        sg.f = 1;
        cm.gens[sg.name] = sg;
        for (int e : g.graph.incident_edges(v.id)) {
            SurfaceGen slot;
            slot.name = "slot(e" + std::to_string(e) + ")";
            slot.degree = 1;
            slot.w = 1;
            slot.f = 1;
            slot.residues[e] = Scalar(1);
            slot.diff["sigma"] = Scalar(1);
            cm.gens[slot.name] = slot;
        }
    }
    return m;
}

namespace {

void check_new_name(const ComponentModel& cm, const std::string& name) {
    if (name == "1" || cm.gens.count(name))
        throw std::invalid_argument("duplicate generator: " + name + " on component " +
                                    std::to_string(cm.vertex));
}

void check_edge_keys(const DgaModel& m, int v, const std::map<int, Scalar>& by_edge) {
    std::vector<int> inc = m.fiber.graph.incident_edges(v);
    for (const auto& [e, c] : by_edge)
        if (std::find(inc.begin(), inc.end(), e) == inc.end())
            throw std::invalid_argument("edge " + std::to_string(e) +
                                        " is not incident to component " + std::to_string(v));
}

}  // namespace

void declare_two_form(DgaModel& m, int v, const std::string& name, int w, int f) {
    ComponentModel& cm = m.comps.at(static_cast<size_t>(v));
    check_new_name(cm, name);
    SurfaceGen g;
    g.name = name;
    g.degree = 2;
    g.w = w;
    g.f = f;
    cm.gens[name] = g;
}

void declare_one_form(DgaModel& m, int v, const std::string& name,
                      const std::map<int, Scalar>& residues,
                      const std::map<std::string, Scalar>& diff, int w, int f) {
    ComponentModel& cm = m.comps.at(static_cast<size_t>(v));
    check_new_name(cm, name);
    check_edge_keys(m, v, residues);
    for (const auto& [dn, dc] : diff)
        if (gen_at(m, v, dn).degree != 2)
            throw std::invalid_argument("differential of " + name + " must land in degree 2 on component " +
                                        std::to_string(v));
    if (diff.empty() && !cm.disk) {
        Scalar total;
        for (const auto& [e, r] : residues) total += r;
        if (!total.is_zero())
            throw std::invalid_argument("residue theorem violation on component " +
                                        std::to_string(v));
    }
    SurfaceGen g;
    g.name = name;
    g.degree = 1;
    g.w = w;
    g.f = f;
    g.residues = residues;
    g.diff = diff;
    cm.gens[name] = g;
}

void declare_function(DgaModel& m, int v, const std::string& name,
                      const std::map<int, Scalar>& values,
                      const std::map<std::string, Scalar>& diff) {
    ComponentModel& cm = m.comps.at(static_cast<size_t>(v));
    check_new_name(cm, name);
    check_edge_keys(m, v, values);
    std::map<std::string, Scalar> dd;
    for (const auto& [dn, dc] : diff) {
        const SurfaceGen& g = gen_at(m, v, dn);
        if (g.degree != 1)
            throw std::invalid_argument("differential of " + name + " must land in degree 1 on component " +
                                        std::to_string(v));
        for (const auto& [n2, c2] : g.diff) dd[n2] += dc * c2;
    }
    for (const auto& [n2, c2] : dd)
        if (!c2.is_zero())
            throw std::invalid_argument("differential of " + name +
                                        " does not square to zero on component " + std::to_string(v));
    SurfaceGen g;
    g.name = name;
    g.degree = 0;
    g.w = 0;
    g.f = 0;
    g.values = values;
    g.diff = diff;
    cm.gens[name] = g;
}

void declare_wedge(DgaModel& m, int v, const std::string& a, const std::string& b,
                   const std::map<std::string, Scalar>& result) {
    ComponentModel& cm = m.comps.at(static_cast<size_t>(v));
    int da = gen_at(m, v, a).degree;
    int db = gen_at(m, v, b).degree;
    for (const auto& [rn, rc] : result)
        if (rn != "1" && gen_at(m, v, rn).degree != da + db)
            throw std::invalid_argument("wedge " + a + " ^ " + b + " has a result of the wrong degree");
    cm.wedges[{a, b}] = result;
}

DgaModel model_from_json(const CentralFiberGraph& g, const Json& scenario) {
    if (scenario.contains("symbols"))
        for (const auto& s : scenario.at("symbols")) SymbolTable::declare(s.get<std::string>());
    DgaModel m = make_model(g);
    if (!scenario.contains("components")) return m;
    for (const auto& c : scenario.at("components")) {
        int v = c.at("vertex").get<int>();
        if (c.contains("two_forms"))
            for (const auto& t : c.at("two_forms"))
                declare_two_form(m, v, t.at("name").get<std::string>(),
                                 t.value("w", 2), t.value("f", 1));
        if (c.contains("one_forms"))
            for (const auto& t : c.at("one_forms"))
                declare_one_form(m, v, t.at("name").get<std::string>(),
                                 t.contains("res") ? parse_edge_map(t.at("res")) : std::map<int, Scalar>{},
                                 t.contains("d") ? parse_name_map(t.at("d")) : std::map<std::string, Scalar>{},
                                 t.value("w", 1), t.value("f", 1));
        if (c.contains("functions"))
            for (const auto& t : c.at("functions"))
                declare_function(m, v, t.at("name").get<std::string>(),
                                 t.contains("values") ? parse_edge_map(t.at("values")) : std::map<int, Scalar>{},
                                 t.contains("d") ? parse_name_map(t.at("d")) : std::map<std::string, Scalar>{});
        if (c.contains("wedges"))
            for (const auto& t : c.at("wedges"))
                declare_wedge(m, v, t.at("a").get<std::string>(), t.at("b").get<std::string>(),
                              parse_name_map(t.at("result")));
    }
    return m;
}

bool DgaElement::is_zero() const {
    for (const auto& [v, mp] : surf)
        for (const auto& [n, c] : mp)
            if (!c.is_zero()) return false;
    for (const auto& [e, q] : p)
        if (!q.is_zero()) return false;
    for (const auto& [e, w] : one)
        if (!(w == EdgeOne{})) return false;
    for (const auto& [e, w] : two)
        if (!(w == EdgeTwo{})) return false;
    for (const auto& [e, q] : three)
        if (!q.is_zero()) return false;
    return true;
}

bool DgaElement::operator==(const DgaElement& o) const {
    if (is_zero() && o.is_zero()) return true;
    DgaElement a = *this;
    DgaElement b = o;
    prune(a);
    prune(b);
    return a.degree == b.degree && a.surf == b.surf && a.p == b.p && a.one == b.one &&
           a.two == b.two && a.three == b.three;
}

DgaElement dga_add(const DgaElement& a, const DgaElement& b) {
    if (!a.is_zero() && !b.is_zero() && a.degree != b.degree)
        throw std::invalid_argument("cannot add elements of different degrees");
    DgaElement out = a;
    if (a.is_zero()) out.degree = b.degree;
    for (const auto& [v, mp] : b.surf)
        for (const auto& [n, c] : mp) out.surf[v][n] += c;
    for (const auto& [e, q] : b.p) out.p[e] += q;
    for (const auto& [e, w] : b.one) {
        out.one[e].K += w.K;
        out.one[e].L += w.L;
        out.one[e].H += w.H;
    }
    for (const auto& [e, w] : b.two) {
        out.two[e].R += w.R;
        out.two[e].S += w.S;
        out.two[e].T += w.T;
    }
    for (const auto& [e, q] : b.three) out.three[e] += q;
    prune(out);
    return out;
}

DgaElement dga_scale(const Scalar& c, const DgaElement& a) {
    DgaElement out = a;
    for (auto& [v, mp] : out.surf)
        for (auto& [n, x] : mp) x *= c;
    for (auto& [e, q] : out.p) q *= c;
    for (auto& [e, w] : out.one) {
        w.K *= c;
        w.L *= c;
        w.H *= c;
    }
    for (auto& [e, w] : out.two) {
        w.R *= c;
        w.S *= c;
        w.T *= c;
    }
    for (auto& [e, q] : out.three) q *= c;
    prune(out);
    return out;
}

DgaElement d(const DgaModel& m, const DgaElement& el) {
    DgaElement out;
    out.degree = el.degree + 1;
    for (const auto& [v, mp] : el.surf)
        for (const auto& [name, c] : mp) {
            if (name == "1" || c.is_zero()) continue;
            const SurfaceGen& g = gen_at(m, v, name);
            for (const auto& [dn, dc] : g.diff) out.surf[v][dn] += c * dc;
        }
    switch (el.degree) {
        case 0:
            for (const auto& [e, P] : el.p) out.one[e] = {P.du(), P.du(), P.dxi()};
            break;
        case 1:
            for (const auto& [e, w] : el.one)
                out.two[e] = {w.K.dxi() - w.H.du(), w.L.dxi() - w.H.du(), w.L.du() - w.K.du()};
            break;
        case 2:
            for (const auto& [e, w] : el.two) out.three[e] = w.R.du() - w.S.du() + w.T.dxi();
            break;
        default:
            break;
    }
    prune(out);
    return out;
}

DgaElement wedge(const DgaModel& m, const DgaElement& a, const DgaElement& b) {
    DgaElement out;
    out.degree = a.degree + b.degree;
    for (const auto& [v, ma] : a.surf) {
        auto itb = b.surf.find(v);
        if (itb == b.surf.end()) continue;
        const ComponentModel& cm = m.comp(v);
        for (const auto& [na, ca] : ma)
            for (const auto& [nb, cb] : itb->second) {
                Scalar c = ca * cb;
                if (c.is_zero()) continue;
                if (na == "1") {
                    out.surf[v][nb] += c;
                    continue;
                }
                if (nb == "1") {
                    out.surf[v][na] += c;
                    continue;
                }
                const SurfaceGen& ga = gen_at(m, v, na);
                const SurfaceGen& gb = gen_at(m, v, nb);
                if (ga.degree + gb.degree > 2) continue;
                auto it = cm.wedges.find({na, nb});
                if (it != cm.wedges.end()) {
                    for (const auto& [rn, rc] : it->second) out.surf[v][rn] += c * rc;
                    continue;
                }
                it = cm.wedges.find({nb, na});
                if (it != cm.wedges.end()) {
                    bool flip = (ga.degree % 2) && (gb.degree % 2);
                    for (const auto& [rn, rc] : it->second)
                        out.surf[v][rn] += flip ? -(c * rc) : c * rc;
                    continue;
                }
                if (na == nb && ga.degree % 2) continue;
                throw std::invalid_argument("missing wedge declaration: " + na + " ^ " + nb +
                                            " on component " + std::to_string(v));
            }
    }
    if (a.degree == 0) {
        for (const auto& [e, Pa] : a.p) {
            if (b.degree == 0 && b.p.count(e)) out.p[e] = Pa * b.p.at(e);
            if (b.degree == 1 && b.one.count(e)) {
                const EdgeOne& w = b.one.at(e);
                out.one[e] = {Pa * w.K, Pa * w.L, Pa * w.H};
            }
            if (b.degree == 2 && b.two.count(e)) {
                const EdgeTwo& w = b.two.at(e);
                out.two[e] = {Pa * w.R, Pa * w.S, Pa * w.T};
            }
            if (b.degree == 3 && b.three.count(e)) out.three[e] = Pa * b.three.at(e);
        }
    } else if (b.degree == 0) {
        for (const auto& [e, Pb] : b.p) {
            if (a.degree == 1 && a.one.count(e)) {
                const EdgeOne& w = a.one.at(e);
                out.one[e] = {w.K * Pb, w.L * Pb, w.H * Pb};
            }
            if (a.degree == 2 && a.two.count(e)) {
                const EdgeTwo& w = a.two.at(e);
                out.two[e] = {w.R * Pb, w.S * Pb, w.T * Pb};
            }
            if (a.degree == 3 && a.three.count(e)) out.three[e] = a.three.at(e) * Pb;
        }
    } else if (a.degree == 1 && b.degree == 1) {
        for (const auto& [e, wa] : a.one) {
            if (!b.one.count(e)) continue;
            EdgeOne wb = b.one.at(e);
            out.two[e] = {wa.H * wb.K - wa.K * wb.H, wa.H * wb.L - wa.L * wb.H,
                          wa.K * wb.L - wa.L * wb.K};
        }
    } else if (a.degree == 1 && b.degree == 2) {
        for (const auto& [e, wa] : a.one) {
            if (!b.two.count(e)) continue;
            EdgeTwo wb = b.two.at(e);
            out.three[e] = wa.L * wb.R - wa.K * wb.S + wa.H * wb.T;
        }
    } else if (a.degree == 2 && b.degree == 1) {
        for (const auto& [e, wa] : a.two) {
            if (!b.one.count(e)) continue;
            EdgeOne wb = b.one.at(e);
            out.three[e] = wa.R * wb.L - wa.S * wb.K + wa.T * wb.H;
        }
    }
    prune(out);
    return out;
}

namespace {

// Value of the surface part of a degree 0 element at the puncture of edge e
// on component v, declared function values filled in.
Scalar boundary_value(const DgaModel& m, const DgaElement& el, int v, int e) {
    Scalar out;
    auto it = el.surf.find(v);
    if (it == el.surf.end()) return out;
    for (const auto& [name, c] : it->second) {
        if (name == "1") {
            out += c;
            continue;
        }
        const SurfaceGen& g = gen_at(m, v, name);
        auto r = g.values.find(e);
        if (r != g.values.end()) out += c * r->second;
    }
    return out;
}

// Residue of the surface part of a degree 1 element at the puncture of edge
// e on component v.
Scalar boundary_residue(const DgaModel& m, const DgaElement& el, int v, int e) {
    Scalar out;
    auto it = el.surf.find(v);
    if (it == el.surf.end()) return out;
    for (const auto& [name, c] : it->second) {
        if (name == "1") continue;
        const SurfaceGen& g = gen_at(m, v, name);
        auto r = g.residues.find(e);
        if (r != g.residues.end()) out += c * r->second;
    }
    return out;
}

}  // namespace

std::vector<std::string> compat_check(const DgaModel& m, const DgaElement& el) {
    std::vector<std::string> out;
    for (const auto& e : m.fiber.graph.edges) {
        std::string tag = " on edge " + std::to_string(e.id);
        if (el.degree == 0) {
            XiU P = el.p.count(e.id) ? el.p.at(e.id) : XiU();
            if (P.at_xi(0) != XiU(boundary_value(m, el, e.k, e.id)))
                out.push_back("A0 mismatch at xi=0" + tag);
            if (P.at_xi(1) != XiU(boundary_value(m, el, e.l, e.id)))
                out.push_back("A0 mismatch at xi=1" + tag);
        } else if (el.degree == 1) {
            EdgeOne w = el.one.count(e.id) ? el.one.at(e.id) : EdgeOne{};
            if (w.K.at_xi(0) != XiU(boundary_residue(m, el, e.k, e.id)))
                out.push_back("A1 mismatch at xi=0" + tag + ": K");
            if (!w.L.at_xi(0).is_zero()) out.push_back("A1 mismatch at xi=0" + tag + ": L");
            if (!w.K.at_xi(1).is_zero()) out.push_back("A1 mismatch at xi=1" + tag + ": K");
            if (w.L.at_xi(1) != XiU(boundary_residue(m, el, e.l, e.id)))
                out.push_back("A1 mismatch at xi=1" + tag + ": L");
        } else if (el.degree == 2) {
            EdgeTwo w = el.two.count(e.id) ? el.two.at(e.id) : EdgeTwo{};
            if (!w.T.at_xi(0).is_zero()) out.push_back("A2 mismatch at xi=0" + tag);
            if (!w.T.at_xi(1).is_zero()) out.push_back("A2 mismatch at xi=1" + tag);
        }
    }
    return out;
}

DgaElement apply_N(const DgaModel& m, const DgaElement& el) {
    (void)m;
    DgaElement out;
    out.degree = el.degree;
    for (const auto& [e, P] : el.p) out.p[e] = -P.du();
    for (const auto& [e, w] : el.one) out.one[e] = {-w.K.du(), -w.L.du(), -w.H.du()};
    for (const auto& [e, w] : el.two) out.two[e] = {-w.R.du(), -w.S.du(), -w.T.du()};
    for (const auto& [e, q] : el.three) out.three[e] = -q.du();
    prune(out);
    return out;
}

DgaElement apply_M(const DgaModel& m, const DgaElement& el, int branch) {
    int e = m.disk_edge(branch);
    DgaElement out;
    out.degree = el.degree;
    if (el.p.count(e)) out.p[e] = -el.p.at(e).du();
    if (el.one.count(e)) {
        const EdgeOne& w = el.one.at(e);
        out.one[e] = {-w.K.du(), -w.L.du(), -w.H.du()};
    }
    if (el.two.count(e)) {
        const EdgeTwo& w = el.two.at(e);
        out.two[e] = {-w.R.du(), -w.S.du(), -w.T.du()};
    }
    if (el.three.count(e)) out.three[e] = -el.three.at(e).du();
    prune(out);
    return out;
}

int weight_level(const DgaModel& m, const DgaElement& el) {
    if (el.is_zero()) return 0;
    int best = INT_MIN;
    auto scan = [&best](const XiU& q, int base) {
        for (const auto& [k, c] : q.terms())
            if (!c.is_zero()) best = std::max(best, base + 2 * k.second);
    };
    for (const auto& [v, mp] : el.surf)
        for (const auto& [n, c] : mp) {
            if (c.is_zero()) continue;
            best = std::max(best, n == "1" ? 0 : gen_at(m, v, n).w);
        }
    for (const auto& [e, P] : el.p) scan(P, 0);
    for (const auto& [e, w] : el.one) {
        scan(w.K, 1);
        scan(w.L, 1);
        scan(w.H, -1);
    }
    for (const auto& [e, w] : el.two) {
        scan(w.R, 0);
        scan(w.S, 0);
        scan(w.T, 2);
    }
    for (const auto& [e, q] : el.three) scan(q, 1);
    return best;
}

int hodge_level(const DgaModel& m, const DgaElement& el) {
    if (el.is_zero()) return 0;
    int best = INT_MAX;
    auto scan = [&best](const XiU& q, int base) {
        for (const auto& [k, c] : q.terms())
            if (!c.is_zero()) best = std::min(best, base + k.second);
    };
    for (const auto& [v, mp] : el.surf)
        for (const auto& [n, c] : mp) {
            if (c.is_zero()) continue;
            best = std::min(best, n == "1" ? 0 : gen_at(m, v, n).f);
        }
    for (const auto& [e, P] : el.p) scan(P, 0);
    for (const auto& [e, w] : el.one) {
        scan(w.K, 1);
        scan(w.L, 1);
        scan(w.H, 0);
    }
    for (const auto& [e, w] : el.two) {
        scan(w.R, 1);
        scan(w.S, 1);
        scan(w.T, 2);
    }
    for (const auto& [e, q] : el.three) scan(q, 2);
    return best;
}

Scalar augmentation(const DgaModel& m, const DgaElement& el) {
    if (el.degree != 0)
        throw std::invalid_argument("augmentation needs a degree 0 element, got degree " +
                                    std::to_string(el.degree));
    for (const auto& v : m.fiber.graph.vertices) {
        if (v.kind != VertexKind::Disk || v.branch != 0) continue;
        auto it = el.surf.find(v.id);
        if (it == el.surf.end()) return Scalar();
        auto jt = it->second.find("1");
        return jt == it->second.end() ? Scalar() : jt->second;
    }
    throw std::invalid_argument("no disk 0");
}

namespace {

std::string slot_name(const DgaModel& m, int v, int e) {
    return m.comp(v).disk ? std::string("dp/p") : "slot(e" + std::to_string(e) + ")";
}

}  // namespace

DgaElement make_theta(const DgaModel& m, int edge, bool balanced) {
    const GraphEdge& e = m.fiber.graph.edges.at(static_cast<size_t>(edge));
    DgaElement out;
    out.degree = 1;
    out.one[edge] = {XiU(1) - XiU::xi(), -XiU::xi(), -XiU::u()};
    if (balanced) {
        out.surf[e.k][slot_name(m, e.k, edge)] += Scalar(1);
        out.surf[e.l][slot_name(m, e.l, edge)] -= Scalar(1);
    }
    prune(out);
    return out;
}

DgaElement primitive(const DgaModel& m, const DgaElement& el) {
    if (el.degree != 1)
        throw std::invalid_argument("primitive unavailable: element has degree " +
                                    std::to_string(el.degree));
    DgaElement out;
    out.degree = 0;

    for (const auto& [v, mp] : el.surf) {
        const ComponentModel& cm = m.comp(v);
        std::vector<std::string> funs;
        for (const auto& [name, g] : cm.gens)
            if (g.degree == 0) funs.push_back(name);
        std::set<std::string> row_names;
        for (const auto& [n, c] : mp)
            if (!c.is_zero()) row_names.insert(n);
        for (const auto& f : funs)
            for (const auto& [dn, dc] : cm.gens.at(f).diff) row_names.insert(dn);
        std::vector<std::string> rows(row_names.begin(), row_names.end());
        size_t nr = rows.size();
        size_t nc = funs.size();
        std::vector<std::vector<Scalar>> a(nr, std::vector<Scalar>(nc));
        std::vector<Scalar> rhs(nr);
        for (size_t r = 0; r < nr; ++r) {
            for (size_t c = 0; c < nc; ++c) {
                const auto& diff = cm.gens.at(funs[c]).diff;
                auto it = diff.find(rows[r]);
                if (it != diff.end()) a[r][c] = it->second;
            }
            auto it = mp.find(rows[r]);
            if (it != mp.end()) rhs[r] = it->second;
        }
        const std::string fail =
            "primitive unavailable: cannot solve surface part on component " + std::to_string(v);
        std::vector<long> pivot_row(nc, -1);
        size_t prow = 0;
        for (size_t c = 0; c < nc && prow < nr; ++c) {
            size_t sel = nr;
            for (size_t r = prow; r < nr; ++r) {
                if (a[r][c].is_zero()) continue;
                try {
                    (void)a[r][c].inverse();
                    sel = r;
                    break;
                } catch (const std::exception&) {
                }
            }
            if (sel == nr) {
                for (size_t r = prow; r < nr; ++r)
                    if (!a[r][c].is_zero()) throw std::invalid_argument(fail);
                continue;
            }
            std::swap(a[sel], a[prow]);
            std::swap(rhs[sel], rhs[prow]);
            Scalar inv = a[prow][c].inverse();
            for (auto& x : a[prow]) x *= inv;
            rhs[prow] *= inv;
            for (size_t r = 0; r < nr; ++r) {
                if (r == prow || a[r][c].is_zero()) continue;
                Scalar factor = a[r][c];
                for (size_t cc = 0; cc < nc; ++cc) a[r][cc] -= factor * a[prow][cc];
                rhs[r] -= factor * rhs[prow];
            }
            pivot_row[c] = static_cast<long>(prow);
            ++prow;
        }
        for (size_t r = prow; r < nr; ++r)
            if (!rhs[r].is_zero()) throw std::invalid_argument(fail);
        for (size_t c = 0; c < nc; ++c)
            if (pivot_row[c] >= 0) out.surf[v][funs[c]] = rhs[static_cast<size_t>(pivot_row[c])];
    }

    // Integration constants per component, fixed by a walk from the base
    // disk so that the result has augmentation zero.
    const MarkedGraph& g = m.fiber.graph;
    size_t nv = g.vertices.size();
    std::vector<XiU> integ(g.edges.size());
    for (const auto& e : g.edges) {
        EdgeOne w = el.one.count(e.id) ? el.one.at(e.id) : EdgeOne{};
        XiU I = w.H.integrate_xi();
        if (I.du() != w.K || w.L != w.K)
            throw std::invalid_argument("primitive unavailable: edge " + std::to_string(e.id) +
                                        " is not exact");
        integ[static_cast<size_t>(e.id)] = I;
    }
    auto as_constant = [](const XiU& q, int edge) -> Scalar {
        for (const auto& [k, c] : q.terms())
            if (k != std::make_pair(0, 0))
                throw std::invalid_argument("primitive unavailable: endpoint mismatch on edge " +
                                            std::to_string(edge));
        return q.eval(Scalar(), Scalar());
    };
    std::vector<char> have(nv, 0);
    std::vector<Scalar> cv(nv);
    std::vector<int> disks = g.disk_ids();
    int base = disks.empty() ? 0 : disks[0];
    have[static_cast<size_t>(base)] = 1;
    std::vector<int> queue = {base};
    for (size_t head = 0; head < queue.size(); ++head) {
        int v = queue[head];
        for (int eid : g.incident_edges(v)) {
            int w = g.opposite(eid, v);
            if (have[static_cast<size_t>(w)]) continue;
            const GraphEdge& e = g.edges[static_cast<size_t>(eid)];
            XiU jump = integ[static_cast<size_t>(eid)].at_xi(1);
            Scalar step;
            if (e.k == v)
                step = cv[static_cast<size_t>(v)] + boundary_value(m, out, e.k, eid) +
                       as_constant(jump, eid) - boundary_value(m, out, e.l, eid);
            else
                step = cv[static_cast<size_t>(v)] + boundary_value(m, out, e.l, eid) -
                       as_constant(jump, eid) - boundary_value(m, out, e.k, eid);
            cv[static_cast<size_t>(w)] = step;
            have[static_cast<size_t>(w)] = 1;
            queue.push_back(w);
        }
    }
    for (const auto& e : g.edges) {
        XiU P = XiU(cv[static_cast<size_t>(e.k)] + boundary_value(m, out, e.k, e.id)) +
                integ[static_cast<size_t>(e.id)];
        if (P.at_xi(1) !=
            XiU(cv[static_cast<size_t>(e.l)] + boundary_value(m, out, e.l, e.id)))
            throw std::invalid_argument("primitive unavailable: endpoint mismatch on edge " +
                                        std::to_string(e.id));
        out.p[e.id] = P;
    }
    for (const auto& v : g.vertices)
        if (!cv[static_cast<size_t>(v.id)].is_zero()) out.surf[v.id]["1"] = cv[static_cast<size_t>(v.id)];
    prune(out);
    return out;
}

std::vector<H1Class> h1_basis(const DgaModel& m) {
    std::vector<H1Class> out;
    ConfigBasis cb = config_basis(m.fiber.graph);
    for (size_t i = 0; i < cb.cycles.size(); ++i) {
        DgaElement rep;
        rep.degree = 1;
        for (size_t e = 0; e < cb.cycles[i].size(); ++e)
            if (cb.cycles[i][e] != 0) rep.one[static_cast<int>(e)].H = XiU(Scalar(cb.cycles[i][e]));
        out.push_back({rep, 0, cb.cycle_labels[i]});
    }
    for (const auto& v : m.fiber.graph.vertices)
        for (int j = 1; j <= v.genus; ++j) {
            DgaElement om;
            om.degree = 1;
            om.surf[v.id]["omega" + std::to_string(j)] = Scalar(1);
            out.push_back({om, 1, "omega(v=" + std::to_string(v.id) + "," + std::to_string(j) + ")"});
            DgaElement ob;
            ob.degree = 1;
            ob.surf[v.id]["omegabar" + std::to_string(j)] = Scalar(1);
            out.push_back(
                {ob, 1, "omegabar(v=" + std::to_string(v.id) + "," + std::to_string(j) + ")"});
        }
    auto balanced = [&m](const std::vector<Rat>& rho) {
        DgaElement rep;
        rep.degree = 1;
        for (size_t e = 0; e < rho.size(); ++e)
            if (rho[e] != 0)
                rep = dga_add(rep, dga_scale(Scalar(rho[e]), make_theta(m, static_cast<int>(e), true)));
        return dga_scale(Scalar::tau(-1), rep);
    };
    for (size_t i = 0; i < cb.cycles.size(); ++i)
        out.push_back({balanced(cb.cycles[i]), 2, cb.cycle_labels[i]});
    for (size_t i = 0; i < cb.disk_paths.size(); ++i)
        out.push_back({balanced(cb.disk_paths[i]), 2, cb.path_labels[i]});
    return out;
}

Json dga_element_to_json(const DgaElement& el) {
    Json j;
    j["degree"] = el.degree;
    Json surf = Json::object();
    for (const auto& [v, mp] : el.surf) {
        Json comp = Json::object();
        for (const auto& [n, c] : mp) comp[n] = c.str();
        surf[std::to_string(v)] = comp;
    }
    j["surf"] = surf;
    Json edges = Json::object();
    for (const auto& [e, P] : el.p) edges[std::to_string(e)]["P"] = P.to_json();
    for (const auto& [e, w] : el.one) {
        Json& je = edges[std::to_string(e)];
        je["K"] = w.K.to_json();
        je["L"] = w.L.to_json();
        je["H"] = w.H.to_json();
    }
    for (const auto& [e, w] : el.two) {
        Json& je = edges[std::to_string(e)];
        je["R"] = w.R.to_json();
        je["S"] = w.S.to_json();
        je["T"] = w.T.to_json();
    }
    for (const auto& [e, q] : el.three) edges[std::to_string(e)]["Q"] = q.to_json();
    j["edges"] = edges;
    return j;
}

DgaElement dga_element_from_json(const Json& j) {
    DgaElement el;
    el.degree = j.at("degree").get<int>();
    if (j.contains("surf"))
        for (auto it = j.at("surf").begin(); it != j.at("surf").end(); ++it) {
            int v = std::stoi(it.key());
            for (auto jt = it.value().begin(); jt != it.value().end(); ++jt)
                el.surf[v][jt.key()] = Scalar::parse(jt.value().get<std::string>());
        }
    if (j.contains("edges"))
        for (auto it = j.at("edges").begin(); it != j.at("edges").end(); ++it) {
            int e = std::stoi(it.key());
            const Json& je = it.value();
            if (je.contains("P")) el.p[e] = XiU::from_json(je.at("P"));
            if (je.contains("K") || je.contains("L") || je.contains("H")) {
                EdgeOne w;
                if (je.contains("K")) w.K = XiU::from_json(je.at("K"));
                if (je.contains("L")) w.L = XiU::from_json(je.at("L"));
                if (je.contains("H")) w.H = XiU::from_json(je.at("H"));
                el.one[e] = w;
            }
            if (je.contains("R") || je.contains("S") || je.contains("T")) {
                EdgeTwo w;
                if (je.contains("R")) w.R = XiU::from_json(je.at("R"));
                if (je.contains("S")) w.S = XiU::from_json(je.at("S"));
                if (je.contains("T")) w.T = XiU::from_json(je.at("T"));
                el.two[e] = w;
            }
            if (je.contains("Q")) el.three[e] = XiU::from_json(je.at("Q"));
        }
    prune(el);
    return el;
}

}  // namespace pcs
