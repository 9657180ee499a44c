#include "pcs/paths.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pcs {

namespace {

int base_disk(const DgaModel& m) {
    for (const auto& v : m.fiber.graph.vertices)
        if (v.kind == VertexKind::Disk && v.branch == 0) return v.id;
    throw std::logic_error("internal error: the fiber has no branch-0 disk");
}

bool is_end_of(const MarkedGraph& g, int v, int e) {
    if (e < 0 || e >= static_cast<int>(g.edges.size())) return false;
    const GraphEdge& ed = g.edges[static_cast<size_t>(e)];
    return ed.k == v || ed.l == v;
}

int base_puncture(const DgaModel& m, int comp) {
    auto inc = m.fiber.graph.incident_edges(comp);
    if (inc.empty()) throw std::logic_error("internal error: component without punctures");
    return inc.front();
}

Rat factorial(int n) {
    long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return Rat(f);
}

/// Terms of p free of u.
XiU u0_part(const XiU& p) {
    XiU out;
    for (const auto& [key, c] : p.terms()) {
        if (key.second != 0) continue;
        XiU mono(c);
        for (int i = 0; i < key.first; ++i) mono *= XiU::xi();
        out += mono;
    }
    return out;
}

Scalar const_coeff(const XiU& p) {
    auto it = p.terms().find({0, 0});
    return it == p.terms().end() ? Scalar() : it->second;
}

std::vector<std::vector<std::string>> shuffles(const std::vector<std::string>& a,
                                               const std::vector<std::string>& b) {
    if (a.empty()) return {b};
    if (b.empty()) return {a};
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> a_rest(a.begin() + 1, a.end());
    for (auto s : shuffles(a_rest, b)) {
        s.insert(s.begin(), a.front());
        out.push_back(std::move(s));
    }
    std::vector<std::string> b_rest(b.begin() + 1, b.end());
    for (auto s : shuffles(a, b_rest)) {
        s.insert(s.begin(), b.front());
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

PathEvent PathEvent::cross(int edge, int dir) {
    PathEvent e;
    e.kind = PathEventKind::Cross;
    e.edge = edge;
    e.dir = dir;
    return e;
}

PathEvent PathEvent::wind(int comp, int edge, long turns) {
    PathEvent e;
    e.kind = PathEventKind::Wind;
    e.comp = comp;
    e.edge = edge;
    e.turns = turns;
    return e;
}

PathEvent PathEvent::arc(int comp, int from, int to) {
    PathEvent e;
    e.kind = PathEventKind::Arc;
    e.comp = comp;
    e.from = from;
    e.to = to;
    return e;
}

PathEvent PathEvent::cycle(int comp, int gen, long turns) {
    PathEvent e;
    e.kind = PathEventKind::CycleLoop;
    e.comp = comp;
    e.gen = gen;
    e.turns = turns;
    return e;
}

int path_start(const DgaModel& m, const PathWord& w) {
    if (w.events.empty()) return base_disk(m);
    const PathEvent& e = w.events.front();
    if (e.kind == PathEventKind::Cross) {
        const auto& edges = m.fiber.graph.edges;
        if (e.edge < 0 || e.edge >= static_cast<int>(edges.size())) return -1;
        const GraphEdge& ed = edges[static_cast<size_t>(e.edge)];
        return e.dir > 0 ? ed.k : ed.l;
    }
    return e.comp;
}

std::vector<std::string> path_check(const DgaModel& m, const PathWord& w) {
    std::vector<std::string> out;
    const MarkedGraph& g = m.fiber.graph;
    int pos = path_start(m, w);
    if (pos < 0 || pos >= static_cast<int>(g.vertices.size())) {
        out.push_back("event 0: no valid start position");
        return out;
    }
    for (size_t i = 0; i < w.events.size(); ++i) {
        const PathEvent& e = w.events[i];
        std::string tag = "event " + std::to_string(i) + ": ";
        switch (e.kind) {
            case PathEventKind::Cross: {
                if (e.edge < 0 || e.edge >= static_cast<int>(g.edges.size())) {
                    out.push_back(tag + "unknown edge");
                    return out;
                }
                if (e.dir != 1 && e.dir != -1) {
                    out.push_back(tag + "crossing direction must be +1 or -1");
                    return out;
                }
                const GraphEdge& ed = g.edges[static_cast<size_t>(e.edge)];
                int enter = e.dir > 0 ? ed.k : ed.l;
                int leave = e.dir > 0 ? ed.l : ed.k;
                if (pos != enter) {
                    out.push_back(tag + "crossing edge " + std::to_string(e.edge) +
                                  " from the wrong side");
                    return out;
                }
                pos = leave;
                break;
            }
            case PathEventKind::Wind:
                if (e.comp != pos) {
                    out.push_back(tag + "winding on a component the path is not on");
                    return out;
                }
                if (!is_end_of(g, e.comp, e.edge)) {
                    out.push_back(tag + "winding puncture is not on the component");
                    return out;
                }
                break;
            case PathEventKind::Arc:
                if (e.comp != pos) {
                    out.push_back(tag + "arc on a component the path is not on");
                    return out;
                }
                if (!is_end_of(g, e.comp, e.from) || !is_end_of(g, e.comp, e.to)) {
                    out.push_back(tag + "arc endpoint is not a puncture of the component");
                    return out;
                }
                break;
            case PathEventKind::CycleLoop: {
                if (e.comp != pos) {
                    out.push_back(tag + "loop on a component the path is not on");
                    return out;
                }
                long genus = g.vertices[static_cast<size_t>(e.comp)].genus;
                if (genus < 1 || e.gen < 1 || e.gen > 2 * genus) {
                    out.push_back(tag + "no such genus generator on the component");
                    return out;
                }
                break;
            }
        }
    }
    return out;
}

int path_end(const DgaModel& m, const PathWord& w) {
    if (!path_check(m, w).empty()) return -1;
    int pos = path_start(m, w);
    for (const PathEvent& e : w.events)
        if (e.kind == PathEventKind::Cross) {
            const GraphEdge& ed = m.fiber.graph.edges[static_cast<size_t>(e.edge)];
            pos = e.dir > 0 ? ed.l : ed.k;
        }
    return pos;
}

bool is_based(const DgaModel& m, const PathWord& w) {
    if (!path_check(m, w).empty()) return false;
    int b = base_disk(m);
    return path_start(m, w) == b && path_end(m, w) == b;
}

PathWord path_inverse(const PathWord& w) {
    PathWord out;
    for (auto it = w.events.rbegin(); it != w.events.rend(); ++it) {
        PathEvent e = *it;
        switch (e.kind) {
            case PathEventKind::Cross: e.dir = -e.dir; break;
            case PathEventKind::Wind: e.turns = -e.turns; break;
            case PathEventKind::Arc: std::swap(e.from, e.to); break;
            case PathEventKind::CycleLoop: e.turns = -e.turns; break;
        }
        out.events.push_back(e);
    }
    return out;
}

PathWord path_concat(const PathWord& a, const PathWord& b) {
    PathWord out = a;
    out.events.insert(out.events.end(), b.events.begin(), b.events.end());
    return out;
}

Json path_to_json(const PathWord& w) {
    Json out = Json::array();
    for (const PathEvent& e : w.events) {
        switch (e.kind) {
            case PathEventKind::Cross:
                out.push_back({{"ev", "cross"}, {"edge", e.edge}, {"dir", e.dir}});
                break;
            case PathEventKind::Wind:
                out.push_back(
                    {{"ev", "wind"}, {"comp", e.comp}, {"edge", e.edge}, {"n", e.turns}});
                break;
            case PathEventKind::Arc:
                out.push_back(
                    {{"ev", "arc"}, {"comp", e.comp}, {"from", e.from}, {"to", e.to}});
                break;
            case PathEventKind::CycleLoop:
                out.push_back(
                    {{"ev", "cycle"}, {"comp", e.comp}, {"gen", e.gen}, {"n", e.turns}});
                break;
        }
    }
    return out;
}

PathWord path_from_json(const Json& j) {
    PathWord w;
    for (const Json& e : j) {
        std::string ev = e.at("ev").get<std::string>();
        if (ev == "cross")
            w.events.push_back(PathEvent::cross(e.at("edge").get<int>(), e.at("dir").get<int>()));
        else if (ev == "wind")
            w.events.push_back(PathEvent::wind(e.at("comp").get<int>(), e.at("edge").get<int>(),
                                               e.at("n").get<long>()));
        else if (ev == "arc")
            w.events.push_back(PathEvent::arc(e.at("comp").get<int>(), e.at("from").get<int>(),
                                              e.at("to").get<int>()));
        else if (ev == "cycle")
            w.events.push_back(PathEvent::cycle(e.at("comp").get<int>(), e.at("gen").get<int>(),
                                                e.at("n").get<long>()));
        else
            throw std::invalid_argument("unknown path event: " + ev);
    }
    return w;
}

PeriodValue::PeriodValue(const Scalar& c) {
    if (!c.is_zero()) terms_[{}] = c;
}

PeriodValue PeriodValue::one() { return PeriodValue(Scalar(1)); }

PeriodValue PeriodValue::atom(const PeriodAtom& a) {
    PeriodValue v;
    v.terms_[{a}] = Scalar(1);
    return v;
}

Scalar PeriodValue::scalar_part() const {
    auto it = terms_.find({});
    return it == terms_.end() ? Scalar() : it->second;
}

void PeriodValue::add_term(const Term& t, const Scalar& c) {
    if (c.is_zero()) return;
    Scalar& slot = terms_[t];
    slot += c;
    if (slot.is_zero()) terms_.erase(t);
}

PeriodValue PeriodValue::operator-() const {
    PeriodValue out;
    for (const auto& [t, c] : terms_) out.terms_[t] = -c;
    return out;
}

PeriodValue& PeriodValue::operator+=(const PeriodValue& o) {
    for (const auto& [t, c] : o.terms_) add_term(t, c);
    return *this;
}

PeriodValue& PeriodValue::operator-=(const PeriodValue& o) {
    for (const auto& [t, c] : o.terms_) add_term(t, -c);
    return *this;
}

PeriodValue& PeriodValue::operator*=(const Scalar& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [t, tc] : terms_) tc *= c;
    return *this;
}

PeriodValue& PeriodValue::operator*=(const PeriodValue& o) {
    PeriodValue out;
    for (const auto& [ta, ca] : terms_) {
        for (const auto& [tb, cb] : o.terms_) {
            // Merge tb's atoms into ta one at a time, shuffling words over a
            // shared arc.
            std::map<Term, Scalar> acc{{ta, ca * cb}};
            for (const PeriodAtom& a : tb) {
                std::map<Term, Scalar> next;
                for (const auto& [t, c] : acc) {
                    auto same = std::find_if(t.begin(), t.end(), [&](const PeriodAtom& x) {
                        return x.comp == a.comp && x.cycle == a.cycle && x.target == a.target;
                    });
                    if (same == t.end()) {
                        Term nt = t;
                        nt.insert(std::upper_bound(nt.begin(), nt.end(), a), a);
                        next[nt] += c;
                    } else {
                        Term rest;
                        rest.reserve(t.size() - 1);
                        for (const PeriodAtom& x : t)
                            if (&x != &*same) rest.push_back(x);
                        for (const auto& word : shuffles(same->word, a.word)) {
                            PeriodAtom na = a;
                            na.word = word;
                            Term nt = rest;
                            nt.insert(std::upper_bound(nt.begin(), nt.end(), na), na);
                            next[nt] += c;
                        }
                    }
                }
                acc = std::move(next);
            }
            for (const auto& [t, c] : acc) out.add_term(t, c);
        }
    }
    terms_ = std::move(out.terms_);
    return *this;
}

std::string PeriodValue::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [t, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        for (const PeriodAtom& a : t) {
            os << "*P[";
            for (size_t i = 0; i < a.word.size(); ++i) {
                if (i) os << ",";
                os << a.word[i];
            }
            os << "; c" << a.comp;
            if (a.cycle)
                os << " loop " << a.target;
            else
                os << " ->e" << a.target;
            os << "]";
        }
    }
    return os.str();
}

Json PeriodValue::to_json() const {
    Json terms = Json::array();
    for (const auto& [t, c] : terms_) {
        Json atoms = Json::array();
        for (const PeriodAtom& a : t)
            atoms.push_back({{"comp", a.comp},
                             {"kind", a.cycle ? "cycle" : "arc"},
                             {"target", a.target},
                             {"word", a.word}});
        terms.push_back({{"coef", c.str()}, {"atoms", atoms}});
    }
    return Json{{"terms", terms}};
}

namespace {

void require_path(const DgaModel& m, const PathWord& w) {
    auto issues = path_check(m, w);
    if (!issues.empty()) throw std::invalid_argument("invalid path: " + issues.front());
}

/// Events with multi-turn genus loops expanded into unit turns; everything
/// else evaluates atomically.
std::vector<PathEvent> segments(const PathWord& w) {
    std::vector<PathEvent> out;
    for (const PathEvent& e : w.events) {
        if (e.kind == PathEventKind::CycleLoop) {
            long n = e.turns;
            PathEvent unit = e;
            unit.turns = n > 0 ? 1 : -1;
            for (long i = 0; i < (n > 0 ? n : -n); ++i) out.push_back(unit);
        } else {
            out.push_back(e);
        }
    }
    return out;
}

using Slice = std::vector<const DgaElement*>;

/// Time-ordered integral over [0,1] of the u-free node profiles, factors in
/// slice order.
Scalar cross_forward(const Slice& fs, int edge) {
    XiU f(1);
    for (const DgaElement* phi : fs) {
        auto it = phi->one.find(edge);
        if (it == phi->one.end()) return Scalar();
        XiU h = u0_part(it->second.H);
        if (h.is_zero()) return Scalar();
        f = (h * f).integrate_xi();
    }
    return const_coeff(f.at_xi(1));
}

Scalar wind_residue(const DgaModel& m, const DgaElement& phi, int comp, int edge) {
    auto it = phi.one.find(edge);
    if (it == phi.one.end()) return Scalar();
    const GraphEdge& ed = m.fiber.graph.edges[static_cast<size_t>(edge)];
    return comp == ed.k ? const_coeff(it->second.K.at_xi(0))
                        : const_coeff(it->second.L.at_xi(1));
}

/// All ways to pick one named generator per factor on the component, with
/// the product of coefficients. Empty when some factor has no surface part
/// there.
std::vector<std::pair<Scalar, std::vector<std::string>>> gen_words(const Slice& fs, int comp) {
    std::vector<std::vector<std::pair<std::string, Scalar>>> options;
    for (const DgaElement* phi : fs) {
        auto it = phi->surf.find(comp);
        if (it == phi->surf.end()) return {};
        std::vector<std::pair<std::string, Scalar>> opts;
        for (const auto& [name, c] : it->second)
            if (name != "1" && !c.is_zero()) opts.emplace_back(name, c);
        if (opts.empty()) return {};
        options.push_back(std::move(opts));
    }
    std::vector<std::pair<Scalar, std::vector<std::string>>> out;
    std::vector<size_t> idx(options.size(), 0);
    while (true) {
        Scalar c(1);
        std::vector<std::string> word;
        for (size_t j = 0; j < options.size(); ++j) {
            c *= options[j][idx[j]].second;
            word.push_back(options[j][idx[j]].first);
        }
        out.emplace_back(c, std::move(word));
        size_t j = 0;
        for (; j < idx.size(); ++j) {
            if (++idx[j] < options[j].size()) break;
            idx[j] = 0;
        }
        if (j == idx.size()) break;
    }
    return out;
}

/// P[word; base -> target] as a value: the unit for the empty word, zero
/// for a nonempty word ending at the base itself.
PeriodValue arc_factor(const DgaModel& m, int comp, int target,
                       const std::vector<std::string>& word) {
    if (word.empty()) return PeriodValue::one();
    if (target == base_puncture(m, comp)) return PeriodValue();
    PeriodAtom a;
    a.comp = comp;
    a.cycle = false;
    a.target = target;
    a.word = word;
    return PeriodValue::atom(a);
}

PeriodValue atomic_value(const DgaModel& m, const PathEvent& seg, const Slice& fs);

PeriodValue atomic_reversed(const DgaModel& m, PathEvent seg, const Slice& fs) {
    Slice rev(fs.rbegin(), fs.rend());
    PeriodValue v = atomic_value(m, seg, rev);
    if (fs.size() % 2 == 1) v *= Scalar(-1);
    return v;
}

PeriodValue atomic_value(const DgaModel& m, const PathEvent& seg, const Slice& fs) {
    int r = static_cast<int>(fs.size());
    switch (seg.kind) {
        case PathEventKind::Cross: {
            if (seg.dir < 0) {
                PathEvent fwd = seg;
                fwd.dir = 1;
                return atomic_reversed(m, fwd, fs);
            }
            return PeriodValue(cross_forward(fs, seg.edge));
        }
        case PathEventKind::Wind: {
            Scalar v(1);
            for (const DgaElement* phi : fs)
                v *= Scalar(seg.turns) * Scalar::tau() * wind_residue(m, *phi, seg.comp, seg.edge);
            v *= Rat(1) / factorial(r);
            return PeriodValue(v);
        }
        case PathEventKind::Arc: {
            PeriodValue out;
            for (const auto& [c, word] : gen_words(fs, seg.comp)) {
                for (int mcut = 0; mcut <= r; ++mcut) {
                    std::vector<std::string> left(word.begin(), word.begin() + mcut);
                    std::reverse(left.begin(), left.end());
                    std::vector<std::string> right(word.begin() + mcut, word.end());
                    PeriodValue lhs = arc_factor(m, seg.comp, seg.from, left);
                    if (lhs.is_zero()) continue;
                    PeriodValue rhs = arc_factor(m, seg.comp, seg.to, right);
                    if (rhs.is_zero()) continue;
                    Scalar sign = mcut % 2 == 0 ? Scalar(1) : Scalar(-1);
                    out += lhs * rhs * (c * sign);
                }
            }
            return out;
        }
        case PathEventKind::CycleLoop: {
            if (seg.turns < 0) {
                PathEvent fwd = seg;
                fwd.turns = 1;
                return atomic_reversed(m, fwd, fs);
            }
            PeriodValue out;
            for (const auto& [c, word] : gen_words(fs, seg.comp)) {
                PeriodAtom a;
                a.comp = seg.comp;
                a.cycle = true;
                a.target = seg.gen;
                a.word = word;
                out += PeriodValue::atom(a) * c;
            }
            return out;
        }
    }
    return PeriodValue();
}

/// Composition dynamic program: the value of the factor word along the
/// segment sequence, summed over all splits into consecutive blocks.
PeriodValue eval_word(const DgaModel& m, const std::vector<DgaElement>& fs, const PathWord& w) {
    for (const DgaElement& f : fs)
        if (f.degree != 1) return PeriodValue();
    int r = static_cast<int>(fs.size());
    std::vector<PeriodValue> v(static_cast<size_t>(r) + 1);
    v[0] = PeriodValue::one();
    for (const PathEvent& seg : segments(w)) {
        std::vector<PeriodValue> next(static_cast<size_t>(r) + 1);
        for (int hi = 0; hi <= r; ++hi) {
            next[static_cast<size_t>(hi)] = v[static_cast<size_t>(hi)];
            for (int lo = 0; lo < hi; ++lo) {
                if (v[static_cast<size_t>(lo)].is_zero()) continue;
                Slice slice;
                for (int j = lo; j < hi; ++j) slice.push_back(&fs[static_cast<size_t>(j)]);
                PeriodValue av = atomic_value(m, seg, slice);
                if (av.is_zero()) continue;
                next[static_cast<size_t>(hi)] += v[static_cast<size_t>(lo)] * av;
            }
        }
        v = std::move(next);
    }
    return v[static_cast<size_t>(r)];
}

PeriodValue eval_tensor(const DgaModel& m, const BarTensor& t, const PathWord& w) {
    PeriodValue out(t.constant);
    for (const auto& [c, fs] : t.terms) out += eval_word(m, fs, w) * c;
    return out;
}

}  // namespace

PeriodValue integrate_closed(const DgaModel& m, const DgaElement& phi, const PathWord& w) {
    require_path(m, w);
    if (phi.degree != 1) throw std::invalid_argument("the form must have degree 1");
    if (!d(m, phi).is_zero()) throw std::invalid_argument("the form must be closed");
    if (!compat_check(m, phi).empty())
        throw std::invalid_argument("the form must be compatible");
    return eval_word(m, {phi}, w);
}

PeriodValue iterated_integral(const DgaModel& m, const BarTensor& t, const PathWord& w) {
    require_path(m, w);
    if (!is_chen_closed(m, t))
        throw std::invalid_argument("the tensor must be Chen-closed");
    return eval_tensor(m, t, w);
}

TransportSeries series_mul(const TransportSeries& a, const TransportSeries& b) {
    TransportSeries out;
    out.length = a.length;
    for (const auto& [wa, va] : a.coeff)
        for (const auto& [wb, vb] : b.coeff) {
            if (wa.size() + wb.size() > static_cast<size_t>(out.length)) continue;
            std::vector<int> w = wa;
            w.insert(w.end(), wb.begin(), wb.end());
            PeriodValue prod = va * vb;
            auto it = out.coeff.find(w);
            if (it == out.coeff.end())
                out.coeff[w] = prod;
            else
                it->second += prod;
        }
    for (auto it = out.coeff.begin(); it != out.coeff.end();)
        it = it->second.is_zero() && !it->first.empty() ? out.coeff.erase(it) : std::next(it);
    return out;
}

TransportSeries transport(const DgaModel& m, const Fpsc& conn, const PathWord& w) {
    require_path(m, w);
    if (!fpsc_flat(fpsc_curvature(m, conn)))
        throw std::invalid_argument("transport requires a flat connection");

    std::set<int> letters;
    for (const auto& [word, form] : conn.words)
        for (int x : word) letters.insert(x);

    TransportSeries out;
    out.length = conn.length;
    out.coeff[{}] = PeriodValue::one();

    std::vector<std::vector<int>> words{{}};
    for (size_t i = 0; i < words.size(); ++i) {
        if (words[i].size() >= static_cast<size_t>(conn.length)) continue;
        if (words.size() > 65536) throw std::invalid_argument("transport truncation is too large");
        for (int x : letters) {
            std::vector<int> nw = words[i];
            nw.push_back(x);
            words.push_back(std::move(nw));
        }
    }

    for (const auto& word : words) {
        if (word.empty()) continue;
        PeriodValue total;
        // Sum over factorizations of the word into connection words.
        std::vector<std::vector<DgaElement>> stack{{}};
        std::vector<size_t> consumed{0};
        while (!stack.empty()) {
            std::vector<DgaElement> fs = std::move(stack.back());
            stack.pop_back();
            size_t done = consumed.back();
            consumed.pop_back();
            if (done == word.size()) {
                total += eval_word(m, fs, w);
                continue;
            }
            for (size_t len = 1; done + len <= word.size(); ++len) {
                std::vector<int> piece(word.begin() + static_cast<long>(done),
                                       word.begin() + static_cast<long>(done + len));
                auto it = conn.words.find(piece);
                if (it == conn.words.end()) continue;
                std::vector<DgaElement> nfs = fs;
                nfs.push_back(it->second);
                stack.push_back(std::move(nfs));
                consumed.push_back(done + len);
            }
        }
        if (!total.is_zero()) out.coeff[word] = total;
    }
    return out;
}

PeriodValue groupring_pairing(const DgaModel& m, const BarTensor& t,
                              const std::vector<GroupRingTerm>& combo) {
    if (!is_chen_closed(m, t))
        throw std::invalid_argument("the tensor must be Chen-closed");
    PeriodValue out;
    for (const GroupRingTerm& term : combo) {
        size_t s = term.loops.size();
        for (const PathWord& loop : term.loops)
            if (!is_based(m, loop))
                throw std::invalid_argument("group ring elements need based loops");
        for (size_t mask = 0; mask < (size_t{1} << s); ++mask) {
            PathWord path;
            int picked = 0;
            for (size_t i = 0; i < s; ++i)
                if (mask & (size_t{1} << i)) {
                    path = path_concat(path, term.loops[i]);
                    ++picked;
                }
            long sign = (static_cast<long>(s) - picked) % 2 == 0 ? 1 : -1;
            out += eval_tensor(m, t, path) * Scalar(sign * term.coeff);
        }
    }
    return out;
}

PeriodValue vary_tangent(const DgaModel& m, const BarTensor& t, const PathWord& w,
                         const Scalar& log_lambda) {
    require_path(m, w);
    if (!is_chen_closed(m, t))
        throw std::invalid_argument("the tensor must be Chen-closed");
    return eval_tensor(m, lambda_n_bar(m, t, -log_lambda), w);
}

PeriodValue vary_tangent(const DgaModel& m, const DgaElement& phi, const PathWord& w,
                         const Scalar& log_lambda) {
    return integrate_closed(m, lambda_n(m, phi, -log_lambda), w);
}

PeriodValue vary_base(const DgaModel& m, const BarTensor& t, const PathWord& w,
                      const Scalar& log_mu, int branch) {
    require_path(m, w);
    if (!is_chen_closed(m, t))
        throw std::invalid_argument("the tensor must be Chen-closed");
    BarTensor flowed = t;
    BarTensor cur = t;
    Scalar coef(1);
    for (int k = 1; k <= 64; ++k) {
        cur = apply_M_bar(m, cur, branch);
        if (cur.is_zero()) break;
        coef *= log_mu * Rat(1, k);
        flowed = bar_add(flowed, bar_scale(coef, cur));
    }
    return eval_tensor(m, flowed, w);
}

namespace {

int comp_at(const DgaModel& m, const PathWord& w, size_t pos) {
    int cur = path_start(m, w);
    for (size_t i = 0; i < pos && i < w.events.size(); ++i) {
        const PathEvent& e = w.events[i];
        if (e.kind == PathEventKind::Cross) {
            const GraphEdge& ed = m.fiber.graph.edges[static_cast<size_t>(e.edge)];
            cur = e.dir > 0 ? ed.l : ed.k;
        }
    }
    return cur;
}

bool is_trivial_event(const PathEvent& e) {
    switch (e.kind) {
        case PathEventKind::Wind: return e.turns == 0;
        case PathEventKind::Arc: return e.from == e.to;
        case PathEventKind::CycleLoop: return e.turns == 0;
        case PathEventKind::Cross: return false;
    }
    return false;
}

}  // namespace

PathWord homotopy_move(const DgaModel& m, const PathWord& w, const HomotopyMove& move) {
    require_path(m, w);
    const auto fail = [] { throw std::invalid_argument("move does not apply at this position"); };
    PathWord out = w;
    auto& ev = out.events;
    switch (move.kind) {
        case MoveKind::InsertBacktrack: {
            if (move.pos > ev.size()) fail();
            if (move.edge < 0 || move.edge >= static_cast<int>(m.fiber.graph.edges.size()))
                fail();
            const GraphEdge& ed = m.fiber.graph.edges[static_cast<size_t>(move.edge)];
            int enter = move.dir > 0 ? ed.k : ed.l;
            if (comp_at(m, w, move.pos) != enter) fail();
            ev.insert(ev.begin() + static_cast<long>(move.pos),
                      {PathEvent::cross(move.edge, move.dir),
                       PathEvent::cross(move.edge, -move.dir)});
            break;
        }
        case MoveKind::RemoveBacktrack: {
            if (move.pos + 1 >= ev.size()) fail();
            const PathEvent& a = ev[move.pos];
            const PathEvent& b = ev[move.pos + 1];
            if (a.kind != PathEventKind::Cross || b.kind != PathEventKind::Cross ||
                a.edge != b.edge || a.dir != -b.dir)
                fail();
            ev.erase(ev.begin() + static_cast<long>(move.pos),
                     ev.begin() + static_cast<long>(move.pos) + 2);
            break;
        }
        case MoveKind::MergeWinds: {
            if (move.pos + 1 >= ev.size()) fail();
            PathEvent& a = ev[move.pos];
            const PathEvent& b = ev[move.pos + 1];
            if (a.kind != PathEventKind::Wind || b.kind != PathEventKind::Wind ||
                a.comp != b.comp || a.edge != b.edge)
                fail();
            a.turns += b.turns;
            ev.erase(ev.begin() + static_cast<long>(move.pos) + 1);
            break;
        }
        case MoveKind::SplitWind: {
            if (move.pos >= ev.size() || ev[move.pos].kind != PathEventKind::Wind) fail();
            PathEvent second = ev[move.pos];
            second.turns = ev[move.pos].turns - move.split;
            ev[move.pos].turns = move.split;
            ev.insert(ev.begin() + static_cast<long>(move.pos) + 1, second);
            break;
        }
        case MoveKind::RecutArc: {
            if (move.pos >= ev.size() || ev[move.pos].kind != PathEventKind::Arc) fail();
            PathEvent& a = ev[move.pos];
            if (!is_end_of(m.fiber.graph, a.comp, move.via)) fail();
            PathEvent second = PathEvent::arc(a.comp, move.via, a.to);
            a.to = move.via;
            ev.insert(ev.begin() + static_cast<long>(move.pos) + 1, second);
            break;
        }
        case MoveKind::MergeArcs: {
            if (move.pos + 1 >= ev.size()) fail();
            PathEvent& a = ev[move.pos];
            const PathEvent& b = ev[move.pos + 1];
            if (a.kind != PathEventKind::Arc || b.kind != PathEventKind::Arc ||
                a.comp != b.comp || a.to != b.from)
                fail();
            a.to = b.to;
            ev.erase(ev.begin() + static_cast<long>(move.pos) + 1);
            break;
        }
        case MoveKind::DropTrivial: {
            if (move.pos >= ev.size() || !is_trivial_event(ev[move.pos])) fail();
            ev.erase(ev.begin() + static_cast<long>(move.pos));
            break;
        }
        case MoveKind::InsertTrivial: {
            if (move.pos > ev.size() || !is_trivial_event(move.trivial)) fail();
            PathEvent e = move.trivial;
            if (e.comp != comp_at(m, w, move.pos)) fail();
            bool ok = true;
            if (e.kind == PathEventKind::Wind) ok = is_end_of(m.fiber.graph, e.comp, e.edge);
            if (e.kind == PathEventKind::Arc)
                ok = is_end_of(m.fiber.graph, e.comp, e.from) &&
                     is_end_of(m.fiber.graph, e.comp, e.to);
            if (e.kind == PathEventKind::CycleLoop) {
                long genus =
                    m.fiber.graph.vertices[static_cast<size_t>(e.comp)].genus;
                ok = genus >= 1 && e.gen >= 1 && e.gen <= 2 * genus;
            }
            if (!ok) fail();
            ev.insert(ev.begin() + static_cast<long>(move.pos), e);
            break;
        }
    }
    return out;
}

}  // namespace pcs
