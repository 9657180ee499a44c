#include "pcs/resolution.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pcs {

namespace {

std::vector<long> euclid_mults(long a, long b) {
    std::vector<long> out;
    while (a > 0 && b > 0) {
        if (a >= b) {
            out.push_back(b);
            a -= b;
        } else {
            out.push_back(a);
            b -= a;
        }
    }
    return out;
}

}  // namespace

long MultiplicitySeq::delta() const {
    long d = 0;
    for (long v : m) d += v * (v - 1) / 2;
    return d;
}

MultiplicitySeq multiplicity_sequence(const PuiseuxPairs& p) {
    validate_pairs(p);
    if (p.pairs.empty()) return {{1}};
    size_t g = p.pairs.size();
    // Characteristic integers: beta_0 the multiplicity, beta_i = k_i * m_{i+1}..m_g.
    std::vector<long> suffix(g + 1, 1);
    for (size_t i = g; i > 0; --i) suffix[i - 1] = suffix[i] * p.pairs[i - 1].first;
    std::vector<long> beta(g + 1);
    beta[0] = suffix[0];
    for (size_t i = 1; i <= g; ++i) beta[i] = p.pairs[i - 1].second * suffix[i];
    std::vector<long> e(g + 1);
    e[0] = beta[0];
    for (size_t i = 1; i <= g; ++i) e[i] = std::gcd(e[i - 1], beta[i]);

    std::vector<long> seq = euclid_mults(beta[1], beta[0]);
    for (size_t i = 2; i <= g; ++i) {
        auto block = euclid_mults(beta[i] - beta[i - 1], e[i - 1]);
        seq.insert(seq.end(), block.begin(), block.end());
    }
    while (seq.size() > 1 && seq.back() == 1) seq.pop_back();
    if (seq.empty()) seq.push_back(1);
    return {seq};
}

MultiplicitySeq multiplicity_sequence(const BranchSpec& b) {
    return multiplicity_sequence(puiseux_pairs_from_exponents(b));
}

int ResolutionGraph::num_exceptional() const {
    int n = 0;
    for (const auto& v : vertices)
        if (v.exceptional) ++n;
    return n;
}

std::vector<int> ResolutionGraph::strict_attach() const {
    std::vector<int> out(static_cast<size_t>(num_branches), -1);
    for (const auto& v : vertices) {
        if (v.exceptional) continue;
        for (const auto& ed : edges) {
            if (ed.k == v.id) out[static_cast<size_t>(v.branch)] = ed.l;
            if (ed.l == v.id) out[static_cast<size_t>(v.branch)] = ed.k;
        }
    }
    return out;
}

namespace {

// One branch's chain of infinitely near points with proximity structure,
// multiplicities extended by trailing 1s. Indices are 1-based depths.
struct Chain {
    std::vector<long> m;                      // m[t], t = 1..size-1
    std::vector<std::vector<int>> children;   // children[s] = depths proximate to s
    std::vector<std::vector<int>> prox;       // prox[t] subset of {1..t-1}
    int own_N = 1;

    long at(int t) const { return m.at(static_cast<size_t>(t)); }
};

Chain make_chain(const MultiplicitySeq& seq, int length) {
    Chain c;
    c.m.assign(static_cast<size_t>(length) + 3, 1);
    c.m[0] = 0;  // unused slot
    for (size_t i = 0; i < seq.m.size() && i + 1 < c.m.size(); ++i) c.m[i + 1] = seq.m[i];

    int L = static_cast<int>(c.m.size()) - 1;
    c.children.assign(c.m.size(), {});
    c.prox.assign(c.m.size(), {});
    for (int s = 1; s <= L; ++s) {
        long budget = c.m[static_cast<size_t>(s)];
        long acc = 0;
        for (int t = s + 1; t <= L && acc < budget; ++t) {
            acc += c.m[static_cast<size_t>(t)];
            c.children[static_cast<size_t>(s)].push_back(t);
        }
        // Runs truncated by the array end stay incomplete; complete runs must
        // balance exactly.
        if (acc > budget) throw std::logic_error("proximity sums do not balance");
    }
    for (int t = 2; t <= L; ++t) {
        auto& pr = c.prox[static_cast<size_t>(t)];
        for (int s = 1; s < t; ++s) {
            const auto& ch = c.children[static_cast<size_t>(s)];
            if (std::find(ch.begin(), ch.end(), t) != ch.end()) pr.push_back(s);
        }
        std::sort(pr.begin(), pr.end(), std::greater<int>());
        if (pr.empty() || pr[0] != t - 1)
            throw std::logic_error("chain point not proximate to its predecessor");
        if (pr.size() > 2) throw std::logic_error("point proximate to more than two others");
    }
    return c;
}

bool chain_exit_ok(const Chain& c, int N) {
    int L = static_cast<int>(c.m.size()) - 3;
    if (N + 2 > L) throw std::logic_error("chain too short for exit test");
    if (c.prox[static_cast<size_t>(N + 1)].size() != 1) return false;  // next point must be free
    if (c.at(N + 1) != 1) return false;
    const auto& ch = c.children[static_cast<size_t>(N)];
    return std::find(ch.begin(), ch.end(), N + 2) == ch.end();
}

int own_cluster_length(const Chain& c) {
    int sing = 0;
    for (size_t t = 1; t < c.m.size(); ++t)
        if (c.m[t] >= 2) sing = static_cast<int>(t);
    int N = std::max(sing, 1);
    while (!chain_exit_ok(c, N)) ++N;
    return N;
}

}  // namespace

ResolutionGraph build_resolution_graph(const CurveSpec& c) {
    validate_curve_spec(c);
    int r = c.num_branches();
    std::vector<MultiplicitySeq> seqs;
    seqs.reserve(static_cast<size_t>(r));
    bool any_singular = false;
    for (const auto& b : c.branches) {
        seqs.push_back(multiplicity_sequence(b));
        any_singular |= seqs.back().m[0] >= 2;
    }
    if (r == 1 && !any_singular)
        throw std::invalid_argument("smooth germ: no singularity to resolve");

    // Pairwise shared depths first, with a crude chain length, then rebuild
    // chains long enough for all exit tests.
    long max_I = 1;
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) max_I = std::max(max_I, c.intersection(i, j));
    int guess = 4;
    for (const auto& s : seqs) guess = std::max(guess, static_cast<int>(s.m.size()));
    guess += static_cast<int>(max_I) + 4;
    std::vector<Chain> chains;
    chains.reserve(static_cast<size_t>(r));
    for (const auto& s : seqs) chains.push_back(make_chain(s, guess));

    std::vector<std::vector<int>> D(static_cast<size_t>(r), std::vector<int>(static_cast<size_t>(r), 0));
    for (int i = 0; i < r; ++i) {
        for (int j = i + 1; j < r; ++j) {
            long I = c.intersection(i, j);
            long S = 0;
            int depth = 0;
            while (S < I) {
                ++depth;
                if (depth >= guess)
                    throw ContactError("intersection multiplicity too large for branch data");
                S += chains[static_cast<size_t>(i)].at(depth) * chains[static_cast<size_t>(j)].at(depth);
            }
            if (S != I)
                throw ContactError("no cluster depth matches intersection " + std::to_string(I) +
                                   " of branches " + std::to_string(i) + "," + std::to_string(j));
            // Shared points must look the same from both branches.
            for (int t = 2; t <= depth; ++t) {
                if (chains[static_cast<size_t>(i)].prox[static_cast<size_t>(t)] !=
                    chains[static_cast<size_t>(j)].prox[static_cast<size_t>(t)])
                    throw ContactError("proximity structure of shared points differs for branches " +
                                       std::to_string(i) + "," + std::to_string(j));
            }
            // Both continuations forced onto the same satellite point cannot separate.
            const auto& pi = chains[static_cast<size_t>(i)].prox[static_cast<size_t>(depth + 1)];
            const auto& pj = chains[static_cast<size_t>(j)].prox[static_cast<size_t>(depth + 1)];
            if (pi.size() == 2 && pi == pj)
                throw ContactError("branches " + std::to_string(i) + "," + std::to_string(j) +
                                   " cannot separate at depth " + std::to_string(depth));
            D[static_cast<size_t>(i)][static_cast<size_t>(j)] = depth;
            D[static_cast<size_t>(j)][static_cast<size_t>(i)] = depth;
        }
    }
    // Sharing depths of any three branches must branch off consistently.
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            for (int k = j + 1; k < r; ++k) {
                int a = D[static_cast<size_t>(i)][static_cast<size_t>(j)];
                int b2 = D[static_cast<size_t>(i)][static_cast<size_t>(k)];
                int c2 = D[static_cast<size_t>(j)][static_cast<size_t>(k)];
                int lo = std::min({a, b2, c2});
                int cnt = (a == lo) + (b2 == lo) + (c2 == lo);
                if (cnt < 2)
                    throw ContactError("sharing depths of branches " + std::to_string(i) + "," +
                                       std::to_string(j) + "," + std::to_string(k) +
                                       " violate tree structure");
            }

    // Cluster length per branch: own exit conditions starting from the
    // deepest shared point.
    std::vector<int> N(static_cast<size_t>(r));
    for (int b = 0; b < r; ++b) {
        int lower = own_cluster_length(chains[static_cast<size_t>(b)]);
        for (int j = 0; j < r; ++j) lower = std::max(lower, D[static_cast<size_t>(b)][static_cast<size_t>(j)]);
        while (!chain_exit_ok(chains[static_cast<size_t>(b)], lower)) ++lower;
        N[static_cast<size_t>(b)] = lower;
    }

    // Merge the chains into one cluster. A point is (depth, class of branches
    // still together at that depth); numbering by depth, then lowest branch.
    auto cls = [&](int b, int t) {
        std::set<int> g{b};
        for (int j = 0; j < r; ++j)
            if (j != b && D[static_cast<size_t>(std::min(b, j))][static_cast<size_t>(std::max(b, j))] >= t)
                g.insert(j);
        return g;
    };
    struct Point {
        int depth;
        std::set<int> owners;
        int id = -1;
    };
    std::vector<Point> points;
    int maxN = *std::max_element(N.begin(), N.end());
    for (int t = 1; t <= maxN; ++t) {
        std::set<int> done;
        for (int b = 0; b < r; ++b) {
            if (N[static_cast<size_t>(b)] < t || done.count(b)) continue;
            auto g = cls(b, t);
            for (int x : g) done.insert(x);
            points.push_back({t, g, -1});
        }
    }
    std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        return *a.owners.begin() < *b.owners.begin();
    });
    for (size_t i = 0; i < points.size(); ++i) points[i].id = static_cast<int>(i);

    auto point_id = [&](int b, int t) {
        for (const auto& p : points)
            if (p.depth == t && p.owners.count(b)) return p.id;
        throw std::logic_error("cluster point lookup failed");
    };

    int P = static_cast<int>(points.size());
    ResolutionGraph g;
    g.num_branches = r;
    g.proximity.assign(static_cast<size_t>(P), {});
    g.point_multiplicity.assign(static_cast<size_t>(P), 0);
    g.self_intersection.assign(static_cast<size_t>(P), 0);
    g.shared_depth = D;
    for (int b = 0; b < r; ++b)
        g.shared_depth[static_cast<size_t>(b)][static_cast<size_t>(b)] = N[static_cast<size_t>(b)];

    for (const auto& p : points) {
        long mc = 0;
        for (int b : p.owners) mc += chains[static_cast<size_t>(b)].at(p.depth);
        g.point_multiplicity[static_cast<size_t>(p.id)] = mc;
        int b0 = *p.owners.begin();
        std::vector<int> pr;
        for (int s : chains[static_cast<size_t>(b0)].prox[static_cast<size_t>(p.depth)])
            pr.push_back(point_id(b0, s));
        std::sort(pr.begin(), pr.end());
        g.proximity[static_cast<size_t>(p.id)] = pr;
    }

    // Multiplicities of the total transform.
    std::vector<long> e(static_cast<size_t>(P), 0);
    for (const auto& p : points) {
        long v = g.point_multiplicity[static_cast<size_t>(p.id)];
        for (int q : g.proximity[static_cast<size_t>(p.id)]) v += e[static_cast<size_t>(q)];
        e[static_cast<size_t>(p.id)] = v;
    }
    for (int i = 0; i < P; ++i)
        g.vertices.push_back({i, e[static_cast<size_t>(i)], true, -1});

    // Exceptional adjacency: q meets p when q is proximate to p and no later
    // point sits on both (blowing that point up separates them).
    auto separated = [&](int p, int q) {
        for (int s = 0; s < P; ++s) {
            const auto& pr = g.proximity[static_cast<size_t>(s)];
            if (std::find(pr.begin(), pr.end(), p) != pr.end() &&
                std::find(pr.begin(), pr.end(), q) != pr.end())
                return true;
        }
        return false;
    };
    int eid = 0;
    for (int q = 0; q < P; ++q)
        for (int p : g.proximity[static_cast<size_t>(q)])
            if (!separated(p, q)) g.edges.push_back({eid++, std::min(p, q), std::max(p, q)});

    // Strict transforms.
    for (int b = 0; b < r; ++b) {
        int vid = P + b;
        g.vertices.push_back({vid, 1, false, b});
        int attach = point_id(b, N[static_cast<size_t>(b)]);
        g.edges.push_back({eid++, std::min(attach, vid), std::max(attach, vid)});
    }

    // Audit: self-intersections and structural minimality.
    for (int p = 0; p < P; ++p) {
        long kids = 0;
        for (int q = 0; q < P; ++q) {
            const auto& pr = g.proximity[static_cast<size_t>(q)];
            if (std::find(pr.begin(), pr.end(), p) != pr.end()) ++kids;
        }
        g.self_intersection[static_cast<size_t>(p)] = -1 - kids;
        if (kids > 0) continue;
        // A final (-1) vertex: make sure contracting it would break something.
        int deg = 0, stricts = 0;
        for (const auto& ed : g.edges) {
            if (ed.k == p || ed.l == p) {
                ++deg;
                int other = ed.k == p ? ed.l : ed.k;
                if (other >= P) ++stricts;
            }
        }
        if (deg >= 3 || stricts >= 2) continue;
        if (stricts != 1) throw std::logic_error("final cluster point carries no branch");
        const auto& pt = points[static_cast<size_t>(p)];
        int b = *pt.owners.begin();
        const Chain& ch = chains[static_cast<size_t>(b)];
        int t = pt.depth;
        bool singular_here = ch.at(t) >= 2;
        bool tangency = false;
        if (t >= 2) {
            const auto& kidsOf = ch.children[static_cast<size_t>(t - 1)];
            tangency = std::find(kidsOf.begin(), kidsOf.end(), t + 1) != kidsOf.end();
        }
        if (!singular_here && !tangency)
            throw std::logic_error("resolution graph is not minimal");
    }
    return g;
}

long lcm_d(const ResolutionGraph& g) {
    long d = 1;
    for (const auto& v : g.vertices) d = std::lcm(d, v.e);
    return d;
}

long mu_from_resolution(const ResolutionGraph& g, int r) {
    long s = 0;
    for (long m : g.point_multiplicity) s += m * (m - 1);
    return s - r + 1;
}

Json resolution_to_json(const ResolutionGraph& g) {
    Json j;
    j["vertices"] = Json::array();
    for (const auto& v : g.vertices) {
        Json jv;
        jv["id"] = v.id;
        jv["multiplicity"] = v.e;
        jv["kind"] = v.exceptional ? "exceptional" : "strict";
        if (!v.exceptional) jv["branch"] = v.branch;
        j["vertices"].push_back(jv);
    }
    j["edges"] = Json::array();
    for (const auto& e : g.edges) j["edges"].push_back(Json::array({e.k, e.l}));
    int P = g.num_exceptional();
    Json prox = Json::array();
    for (int q = 0; q < P; ++q) {
        std::vector<int> row(static_cast<size_t>(P), 0);
        for (int p : g.proximity[static_cast<size_t>(q)]) row[static_cast<size_t>(p)] = 1;
        prox.push_back(row);
    }
    j["proximity"] = prox;
    j["self_intersection"] = g.self_intersection;
    j["shared_depth"] = g.shared_depth;
    j["contact_ambiguity"] = g.contact_ambiguity;
    return j;
}

std::string resolution_to_dot(const ResolutionGraph& g) {
    std::ostringstream os;
    os << "graph resolution {\n";
    for (const auto& v : g.vertices) {
        if (v.exceptional) {
            os << "  v" << v.id << " [shape=ellipse, label=\"E_" << v.id << " (e=" << v.e
               << ")\"];\n";
        } else {
            os << "  v" << v.id << " [shape=box, label=\"strict " << v.branch << "\"];\n";
        }
    }
    for (const auto& e : g.edges) os << "  v" << e.k << " -- v" << e.l << ";\n";
    os << "}\n";
    return os.str();
}

bool resolution_isomorphic(const ResolutionGraph& a, const ResolutionGraph& b) {
    if (a.vertices.size() != b.vertices.size() || a.edges.size() != b.edges.size())
        return false;
    int n = static_cast<int>(a.vertices.size());
    auto adj = [](const ResolutionGraph& g) {
        std::set<std::pair<int, int>> s;
        for (const auto& e : g.edges) s.insert({e.k, e.l});
        return s;
    };
    auto sa = adj(a), sb = adj(b);
    auto sig = [](const ResolutionGraph& g, int i) {
        const auto& v = g.vertices[static_cast<size_t>(i)];
        int deg = 0;
        for (const auto& e : g.edges) deg += (e.k == v.id || e.l == v.id);
        return std::make_tuple(v.e, v.exceptional, deg);
    };
    std::vector<int> perm(static_cast<size_t>(n), -1);
    std::vector<bool> used(static_cast<size_t>(n), false);
    auto compatible = [&](int i, int j) {
        if (sig(a, i) != sig(b, j)) return false;
        // edges among assigned vertices must match
        for (int i2 = 0; i2 < i; ++i2) {
            int j2 = perm[static_cast<size_t>(i2)];
            int ai = a.vertices[static_cast<size_t>(i)].id, ai2 = a.vertices[static_cast<size_t>(i2)].id;
            int bj = b.vertices[static_cast<size_t>(j)].id, bj2 = b.vertices[static_cast<size_t>(j2)].id;
            bool ea = sa.count({std::min(ai, ai2), std::max(ai, ai2)}) > 0;
            bool eb = sb.count({std::min(bj, bj2), std::max(bj, bj2)}) > 0;
            if (ea != eb) return false;
        }
        return true;
    };
    std::function<bool(int)> rec = [&](int i) {
        if (i == n) return true;
        for (int j = 0; j < n; ++j) {
            if (used[static_cast<size_t>(j)] || !compatible(i, j)) continue;
            used[static_cast<size_t>(j)] = true;
            perm[static_cast<size_t>(i)] = j;
            if (rec(i + 1)) return true;
            used[static_cast<size_t>(j)] = false;
            perm[static_cast<size_t>(i)] = -1;
        }
        return false;
    };
    return rec(0);
}

}  // namespace pcs
