#include "pcs/semistable.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace pcs {

namespace {

long gcd_l(long a, long b) { return std::gcd(a, b); }

}  // namespace

EdgeLocalData edge_chain_data(long e_k, long e_l, long d) {
    if (e_k <= 0 || e_l <= 0 || d <= 0)
        throw std::invalid_argument("edge multiplicities and d must be positive");
    long g = gcd_l(e_k, e_l);
    long l = e_k / g * e_l;
    if (d % l != 0)
        throw std::invalid_argument("d not a common multiple of the edge multiplicities (e_k=" +
                                    std::to_string(e_k) + ", e_l=" + std::to_string(e_l) +
                                    ", d=" + std::to_string(d) + ")");
    EdgeLocalData out;
    out.point_count = g;
    out.n_p = d / l;
    out.chain_length = out.n_p - 1;
    return out;
}

CoverData cover_components(long e_i, const std::vector<long>& neighbor_mults, long d) {
    if (e_i <= 0 || d <= 0 || d % e_i != 0)
        throw std::invalid_argument("d not a common multiple of the edge multiplicities (e_i=" +
                                    std::to_string(e_i) + ", d=" + std::to_string(d) + ")");
    // The subgroup of Z/e_i generated by the neighbor multiplicities has
    // order e_i / gcd(e_i, all neighbors); its index is the component count.
    long c = e_i;
    for (long m : neighbor_mults) c = gcd_l(c, m);
    long chi = e_i * (2 - static_cast<long>(neighbor_mults.size()));
    for (long m : neighbor_mults) chi += gcd_l(e_i, m);
    if (chi % (2 * c) != 0)
        throw std::logic_error("internal error: cover Euler characteristic not even per component");
    CoverData out;
    out.components = c;
    out.genus = 1 - chi / (2 * c);
    out.degree = e_i;
    if (out.genus < 0)
        throw std::logic_error("internal error: negative cover genus");
    return out;
}

long CentralFiberGraph::total_genus() const {
    long g = 0;
    for (const auto& v : graph.vertices) g += v.genus;
    return g;
}

long CentralFiberGraph::num_compact() const {
    long n = 0;
    for (const auto& v : graph.vertices)
        if (v.kind == VertexKind::Compact) ++n;
    return n;
}

CentralFiberGraph semistable_reduce(const ResolutionGraph& rg, long base_degree) {
    long d = base_degree > 0 ? base_degree : lcm_d(rg);

    CentralFiberGraph cf;
    cf.d = d;
    cf.cover_of.resize(rg.vertices.size());

    std::vector<std::vector<long>> neighbor_mults(rg.vertices.size());
    for (const auto& e : rg.edges) {
        neighbor_mults[static_cast<size_t>(e.k)].push_back(rg.vertices[static_cast<size_t>(e.l)].e);
        neighbor_mults[static_cast<size_t>(e.l)].push_back(rg.vertices[static_cast<size_t>(e.k)].e);
    }

    std::vector<long> comps(rg.vertices.size(), 0);
    for (size_t v = 0; v < rg.vertices.size(); ++v) {
        CoverData cd = cover_components(rg.vertices[v].e, neighbor_mults[v], d);
        comps[v] = cd.components;
        for (long i = 0; i < cd.components; ++i) {
            GraphVertex gv;
            gv.id = static_cast<int>(cf.graph.vertices.size());
            gv.genus = static_cast<int>(cd.genus);
            if (rg.vertices[v].exceptional) {
                gv.kind = VertexKind::Compact;
            } else {
                gv.kind = VertexKind::Disk;
                gv.branch = rg.vertices[v].branch;
                if (cd.components != 1 || cd.genus != 0)
                    throw std::logic_error("internal error: strict transform cover is not a disk");
            }
            cf.graph.vertices.push_back(gv);
            cf.cover_of[v].push_back(gv.id);
            VertexOrigin o;
            o.from_chain = false;
            o.source = static_cast<int>(v);
            o.index = static_cast<int>(i);
            cf.origin.push_back(o);
        }
    }

    // Only direct cover-to-cover edges can collide; chain edges always touch
    // a freshly inserted vertex.
    std::set<std::pair<int, int>> direct;
    auto add_edge = [&cf, &direct](int a, int b, bool check_parallel) {
        GraphEdge ge;
        ge.id = static_cast<int>(cf.graph.edges.size());
        ge.k = std::min(a, b);
        ge.l = std::max(a, b);
        if (ge.k == ge.l)
            throw std::logic_error("internal error: loop edge in the central fiber");
        if (check_parallel && !direct.insert({ge.k, ge.l}).second)
            throw std::invalid_argument(
                "paper assumption violated: parallel edges in the central fiber");
        cf.graph.edges.push_back(ge);
    };

    for (size_t ei = 0; ei < rg.edges.size(); ++ei) {
        int k = rg.edges[ei].k;
        int l = rg.edges[ei].l;
        long e_k = rg.vertices[static_cast<size_t>(k)].e;
        long e_l = rg.vertices[static_cast<size_t>(l)].e;
        EdgeLocalData ld = edge_chain_data(e_k, e_l, d);
        cf.edge_local.push_back(ld);
        long c_k = comps[static_cast<size_t>(k)];
        long c_l = comps[static_cast<size_t>(l)];
        if (ld.point_count % c_k != 0 || ld.point_count % c_l != 0)
            throw std::logic_error("internal error: cover components do not divide the point count");
        for (long nu = 0; nu < ld.point_count; ++nu) {
            int side_k = cf.cover_of[static_cast<size_t>(k)][static_cast<size_t>(nu % c_k)];
            int side_l = cf.cover_of[static_cast<size_t>(l)][static_cast<size_t>(nu % c_l)];
            if (ld.chain_length == 0) {
                add_edge(side_k, side_l, true);
                continue;
            }
            int prev = side_k;
            for (long pos = 0; pos < ld.chain_length; ++pos) {
                GraphVertex gv;
                gv.id = static_cast<int>(cf.graph.vertices.size());
                gv.genus = 0;
                gv.kind = VertexKind::Compact;
                cf.graph.vertices.push_back(gv);
                VertexOrigin o;
                o.from_chain = true;
                o.source = static_cast<int>(ei);
                o.index = static_cast<int>(nu);
                o.position = static_cast<int>(pos);
                cf.origin.push_back(o);
                add_edge(prev, gv.id, false);
                prev = gv.id;
            }
            add_edge(prev, side_l, false);
        }
    }

    require_valid(cf.graph);
    return cf;
}

long h1_dimension(const CentralFiberGraph& cf) {
    long r = cf.graph.num_branches();
    long sum = 0;
    for (const auto& v : cf.graph.vertices) sum += 2L * v.genus - 2;
    return r + 1 + sum + 2 * static_cast<long>(cf.graph.edges.size());
}

H1Check verify_h1_dimension(const CentralFiberGraph& cf, long mu) {
    H1Check out;
    out.computed = h1_dimension(cf);
    out.expected = mu;
    out.pass = out.computed == out.expected;
    return out;
}

Json central_fiber_to_json(const CentralFiberGraph& cf) {
    Json j = graph_to_json(cf.graph);
    j["d"] = cf.d;
    Json prov = Json::array();
    for (size_t v = 0; v < cf.origin.size(); ++v) {
        const VertexOrigin& o = cf.origin[v];
        Json p;
        p["vertex"] = v;
        if (o.from_chain) {
            p["type"] = "chain";
            p["edge"] = o.source;
            p["point"] = o.index;
            p["position"] = o.position;
        } else {
            p["type"] = "cover";
            p["over"] = o.source;
            p["sheet"] = o.index;
        }
        prov.push_back(p);
    }
    j["provenance"] = prov;
    Json el = Json::array();
    for (size_t e = 0; e < cf.edge_local.size(); ++e) {
        Json x;
        x["edge"] = e;
        x["points"] = cf.edge_local[e].point_count;
        x["n_p"] = cf.edge_local[e].n_p;
        el.push_back(x);
    }
    j["edge_local"] = el;
    return j;
}

}  // namespace pcs
