#include "pcs/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pcs {

const GraphVertex& MarkedGraph::vertex(int id) const {
    for (const auto& v : vertices)
        if (v.id == id) return v;
    throw std::out_of_range("no vertex with id " + std::to_string(id));
}

int MarkedGraph::degree(int id) const {
    int d = 0;
    for (const auto& e : edges)
        if (e.k == id || e.l == id) ++d;
    return d;
}

std::vector<int> MarkedGraph::incident_edges(int id) const {
    std::vector<int> out;
    for (const auto& e : edges)
        if (e.k == id || e.l == id) out.push_back(e.id);
    return out;
}

int MarkedGraph::opposite(int e, int v) const {
    const auto& ed = edges.at(static_cast<size_t>(e));
    if (ed.k == v) return ed.l;
    if (ed.l == v) return ed.k;
    throw std::invalid_argument("vertex " + std::to_string(v) + " not on edge " +
                                std::to_string(e));
}

int MarkedGraph::num_branches() const {
    int n = 0;
    for (const auto& v : vertices)
        if (v.kind == VertexKind::Disk) ++n;
    return n;
}

std::vector<int> MarkedGraph::disk_ids() const {
    std::vector<std::pair<int, int>> bs;
    for (const auto& v : vertices)
        if (v.kind == VertexKind::Disk) bs.emplace_back(v.branch, v.id);
    std::sort(bs.begin(), bs.end());
    std::vector<int> out;
    out.reserve(bs.size());
    for (auto& [b, id] : bs) out.push_back(id);
    return out;
}

std::vector<int> MarkedGraph::compact_ids() const {
    std::vector<int> out;
    for (const auto& v : vertices)
        if (v.kind == VertexKind::Compact) out.push_back(v.id);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

}  // namespace

bool MarkedGraph::is_connected() const {
    if (vertices.empty()) return false;
    std::map<int, int> idx;
    for (const auto& v : vertices) idx[v.id] = static_cast<int>(idx.size());
    UnionFind uf(static_cast<int>(vertices.size()));
    for (const auto& e : edges) {
        auto a = idx.find(e.k), b = idx.find(e.l);
        if (a == idx.end() || b == idx.end()) continue;
        uf.unite(a->second, b->second);
    }
    int root = uf.find(0);
    for (size_t i = 1; i < vertices.size(); ++i)
        if (uf.find(static_cast<int>(i)) != root) return false;
    return true;
}

std::vector<int> MarkedGraph::spanning_tree() const {
    std::map<int, int> idx;
    for (const auto& v : vertices) idx[v.id] = static_cast<int>(idx.size());
    UnionFind uf(static_cast<int>(vertices.size()));
    std::vector<int> tree;
    std::vector<const GraphEdge*> sorted;
    sorted.reserve(edges.size());
    for (const auto& e : edges) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(),
              [](const GraphEdge* a, const GraphEdge* b) { return a->id < b->id; });
    for (const auto* e : sorted)
        if (uf.unite(idx.at(e->k), idx.at(e->l))) tree.push_back(e->id);
    return tree;
}

std::vector<std::string> validate_graph(const MarkedGraph& g) {
    std::vector<std::string> diag;
    std::set<int> ids;
    for (const auto& v : g.vertices) {
        if (!ids.insert(v.id).second)
            diag.push_back("duplicate vertex id " + std::to_string(v.id));
        if (v.genus < 0)
            diag.push_back("negative genus on vertex " + std::to_string(v.id));
        if (v.kind == VertexKind::Disk && v.genus != 0)
            diag.push_back("disk vertex " + std::to_string(v.id) + " has genus " +
                           std::to_string(v.genus));
        if (v.kind == VertexKind::Disk && v.branch < 0)
            diag.push_back("disk vertex " + std::to_string(v.id) + " has no branch label");
        if (v.kind == VertexKind::Compact && v.branch >= 0)
            diag.push_back("compact vertex " + std::to_string(v.id) + " carries a branch label");
    }
    std::set<std::pair<int, int>> seen;
    std::set<int> eids;
    for (const auto& e : g.edges) {
        if (!eids.insert(e.id).second)
            diag.push_back("duplicate edge id " + std::to_string(e.id));
        if (!ids.count(e.k) || !ids.count(e.l)) {
            diag.push_back("edge " + std::to_string(e.id) + " references missing vertex");
            continue;
        }
        if (e.k == e.l) diag.push_back("loop edge " + std::to_string(e.id));
        if (e.k > e.l)
            diag.push_back("edge " + std::to_string(e.id) + " endpoints not sorted");
        if (!seen.insert({std::min(e.k, e.l), std::max(e.k, e.l)}).second)
            diag.push_back("parallel edge " + std::to_string(e.id));
    }
    // Disks bound the total space along the branches, one puncture each.
    std::set<int> branches;
    for (const auto& v : g.vertices) {
        if (v.kind != VertexKind::Disk) continue;
        if (!branches.insert(v.branch).second)
            diag.push_back("branch label " + std::to_string(v.branch) + " used twice");
        if (g.degree(v.id) != 1)
            diag.push_back("disk vertex " + std::to_string(v.id) + " has degree " +
                           std::to_string(g.degree(v.id)));
    }
    int r = static_cast<int>(branches.size());
    for (int b = 0; b < r; ++b)
        if (!branches.count(b))
            diag.push_back("branch labels are not 0.." + std::to_string(r - 1));
    if (g.vertices.empty()) diag.push_back("empty graph");
    else if (!g.is_connected()) diag.push_back("graph is not connected");
    return diag;
}

void require_valid(const MarkedGraph& g) {
    auto diag = validate_graph(g);
    if (diag.empty()) return;
    std::ostringstream os;
    os << "invalid graph:";
    for (const auto& d : diag) os << " " << d << ";";
    throw std::invalid_argument(os.str());
}

Json graph_to_json(const MarkedGraph& g) {
    Json j;
    j["vertices"] = Json::array();
    for (const auto& v : g.vertices) {
        Json jv;
        jv["id"] = v.id;
        jv["genus"] = v.genus;
        jv["kind"] = v.kind == VertexKind::Disk ? "disk" : "compact";
        if (v.kind == VertexKind::Disk) jv["branch"] = v.branch;
        j["vertices"].push_back(jv);
    }
    j["edges"] = Json::array();
    for (const auto& e : g.edges) j["edges"].push_back(Json::array({e.k, e.l}));
    return j;
}

MarkedGraph graph_from_json(const Json& j) {
    MarkedGraph g;
    if (!j.contains("vertices") || !j.contains("edges"))
        throw std::invalid_argument("graph json needs vertices and edges");
    for (const auto& jv : j.at("vertices")) {
        GraphVertex v;
        v.id = jv.at("id").get<int>();
        v.genus = jv.value("genus", 0);
        std::string kind = jv.value("kind", "compact");
        if (kind == "disk") {
            v.kind = VertexKind::Disk;
            v.branch = jv.at("branch").get<int>();
        } else if (kind == "compact") {
            v.kind = VertexKind::Compact;
        } else {
            throw std::invalid_argument("unknown vertex kind: " + kind);
        }
        g.vertices.push_back(v);
    }
    int eid = 0;
    for (const auto& je : j.at("edges")) {
        GraphEdge e;
        e.id = eid++;
        e.k = je.at(0).get<int>();
        e.l = je.at(1).get<int>();
        if (e.k > e.l) std::swap(e.k, e.l);
        g.edges.push_back(e);
    }
    return g;
}

std::string graph_to_dot(const MarkedGraph& g, const std::string& name) {
    std::ostringstream os;
    os << "graph " << name << " {\n";
    std::vector<GraphVertex> vs = g.vertices;
    std::sort(vs.begin(), vs.end(),
              [](const GraphVertex& a, const GraphVertex& b) { return a.id < b.id; });
    for (const auto& v : vs) {
        os << "  v" << v.id << " [";
        if (v.kind == VertexKind::Disk) {
            os << "shape=box, label=\"disk " << v.branch << "\"";
        } else {
            os << "shape=ellipse, label=\"g=" << v.genus << "\"";
        }
        os << "];\n";
    }
    std::vector<GraphEdge> es = g.edges;
    std::sort(es.begin(), es.end(),
              [](const GraphEdge& a, const GraphEdge& b) { return a.id < b.id; });
    for (const auto& e : es) os << "  v" << e.k << " -- v" << e.l << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace pcs
