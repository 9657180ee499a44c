#include "pcs/hodge.hpp"

#include <algorithm>
#include <climits>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace pcs {

namespace {

Matrix zero_matrix(long n) {
    return Matrix(static_cast<size_t>(n), std::vector<Scalar>(static_cast<size_t>(n)));
}

Matrix identity_matrix(long n) {
    Matrix m = zero_matrix(n);
    for (long i = 0; i < n; ++i) m[i][i] = Scalar(1);
    return m;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    size_t n = a.size();
    Matrix c = zero_matrix(static_cast<long>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k) {
            if (a[i][k].is_zero()) continue;
            for (size_t j = 0; j < n; ++j) {
                if (b[k][j].is_zero()) continue;
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    return c;
}

/// Parent pointers of the spanning tree, rooted at `root`.
struct TreeWalk {
    std::vector<int> parent;
    std::vector<int> parent_edge;
    std::vector<int> depth;
};

TreeWalk walk_tree(const MarkedGraph& g, const std::vector<char>& in_tree, int root) {
    size_t nv = g.vertices.size();
    std::vector<std::vector<std::pair<int, int>>> adj(nv);  // (edge, other end)
    for (const auto& e : g.edges) {
        if (!in_tree[static_cast<size_t>(e.id)]) continue;
        adj[static_cast<size_t>(e.k)].push_back({e.id, e.l});
        adj[static_cast<size_t>(e.l)].push_back({e.id, e.k});
    }
    TreeWalk w;
    w.parent.assign(nv, -1);
    w.parent_edge.assign(nv, -1);
    w.depth.assign(nv, -1);
    std::queue<int> q;
    q.push(root);
    w.depth[static_cast<size_t>(root)] = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (auto [e, u] : adj[static_cast<size_t>(v)]) {
            if (w.depth[static_cast<size_t>(u)] >= 0 || u == root) continue;
            w.parent[static_cast<size_t>(u)] = v;
            w.parent_edge[static_cast<size_t>(u)] = e;
            w.depth[static_cast<size_t>(u)] = w.depth[static_cast<size_t>(v)] + 1;
            q.push(u);
        }
    }
    return w;
}

/// Unit flow along the tree path a -> b, as signed edge coefficients
/// (positive when the edge is crossed from k to l).
std::vector<Rat> path_config(const MarkedGraph& g, const TreeWalk& w, int a, int b) {
    std::vector<Rat> rho(g.edges.size(), Rat(0));
    auto step_up = [&](int v, const Rat& sign) {
        int e = w.parent_edge[static_cast<size_t>(v)];
        rho[static_cast<size_t>(e)] += (g.edges[static_cast<size_t>(e)].k == v) ? sign : -sign;
        return w.parent[static_cast<size_t>(v)];
    };
    int x = a, y = b;
    while (w.depth[static_cast<size_t>(x)] > w.depth[static_cast<size_t>(y)]) x = step_up(x, Rat(1));
    while (w.depth[static_cast<size_t>(y)] > w.depth[static_cast<size_t>(x)]) y = step_up(y, Rat(-1));
    while (x != y) {
        x = step_up(x, Rat(1));
        y = step_up(y, Rat(-1));
    }
    return rho;
}

/// Vertex potential of a residue configuration supported on tree edges:
/// zero at `base`, jumping by rho[e] when e is crossed from k to l.
std::vector<Rat> tree_potential(const MarkedGraph& g, const std::vector<char>& in_tree,
                                const std::vector<Rat>& rho, int base) {
    size_t nv = g.vertices.size();
    std::vector<Rat> h(nv, Rat(0));
    std::vector<char> seen(nv, 0);
    std::queue<int> q;
    q.push(base);
    seen[static_cast<size_t>(base)] = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int e : g.incident_edges(v)) {
            if (!in_tree[static_cast<size_t>(e)]) continue;
            int u = g.opposite(e, v);
            if (seen[static_cast<size_t>(u)]) continue;
            seen[static_cast<size_t>(u)] = 1;
            if (g.edges[static_cast<size_t>(e)].k == v)
                h[static_cast<size_t>(u)] = h[static_cast<size_t>(v)] + rho[static_cast<size_t>(e)];
            else
                h[static_cast<size_t>(u)] = h[static_cast<size_t>(v)] - rho[static_cast<size_t>(e)];
            q.push(u);
        }
    }
    return h;
}

std::string config_label(const char* prefix, const std::vector<Rat>& rho) {
    std::ostringstream out;
    out << prefix << "{";
    bool first = true;
    for (size_t e = 0; e < rho.size(); ++e) {
        if (rho[e] == 0) continue;
        if (!first) out << ",";
        out << e;
        first = false;
    }
    out << "}";
    return out.str();
}

/// The configuration basis plus the genus generators of weight 1.
struct H1Basis {
    ConfigBasis cfg;
    std::vector<std::string> w1_labels;
    long genus_sum = 0;
};

H1Basis build_h1_basis(const MarkedGraph& g) {
    H1Basis basis;
    basis.cfg = config_basis(g);
    for (const auto& v : g.vertices) {
        for (int j = 1; j <= v.genus; ++j) {
            basis.w1_labels.push_back("omega(v=" + std::to_string(v.id) + "," + std::to_string(j) + ")");
            basis.w1_labels.push_back("omegabar(v=" + std::to_string(v.id) + "," + std::to_string(j) + ")");
        }
        basis.genus_sum += v.genus;
    }
    return basis;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (const auto& row : m) {
        Json r = Json::array();
        for (const auto& x : row) r.push_back(x.str());
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace

ConfigBasis config_basis(const MarkedGraph& g) {
    ConfigBasis basis;
    basis.in_tree.assign(g.edges.size(), 0);
    for (int e : g.spanning_tree()) basis.in_tree[static_cast<size_t>(e)] = 1;
    std::vector<int> disks = g.disk_ids();
    TreeWalk w = walk_tree(g, basis.in_tree, disks.empty() ? 0 : disks[0]);

    for (const auto& e : g.edges) {
        if (basis.in_tree[static_cast<size_t>(e.id)]) continue;
        std::vector<Rat> rho = path_config(g, w, e.l, e.k);
        rho[static_cast<size_t>(e.id)] += 1;
        basis.cycle_labels.push_back(config_label("cycle", rho));
        basis.cycles.push_back(std::move(rho));
    }
    for (size_t b = 1; b < disks.size(); ++b) {
        std::vector<Rat> rho = path_config(g, w, disks[b], disks[0]);
        basis.path_labels.push_back(config_label("path", rho));
        basis.disk_paths.push_back(std::move(rho));
    }
    return basis;
}

MhsSummary weight_graded_dims(const CentralFiberGraph& g) {
    H1Basis basis = build_h1_basis(g.graph);
    long ne = static_cast<long>(g.graph.edges.size());
    long nv = static_cast<long>(g.graph.vertices.size());
    long nc = static_cast<long>(g.graph.compact_ids().size());

    MhsSummary m;
    m.w0 = ne - nv + 1;
    m.w1 = 2 * basis.genus_sum;
    m.w2 = ne - nc;
    m.gr2_alt = ne - nv + 1;
    m.h10 = basis.genus_sum;
    m.h01 = basis.genus_sum;
    if (m.w0 != static_cast<long>(basis.cfg.cycles.size()) ||
        m.w2 != static_cast<long>(basis.cfg.cycles.size() + basis.cfg.disk_paths.size()))
        throw std::logic_error("internal error: basis size disagrees with the dimension formulas");
    m.labels_w0 = basis.cfg.cycle_labels;
    m.labels_w1 = basis.w1_labels;
    m.labels_w2 = basis.cfg.cycle_labels;
    m.labels_w2.insert(m.labels_w2.end(), basis.cfg.path_labels.begin(),
                       basis.cfg.path_labels.end());
    return m;
}

bool tree_test(const CentralFiberGraph& g) {
    return g.graph.edges.size() + 1 == g.graph.vertices.size();
}

NilpotentOps nilpotent_matrices(const CentralFiberGraph& g,
                                const std::vector<MonstranceData>& branch_data) {
    int r = g.graph.num_branches();
    if (static_cast<int>(branch_data.size()) != r)
        throw std::invalid_argument("branch count mismatch: graph has " + std::to_string(r) +
                                    " branches, got " + std::to_string(branch_data.size()) +
                                    " monstrance entries");
    MhsSummary dims = weight_graded_dims(g);

    NilpotentOps ops;
    ops.w0 = dims.w0;
    ops.w1 = dims.w1;
    ops.w2 = dims.w2;
    ops.d = g.d;
    for (const auto& b : branch_data) ops.mk.push_back(b.order);

    long n = ops.dim();
    ops.N = zero_matrix(n);
    long cycles = ops.w0;
    for (long j = 0; j < cycles; ++j)
        ops.N[static_cast<size_t>(j)][static_cast<size_t>(ops.w0 + ops.w1 + j)] = Scalar::tau(-1);
    ops.M.assign(static_cast<size_t>(r), zero_matrix(n));

    Matrix t = identity_matrix(n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j)
            t[static_cast<size_t>(i)][static_cast<size_t>(j)] -=
                Scalar::tau(1) * ops.N[static_cast<size_t>(i)][static_cast<size_t>(j)];
    ops.T.assign(static_cast<size_t>(n), std::vector<long>(static_cast<size_t>(n), 0));
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j)
            ops.T[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                rat_to_long(t[static_cast<size_t>(i)][static_cast<size_t>(j)].rational_value());

    ops.L = zero_matrix(n);
    Rat inv_d(1, g.d);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            Scalar v = ops.N[static_cast<size_t>(i)][static_cast<size_t>(j)] * inv_d;
            for (size_t b = 0; b < ops.M.size(); ++b)
                v -= ops.M[b][static_cast<size_t>(i)][static_cast<size_t>(j)] * Rat(1, ops.mk[b]);
            ops.L[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
        }
    return ops;
}

Matrix lattice_transport(const NilpotentOps& ops, const Scalar& log_lambda,
                         const Scalar& log_mu) {
    long n = ops.dim();
    Matrix a = identity_matrix(n);
    Matrix b = identity_matrix(n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            a[static_cast<size_t>(i)][static_cast<size_t>(j)] -=
                log_lambda * ops.N[static_cast<size_t>(i)][static_cast<size_t>(j)];
            for (const auto& m : ops.M)
                b[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
                    log_mu * m[static_cast<size_t>(i)][static_cast<size_t>(j)];
        }
    return mat_mul(a, b);
}

OrbitDescriptor inverse_star(long mult) {
    if (mult < 1)
        throw std::invalid_argument("inverse star requires mult >= 1, got " + std::to_string(mult));
    OrbitDescriptor orbit;
    orbit.size = mult;
    for (long v = 0; v < mult; ++v) {
        if (v == 0)
            orbit.labels.push_back("w");
        else if (v == 1)
            orbit.labels.push_back("zeta*w");
        else
            orbit.labels.push_back("zeta^" + std::to_string(v) + "*w");
    }
    return orbit;
}

namespace {

/// First nonzero weight-lowering action on the level-s associated graded, if
/// any. For a graph with a cycle N is already nonzero on H^1. On a tree both
/// operators kill H^1, so the search goes through the short tensor families:
/// pairs of weight-2 classes, genus generators against weight-2 classes, and
/// at level >= 3 the extension class over the path from the base disk to a
/// genus component. Longer tensors reduce to these coordinatewise, so a full
/// vanishing scan is conclusive.
struct ConstancyVerdict {
    bool constant = true;
    std::string evidence;
};

ConstancyVerdict decide_constancy(const CentralFiberGraph& g, int s, const H1Basis& basis,
                                  bool tree) {
    ConstancyVerdict verdict;
    if (!tree) {
        verdict.constant = false;
        verdict.evidence = "level 1: N is nonzero on the cycle classes of H1";
        return verdict;
    }

    const MarkedGraph& graph = g.graph;
    std::vector<int> disks = graph.disk_ids();
    int base = disks[0];
    std::vector<int> genus_vertices;
    for (const auto& v : graph.vertices)
        if (v.genus > 0) genus_vertices.push_back(v.id);

    const auto& cfgs = basis.cfg.disk_paths;  // a tree has no cycle configurations
    size_t nc = cfgs.size();
    size_t ne = graph.edges.size();

    if (s >= 2 && nc > 0) {
        std::vector<std::vector<Rat>> pot(nc);
        for (size_t i = 0; i < nc; ++i) pot[i] = tree_potential(graph, basis.cfg.in_tree, cfgs[i], base);

        // disk edges and the indicator potentials of their far sides
        std::vector<int> disk_edge(disks.size());
        std::vector<std::vector<Rat>> gate(disks.size());
        for (size_t b = 0; b < disks.size(); ++b) {
            disk_edge[b] = graph.incident_edges(disks[b])[0];
            std::vector<Rat> unit(ne, Rat(0));
            unit[static_cast<size_t>(disk_edge[b])] = 1;
            gate[b] = tree_potential(graph, basis.cfg.in_tree, unit, base);
        }

        // theta (x) theta under N
        for (size_t i = 0; i < nc && verdict.constant; ++i)
            for (size_t j = i + 1; j < nc && verdict.constant; ++j)
                for (size_t e = 0; e < ne; ++e) {
                    size_t k = static_cast<size_t>(graph.edges[e].k);
                    if (pot[i][k] * cfgs[j][e] != pot[j][k] * cfgs[i][e]) {
                        verdict.constant = false;
                        verdict.evidence = "level 2: induced N nonzero on the tensor of theta configurations " +
                                           basis.cfg.path_labels[i] + " and " + basis.cfg.path_labels[j];
                        break;
                    }
                }

        // omega (x) theta under N and under the M_b
        for (int v : genus_vertices) {
            if (!verdict.constant) break;
            for (size_t i = 0; i < nc && verdict.constant; ++i) {
                if (pot[i][static_cast<size_t>(v)] != 0) {
                    verdict.constant = false;
                    verdict.evidence = "level 2: induced N nonzero on omega(v=" + std::to_string(v) +
                                       ") (x) theta " + basis.cfg.path_labels[i];
                    break;
                }
                for (size_t b = 0; b < disks.size(); ++b) {
                    if (cfgs[i][static_cast<size_t>(disk_edge[b])] * gate[b][static_cast<size_t>(v)] != 0) {
                        verdict.constant = false;
                        verdict.evidence = "level 2: induced M_" + std::to_string(b) +
                                           " nonzero on omega(v=" + std::to_string(v) + ") (x) theta " +
                                           basis.cfg.path_labels[i];
                        break;
                    }
                }
            }
        }

        // theta (x) theta under the M_b
        for (size_t b = 0; b < disks.size() && verdict.constant; ++b)
            for (size_t i = 0; i < nc && verdict.constant; ++i)
                for (size_t j = i + 1; j < nc && verdict.constant; ++j) {
                    Rat ri = cfgs[i][static_cast<size_t>(disk_edge[b])];
                    Rat rj = cfgs[j][static_cast<size_t>(disk_edge[b])];
                    for (size_t e = 0; e < ne; ++e) {
                        size_t k = static_cast<size_t>(graph.edges[e].k);
                        if (gate[b][k] * (ri * cfgs[j][e] - rj * cfgs[i][e]) != 0) {
                            verdict.constant = false;
                            verdict.evidence = "level 2: induced M_" + std::to_string(b) +
                                               " nonzero on the tensor of theta configurations " +
                                               basis.cfg.path_labels[i] + " and " + basis.cfg.path_labels[j];
                            break;
                        }
                    }
                }
    }

    if (verdict.constant && s >= 3 && !genus_vertices.empty()) {
        verdict.constant = false;
        verdict.evidence =
            "level 3: induced N nonzero on the extension class over the path from the base disk "
            "to genus component v=" + std::to_string(genus_vertices[0]);
    }

    if (verdict.constant)
        verdict.evidence = "all induced N and M_i actions vanish through level " + std::to_string(s);
    return verdict;
}

}  // namespace

InvariantSummary assemble_invariant(const CurveSpec& c, int s) {
    if (s < 1)
        throw std::invalid_argument("level must be at least 1, got " + std::to_string(s));
    ResolutionGraph rg = build_resolution_graph(c);
    CentralFiberGraph cf = semistable_reduce(rg);
    long mu = milnor_from_branch_data(c);
    H1Check check = verify_h1_dimension(cf, mu);
    if (!check.pass)
        throw std::logic_error("internal error: central fiber H1 dimension disagrees with the Milnor number");

    std::vector<MonstranceData> branch_data;
    branch_data.reserve(c.branches.size());
    for (const auto& b : c.branches) branch_data.push_back(monstrance_order(b));

    InvariantSummary inv;
    inv.d = cf.d;
    inv.s = s;
    inv.mu = mu;
    inv.mhs = weight_graded_dims(cf);
    inv.ops = nilpotent_matrices(cf, branch_data);
    inv.mk = inv.ops.mk;
    long mk_sum = 0;
    for (long v : inv.mk) mk_sum += v;
    inv.summand_count = cf.d * mk_sum;

    long level_dim = 1;
    for (int q = 1; q <= s; ++q) {
        if (mu != 0 && level_dim > LONG_MAX / mu)
            throw std::overflow_error("graded dimension overflow at level " + std::to_string(q));
        level_dim *= mu;
        inv.graded_dims.push_back(level_dim);
    }

    std::vector<long> conv{1};
    std::vector<long> h1w{inv.mhs.w0, inv.mhs.w1, inv.mhs.w2};
    for (int q = 1; q <= s; ++q) {
        std::vector<long> next(conv.size() + 2, 0);
        for (size_t a = 0; a < conv.size(); ++a)
            for (size_t b = 0; b < 3; ++b) next[a + b] += conv[a] * h1w[b];
        conv = std::move(next);
        inv.weight_dims.push_back(conv);
    }

    inv.tree = tree_test(cf);
    H1Basis basis = build_h1_basis(cf.graph);
    ConstancyVerdict verdict = decide_constancy(cf, s, basis, inv.tree);
    inv.constant = verdict.constant;
    inv.evidence = verdict.evidence;
    return inv;
}

Json mhs_to_json(const MhsSummary& m) {
    Json j;
    j["w0"] = m.w0;
    j["w1"] = m.w1;
    j["w2"] = m.w2;
    j["gr2_alt"] = m.gr2_alt;
    j["h10"] = m.h10;
    j["h01"] = m.h01;
    j["labels"]["w0"] = m.labels_w0;
    j["labels"]["w1"] = m.labels_w1;
    j["labels"]["w2"] = m.labels_w2;
    return j;
}

Json ops_to_json(const NilpotentOps& ops) {
    Json j;
    j["blocks"]["w0"] = ops.w0;
    j["blocks"]["w1"] = ops.w1;
    j["blocks"]["w2"] = ops.w2;
    j["d"] = ops.d;
    j["mk"] = ops.mk;
    j["N"] = matrix_to_json(ops.N);
    Json ms = Json::array();
    for (const auto& m : ops.M) ms.push_back(matrix_to_json(m));
    j["M"] = std::move(ms);
    j["T"] = ops.T;
    j["L"] = matrix_to_json(ops.L);
    return j;
}

Json invariant_to_json(const InvariantSummary& inv) {
    Json j;
    j["d"] = inv.d;
    j["mk"] = inv.mk;
    j["summand_count"] = inv.summand_count;
    j["s"] = inv.s;
    j["mu"] = inv.mu;
    j["graded_dims"] = inv.graded_dims;
    j["weight_dims"] = inv.weight_dims;
    j["tree"] = inv.tree;
    j["constant"] = inv.constant;
    j["evidence"] = inv.evidence;
    j["mhs"] = mhs_to_json(inv.mhs);
    j["ops"] = ops_to_json(inv.ops);
    return j;
}

}  // namespace pcs
