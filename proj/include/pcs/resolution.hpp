#pragma once

#include <string>
#include <vector>

#include "pcs/curve.hpp"
#include "pcs/graph.hpp"

namespace pcs {

/// Multiplicities of a branch at its successive infinitely near points,
/// trailing 1s truncated; (1) for a smooth branch.
struct MultiplicitySeq {
    std::vector<long> m;

    long at(size_t t) const { return t < m.size() ? m[t] : 1; }  // 0-based
    long delta() const;                                          // sum m(m-1)/2
};

MultiplicitySeq multiplicity_sequence(const PuiseuxPairs& p);
MultiplicitySeq multiplicity_sequence(const BranchSpec& b);

struct ResVertex {
    int id = 0;
    long e = 1;               // multiplicity in the total transform
    bool exceptional = true;
    int branch = -1;          // strict vertices only
};

/// Dual graph of the minimal embedded resolution separating the branches.
struct ResolutionGraph {
    std::vector<ResVertex> vertices;  // exceptionals in blow-up order, then stricts
    std::vector<GraphEdge> edges;
    int num_branches = 0;

    // audit data, indexed by exceptional vertex id
    std::vector<std::vector<int>> proximity;    // proximity[q] = points q is proximate to
    std::vector<long> point_multiplicity;       // total multiplicity of the curve there
    std::vector<long> self_intersection;
    std::vector<std::vector<int>> shared_depth; // r x r cluster-sharing depths
    bool contact_ambiguity = false;             // kept for audit; never set by construction

    int num_exceptional() const;
    std::vector<int> strict_attach() const;     // exceptional id per branch
};

/// Thrown when the intersection matrix admits no infinitely-near-point cluster.
struct ContactError : std::invalid_argument {
    explicit ContactError(const std::string& detail)
        : std::invalid_argument("incompatible contact data: " + detail) {}
};

ResolutionGraph build_resolution_graph(const CurveSpec& c);
long lcm_d(const ResolutionGraph& g);
long mu_from_resolution(const ResolutionGraph& g, int r);

Json resolution_to_json(const ResolutionGraph& g);
std::string resolution_to_dot(const ResolutionGraph& g);

/// Brute-force isomorphism respecting multiplicities and vertex kinds.
/// Intended for small graphs in tests.
bool resolution_isomorphic(const ResolutionGraph& a, const ResolutionGraph& b);

}  // namespace pcs
