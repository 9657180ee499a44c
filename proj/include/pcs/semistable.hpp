#pragma once

#include <vector>

#include "pcs/graph.hpp"
#include "pcs/resolution.hpp"

namespace pcs {

// Local data over one edge of the resolution graph after the degree-d base
// change: the number of double points lying over the intersection point and
// the length of the rational chain inserted at each of them.
struct EdgeLocalData {
    long point_count = 0;   // gcd(e_k, e_l)
    long n_p = 0;           // d / lcm(e_k, e_l)
    long chain_length = 0;  // n_p - 1 vertices inserted per point
};

EdgeLocalData edge_chain_data(long e_k, long e_l, long d);

// Cyclic cover of a single component: number of connected components, the
// genus of each (they are all isomorphic), and the covering degree.
struct CoverData {
    long components = 0;
    long genus = 0;
    long degree = 0;
};

CoverData cover_components(long e_i, const std::vector<long>& neighbor_mults, long d);

// Where a central-fiber vertex came from: either a connected component of
// the cover of a resolution vertex, or a chain vertex inserted over one of
// the double points of a resolution edge.
struct VertexOrigin {
    bool from_chain = false;
    int source = -1;    // resolution vertex id, or resolution edge id for chains
    int index = 0;      // component index of the cover, or point index nu
    int position = -1;  // position along the chain (0-based), -1 for covers
};

struct CentralFiberGraph {
    MarkedGraph graph;
    long d = 0;
    std::vector<VertexOrigin> origin;         // indexed by graph vertex id
    std::vector<EdgeLocalData> edge_local;    // indexed by resolution edge id
    std::vector<std::vector<int>> cover_of;   // resolution vertex id -> vertex ids

    long total_genus() const;
    long num_compact() const;
};

// Base change of degree d followed by normalization and chain insertion.
// With base_degree = 0 the canonical degree lcm_d(rg) is used; any other
// value must be a common multiple of the vertex multiplicities.
CentralFiberGraph semistable_reduce(const ResolutionGraph& rg, long base_degree = 0);

struct H1Check {
    long computed = 0;
    long expected = 0;
    bool pass = false;
};

// First Betti-type count of the central fiber against the Milnor number:
// dim H^1 = r + 1 + sum over components (2g - 2) + 2 * #edges.
H1Check verify_h1_dimension(const CentralFiberGraph& cf, long mu);

long h1_dimension(const CentralFiberGraph& cf);

Json central_fiber_to_json(const CentralFiberGraph& cf);

}  // namespace pcs
