#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace pcs {

using Json = nlohmann::ordered_json;

enum class VertexKind { Disk, Compact };

struct GraphVertex {
    int id = 0;
    int genus = 0;
    VertexKind kind = VertexKind::Compact;
    int branch = -1;  // branch index for disks, -1 otherwise
};

struct GraphEdge {
    int id = 0;
    int k = 0;  // endpoint ids, k < l
    int l = 0;
};

/// Dual graph of a one-parameter degeneration's special fiber: one disk
/// vertex per branch of the curve, compact vertices for the components of
/// the fiber itself, edges for their intersection points.
struct MarkedGraph {
    std::vector<GraphVertex> vertices;
    std::vector<GraphEdge> edges;

    const GraphVertex& vertex(int id) const;
    int degree(int id) const;
    std::vector<int> incident_edges(int id) const;  // sorted by edge id
    /// The other endpoint of edge e as seen from vertex v.
    int opposite(int e, int v) const;
    int num_branches() const;
    std::vector<int> disk_ids() const;   // sorted by branch index
    std::vector<int> compact_ids() const;
    bool is_connected() const;
    /// Edge ids of a spanning tree, lowest ids first (greedy union-find).
    std::vector<int> spanning_tree() const;
};

/// Structural checks. Returns human-readable diagnostics; empty means valid.
std::vector<std::string> validate_graph(const MarkedGraph& g);

/// Throws std::invalid_argument with joined diagnostics if invalid.
void require_valid(const MarkedGraph& g);

Json graph_to_json(const MarkedGraph& g);
MarkedGraph graph_from_json(const Json& j);
std::string graph_to_dot(const MarkedGraph& g, const std::string& name = "fiber");

}  // namespace pcs
