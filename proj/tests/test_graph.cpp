#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcs/graph.hpp"

using namespace pcs;

namespace {

// disk0 -- center -- disk1, genus 1 center
MarkedGraph tacnode_like() {
    MarkedGraph g;
    g.vertices = {
        {0, 0, VertexKind::Disk, 0},
        {1, 1, VertexKind::Compact, -1},
        {2, 0, VertexKind::Disk, 1},
    };
    g.edges = {{0, 0, 1}, {1, 1, 2}};
    return g;
}

}  // namespace

TEST_CASE("valid graph passes validation") {
    auto g = tacnode_like();
    CHECK(validate_graph(g).empty());
    CHECK_NOTHROW(require_valid(g));
    CHECK(g.num_branches() == 2);
    CHECK(g.degree(1) == 2);
    CHECK(g.opposite(0, 0) == 1);
    CHECK(g.opposite(0, 1) == 0);
    CHECK(g.disk_ids() == std::vector<int>{0, 2});
    CHECK(g.compact_ids() == std::vector<int>{1});
}

TEST_CASE("validation diagnostics") {
    SUBCASE("disconnected") {
        auto g = tacnode_like();
        g.vertices.push_back({3, 2, VertexKind::Compact, -1});
        auto diag = validate_graph(g);
        REQUIRE(diag.size() == 1);
        CHECK(diag[0] == "graph is not connected");
    }
    SUBCASE("disk with wrong degree") {
        auto g = tacnode_like();
        g.vertices.push_back({3, 0, VertexKind::Compact, -1});
        g.edges.push_back({2, 0, 3});
        auto diag = validate_graph(g);
        REQUIRE(!diag.empty());
        CHECK(diag[0].find("disk vertex 0 has degree 2") != std::string::npos);
    }
    SUBCASE("disk with genus") {
        auto g = tacnode_like();
        g.vertices[0].genus = 1;
        CHECK(!validate_graph(g).empty());
    }
    SUBCASE("duplicate branch label") {
        auto g = tacnode_like();
        g.vertices[2].branch = 0;
        auto diag = validate_graph(g);
        bool found = false;
        for (const auto& d : diag) found |= d.find("used twice") != std::string::npos;
        CHECK(found);
    }
    SUBCASE("loop and parallel edges") {
        auto g = tacnode_like();
        g.edges.push_back({2, 1, 1});
        g.edges.push_back({3, 0, 1});
        auto diag = validate_graph(g);
        bool loop = false, par = false;
        for (const auto& d : diag) {
            loop |= d.find("loop edge") != std::string::npos;
            par |= d.find("parallel edge") != std::string::npos;
        }
        CHECK(loop);
        CHECK(par);
    }
    SUBCASE("empty graph") {
        MarkedGraph g;
        CHECK(!validate_graph(g).empty());
    }
}

TEST_CASE("spanning tree picks lowest edge ids") {
    MarkedGraph g;
    g.vertices = {
        {0, 0, VertexKind::Disk, 0},
        {1, 0, VertexKind::Compact, -1},
        {2, 0, VertexKind::Compact, -1},
        {3, 0, VertexKind::Compact, -1},
    };
    // a triangle 1-2-3 hung off the disk
    g.edges = {{0, 0, 1}, {1, 1, 2}, {2, 1, 3}, {3, 2, 3}};
    auto tree = g.spanning_tree();
    CHECK(tree == std::vector<int>{0, 1, 2});
}

TEST_CASE("json round trip") {
    auto g = tacnode_like();
    Json j = graph_to_json(g);
    auto h = graph_from_json(j);
    CHECK(graph_to_json(h) == j);
    CHECK(h.vertices.size() == 3);
    CHECK(h.edges.size() == 2);
    CHECK(h.vertex(0).kind == VertexKind::Disk);
    CHECK(h.vertex(1).genus == 1);

    // endpoints get sorted on input
    Json j2 = j;
    j2["edges"][0] = Json::array({1, 0});
    auto h2 = graph_from_json(j2);
    CHECK(h2.edges[0].k == 0);
    CHECK(h2.edges[0].l == 1);

    CHECK_THROWS(graph_from_json(Json::object()));
}

TEST_CASE("dot output is deterministic") {
    auto g = tacnode_like();
    std::string d = graph_to_dot(g);
    CHECK(d == graph_to_dot(g));
    CHECK(d.find("v0 [shape=box, label=\"disk 0\"]") != std::string::npos);
    CHECK(d.find("v1 [shape=ellipse, label=\"g=1\"]") != std::string::npos);
    CHECK(d.find("v0 -- v1;") != std::string::npos);
}
