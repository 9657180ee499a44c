#pragma once

#include <string>
#include <vector>

#include "pcs/curve.hpp"
#include "pcs/scalar.hpp"
#include "pcs/semistable.hpp"

namespace pcs {

using Matrix = std::vector<std::vector<Scalar>>;
using IntMatrix = std::vector<std::vector<long>>;

/// Weight-graded dimensions of H^1 of the central fiber. Two candidate
/// formulas exist for the top piece: w2 counts edges minus compact
/// components, gr2_alt is the first Betti number of the dual graph. They
/// agree only for one branch; both are reported, nothing is chosen silently.
struct MhsSummary {
    long w0 = 0;
    long w1 = 0;
    long w2 = 0;
    long gr2_alt = 0;
    long h10 = 0;  // Hodge split of w1, (h10, h01) = (sum g, sum g)
    long h01 = 0;
    std::vector<std::string> labels_w0;
    std::vector<std::string> labels_w1;
    std::vector<std::string> labels_w2;
};

/// Fundamental-cycle and disk-path residue configurations of the fiber
/// graph: the common combinatorial basis behind the weight 0 and weight 2
/// pieces. Signs are positive when an edge is crossed from k to l.
struct ConfigBasis {
    std::vector<char> in_tree;                 // by edge id
    std::vector<std::vector<Rat>> cycles;      // one per non-tree edge, by id
    std::vector<std::vector<Rat>> disk_paths;  // disk b -> disk 0, b = 1..r-1
    std::vector<std::string> cycle_labels;
    std::vector<std::string> path_labels;
};

ConfigBasis config_basis(const MarkedGraph& g);

MhsSummary weight_graded_dims(const CentralFiberGraph& g);

/// True iff the central fiber's dual graph is a tree.
bool tree_test(const CentralFiberGraph& g);

/// The nilpotent operators on H^1 in the basis w0-block | w1-block |
/// w2-block. The w0 and w2 cycle coordinates use the same fundamental-cycle
/// basis (spanning tree with lowest-id tie-breaking); w2 lattice vectors
/// carry an explicit 1/tau so that T = I - tau*N comes out integral.
struct NilpotentOps {
    long w0 = 0;
    long w1 = 0;
    long w2 = 0;
    long d = 1;
    std::vector<long> mk;  // orbit size m_i * k_i per branch

    Matrix N;
    std::vector<Matrix> M;  // one per branch
    IntMatrix T;            // T = I - tau*N
    Matrix L;               // (1/d)*N - sum_i (1/mk_i)*M_i

    long dim() const { return w0 + w1 + w2; }
};

/// Throws std::invalid_argument on branch count mismatch.
NilpotentOps nilpotent_matrices(const CentralFiberGraph& g,
                                const std::vector<MonstranceData>& branch_data);

/// (I - log_lambda*N)(I + log_mu*M) with M = sum of the M_i. Both squares
/// vanish, so this is the full transported lattice action; composing d
/// copies with log_lambda = tau/d recovers T.
Matrix lattice_transport(const NilpotentOps& ops, const Scalar& log_lambda,
                         const Scalar& log_mu);

/// The cyclic orbit {zeta^v * w : v = 0..mult-1} of a formal tangent vector.
struct OrbitDescriptor {
    long size = 0;
    std::vector<std::string> labels;
};

OrbitDescriptor inverse_star(long mult);

/// Everything the level-s invariant of a germ carries: orbit sizes, graded
/// dimensions of (J/J^{s+1})*, the operator package, and whether the family
/// of Hodge structures over the orbit set is constant at this level.
struct InvariantSummary {
    long d = 1;
    std::vector<long> mk;
    long summand_count = 0;
    int s = 1;
    long mu = 0;
    std::vector<long> graded_dims;               // level q holds mu^q
    std::vector<std::vector<long>> weight_dims;  // level q: dims by weight 0..2q
    MhsSummary mhs;
    NilpotentOps ops;
    bool tree = false;
    bool constant = false;
    std::string evidence;
};

/// Runs resolution -> semistable reduction -> operator assembly for the germ
/// and decides constancy at level s: constant iff N and every M_i act as
/// zero on the level-s associated graded. Pipeline errors propagate.
InvariantSummary assemble_invariant(const CurveSpec& c, int s);

Json mhs_to_json(const MhsSummary& m);
Json ops_to_json(const NilpotentOps& ops);
Json invariant_to_json(const InvariantSummary& inv);

}  // namespace pcs
