#pragma once

#include <string>
#include <vector>

#include "pcs/graph.hpp"
#include "pcs/poly2.hpp"
#include "pcs/rational.hpp"

namespace pcs {

/// One branch of the germ, given by its characteristic exponents: strictly
/// increasing reduced fractions > 1, each denominator enlarging the lcm of the
/// previous ones. Empty means a smooth branch.
struct BranchSpec {
    std::vector<Rat> exponents;
};

/// The pairs (m_i, k_i) of a branch, m_i >= 2, gcd(m_i, k_i) = 1,
/// k_1 > m_1 and k_{i+1} > k_i * m_{i+1}.
struct PuiseuxPairs {
    std::vector<std::pair<long, long>> pairs;
};

/// First-pair torus data of a branch: m the multiplicity, k the first
/// characteristic intersection, order m*k of the associated cyclic motion.
struct MonstranceData {
    long m = 1;
    long k = 1;
    long order = 1;
    bool k_le_m = false;  // outside the regime where m < k is guaranteed
};

struct CurveSpec {
    std::vector<BranchSpec> branches;
    std::vector<std::vector<long>> intersections;  // symmetric, zero diagonal
    std::string polynomial;                        // optional, empty if absent

    int num_branches() const { return static_cast<int>(branches.size()); }
    long intersection(int i, int j) const;
};

void validate_pairs(const PuiseuxPairs& p);

/// Throws std::invalid_argument when the sequence is not characteristic.
PuiseuxPairs puiseux_pairs_from_exponents(const BranchSpec& b);
BranchSpec exponents_from_pairs(const PuiseuxPairs& p);

MonstranceData monstrance_order(const BranchSpec& b);
MonstranceData monstrance_order(const PuiseuxPairs& p);

/// Shape and positivity checks plus, when a polynomial is supplied, the
/// square-free requirement. Throws std::invalid_argument.
void validate_curve_spec(const CurveSpec& c);

/// mu = 2*(sum of branch deltas + sum of pairwise intersections) - r + 1.
/// Surfaces "incompatible contact data" when the intersection matrix is not
/// realizable by an infinitely-near-point cluster.
long milnor_from_branch_data(const CurveSpec& c);

CurveSpec curve_from_json(const Json& j);
Json curve_to_json(const CurveSpec& c);

}  // namespace pcs
