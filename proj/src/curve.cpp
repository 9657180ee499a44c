#include "pcs/curve.hpp"

#include <numeric>
#include <set>
#include <stdexcept>

#include "pcs/resolution.hpp"

namespace pcs {

long CurveSpec::intersection(int i, int j) const {
    return intersections.at(static_cast<size_t>(i)).at(static_cast<size_t>(j));
}

void validate_pairs(const PuiseuxPairs& p) {
    long prev_k = 0;
    for (size_t i = 0; i < p.pairs.size(); ++i) {
        auto [m, k] = p.pairs[i];
        if (m < 2) throw std::invalid_argument("pair m must be >= 2");
        if (k <= 0) throw std::invalid_argument("pair k must be positive");
        if (std::gcd(m, k) != 1) throw std::invalid_argument("pair not coprime");
        if (i == 0) {
            if (k <= m) throw std::invalid_argument("first pair needs k > m");
        } else {
            if (k <= prev_k * m)
                throw std::invalid_argument("pair sequence not strictly nested");
        }
        prev_k = k;
    }
}

PuiseuxPairs puiseux_pairs_from_exponents(const BranchSpec& b) {
    PuiseuxPairs out;
    mpz_class L = 1;
    Rat prev(0);
    for (const Rat& e : b.exponents) {
        if (e <= 1) throw std::invalid_argument("characteristic exponent must exceed 1");
        if (e <= prev) throw std::invalid_argument("exponents must strictly increase");
        prev = e;
        mpz_class den = e.get_den();
        mpz_class L2 = lcm(L, den);
        if (L2 == L)
            throw std::invalid_argument("exponent " + rat_to_string(e) +
                                        " introduces no new denominator factor");
        mpz_class mz = L2 / L;
        mpz_class nz = e.get_num() * (L2 / den);
        if (!mz.fits_slong_p() || !nz.fits_slong_p())
            throw std::overflow_error("puiseux pair out of range");
        out.pairs.emplace_back(mz.get_si(), nz.get_si());
        L = L2;
    }
    validate_pairs(out);
    return out;
}

BranchSpec exponents_from_pairs(const PuiseuxPairs& p) {
    validate_pairs(p);
    BranchSpec b;
    long L = 1;
    for (auto [m, k] : p.pairs) {
        L *= m;
        b.exponents.push_back(Rat(k, L));
    }
    return b;
}

MonstranceData monstrance_order(const PuiseuxPairs& p) {
    validate_pairs(p);
    MonstranceData d;
    for (auto [m, k] : p.pairs) d.m *= m;
    if (!p.pairs.empty()) {
        d.k = p.pairs[0].second;
        for (size_t i = 1; i < p.pairs.size(); ++i) d.k *= p.pairs[i].first;
    }
    d.order = d.m * d.k;
    d.k_le_m = d.k <= d.m;
    return d;
}

MonstranceData monstrance_order(const BranchSpec& b) {
    return monstrance_order(puiseux_pairs_from_exponents(b));
}

void validate_curve_spec(const CurveSpec& c) {
    if (c.branches.empty()) throw std::invalid_argument("curve needs at least one branch");
    for (const auto& b : c.branches) puiseux_pairs_from_exponents(b);
    size_t r = c.branches.size();
    if (r > 1 || !c.intersections.empty()) {
        if (c.intersections.size() != r)
            throw std::invalid_argument("intersection matrix size mismatch");
        for (size_t i = 0; i < r; ++i) {
            if (c.intersections[i].size() != r)
                throw std::invalid_argument("intersection matrix not square");
            if (c.intersections[i][i] != 0)
                throw std::invalid_argument("intersection matrix diagonal must be zero");
            for (size_t j = 0; j < r; ++j) {
                if (c.intersections[i][j] != c.intersections[j][i])
                    throw std::invalid_argument("intersection matrix not symmetric");
                if (i != j && c.intersections[i][j] < 1)
                    throw std::invalid_argument("intersection multiplicities must be >= 1");
            }
        }
    }
    if (!c.polynomial.empty()) {
        Poly2 f = parse_poly2(c.polynomial);
        if (!poly2_squarefree(f))
            throw std::invalid_argument("polynomial is not square-free");
    }
}

long milnor_from_branch_data(const CurveSpec& c) {
    validate_curve_spec(c);
    int r = c.num_branches();
    if (r > 1) build_resolution_graph(c);  // surfaces contact feasibility errors
    long delta_sum = 0;
    for (const auto& b : c.branches) delta_sum += multiplicity_sequence(b).delta();
    long inter = 0;
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) inter += c.intersection(i, j);
    return 2 * (delta_sum + inter) - r + 1;
}

CurveSpec curve_from_json(const Json& j) {
    CurveSpec c;
    if (!j.contains("branches")) throw std::invalid_argument("curve json needs branches");
    for (const auto& jb : j.at("branches")) {
        BranchSpec b;
        for (const auto& je : jb.value("exponents", Json::array()))
            b.exponents.push_back(rat_from_string(je.get<std::string>()));
        c.branches.push_back(std::move(b));
    }
    if (j.contains("intersections"))
        for (const auto& row : j.at("intersections"))
            c.intersections.push_back(row.get<std::vector<long>>());
    if (j.contains("polynomial")) c.polynomial = j.at("polynomial").get<std::string>();
    validate_curve_spec(c);
    return c;
}

Json curve_to_json(const CurveSpec& c) {
    Json j;
    j["branches"] = Json::array();
    for (const auto& b : c.branches) {
        Json jb;
        jb["exponents"] = Json::array();
        for (const auto& e : b.exponents) jb["exponents"].push_back(rat_to_string(e));
        j["branches"].push_back(jb);
    }
    if (!c.intersections.empty()) j["intersections"] = c.intersections;
    if (!c.polynomial.empty()) j["polynomial"] = c.polynomial;
    return j;
}

}  // namespace pcs
