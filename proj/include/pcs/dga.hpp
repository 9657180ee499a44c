#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pcs/scalar.hpp"
#include "pcs/semistable.hpp"

namespace pcs {

/// Polynomial over Scalar in the edge coordinate xi and the symbol u standing
/// for log t. Degrees are capped (xi <= 64, u <= 32) to catch runaway
/// recursions; the cap throws std::overflow_error.
class XiU {
public:
    XiU() = default;
    XiU(long c);  // NOLINT: implicit by design
    explicit XiU(const Scalar& c);
    static XiU xi();
    static XiU u();

    bool is_zero() const { return terms_.empty(); }

    XiU operator-() const;
    XiU& operator+=(const XiU& o);
    XiU& operator-=(const XiU& o);
    XiU& operator*=(const XiU& o);
    friend XiU operator+(XiU a, const XiU& b) { return a += b; }
    friend XiU operator-(XiU a, const XiU& b) { return a -= b; }
    friend XiU operator*(XiU a, const XiU& b) { return a *= b; }
    XiU& operator*=(const Scalar& c);
    friend XiU operator*(const Scalar& c, XiU a) { return a *= c; }
    bool operator==(const XiU& o) const { return terms_ == o.terms_; }
    bool operator!=(const XiU& o) const { return terms_ != o.terms_; }

    XiU dxi() const;           // d/dxi
    XiU du() const;            // d/du
    XiU integrate_xi() const;  // antiderivative in xi vanishing at 0
    XiU at_xi(long v) const;   // substitute xi = v, keeping u
    Scalar eval(const Scalar& xi_val, const Scalar& u_val) const;

    int xi_degree() const;
    int u_degree() const;

    /// Terms keyed by (xi exponent, u exponent).
    const std::map<std::pair<int, int>, Scalar>& terms() const { return terms_; }

    std::string str() const;
    Json to_json() const;
    static XiU from_json(const Json& j);

private:
    void add_term(int xd, int ud, const Scalar& c);
    std::map<std::pair<int, int>, Scalar> terms_;
};

/// A declared generator of a component's formal form algebra.
struct SurfaceGen {
    std::string name;
    int degree = 1;
    int w = 0;  // weight level: 0 smooth, 1 log
    int f = 0;  // Hodge level
    std::map<int, Scalar> residues;       // 1-forms: per incident edge id
    std::map<int, Scalar> values;         // functions: value at each puncture
    std::map<std::string, Scalar> diff;   // differential, in degree+1 names
};

/// Finite formal model of the form algebra on one component: genus
/// generators, one residue slot per puncture, plus whatever the scenario
/// declares. Disks carry dp/p and constants only.
struct ComponentModel {
    int vertex = 0;
    bool disk = false;
    int genus = 0;
    std::map<std::string, SurfaceGen> gens;
    std::map<std::pair<std::string, std::string>, std::map<std::string, Scalar>> wedges;
};

struct DgaModel {
    CentralFiberGraph fiber;
    std::vector<ComponentModel> comps;  // by vertex id

    const ComponentModel& comp(int v) const { return comps.at(static_cast<size_t>(v)); }
    /// The unique edge at the disk of branch i; throws when absent.
    int disk_edge(int branch) const;
};

/// Base model: genus generators omega_j / omegabar_j on each component, a
/// residue slot per puncture (d slot = the component's formal sigma), dp/p
/// on disks. Scenario declarations extend it.
DgaModel make_model(const CentralFiberGraph& g);

void declare_two_form(DgaModel& m, int v, const std::string& name, int w = 2, int f = 1);
/// Refused when the form is closed (empty diff) on a compact component with
/// nonzero residue sum.
void declare_one_form(DgaModel& m, int v, const std::string& name,
                      const std::map<int, Scalar>& residues,
                      const std::map<std::string, Scalar>& diff, int w = 1, int f = 1);
void declare_function(DgaModel& m, int v, const std::string& name,
                      const std::map<int, Scalar>& values,
                      const std::map<std::string, Scalar>& diff);
void declare_wedge(DgaModel& m, int v, const std::string& a, const std::string& b,
                   const std::map<std::string, Scalar>& result);

/// Scenario JSON: {"components": [{"vertex": 2, "two_forms": [...],
/// "one_forms": [...], "functions": [...], "wedges": [...]}]}.
DgaModel model_from_json(const CentralFiberGraph& g, const Json& scenario);

/// K dx/x + L dy/y + H dxi.
struct EdgeOne {
    XiU K, L, H;
    bool operator==(const EdgeOne& o) const = default;
};

/// R dxi^dx/x + S dxi^dy/y + T dx/x^dy/y.
struct EdgeTwo {
    XiU R, S, T;
    bool operator==(const EdgeTwo& o) const = default;
};

/// Element of the edge-and-surface complex. Only nonzero supports are
/// stored; the surface coordinate maps generator name -> coefficient, with
/// "1" reserved for the constant part of functions.
struct DgaElement {
    int degree = 0;
    std::map<int, std::map<std::string, Scalar>> surf;  // by vertex id
    std::map<int, XiU> p;      // degree 0 edge parts
    std::map<int, EdgeOne> one;
    std::map<int, EdgeTwo> two;
    std::map<int, XiU> three;  // Q dxi^dx/x^dy/y

    bool is_zero() const;
    bool operator==(const DgaElement& o) const;
};

DgaElement dga_add(const DgaElement& a, const DgaElement& b);
DgaElement dga_scale(const Scalar& c, const DgaElement& a);

DgaElement d(const DgaModel& m, const DgaElement& el);
/// Graded-commutative; throws "missing wedge declaration: ..." when a
/// surface product was never declared.
DgaElement wedge(const DgaModel& m, const DgaElement& a, const DgaElement& b);
/// Empty iff el satisfies every boundary condition of the compatible
/// subcomplex.
std::vector<std::string> compat_check(const DgaModel& m, const DgaElement& el);

DgaElement apply_N(const DgaModel& m, const DgaElement& el);
DgaElement apply_M(const DgaModel& m, const DgaElement& el, int branch);

/// Minimal l with el in W_l (maximum over monomials); 0 for the zero
/// element.
int weight_level(const DgaModel& m, const DgaElement& el);
/// Maximal p with el in F^p (minimum over monomials); 0 for the zero
/// element.
int hodge_level(const DgaModel& m, const DgaElement& el);

/// Value of a degree-0 element on disk component 0.
Scalar augmentation(const DgaModel& m, const DgaElement& el);

/// (1-xi)dx/x - xi dy/y - u dxi on the edge; the balanced variant attaches
/// unit residue slots on both endpoint components so compat passes.
DgaElement make_theta(const DgaModel& m, int edge, bool balanced = false);

/// For closed degree-1 el with zero residues and exact surface parts:
/// the primitive sum g_i + integral of H. Throws std::invalid_argument
/// ("primitive unavailable: ...") otherwise.
DgaElement primitive(const DgaModel& m, const DgaElement& el);

struct H1Class {
    DgaElement rep;
    int weight = 0;  // 0, 1, or 2
    std::string label;
};

/// Closed compatible representatives: dxi cycle classes, genus generators,
/// tau^{-1}-normalized balanced residue configurations. Ordered by weight;
/// counts match weight_graded_dims.
std::vector<H1Class> h1_basis(const DgaModel& m);

Json dga_element_to_json(const DgaElement& el);
DgaElement dga_element_from_json(const Json& j);

}  // namespace pcs
