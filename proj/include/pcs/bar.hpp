#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pcs/dga.hpp"

namespace pcs {

/// Formal sum of tensor powers of 1-forms, the degree 0 part of the reduced
/// bar construction. Slots may temporarily hold degree 2 elements after a
/// differential has been applied.
struct BarTensor {
    int s = 1;        // length bound
    Scalar constant;  // empty tensor part
    std::vector<std::pair<Scalar, std::vector<DgaElement>>> terms;

    bool is_zero() const;
};

BarTensor bar_term(int s, const Scalar& c, std::vector<DgaElement> factors);
BarTensor bar_add(const BarTensor& a, const BarTensor& b);
BarTensor bar_scale(const Scalar& c, const BarTensor& a);

/// d_I + d_C: insert the differential of each slot, then the wedge of each
/// neighbouring pair. Returns the representative before quotienting.
BarTensor chen_differential(const DgaModel& m, const BarTensor& t);

/// The relation generator R_i(u, f), 1 <= i <= r. The end rules shift f by
/// its augmentation, the middle rule uses f as is.
BarTensor relation_element(const DgaModel& m, const std::vector<DgaElement>& u,
                           const DgaElement& f, int i);

/// Rewrites the tensor so that every degree 1 slot lies in the fixed
/// complement of the exact forms; equal to the input modulo the relation
/// span, idempotent, linear.
BarTensor reduce_normal_form(const DgaModel& m, const BarTensor& t);

/// True iff the Chen differential reduces to zero modulo relations.
bool is_chen_closed(const DgaModel& m, const BarTensor& t);

/// Chen-closed extension of a family of closed 1-forms: the sum over all
/// splittings of [1..s] into consecutive blocks, with one correction form
/// per block found by solving d(psi) = -(sum of block wedges) in the
/// compatible complex. Throws "primitive unavailable: phi[i..j]" when a
/// correction does not exist.
BarTensor extend_closed_family(const DgaModel& m, const std::vector<DgaElement>& phis);

struct BarLevels {
    int w = 0;      // max over summands of (sum of levels + length)
    int f = 0;      // min over all summands of the level sum
    int f_top = 0;  // same, over the summands of maximal length
};

/// Levels of the normal form of t.
BarLevels bar_filtrations(const DgaModel& m, const BarTensor& t);

/// Slotwise Leibniz extensions.
BarTensor apply_N_bar(const DgaModel& m, const BarTensor& t);
BarTensor apply_M_bar(const DgaModel& m, const BarTensor& t, int branch);

/// exp(log_lambda * N) on one form resp. slotwise on tensors.
DgaElement lambda_n(const DgaModel& m, const DgaElement& el, const Scalar& log_lambda);
BarTensor lambda_n_bar(const DgaModel& m, const BarTensor& t, const Scalar& log_lambda);

/// Formal power series connection: one compatible 1-form per word over the
/// indeterminates X_1..X_length.
struct Fpsc {
    int length = 1;
    std::map<std::vector<int>, DgaElement> words;
};

/// kappa = d(omega) + omega ^ omega, by word.
Fpsc fpsc_curvature(const DgaModel& m, const Fpsc& conn);
bool fpsc_flat(const Fpsc& kappa);

/// Disk, a run of rational components, and a genus 1 carrier at the far
/// end; segments = number of edges.
CentralFiberGraph make_chain_fiber(int segments);

struct OmegaReport {
    DgaModel model;
    BarTensor omega;
    BarTensor n_class, m_class, l_class;  // reduced classes
    Scalar n_coeff, m_coeff, l_coeff;     // coefficients on the genus form
};

/// The worked chain scenario: builds the holomorphic generator with its
/// correction chain, checks Chen-closedness, reduces [N], [M] and the
/// twisted combination [L] = (1/d)[N] - (1/mk)[M], and requires [L] != 0.
OmegaReport scenario_omega(const CentralFiberGraph& chain, const Scalar& rho, long d, long mk);

Json bar_to_json(const BarTensor& t);
BarTensor bar_from_json(const Json& j);
Json fpsc_to_json(const Fpsc& w);
Fpsc fpsc_from_json(const Json& j);

}  // namespace pcs
