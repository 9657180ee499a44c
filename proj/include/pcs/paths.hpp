#pragma once

#include <string>
#include <vector>

#include "pcs/bar.hpp"
#include "pcs/dga.hpp"

namespace pcs {

/// One step of a combinatorial path on the central fiber. A path word is a
/// sequence of these, tracked at the component level: crossings move through
/// a node from one component to the other, the remaining events stay inside
/// one component.
enum class PathEventKind { Cross, Wind, Arc, CycleLoop };

struct PathEvent {
    PathEventKind kind = PathEventKind::Cross;
    int edge = -1;   // Cross: the node crossed; Wind: the puncture circled
    int dir = 1;     // Cross only: +1 runs k to l, -1 runs l to k
    int comp = -1;   // Wind, Arc, CycleLoop: the component carrying the event
    int from = -1;   // Arc: start puncture (an incident edge id)
    int to = -1;     // Arc: end puncture
    int gen = -1;    // CycleLoop: genus generator index, 1..2*genus
    long turns = 0;  // Wind, CycleLoop: signed number of turns

    static PathEvent cross(int edge, int dir = 1);
    static PathEvent wind(int comp, int edge, long turns);
    static PathEvent arc(int comp, int from, int to);
    static PathEvent cycle(int comp, int gen, long turns);

    bool operator==(const PathEvent&) const = default;
};

/// A path word. Crossings must chain up: every event has to sit on the
/// component the previous events lead to. Based words in addition start and
/// end on the branch-0 disk.
struct PathWord {
    std::vector<PathEvent> events;

    bool operator==(const PathWord&) const = default;
};

/// Structural complaints about a word, empty when it is a valid open path.
std::vector<std::string> path_check(const DgaModel& m, const PathWord& w);

/// Component on which the word starts resp. ends; the base disk for empty
/// words.
int path_start(const DgaModel& m, const PathWord& w);
int path_end(const DgaModel& m, const PathWord& w);

/// True when the word is valid, starts and ends at the branch-0 disk.
bool is_based(const DgaModel& m, const PathWord& w);

/// Reverses the word: events in opposite order, each one inverted.
PathWord path_inverse(const PathWord& w);

PathWord path_concat(const PathWord& a, const PathWord& b);

Json path_to_json(const PathWord& w);
PathWord path_from_json(const Json& j);

/// One within-component period symbol: the iterated integral of the named
/// generator word along either the reference arc from the component's base
/// puncture (its lowest incident edge) to `target`, or along the `target`-th
/// genus generator. Arbitrary arcs are combinations of these, so values
/// canonicalize completely.
struct PeriodAtom {
    int comp = -1;
    bool cycle = false;
    int target = -1;
    std::vector<std::string> word;

    auto operator<=>(const PeriodAtom&) const = default;
};

/// Element of the period algebra: a Scalar combination of formal products of
/// period atoms. Atoms over the same arc multiply by shuffling their words,
/// so equality is exact modulo the shuffle and arc-composition relations.
class PeriodValue {
public:
    using Term = std::vector<PeriodAtom>;

    PeriodValue() = default;
    explicit PeriodValue(const Scalar& c);
    static PeriodValue one();
    static PeriodValue atom(const PeriodAtom& a);

    bool is_zero() const { return terms_.empty(); }
    /// Coefficient of the empty product (the symbol-free part).
    Scalar scalar_part() const;

    PeriodValue operator-() const;
    PeriodValue& operator+=(const PeriodValue& o);
    PeriodValue& operator-=(const PeriodValue& o);
    PeriodValue& operator*=(const PeriodValue& o);
    PeriodValue& operator*=(const Scalar& c);
    friend PeriodValue operator+(PeriodValue a, const PeriodValue& b) { return a += b; }
    friend PeriodValue operator-(PeriodValue a, const PeriodValue& b) { return a -= b; }
    friend PeriodValue operator*(PeriodValue a, const PeriodValue& b) { return a *= b; }
    friend PeriodValue operator*(PeriodValue a, const Scalar& c) { return a *= c; }
    friend PeriodValue operator*(const Scalar& c, PeriodValue a) { return a *= c; }

    bool operator==(const PeriodValue& o) const { return terms_ == o.terms_; }
    bool operator!=(const PeriodValue& o) const { return terms_ != o.terms_; }

    const std::map<Term, Scalar>& terms() const { return terms_; }

    std::string str() const;
    Json to_json() const;

private:
    void add_term(const Term& t, const Scalar& c);
    std::map<Term, Scalar> terms_;
};

/// Regularized line integral of a closed compatible 1-form along a path
/// word. Crossings contribute the plain integral of the constant part of the
/// node profile, windings contribute tau times the residue per turn, arcs
/// and genus loops emit period symbols, and for differentials of functions
/// everything telescopes to the endpoint difference.
/// Throws std::invalid_argument on invalid words, non-closed or
/// incompatible forms.
PeriodValue integrate_closed(const DgaModel& m, const DgaElement& phi, const PathWord& w);

/// Iterated integral of a Chen-closed tensor along a path word, evaluated
/// segment by segment and stitched with the composition rule, so the result
/// is independent of how the word is cut. Factors of degree other than one
/// integrate to zero. Throws std::invalid_argument when the tensor is not
/// Chen-closed or the word is invalid.
PeriodValue iterated_integral(const DgaModel& m, const BarTensor& t, const PathWord& w);

/// Parallel transport of a flat formal power series connection: coefficient
/// of each word in the grouplike series 1 + int(omega) + int(omega omega)
/// + ... along the path.
struct TransportSeries {
    int length = 1;
    std::map<std::vector<int>, PeriodValue> coeff;
};

/// Truncated series product; the length bound of the left factor wins.
TransportSeries series_mul(const TransportSeries& a, const TransportSeries& b);

/// Throws std::invalid_argument unless the connection is flat.
TransportSeries transport(const DgaModel& m, const Fpsc& conn, const PathWord& w);

/// Integer multiple of a product (gamma_1 - 1)...(gamma_s - 1) in the group
/// ring of based loops.
struct GroupRingTerm {
    long coeff = 1;
    std::vector<PathWord> loops;
};

/// Multilinear extension of the iterated integral to the group ring: the
/// product expands into signed concatenations. Length-r tensors kill
/// products with more than r factors, and on products of exactly r factors
/// they split into single integrals.
PeriodValue groupring_pairing(const DgaModel& m, const BarTensor& t,
                              const std::vector<GroupRingTerm>& combo);

/// Value of the integral along the path that follows the same word but runs
/// over the scaled tangent vector: crossings acquire the log-scale times the
/// u-derivative of their profiles. Computed exactly by transporting the
/// integrand with the one-parameter flow of the level operator.
PeriodValue vary_tangent(const DgaModel& m, const BarTensor& t, const PathWord& w,
                         const Scalar& log_lambda);
PeriodValue vary_tangent(const DgaModel& m, const DgaElement& phi, const PathWord& w,
                         const Scalar& log_lambda);

/// Same for scaling the base vector on the disk: only the branch node
/// responds, with the opposite orientation.
PeriodValue vary_base(const DgaModel& m, const BarTensor& t, const PathWord& w,
                      const Scalar& log_mu, int branch = 0);

/// Elementary rewrites of a path word inside its homotopy class. Every
/// integral operation is invariant under them.
enum class MoveKind {
    InsertBacktrack,  // pos, edge, dir: insert cross(edge,dir), cross(edge,-dir)
    RemoveBacktrack,  // pos: delete an adjacent cancelling crossing pair
    MergeWinds,       // pos: combine two winds at the same puncture
    SplitWind,        // pos, split: cut one wind into two
    RecutArc,         // pos, via: cut an arc at an intermediate puncture
    MergeArcs,        // pos: join two arcs sharing their middle puncture
    DropTrivial,      // pos: remove a zero-turn wind, a p-to-p arc, a zero loop
    InsertTrivial,    // pos, trivial: insert such a no-op event
};

struct HomotopyMove {
    MoveKind kind = MoveKind::DropTrivial;
    size_t pos = 0;
    int edge = -1;
    int dir = 1;
    int via = -1;
    long split = 0;
    PathEvent trivial{};
};

/// Applies the move; throws std::invalid_argument when it does not fit the
/// word at that position.
PathWord homotopy_move(const DgaModel& m, const PathWord& w, const HomotopyMove& move);

}  // namespace pcs
