// Free amalgamation of flagged Lie algebras over a common subalgebra.
// Three layers: the semidirect construction joining two one-generator
// ideal extensions, a rank induction that absorbs an arbitrary extension
// one generator at a time, and a Malcev-chain composition for the general
// case.  Verification predicates (strongness, freeness, tensor
// independence, base change) operate on the recorded construction trace.

#ifndef LAZLIE_AMALGAM_HPP
#define LAZLIE_AMALGAM_HPP

#include <memory>
#include <optional>
#include <vector>

#include "lazlie/lla.hpp"

namespace lazlie {

struct AmalgamTrace;

// Amalgam of A and B over C.  emb_a and emb_b are certified embeddings
// into S agreeing on C; their images generate S and intersect exactly in
// the image of C.  h_rows is an ideal of S containing emb_b(B) with
// S = span(h_rows, gen); gen is zero when emb_b(B) exhausts S.
struct AmalgamResult {
    Lla S;
    Mat emb_a;
    Mat emb_b;
    Mat c_rows;  // rref image of C in S
    Mat h_rows;
    Vec gen;
    std::shared_ptr<const AmalgamTrace> trace;
};

// Construction record, one node per step.  stage_two nodes list the
// alternating half-steps of the rank induction plus the finishing
// stage_one; stage_three nodes list the links of the Malcev chain.
// Sub-amalgams carry their own traces.
struct AmalgamTrace {
    enum class Kind { degenerate_a, degenerate_b, stage_one, stage_two, stage_three };
    Kind kind = Kind::stage_one;

    Mat e_ca, e_cb;        // the embeddings this node amalgamated over
    int lev_h_over_b = 0;  // measured level of h_rows over the image of B

    // stage_one
    int alpha = 0, beta = 0;    // levels of the selected generators
    Vec a_sel, b_sel;           // the generators, in A and B coordinates
    Mat der_a, der_b;           // their adjoint action on C, in C coordinates
    std::vector<int> hall_ids;  // free-part ids of the bracket monomials h_3..h_k
    std::size_t dim_c = 0;

    struct Link {
        bool a_side = false;  // stage_two: which side this half-step rebuilt
        AmalgamResult res;
        Mat arg_rows;      // rows presenting the sub-call's second argument
        Rank rank;         // rank of the sub-call's extension, for descent checks
        int lev_gain = 0;  // the sub-result's lev_h_over_b
    };
    std::vector<Link> links;
    std::optional<AmalgamResult> closing;  // stage_two: the finishing stage_one

    int mu = 0, nu = 0;  // stage_two: generator level and lev(B/C)
    Rank rank{};         // stage_two: rank of B over C at this node
};

// Amalgam of two one-generator ideal extensions A = <C a> and B = <C b>.
// Generators of maximal level are selected by scanning the flag from the
// deepest step upward (first basis row outside C wins) unless supplied,
// in which case the supplied level must be maximal.  S extends C by the
// free algebra on two generators of the selected levels, acting through
// the adjoint derivations of a and b.
AmalgamResult stage1(const Lla& C, const Lla& A, const Mat& e_ca, const Lla& B,
                     const Mat& e_cb, std::optional<Vec> a_gen = std::nullopt,
                     std::optional<Vec> b_gen = std::nullopt);

// Amalgam of a one-generator ideal extension A = <C a> with an arbitrary
// extension B of C, by induction on rank(B/C): B is split along an
// ordered Malcev basis and the two sides are rebuilt alternately, each
// half-step a strictly smaller instance, closing with stage1.  The
// result's h_rows satisfies lev(H / emb_b(B)) = lev(a) + lev(B/C).
AmalgamResult stage2(const Lla& C, const Lla& A, const Mat& e_ca, const Lla& B,
                     const Mat& e_cb);

// Free amalgam of arbitrary extensions A, B of C: stage2 along an
// ordered Malcev basis of A over C.
AmalgamResult free_amalgam(const Lla& A, const Lla& B, const Lla& C, const Mat& e_ca,
                           const Mat& e_cb);

// The images of A and B intersect exactly in the image of C.
bool is_strong(const AmalgamResult& r);

// The mediating hom S -> L for homs f: A -> L and g: B -> L agreeing on
// C, rebuilt by walking the construction trace.  Returns nullopt when
// the preconditions fail (f or g not a certified hom, or disagreement on
// C); internal certification failures throw, since the construction
// guarantees the hom exists.
std::optional<Mat> freeness_check(const AmalgamResult& r, const Lla& A, const Lla& B,
                                  const Lla& L, const Mat& f, const Mat& g);

enum class Indep { yes, no, undecided };

// Whether <C a b> inside `ambient` is the free amalgam of <C a> and
// <C b> over C.  Singletons over an ideal are decided by the closed
// three-condition criterion; otherwise the free amalgam is built and
// matched against <C a b> by iso_search with both sides pinned, whose
// refusal surfaces as `undecided`.
Indep indep_otimes(const Lla& ambient, const std::vector<Vec>& a,
                   const std::vector<Vec>& b, const Mat& c_rows,
                   std::size_t iso_ceiling = 8);

struct BaseChangeReport {
    Indep at_c = Indep::undecided;
    Indep at_e = Indep::undecided;
    bool held = true;  // independence over C implied independence over E
};

// Checks that independence over C descends to a subalgebra E of C.
// Requires a and b Malcev over both C and E.
BaseChangeReport base_change_check(const Lla& ambient, const std::vector<Vec>& a,
                                   const std::vector<Vec>& b, const Mat& c_rows,
                                   const Mat& e_rows, std::size_t iso_ceiling = 8);

}  // namespace lazlie

#endif
