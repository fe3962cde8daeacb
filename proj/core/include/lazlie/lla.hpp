// Finite-dimensional Lie algebras over F_p carrying a Lazard flag, plus the
// structural toolkit: subalgebras, ideals, quotients, levels, Malcev bases,
// flag derivations, semidirect products, hom certification and iso search.

#ifndef LAZLIE_LLA_HPP
#define LAZLIE_LLA_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lazlie/fp.hpp"

namespace lazlie {

// Lie algebra over F_p with a flag P_1 >= P_2 >= ... >= P_{c+1} = 0 such
// that P_1 is everything and [P_i, P_j] <= P_{i+j} (indices saturate at
// c+1).  Elements are row vectors; flag[i] holds a rref basis of P_i and
// flag[0] is unused padding.  Structure constants are stored for i < j.
struct Lla {
    u32 p = 0;
    int c = 0;
    std::size_t dim = 0;
    std::vector<std::string> labels;  // optional, size dim when present
    std::vector<Vec> sc;              // packed upper triangle, row [e_i,e_j]
    std::vector<Mat> flag;            // size c + 2

    std::size_t pair_index(std::size_t i, std::size_t j) const;  // i < j
    const Vec& sc_at(std::size_t i, std::size_t j) const;        // i < j
    Vec bracket_basis(std::size_t i, std::size_t j) const;
    Vec bracket(const Vec& v, const Vec& w) const;
    Mat ad(const Vec& v) const;  // row k = [v, e_k]; acts as w -> [v, w]
    int level(const Vec& v) const;  // max i with v in P_i; c + 1 for v = 0
    std::string label(std::size_t i) const;
};

// Levels live in 1..c+1 and c+1 absorbs addition.
int lev_add(int a, int b, int c);

// Comparison of full structure tables: p, c, dim, brackets and flag.
// Labels are presentation only and do not participate.
bool lla_equal(const Lla& a, const Lla& b);

// Builds an algebra whose flag is spanned by levels: P_i = span of the
// basis vectors whose assigned level is >= i.  Does not validate.
Lla lla_from_levels(u32 p, int c, const std::vector<Vec>& sc,
                    const std::vector<int>& levels,
                    std::vector<std::string> labels = {});

// The zero algebra on no basis vectors.
Lla lla_zero(u32 p, int c);

// First axiom violation (with the offending tuple), or nullopt when L is
// a valid flagged algebra.
std::optional<std::string> validate(const Lla& L);

// Subalgebra generated by the vectors: rref basis of the bracket closure.
Mat subalgebra(const Lla& L, const std::vector<Vec>& gens);
// Closure of span(base rows ∪ extra) under brackets.
Mat subalgebra_join(const Lla& L, const Mat& base, const std::vector<Vec>& extra);
// Smallest ideal containing the vectors.
Mat ideal_closure(const Lla& L, const std::vector<Vec>& gens);

bool is_subalgebra_rows(const Lla& L, const Mat& rows);
bool is_ideal_rows(const Lla& L, const Mat& rows);

// The abstract algebra carried by a bracket-closed rref row space, with
// the induced flag P_i(sub) = sub ∩ P_i(L).  Basis = the given rows.
Lla restrict_to(const Lla& L, const Mat& rows);

struct QuotientResult {
    Lla Q;
    Mat proj;  // dim(L) x dim(Q); v * proj = image of v + I
};
// Quotient by an ideal; basis of Q = standard basis vectors complementary
// to the ideal's pivots, so proj is a retraction onto those coordinates.
QuotientResult quotient(const Lla& L, const Mat& ideal_rows);

// Largest i with L = span(base rows ∪ P_i(L)); c + 1 when base spans L.
int level_over(const Lla& L, const Mat& base_rows);

// Rank of L over a subspace: nu = level_over, n = codimension of
// span(base ∪ P_{nu+1}) when nu <= c, else 0.
struct Rank {
    int nu = 0;
    std::size_t n = 0;
};
bool operator==(const Rank& a, const Rank& b);
bool operator!=(const Rank& a, const Rank& b);
// The well-order on ranks: (mu, m) precedes (nu, n) iff mu > nu, or
// mu == nu and m < n.
bool rank_precedes(const Rank& a, const Rank& b);
Rank rank_over(const Lla& L, const Mat& base_rows);

// Ordered Malcev basis of L over a subalgebra: scans the flag downward
// and keeps basis rows that are new over the span so far.  Levels along
// the output are non-increasing.
std::vector<Vec> malcev_basis(const Lla& L, const Mat& base_rows);

// Checks the Malcev property of an ordered tuple over a subalgebra C:
// independence over C plus, for every i, span(C ∪ P_i(<C a>)) equal to
// span(C ∪ {a_k : lev(a_k) >= i}).
bool is_malcev(const Lla& L, const std::vector<Vec>& tuple, const Mat& base_rows);

// Flag derivations: all delta with delta(P_i) <= P_{i+1}, as a flagged
// algebra under commutator.  basis[k] is the matrix of the k-th basis
// derivation acting on row vectors by w -> w * basis[k].
struct DerLaz {
    Lla D;
    std::vector<Mat> basis;
    std::size_t ambient = 0;  // dimension the matrices act on
};
DerLaz der_laz(const Lla& L);
// The matrix of the derivation with the given coordinates in DerLaz.
Mat der_matrix(const DerLaz& d, const Vec& coords);

// Semidirect product C x| F along a hom g: F -> DerLaz(C) (g is a
// dim(F) x dim(D) coordinate matrix).  Basis = C block then F block;
// P_i(S) = P_i(C) + P_i(F).  Preconditions are asserted: g must be a
// certified hom and must respect the derivation flag.
Lla semidirect(const Lla& C, const Lla& F, const DerLaz& derC, const Mat& g);

// Same product from explicit action matrices: act[k] is the derivation by
// which the k-th basis vector of F acts on C (row convention).  Leibniz,
// flag displacement and compatibility with the bracket of F are asserted
// directly, so large C never needs its derivation algebra materialized.
Lla semidirect(const Lla& C, const Lla& F, const std::vector<Mat>& act);

// Certified hom check for f: A -> B (dim(A) x dim(B), rows are images of
// basis vectors).  Verifies bracket preservation on all basis pairs and
// f(P_i(A)) <= P_i(B).  Returns the first violation, or nullopt.
std::optional<std::string> hom_violation(const Lla& A, const Lla& B, const Mat& f);
bool is_hom(const Lla& A, const Lla& B, const Mat& f);

// Certified embedding check: hom + injective + level-exact
// (level(v * f) == level(v) for flag basis vectors).
std::optional<std::string> embedding_violation(const Lla& A, const Lla& B, const Mat& f);

enum class IsoStatus { found, none, refused };
struct IsoOutcome {
    IsoStatus status = IsoStatus::none;
    Mat iso;           // certified when status == found
    std::string note;  // refusal or precheck detail
};

// Backtracking search for a flag-preserving isomorphism A -> B extending
// the pointwise assignment fixA.row(k) -> fixB.row(k).  Generator images
// are enumerated over the flag basis of B in lexicographic coefficient
// order, pruned by level, injectivity and bracket consistency, so the
// outcome is deterministic.  Dimensions above the ceiling are refused
// explicitly rather than searched.
IsoOutcome iso_search(const Lla& A, const Lla& B, const Mat& fixA,
                      const Mat& fixB, std::size_t ceiling = 8);

// exp(ad x) as a certified automorphism matrix.  Requires c < p.
Mat exp_ad(const Lla& L, const Vec& x);

// Incremental partial linear map with conflict detection; shared by
// iso_search and the hom-assembly paths.  Source rows are kept reduced,
// with every row operation mirrored on the image side.
class PartialHom {
  public:
    PartialHom(u32 p, std::size_t sdim, std::size_t tdim);
    // false = the pair contradicts the map collected so far.
    bool add(const Vec& src, const Vec& img);
    // Image of v when v lies in the recorded span.
    std::optional<Vec> image(const Vec& v) const;
    std::size_t rank() const { return src_.rows; }
    const Mat& src() const { return src_; }
    const Mat& img() const { return img_; }

  private:
    Mat src_;
    Mat img_;
};

}  // namespace lazlie

#endif
