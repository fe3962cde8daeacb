// Class-2 groups as bilinear data: the functor sending a group of
// exponent p and class at most 2 to the alternating pairing its
// commutator induces on the central quotient, the inverse construction
// of a group from such a pairing, and the finite independence checkers
// that compare subgroup intersections with their images on the
// bilinear side.

#ifndef LAZLIE_NIL2_HPP
#define LAZLIE_NIL2_HPP

#include <optional>
#include <string>
#include <vector>

#include "lazlie/fp.hpp"
#include "lazlie/lazard.hpp"
#include "lazlie/lla.hpp"

namespace lazlie {

// Alternating bilinear pairing beta : V x V -> W over F_p, stored as
// beta(e_i, e_j) for i < j in the same packed order as bracket tables.
struct BilinearStruct {
    u32 p = 0;
    std::size_t dv = 0;
    std::size_t dw = 0;
    std::vector<Vec> beta;  // dv*(dv-1)/2 rows of length dw

    BilinearStruct() = default;
    BilinearStruct(u32 p_, std::size_t dv_, std::size_t dw_);

    std::size_t pair_index(std::size_t i, std::size_t j) const;  // i < j
    const Vec& beta_at(std::size_t i, std::size_t j) const;      // i < j
    Vec eval(const Vec& v, const Vec& w) const;  // alternating in v, w
};

std::optional<std::string> validate(const BilinearStruct& B);
bool bilinear_equal(const BilinearStruct& a, const BilinearStruct& b);

// Group on the set V x W with elements written (r | w) relative to the
// chosen basis of V: length dv + dw, V coordinates first.  The product
// adds both parts and corrects the W part by the pairing of the basis
// coordinates, later-indexed against earlier-indexed.
struct Nil2Group {
    BilinearStruct B;  // pairing expressed in the chosen basis
    Mat basis;         // rows = basis of V in the original coordinates

    u32 p() const { return B.p; }
    std::size_t dv() const { return B.dv; }
    std::size_t dw() const { return B.dw; }
    std::size_t dim() const { return B.dv + B.dw; }

    Vec id() const;
    Vec mul(const Vec& x, const Vec& y) const;
    Vec inv(const Vec& x) const;
    Vec pw(const Vec& x, long k) const;
    Vec comm(const Vec& x, const Vec& y) const;  // x^-1 y^-1 x y
};

// Requires the rows of basis to span F_p^dv; the stored pairing is the
// input pairing evaluated on basis pairs.
Nil2Group group_from_bilinear(const BilinearStruct& B, const Mat& basis);
Nil2Group group_from_bilinear(const BilinearStruct& B);  // standard basis

// Group axioms, exponent p, centrality of 0 x W and of all commutators.
// Associativity is checked on all triples when the group is small and
// on basis triples otherwise.  Returns the first failure.
std::optional<std::string> nil2_check(const Nil2Group& G);

// Pairing induced on F_p^dv by the commutator, read off basis pairs.
BilinearStruct functor_F(const Nil2Group& G);

// Same reduction for a Lazard group of class at most 2: p_rows
// designates a central subgroup containing all commutators (rejected
// otherwise), V is spanned by a complement of it, and the pairing is
// the commutator in p_rows coordinates.
BilinearStruct functor_F(const LazGroup& G, const Mat& p_rows);

// The pairing read directly off the bracket table with the same
// designated rows, bypassing the group operations.
BilinearStruct bilinear_of(const Lla& L, const Mat& p_rows);

// Coordinate change absorbing the symmetric part of the multiplication
// cocycle (a coboundary in odd characteristic): in the straightened
// coordinates group powers are scalar multiples, so subgroups become
// row spaces.
Vec straighten(const Nil2Group& G, const Vec& x);
Vec unstraighten(const Nil2Group& G, const Vec& y);

// Row space representing the subgroup generated by gens, in
// straightened coordinates: the straightened generators together with
// the commutators of their pairs, reduced.  Membership goes through
// subgroup_contains, never through in_span on raw elements.
Mat subgroup_rows(const Nil2Group& G, const std::vector<Vec>& gens);
bool subgroup_contains(const Nil2Group& G, const Mat& rows, const Vec& x);

// Forking-style independence of finite subsets over C inside G: the
// subgroups generated by A u C and B u C intersect in the subgroup
// generated by C, and the same holds for their images modulo the
// central subgroup 0 x W.
bool indep_star(const Nil2Group& G,
                const std::vector<Vec>& A,
                const std::vector<Vec>& B,
                const std::vector<Vec>& C);

// Algebraic closure of a subset of a bilinear structure: the V span,
// and the W span extended by the pairing of all V pairs.
struct BilinearSub {
    Mat v_rows;
    Mat w_rows;
};

BilinearSub acl_bilinear(const BilinearStruct& B,
                         const std::vector<Vec>& v_elems,
                         const std::vector<Vec>& w_elems);

// The matching condition on the bilinear side: closures of the images
// of the three generated subgroups intersect componentwise in the
// closure of the image over C.  Agrees with indep_star on every
// instance; the two are computed along different routes.
bool indep_bilinear(const Nil2Group& G,
                    const std::vector<Vec>& A,
                    const std::vector<Vec>& B,
                    const std::vector<Vec>& C);

}  // namespace lazlie

#endif  // LAZLIE_NIL2_HPP
