// The group side of a flagged Lie algebra when c < p: multiplication by
// the truncated Hausdorff series, group words recovering the Lie
// operations from group data, and the correspondence check battery.

#ifndef LAZLIE_LAZARD_HPP
#define LAZLIE_LAZARD_HPP

#include <memory>
#include <string>
#include <vector>

#include "lazlie/hall.hpp"
#include "lazlie/lla.hpp"
#include "lazlie/rng.hpp"

namespace lazlie {

// Hausdorff data for one (c, p), expressed on the Hall basis of the free
// algebra on two weight-1 generators X, Y.
//   H       Lie coordinates of log(exp X exp Y); drives the group product.
//   h1, h2  group words whose values are X + Y and [X, Y].  A word maps
//           Hall ids to exponents and denotes the product, in increasing
//           id order, of iterated group commutators shaped like the
//           monomial (leaves = the two arguments).
struct BchPolys {
    int c = 0;
    u32 p = 0;
    LiePoly H;
    LiePoly h1;
    LiePoly h2;
    std::shared_ptr<const FreeLie> F;  // context the ids refer to
};

// Cached once per (c, p); concurrent callers share one immutable object.
// Requires 1 <= c < p.
std::shared_ptr<const BchPolys> bch(int c, u32 p);

// Value of a free-algebra element in L at X -> a, Y -> b, bracket nodes
// evaluated with L's bracket.
Vec lie_eval(const BchPolys& B, const Lla& L, const LiePoly& q, const Vec& a,
             const Vec& b);

// The group carried by L: the same vectors with x * y = H(x, y).
struct LazGroup {
    Lla L;
    std::shared_ptr<const BchPolys> polys;

    Vec mul(const Vec& x, const Vec& y) const;
    Vec inv(const Vec& x) const;  // -x; H(x, -x) = 0 by alternativity
    Vec pow(const Vec& x, u32 k) const;          // k-fold product
    Vec comm(const Vec& x, const Vec& y) const;  // x^-1 y^-1 x y
};

// Requires validate(L) to pass and c < p.
LazGroup group_of(const Lla& L);

// Value of a group word at (a, b), computed through group operations only.
Vec word_eval(const LazGroup& G, const LiePoly& word, const Vec& a,
              const Vec& b);

// Rebuilds the Lie table from group data alone: brackets through h2.
// Equal to G.L exactly.
Lla lie_of(const LazGroup& G);

// "X + Y + 2*[Y,X]" for Lie coordinates, "X * Y * [Y,X]^3" for words.
std::string poly_text(const BchPolys& B, const LiePoly& q);
std::string word_text(const BchPolys& B, const LiePoly& w);

// Sampled evidence that group and Lie structure determine each other:
// group axioms and exponent, defect levels of product and commutator,
// flag transport, subgroup <-> subalgebra, normal <-> ideal, and
// automorphism transport.  Failures come back as descriptions.
struct CorrespondenceReport {
    int checks = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};
CorrespondenceReport verify_correspondence(const Lla& L, Rng& rng, int samples);

}  // namespace lazlie

#endif
