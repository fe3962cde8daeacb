// Finite configurations separating the combinatorial properties of the
// generic nilpotent algebras: the tree-shaped family realized and refuted
// by claims one and two, the independence family cut out of a free
// algebra, the two flag gadgets, one saturation round against a catalog
// of small extension types, and the class-2 axiom check.

#ifndef LAZLIE_WITNESSES_HPP
#define LAZLIE_WITNESSES_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lazlie/amalgam.hpp"
#include "lazlie/lla.hpp"

namespace lazlie {

// ---- tree-shaped family ------------------------------------------------

// 3-step algebra on a_i, a'_i, b_i, b'_i (i < n) and d_{ij} (i < j < n)
// whose only nonzero brackets are [a'_i, b_j] = d_{ij} for i < j.  The
// unprimed vectors sit at level 1, the primed ones at level 2 and the
// d_{ij} at level 3.
struct Sop3Instance {
    int n = 0;
    Lla V;

    std::size_t a(int i) const;
    std::size_t a_prime(int i) const;
    std::size_t b(int i) const;
    std::size_t b_prime(int i) const;
    std::size_t d(int i, int j) const;  // i < j
};

Sop3Instance build_sop3(int n, u32 p);

// One new element c* with [c*, b_i] = b'_i for i <= k and [c*, a_j] = a'_j
// for j > k, glued onto the instance by free amalgamation over the
// commuting substructure W spanned by those b, b', a, a'.
struct Sop3Realization {
    Lla S;
    Mat emb;     // certified embedding of the instance into S
    Vec cstar;   // the realizing element, in S coordinates
    Mat w_rows;  // basis of W inside the instance
    std::vector<std::string> equations;  // the verified bracket equations
};
Sop3Realization sop3_claim1(const Sop3Instance& inst, int k);

// ---- symbolic refutation certificates -----------------------------------

// Bracket term over the instance basis, a literal zero, and one adjoined
// unknown.  atom >= 0 indexes the instance basis; kid has size 2 exactly
// for bracket nodes.
struct SymTerm {
    enum : int { bracket_node = -3, zero_atom = -2, unknown_atom = -1 };
    int atom = bracket_node;
    std::vector<SymTerm> kid;
    bool operator==(const SymTerm& o) const;
};
using SymExpr = std::vector<SymTerm>;  // formal sum, every coefficient 1

enum class RewriteRule {
    known,        // replace an unknown-free subterm by one of equal value
    assumption,   // swap a'_i <-> [d, a_i] or [d, b_j] <-> b'_j
    jacobi,       // [[x, y], z] -> [[x, z], y] + [x, [y, z]] at a term root
    multilinear,  // a bracket with a zero child collapses to zero
    sum           // drop the literal-zero summands
};

struct RefutationStep {
    RewriteRule rule = RewriteRule::known;
    std::size_t term = 0;   // index of the rewritten top-level term
    std::vector<int> path;  // 0/1 descent to the subterm; empty = term root
    SymTerm replacement;    // known / assumption / multilinear
    std::string note;
    SymExpr after;
};

// Derivation that an unknown d with [d, a_i] = a'_i and [d, b_j] = b'_j
// forces d_{ij} = 0.  For i < j this contradicts d_{ij} being a basis
// vector; for j <= i the start term already vanishes and nothing is
// contradicted.
struct RefutationCert {
    int i = 0, j = 0;
    SymExpr start;
    std::vector<RefutationStep> steps;
    bool contradiction = false;
    std::string display;  // rendered rewriting chain
};
RefutationCert sop3_claim2(const Sop3Instance& inst, int i, int j);

// Mechanical replay: every step is re-checked against its rule's side
// conditions, the recorded intermediate expressions must match, the chain
// must end at the empty sum, and the contradiction flag must agree with
// the value of the start term.
bool check_refutation(const Sop3Instance& inst, const RefutationCert& cert,
                      std::string* why = nullptr);

// ---- independence family -------------------------------------------------

// Free class-c algebra on generators b and a_{i,j} (i < c-1, j < m),
// modulo the span of the left-normed monomials [b, a_{0,t_0}, ...,
// a_{c-2,t_{c-2}}] with t in X.  Each such monomial is checked to be a
// Hall basis element before anything is spanned.
struct IpInstance {
    int c = 0;
    u32 p = 0;
    int m = 0;
    std::vector<std::vector<int>> X;  // sorted tuples, each of length c-1
    Lla Lbar;
    Vec b_img;                            // image of b in the quotient
    std::vector<std::vector<Vec>> a_img;  // a_img[i][j] = image of a_{i,j}
    std::map<std::vector<int>, int> hall_id;  // tuple -> basis id upstairs
};
IpInstance build_ip_witness(int c, u32 p, int m, std::vector<std::vector<int>> X);

// [b, a_{0,t_0}, ..., a_{c-2,t_{c-2}}] evaluated in the quotient.
Vec ip_bracket(const IpInstance& inst, const std::vector<int>& tuple);

// True when the monomial vanishes exactly for the tuples in X.
bool ip_biconditional(const IpInstance& inst);

// ---- flag gadgets ---------------------------------------------------------

// Basis (a, b, c) with [b, c] = a and levels i + j, i, j.  Needs i + j <= cls.
Lla heisenberg_gadget(int i, int j, int cls, u32 p);

// Basis (a, b, c) with [a, b] = c and levels n, 1, n + 1.  Needs n <= cls - 1.
Lla level_raiser(int n, int cls, u32 p);

// ---- one saturation round --------------------------------------------------

struct SubstructureEntry {
    Mat rows;  // reduced rows in ambient coordinates, flag-adapted
    Lla A;
};

// Canonical substructures of dimension <= dmax: the zero subalgebra, the
// line of every basis vector, and for dmax >= 2 the bracket-closed pairs
// of basis vectors with adapted flags, deduplicated up to isomorphism.
std::vector<SubstructureEntry> substructure_catalog(const Lla& L, int dmax);

// Extension types of A by new_dims generators, up to isomorphism over A.
// A keeps the leading coordinates; generators are appended in
// non-increasing level order and every level-compatible bracket table
// that validates is considered.
std::vector<Lla> extension_types(const Lla& A, int new_dims,
                                 std::size_t iso_ceiling = 8);

// Certified embedding of B into M extending the map of B's leading block
// onto a_rows, found by affine solving per generator plus a bounded
// deterministic scan of the solution space.
std::optional<Mat> find_witness(const Lla& M, const Mat& a_rows, const Lla& B);

struct ExtensionTask {
    Mat a_rows;  // base substructure, in final-output coordinates
    Lla A;
    Lla B;
    bool witnessed = false;  // true = found without amalgamating
    Mat emb;                 // certified embedding of B into the output
    std::string note;
};
struct RoundReport {
    Lla out;
    std::vector<ExtensionTask> tasks;
    int added = 0;  // amalgamation steps performed
};

// One round: every pair of a cataloged substructure A of L and an
// extension type B with dim(B) <= bound is witness-checked in the
// evolving algebra, and the missing ones are freely amalgamated in.  The
// input keeps its coordinates as the leading block of the output, so
// rounds compose monotonically.
RoundReport generic_round(const Lla& L, int bound);

// ---- class-2 axiom check ----------------------------------------------------

struct T2pReport {
    int commutator_checks = 0, commutator_witnessed = 0;
    int solve_checks = 0, solve_witnessed = 0;
    std::vector<std::string> violated;  // structural failures
    std::vector<std::string> pending;   // unwitnessed existentials
    bool ok() const { return violated.empty(); }
};

// Finite-stage reading of the class-2 axioms: central elements should be
// brackets, and tuples independent over the center should pair with
// arbitrary central targets.  Failures a larger algebra could still
// repair are reported as pending, never as violations.
T2pReport t2p_axiom_check(const Lla& L);

}  // namespace lazlie

#endif
