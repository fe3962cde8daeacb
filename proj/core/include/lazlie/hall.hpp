// Weighted Hall bases of free nilpotent Lie algebras and the normal-form
// rewriter.  Generators carry weights; a monomial's degree is the weight
// sum of its leaves and everything of degree > c is truncated away.

#ifndef LAZLIE_HALL_HPP
#define LAZLIE_HALL_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lazlie/lla.hpp"

namespace lazlie {

// Hall monomial stored in the arena of a FreeLie context.  Leaves have
// gen >= 0; internal nodes refer to earlier arena entries.  The arena is
// sorted by the Hall order, so an entry's id doubles as its rank.
struct HallMono {
    int left = -1;
    int right = -1;
    int gen = -1;
    int deg = 0;
};

// Sparse element of the free algebra: Hall monomial id -> coefficient.
using LiePoly = std::map<int, u32>;

// Number of Hall monomials of degree d over n weight-1 generators.
u64 witt_count(u64 n, u64 d);

// Free c-nilpotent Lie algebra context over F_p on generators of given
// weights.  Monomial order inside a degree class: generators first (by
// weight, then index), then bracket nodes lexicographically by
// (rank of left, rank of right).  Across degrees, lower degree first.
class FreeLie {
  public:
    FreeLie(std::vector<int> weights, int c, u32 p);

    u32 p() const { return p_; }
    int c() const { return c_; }
    std::size_t ngens() const { return weights_.size(); }
    const std::vector<int>& weights() const { return weights_; }

    std::size_t dim() const { return arena_.size(); }
    const HallMono& mono(int id) const { return arena_[static_cast<std::size_t>(id)]; }
    const std::vector<HallMono>& hall() const { return arena_; }
    int gen_id(std::size_t k) const { return gen_ids_[k]; }
    std::string name(int id) const;

    LiePoly gen(std::size_t k) const;
    static LiePoly zero() { return {}; }
    LiePoly add(const LiePoly& a, const LiePoly& b) const;
    LiePoly sub(const LiePoly& a, const LiePoly& b) const;
    LiePoly scale(u32 s, const LiePoly& a) const;
    LiePoly bracket(const LiePoly& a, const LiePoly& b) const;

    // Normal form of [P, Q] for arena monomials.  Antisymmetry, the Hall
    // condition and the Jacobi rewrite are applied until only basis
    // monomials remain; results are memoized and safe to request from
    // several threads at once.
    LiePoly bracket_mono(int P, int Q) const;

    // (min degree, max degree) over the support; (c+1, c+1) for zero.
    std::pair<int, int> lev_deg(const LiePoly& q) const;

    // Materializes the algebra on the Hall basis with P_i spanned by the
    // monomials of degree >= i.
    Lla to_lla() const;

    // Restriction of the degree-d slice, listed in Hall order.
    std::vector<int> degree_slice(int d) const;

  private:
    std::vector<int> weights_;
    int c_;
    u32 p_;
    std::vector<HallMono> arena_;
    std::vector<int> gen_ids_;
    std::map<std::pair<int, int>, int> pair_id_;  // Hall-valid (left, right)
    mutable std::mutex memo_mu_;
    mutable std::map<std::pair<int, int>, LiePoly> memo_;
    mutable std::set<std::pair<int, int>> busy_;  // pairs mid-rewrite

    void build();
    LiePoly bracket_mono_locked(int P, int Q,
                                std::map<std::pair<int, int>, LiePoly>& local) const;
};

// Convenience constructor used throughout: the free algebra as an Lla.
Lla free_lla(std::vector<int> weights, int c, u32 p);

// Image of the free algebra in a target under chosen generator images:
// leaves map to the given vectors and bracket nodes to target brackets.
// The result is a dim(F) x dim(target) matrix; certify with hom_violation.
Mat hom_from_generators(const FreeLie& F, const Lla& target,
                        const std::vector<Vec>& gen_images);

}  // namespace lazlie

#endif
