#include "lazlie/lazard.hpp"

#include <bit>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <utility>

namespace lazlie {

namespace {

// Free associative algebra on two letters truncated past degree c, just
// big enough to expand log(exp X exp Y).  A word is a u32 with a marker
// bit: 1 is the empty word, (1 << n) | bits a word of length n with the
// first letter in the highest payload bit.
using Assoc = std::map<u32, u32>;

int wlen(u32 w) { return std::bit_width(w) - 1; }

int letter_at(u32 w, int i) {
    int n = wlen(w);
    return static_cast<int>((w >> (n - 1 - i)) & 1u);
}

u32 wcat(u32 a, u32 b) {
    int nb = wlen(b);
    return (a << nb) | (b & ((1u << nb) - 1u));
}

void acc(Assoc& r, u32 w, u32 co, u32 p) {
    if (co == 0) return;
    auto it = r.find(w);
    u32 s = fp_add(it == r.end() ? 0 : it->second, co, p);
    if (s == 0) {
        if (it != r.end()) r.erase(it);
    } else {
        r[w] = s;
    }
}

Assoc amul(const Assoc& a, const Assoc& b, int c, u32 p) {
    Assoc r;
    for (const auto& [wa, ca] : a)
        for (const auto& [wb, cb] : b) {
            if (wlen(wa) + wlen(wb) > c) continue;
            acc(r, wcat(wa, wb), fp_mul(ca, cb, p), p);
        }
    return r;
}

Assoc exp_letter(int l, int c, u32 p) {
    Assoc r;
    u32 w = 1;  // empty word
    u32 kfact = 1;
    r[w] = 1;
    for (int k = 1; k <= c; ++k) {
        w = wcat(w, 2u | static_cast<u32>(l));
        kfact = fp_mul(kfact, static_cast<u32>(k) % p, p);
        r[w] = fp_inv(kfact, p);
    }
    return r;
}

// log(E) for E = 1 + u:  sum over m of (-1)^(m-1) u^m / m.
Assoc assoc_log(const Assoc& E, int c, u32 p) {
    Assoc u = E;
    u.erase(1u);
    Assoc r;
    Assoc upow = u;
    for (int m = 1; m <= c; ++m) {
        u32 co = fp_inv(static_cast<u32>(m) % p, p);
        if (m % 2 == 0) co = fp_neg(co, p);
        for (const auto& [w, cw] : upow) acc(r, w, fp_mul(cw, co, p), p);
        if (m < c) upow = amul(upow, u, c, p);
    }
    return r;
}

// Lie projection: a degree-n word goes to its right-nested bracketing
// divided by n; on Lie elements this is the identity.
LiePoly dynkin_project(const FreeLie& F, const Assoc& z) {
    u32 p = F.p();
    LiePoly H;
    for (const auto& [w, co] : z) {
        int n = wlen(w);
        LiePoly poly = F.gen(static_cast<std::size_t>(letter_at(w, n - 1)));
        for (int i = n - 2; i >= 0; --i)
            poly = F.bracket(F.gen(static_cast<std::size_t>(letter_at(w, i))), poly);
        H = F.add(H, F.scale(fp_mul(co, fp_inv(static_cast<u32>(n), p), p), poly));
    }
    return H;
}

// Degree-by-degree correction: extend the word until its value is the
// target.  Appending a degree-d factor with exponent k adds k times its
// leading monomial at degree d and touches nothing below.
LiePoly solve_word(const LazGroup& G, const Vec& target) {
    const FreeLie& F = *G.polys->F;
    Vec X = vec_unit(F.dim(), static_cast<std::size_t>(F.gen_id(0)));
    Vec Y = vec_unit(F.dim(), static_cast<std::size_t>(F.gen_id(1)));
    LiePoly w;
    for (int d = 1; d <= F.c(); ++d) {
        Vec defect = vec_sub(target, word_eval(G, w, X, Y), G.L.p);
        for (std::size_t id = 0; id < F.dim(); ++id) {
            if (defect[id] == 0) continue;
            int deg = F.mono(static_cast<int>(id)).deg;
            if (deg < d) throw std::logic_error("hausdorff inversion: low-degree defect persists");
            if (deg == d) w[static_cast<int>(id)] = defect[id];
        }
    }
    if (word_eval(G, w, X, Y) != target)
        throw std::logic_error("hausdorff inversion failed");
    return w;
}

std::shared_ptr<const BchPolys> build_bch(int c, u32 p) {
    auto B = std::make_shared<BchPolys>();
    B->c = c;
    B->p = p;
    B->F = std::make_shared<FreeLie>(std::vector<int>{1, 1}, c, p);
    Assoc E = amul(exp_letter(0, c, p), exp_letter(1, c, p), c, p);
    B->H = dynkin_project(*B->F, assoc_log(E, c, p));

    Lla Lfree = B->F->to_lla();
    LazGroup G{Lfree, B};
    Vec X = vec_unit(Lfree.dim, static_cast<std::size_t>(B->F->gen_id(0)));
    Vec Y = vec_unit(Lfree.dim, static_cast<std::size_t>(B->F->gen_id(1)));
    B->h1 = solve_word(G, vec_add(X, Y, p));
    B->h2 = solve_word(G, Lfree.bracket(X, Y));
    return B;
}

}  // namespace

std::shared_ptr<const BchPolys> bch(int c, u32 p) {
    if (!is_odd_prime(p)) throw std::invalid_argument("bch: p must be an odd prime");
    if (c < 1 || static_cast<u32>(c) >= p)
        throw std::invalid_argument("bch: requires 1 <= c < p");
    static std::mutex mu;
    static std::map<std::pair<int, u32>, std::shared_ptr<const BchPolys>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find({c, p});
    if (it != cache.end()) return it->second;
    auto B = build_bch(c, p);
    cache.emplace(std::make_pair(c, p), B);
    return B;
}

Vec lie_eval(const BchPolys& B, const Lla& L, const LiePoly& q, const Vec& a,
             const Vec& b) {
    const FreeLie& F = *B.F;
    std::vector<Vec> val(F.dim());
    for (std::size_t id = 0; id < F.dim(); ++id) {
        const HallMono& m = F.mono(static_cast<int>(id));
        if (m.gen == 0)
            val[id] = a;
        else if (m.gen == 1)
            val[id] = b;
        else
            val[id] = L.bracket(val[static_cast<std::size_t>(m.left)],
                                val[static_cast<std::size_t>(m.right)]);
    }
    Vec r = vec_zero(L.dim);
    for (const auto& [id, co] : q)
        r = vec_add(r, vec_scale(co, val[static_cast<std::size_t>(id)], L.p), L.p);
    return r;
}

Vec LazGroup::mul(const Vec& x, const Vec& y) const {
    return lie_eval(*polys, L, polys->H, x, y);
}

Vec LazGroup::inv(const Vec& x) const { return vec_scale(L.p - 1, x, L.p); }

Vec LazGroup::pow(const Vec& x, u32 k) const {
    Vec r = vec_zero(L.dim);
    for (u32 i = 0; i < k; ++i) r = mul(r, x);
    return r;
}

Vec LazGroup::comm(const Vec& x, const Vec& y) const {
    return mul(mul(inv(x), inv(y)), mul(x, y));
}

LazGroup group_of(const Lla& L) {
    auto bad = validate(L);
    if (bad) throw std::invalid_argument("group_of: " + *bad);
    return LazGroup{L, bch(L.c, L.p)};
}

Vec word_eval(const LazGroup& G, const LiePoly& word, const Vec& a,
              const Vec& b) {
    const FreeLie& F = *G.polys->F;
    std::vector<Vec> val(F.dim());
    for (std::size_t id = 0; id < F.dim(); ++id) {
        const HallMono& m = F.mono(static_cast<int>(id));
        if (m.gen == 0)
            val[id] = a;
        else if (m.gen == 1)
            val[id] = b;
        else
            val[id] = G.comm(val[static_cast<std::size_t>(m.left)],
                             val[static_cast<std::size_t>(m.right)]);
    }
    Vec r = vec_zero(G.L.dim);
    for (const auto& [id, e] : word)
        r = G.mul(r, G.pow(val[static_cast<std::size_t>(id)], e));
    return r;
}

Lla lie_of(const LazGroup& G) {
    Lla R = G.L;
    for (std::size_t i = 0; i < R.dim; ++i)
        for (std::size_t j = i + 1; j < R.dim; ++j)
            R.sc[R.pair_index(i, j)] =
                word_eval(G, G.polys->h2, vec_unit(R.dim, i), vec_unit(R.dim, j));
    return R;
}

std::string poly_text(const BchPolys& B, const LiePoly& q) {
    if (q.empty()) return "0";
    std::string s;
    for (const auto& [id, co] : q) {
        if (!s.empty()) s += " + ";
        if (co != 1) s += std::to_string(co) + "*";
        s += B.F->name(id);
    }
    return s;
}

std::string word_text(const BchPolys& B, const LiePoly& w) {
    if (w.empty()) return "1";
    std::string s;
    for (const auto& [id, e] : w) {
        if (!s.empty()) s += " * ";
        s += B.F->name(id);
        if (e != 1) s += "^" + std::to_string(e);
    }
    return s;
}

namespace {

std::vector<Vec> all_vectors(std::size_t n, u32 p) {
    std::vector<Vec> out;
    Vec v = vec_zero(n);
    while (true) {
        out.push_back(v);
        std::size_t i = 0;
        while (i < n && v[i] == p - 1) v[i++] = 0;
        if (i == n) break;
        ++v[i];
    }
    return out;
}

Vec random_combo(Rng& rng, const Mat& rows, std::size_t n, u32 p) {
    Vec v = vec_zero(n);
    for (std::size_t r = 0; r < rows.rows; ++r)
        v = vec_add(v, vec_scale(rng.below(p), rows.row(r), p), p);
    return v;
}

// Closure of the generators under the group product, capped.
std::optional<std::set<Vec>> group_closure(const LazGroup& G,
                                           const std::vector<Vec>& gens,
                                           std::size_t cap) {
    std::set<Vec> seen;
    std::vector<Vec> fresh;
    seen.insert(vec_zero(G.L.dim));
    fresh.push_back(vec_zero(G.L.dim));
    for (const Vec& g : gens)
        if (seen.insert(g).second) fresh.push_back(g);
    while (!fresh.empty()) {
        Vec x = fresh.back();
        fresh.pop_back();
        std::vector<Vec> base(seen.begin(), seen.end());
        for (const Vec& y : base) {
            for (const Vec& z : {G.mul(x, y), G.mul(y, x)}) {
                if (seen.insert(z).second) {
                    if (seen.size() > cap) return std::nullopt;
                    fresh.push_back(z);
                }
            }
        }
    }
    return seen;
}

u64 pow_sz(u32 p, std::size_t e) {
    u64 r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= p;
    return r;
}

}  // namespace

CorrespondenceReport verify_correspondence(const Lla& L, Rng& rng, int samples) {
    CorrespondenceReport rep;
    LazGroup G = group_of(L);
    const u32 p = L.p;
    const std::size_t n = L.dim;
    auto fail = [&](const std::string& m) {
        if (rep.failures.size() < 20) rep.failures.push_back(m);
    };

    // group axioms and exponent
    rep.checks++;
    for (int t = 0; t < samples; ++t) {
        Vec x = rng.vec(n, p), y = rng.vec(n, p), z = rng.vec(n, p);
        if (G.mul(x, vec_zero(n)) != x || G.mul(vec_zero(n), x) != x)
            fail("identity law fails");
        if (!vec_is_zero(G.mul(x, G.inv(x)))) fail("inverse law fails");
        if (G.mul(G.mul(x, y), z) != G.mul(x, G.mul(y, z)))
            fail("associativity fails");
        if (!vec_is_zero(G.pow(x, p))) fail("element order exceeds p");
    }

    // defect levels: product differs from the sum at level >= 2, the
    // group commutator from the bracket at level >= 3
    rep.checks++;
    for (int t = 0; t < samples; ++t) {
        Vec x = rng.vec(n, p), y = rng.vec(n, p);
        if (L.level(vec_sub(G.mul(x, y), vec_add(x, y, p), p)) < std::min(2, L.c + 1))
            fail("product defect below level 2");
        if (L.level(vec_sub(G.comm(x, y), L.bracket(x, y), p)) < std::min(3, L.c + 1))
            fail("commutator defect below level 3");
    }

    // flag transport: each P_i is a subgroup and commutators add levels
    rep.checks++;
    for (int i = 1; i <= L.c; ++i) {
        if (L.flag[static_cast<std::size_t>(i)].rows == 0) continue;
        for (int t = 0; t < samples / 4 + 1; ++t) {
            Vec u = random_combo(rng, L.flag[static_cast<std::size_t>(i)], n, p);
            Vec v = random_combo(rng, L.flag[static_cast<std::size_t>(i)], n, p);
            if (L.level(G.mul(u, v)) < i) fail("flag step not closed under product");
            for (int j = 1; j <= L.c; ++j) {
                if (L.flag[static_cast<std::size_t>(j)].rows == 0) continue;
                Vec w = random_combo(rng, L.flag[static_cast<std::size_t>(j)], n, p);
                if (L.level(G.comm(u, w)) < lev_add(i, j, L.c))
                    fail("group commutator drops below the level sum");
            }
        }
    }

    // subalgebras are subgroups
    rep.checks++;
    for (int t = 0; t < samples / 8 + 1; ++t) {
        Mat rows = subalgebra(L, {rng.vec(n, p), rng.vec(n, p)});
        for (int s = 0; s < 8; ++s) {
            Vec u = random_combo(rng, rows, n, p);
            Vec v = random_combo(rng, rows, n, p);
            if (!in_span(rows, G.mul(u, v)) || !in_span(rows, G.inv(u)))
                fail("subalgebra not closed as a subgroup");
        }
    }

    // subgroups are subalgebras (small closures only)
    rep.checks++;
    for (int t = 0; t < 6; ++t) {
        std::vector<Vec> gens = {rng.vec(n, p)};
        if (t % 2 == 0) gens.push_back(rng.vec(n, p));
        auto cl = group_closure(G, gens, 700);
        if (!cl) continue;
        Mat rows(p, 0, n);
        for (const Vec& v : *cl) rows.append_row(v);
        RrefResult rr = rref(rows);
        if (cl->size() != pow_sz(p, rr.m.rows)) {
            fail("subgroup closure is not a linear subspace");
            continue;
        }
        if (!is_subalgebra_rows(L, rr.m)) fail("subgroup not a subalgebra");
    }

    // ideals are normal subgroups
    rep.checks++;
    for (int t = 0; t < samples / 8 + 1; ++t) {
        Mat rows = ideal_closure(L, {rng.vec(n, p)});
        for (int s = 0; s < 8; ++s) {
            Vec g = rng.vec(n, p);
            Vec x = random_combo(rng, rows, n, p);
            if (!in_span(rows, G.mul(G.mul(G.inv(g), x), g)))
                fail("ideal not normal in the group");
        }
    }

    // on small algebras: normal subgroups are exactly the ideals, and the
    // two centers coincide as sets
    if (pow_sz(p, n) <= 512) {
        rep.checks++;
        std::vector<Vec> all = all_vectors(n, p);
        for (int t = 0; t < 6; ++t) {
            std::vector<Vec> gens = {rng.vec(n, p)};
            auto cl = group_closure(G, gens, 512);
            if (!cl) continue;
            Mat rows(p, 0, n);
            for (const Vec& v : *cl) rows.append_row(v);
            RrefResult rr = rref(rows);
            bool normal = true;
            for (const Vec& g : all) {
                for (const Vec& x : *cl)
                    if (!cl->count(G.mul(G.mul(G.inv(g), x), g))) {
                        normal = false;
                        break;
                    }
                if (!normal) break;
            }
            if (normal != is_ideal_rows(L, rr.m))
                fail("normal subgroup / ideal mismatch");
        }

        rep.checks++;
        Mat ads(p, n, n * n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) {
                Vec b = G.L.bracket(vec_unit(n, k), vec_unit(n, i));
                for (std::size_t col = 0; col < n; ++col)
                    ads.at(k, i * n + col) = b[col];
            }
        Mat lie_center = kernel(transpose(ads));
        std::set<Vec> group_center;
        for (const Vec& g : all) {
            bool central = true;
            for (std::size_t i = 0; i < n && central; ++i)
                central = G.mul(g, vec_unit(n, i)) == G.mul(vec_unit(n, i), g);
            if (central) group_center.insert(g);
        }
        std::size_t hits = 0;
        for (const Vec& g : group_center)
            if (in_span(lie_center, g)) ++hits;
        if (hits != group_center.size() ||
            group_center.size() != pow_sz(p, span_dim(lie_center)))
            fail("group center differs from the Lie center");
    }

    // automorphism transport, forward
    rep.checks++;
    Mat f = exp_ad(L, rng.vec(n, p));
    for (int t = 0; t < samples; ++t) {
        Vec x = rng.vec(n, p), y = rng.vec(n, p);
        if (vec_apply(G.mul(x, y), f) != G.mul(vec_apply(x, f), vec_apply(y, f)))
            fail("Lie automorphism does not preserve the product");
    }

    // converse: a bracket-breaking linear map must break the product
    if (L.c >= 2) {
        rep.checks++;
        for (int attempt = 0; attempt < 8; ++attempt) {
            Mat r(p, n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) r.at(i, j) = rng.below(p);
            if (!mat_inverse(r)) continue;
            bool lie_ok = true;
            for (std::size_t i = 0; i < n && lie_ok; ++i)
                for (std::size_t j = i + 1; j < n && lie_ok; ++j)
                    lie_ok = vec_apply(L.bracket_basis(i, j), r) ==
                             L.bracket(vec_apply(vec_unit(n, i), r),
                                       vec_apply(vec_unit(n, j), r));
            if (lie_ok) continue;  // genuinely rare; try another map
            bool broken = false;
            for (int t = 0; t < samples && !broken; ++t) {
                Vec x = rng.vec(n, p), y = rng.vec(n, p);
                broken = vec_apply(G.mul(x, y), r) !=
                         G.mul(vec_apply(x, r), vec_apply(y, r));
            }
            if (!broken) fail("bracket-breaking map preserved all sampled products");
            break;
        }
    }

    return rep;
}

}  // namespace lazlie
