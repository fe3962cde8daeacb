#include "lazlie/nil2.hpp"

#include <cassert>
#include <stdexcept>

namespace lazlie {

namespace {

Vec slice(const Vec& v, std::size_t from, std::size_t to) {
    return Vec(v.begin() + static_cast<std::ptrdiff_t>(from),
               v.begin() + static_cast<std::ptrdiff_t>(to));
}

Vec concat(const Vec& a, const Vec& b) {
    Vec out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// All p^n vectors of length n, in odometer order.
bool odometer_next(Vec& v, u32 p) {
    for (std::size_t t = 0; t < v.size(); ++t) {
        if (++v[t] < p) return true;
        v[t] = 0;
    }
    return false;
}

}  // namespace

BilinearStruct::BilinearStruct(u32 p_, std::size_t dv_, std::size_t dw_)
    : p(p_), dv(dv_), dw(dw_),
      beta(dv_ < 2 ? 0 : dv_ * (dv_ - 1) / 2, vec_zero(dw_)) {}

std::size_t BilinearStruct::pair_index(std::size_t i, std::size_t j) const {
    assert(i < j && j < dv);
    return i * dv - i * (i + 1) / 2 + (j - i - 1);
}

const Vec& BilinearStruct::beta_at(std::size_t i, std::size_t j) const {
    return beta[pair_index(i, j)];
}

Vec BilinearStruct::eval(const Vec& v, const Vec& w) const {
    assert(v.size() == dv && w.size() == dv);
    Vec out = vec_zero(dw);
    for (std::size_t i = 0; i < dv; ++i)
        for (std::size_t j = i + 1; j < dv; ++j) {
            u32 coef = fp_sub(fp_mul(v[i], w[j], p), fp_mul(v[j], w[i], p), p);
            if (coef == 0) continue;
            const Vec& b = beta_at(i, j);
            for (std::size_t t = 0; t < dw; ++t)
                out[t] = fp_add(out[t], fp_mul(coef, b[t], p), p);
        }
    return out;
}

std::optional<std::string> validate(const BilinearStruct& B) {
    if (!is_odd_prime(B.p)) return "p is not an odd prime";
    std::size_t want = B.dv < 2 ? 0 : B.dv * (B.dv - 1) / 2;
    if (B.beta.size() != want) return "pairing table has the wrong number of rows";
    for (std::size_t r = 0; r < B.beta.size(); ++r) {
        if (B.beta[r].size() != B.dw) return "pairing row has the wrong length";
        for (u32 x : B.beta[r])
            if (x >= B.p) return "pairing entry out of range";
    }
    return std::nullopt;
}

bool bilinear_equal(const BilinearStruct& a, const BilinearStruct& b) {
    return a.p == b.p && a.dv == b.dv && a.dw == b.dw && a.beta == b.beta;
}

Vec Nil2Group::id() const { return vec_zero(dim()); }

Vec Nil2Group::mul(const Vec& x, const Vec& y) const {
    assert(x.size() == dim() && y.size() == dim());
    u32 p = B.p;
    Vec out(dim());
    for (std::size_t t = 0; t < dim(); ++t) out[t] = fp_add(x[t], y[t], p);
    // pairing of later basis coordinates against earlier ones:
    // beta(b_j, b_i) = -beta(b_i, b_j) for i < j
    for (std::size_t i = 0; i < dv(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = i + 1; j < dv(); ++j) {
            u32 coef = fp_mul(x[i], y[j], p);
            if (coef == 0) continue;
            const Vec& b = B.beta_at(i, j);
            for (std::size_t t = 0; t < dw(); ++t)
                out[dv() + t] = fp_sub(out[dv() + t], fp_mul(coef, b[t], p), p);
        }
    }
    return out;
}

Vec Nil2Group::inv(const Vec& x) const {
    assert(x.size() == dim());
    u32 p = B.p;
    Vec out(dim());
    for (std::size_t t = 0; t < dim(); ++t) out[t] = fp_neg(x[t], p);
    for (std::size_t i = 0; i < dv(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = i + 1; j < dv(); ++j) {
            u32 coef = fp_mul(x[i], x[j], p);
            if (coef == 0) continue;
            const Vec& b = B.beta_at(i, j);
            for (std::size_t t = 0; t < dw(); ++t)
                out[dv() + t] = fp_sub(out[dv() + t], fp_mul(coef, b[t], p), p);
        }
    }
    return out;
}

Vec Nil2Group::pw(const Vec& x, long k) const {
    long p = static_cast<long>(B.p);
    long e = ((k % p) + p) % p;
    Vec acc = id();
    for (long s = 0; s < e; ++s) acc = mul(acc, x);
    return acc;
}

Vec Nil2Group::comm(const Vec& x, const Vec& y) const {
    return mul(mul(inv(x), inv(y)), mul(x, y));
}

Nil2Group group_from_bilinear(const BilinearStruct& B, const Mat& basis) {
    if (auto why = validate(B)) throw std::invalid_argument("pairing: " + *why);
    if (basis.rows != B.dv || basis.cols != B.dv)
        throw std::invalid_argument("basis must be square of side dim V");
    if (span_dim(basis) != B.dv)
        throw std::invalid_argument("basis rows are dependent");
    BilinearStruct T(B.p, B.dv, B.dw);
    for (std::size_t i = 0; i < B.dv; ++i)
        for (std::size_t j = i + 1; j < B.dv; ++j)
            T.beta[T.pair_index(i, j)] = B.eval(basis.row(i), basis.row(j));
    return Nil2Group{std::move(T), basis};
}

Nil2Group group_from_bilinear(const BilinearStruct& B) {
    if (auto why = validate(B)) throw std::invalid_argument("pairing: " + *why);
    return Nil2Group{B, Mat::identity(B.p, B.dv)};
}

std::optional<std::string> nil2_check(const Nil2Group& G) {
    if (auto why = validate(G.B)) return "structure: " + *why;
    if (G.basis.rows != G.dv() || G.basis.cols != G.dv() ||
        span_dim(G.basis) != G.dv())
        return "structure: stored basis does not span V";

    u32 p = G.p();
    std::size_t n = G.dim();
    std::vector<Vec> pts;
    double size = 1;
    for (std::size_t t = 0; t < n; ++t) size *= p;
    bool exhaustive = size <= 130;  // keeps the triple scan near 2e6
    if (exhaustive) {
        Vec v = vec_zero(n);
        do pts.push_back(v); while (odometer_next(v, p));
    } else {
        pts.push_back(vec_zero(n));
        for (std::size_t t = 0; t < n; ++t) {
            pts.push_back(vec_unit(n, t));
            pts.push_back(vec_scale(2 % p, vec_unit(n, t), p));
        }
        for (std::size_t t = 0; t + 1 < n; ++t)
            pts.push_back(vec_add(vec_unit(n, t), vec_unit(n, t + 1), p));
    }

    Vec e = G.id();
    for (const Vec& x : pts) {
        if (G.mul(x, e) != x || G.mul(e, x) != x) return "identity fails";
        if (!vec_is_zero(G.mul(x, G.inv(x))) || !vec_is_zero(G.mul(G.inv(x), x)))
            return "inverse fails";
        if (!vec_is_zero(G.pw(x, static_cast<long>(p)))) return "exponent exceeds p";
    }
    for (const Vec& x : pts)
        for (const Vec& y : pts)
            for (const Vec& z : pts)
                if (G.mul(G.mul(x, y), z) != G.mul(x, G.mul(y, z)))
                    return "associativity fails";
    for (const Vec& x : pts)
        for (const Vec& y : pts) {
            Vec c = G.comm(x, y);
            for (std::size_t t = 0; t < G.dv(); ++t)
                if (c[t] != 0) return "commutator leaves 0 x W";
        }
    for (std::size_t t = 0; t < G.dw(); ++t) {
        Vec z = vec_unit(n, G.dv() + t);
        for (const Vec& x : pts)
            if (G.mul(z, x) != G.mul(x, z)) return "0 x W is not central";
    }
    return std::nullopt;
}

BilinearStruct functor_F(const Nil2Group& G) {
    BilinearStruct out(G.p(), G.dv(), G.dw());
    std::size_t n = G.dim();
    for (std::size_t i = 0; i < G.dv(); ++i)
        for (std::size_t j = i + 1; j < G.dv(); ++j) {
            Vec c = G.comm(vec_unit(n, i), vec_unit(n, j));
            for (std::size_t t = 0; t < G.dv(); ++t) assert(c[t] == 0);
            out.beta[out.pair_index(i, j)] = slice(c, G.dv(), n);
        }
    return out;
}

namespace {

// Shared reduction to a pairing on a complement of the designated rows,
// with the commutator supplied by the caller.
template <typename Comm>
BilinearStruct reduce_by_central(u32 p, std::size_t dim, const Mat& p_rows,
                                 Comm comm) {
    if (p_rows.cols != dim)
        throw std::invalid_argument("designated rows have the wrong width");
    Mat P = rref(p_rows).m;
    for (std::size_t r = 0; r < P.rows; ++r)
        for (std::size_t k = 0; k < dim; ++k)
            if (!vec_is_zero(comm(P.row(r), vec_unit(dim, k))))
                throw std::invalid_argument("designated subgroup is not central");
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j)
            if (!in_span(P, comm(vec_unit(dim, i), vec_unit(dim, j))))
                throw std::invalid_argument(
                    "designated subgroup misses a commutator");
    Mat reps = complement_basis(P, dim);
    BilinearStruct out(p, reps.rows, P.rows);
    for (std::size_t i = 0; i < reps.rows; ++i)
        for (std::size_t j = i + 1; j < reps.rows; ++j) {
            auto coords = coords_in(P, comm(reps.row(i), reps.row(j)));
            assert(coords);
            out.beta[out.pair_index(i, j)] = *coords;
        }
    return out;
}

}  // namespace

BilinearStruct functor_F(const LazGroup& G, const Mat& p_rows) {
    if (G.L.c > 2)
        throw std::invalid_argument("group of class at most 2 required");
    return reduce_by_central(G.L.p, G.L.dim, p_rows,
                             [&](const Vec& x, const Vec& y) { return G.comm(x, y); });
}

BilinearStruct bilinear_of(const Lla& L, const Mat& p_rows) {
    if (L.c > 2)
        throw std::invalid_argument("algebra of class at most 2 required");
    return reduce_by_central(L.p, L.dim, p_rows,
                             [&](const Vec& x, const Vec& y) { return L.bracket(x, y); });
}

namespace {

// Quadratic part of the cocycle: the W vector the product formula
// subtracts when an element is multiplied by itself.
Vec cocycle_square(const Nil2Group& G, const Vec& x) {
    u32 p = G.p();
    Vec q = vec_zero(G.dw());
    for (std::size_t i = 0; i < G.dv(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = i + 1; j < G.dv(); ++j) {
            u32 coef = fp_mul(x[i], x[j], p);
            if (coef == 0) continue;
            const Vec& b = G.B.beta_at(i, j);
            for (std::size_t t = 0; t < G.dw(); ++t)
                q[t] = fp_add(q[t], fp_mul(coef, b[t], p), p);
        }
    }
    return q;
}

Vec shift_by_square(const Nil2Group& G, const Vec& x, u32 scale) {
    Vec out = x;
    Vec q = cocycle_square(G, x);
    for (std::size_t t = 0; t < G.dw(); ++t)
        out[G.dv() + t] = fp_add(out[G.dv() + t], fp_mul(scale, q[t], G.p()), G.p());
    return out;
}

}  // namespace

Vec straighten(const Nil2Group& G, const Vec& x) {
    if (x.size() != G.dim())
        throw std::invalid_argument("element has the wrong length");
    return shift_by_square(G, x, fp_inv(2 % G.p(), G.p()));
}

Vec unstraighten(const Nil2Group& G, const Vec& y) {
    if (y.size() != G.dim())
        throw std::invalid_argument("element has the wrong length");
    return shift_by_square(G, y, fp_neg(fp_inv(2 % G.p(), G.p()), G.p()));
}

Mat subgroup_rows(const Nil2Group& G, const std::vector<Vec>& gens) {
    Mat m(G.p(), 0, G.dim());
    for (const Vec& g : gens) {
        if (g.size() != G.dim())
            throw std::invalid_argument("generator has the wrong length");
        m.append_row(straighten(G, g));
    }
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j)
            m.append_row(G.comm(gens[i], gens[j]));
    return rref(m).m;
}

bool subgroup_contains(const Nil2Group& G, const Mat& rows, const Vec& x) {
    return in_span(rows, straighten(G, x));
}

namespace {

// Image of the subgroup generated by gens and the central rows under
// the quotient that forgets the W coordinates.
Mat central_quotient_image(const Nil2Group& G, std::vector<Vec> gens) {
    for (std::size_t t = 0; t < G.dw(); ++t)
        gens.push_back(vec_unit(G.dim(), G.dv() + t));
    Mat sub = subgroup_rows(G, gens);
    Mat q(G.p(), 0, G.dv());
    for (std::size_t r = 0; r < sub.rows; ++r)
        q.append_row(slice(sub.row(r), 0, G.dv()));
    return rref(q).m;
}

std::vector<Vec> joined(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    std::vector<Vec> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

bool indep_star(const Nil2Group& G,
                const std::vector<Vec>& A,
                const std::vector<Vec>& B,
                const std::vector<Vec>& C) {
    std::vector<Vec> ac = joined(A, C), bc = joined(B, C);
    Mat r_ac = subgroup_rows(G, ac);
    Mat r_bc = subgroup_rows(G, bc);
    Mat r_c = subgroup_rows(G, C);
    if (!spans_equal(intersect_spans(r_ac, r_bc), r_c)) return false;
    Mat q_ac = central_quotient_image(G, ac);
    Mat q_bc = central_quotient_image(G, bc);
    Mat q_c = central_quotient_image(G, C);
    return spans_equal(intersect_spans(q_ac, q_bc), q_c);
}

BilinearSub acl_bilinear(const BilinearStruct& B,
                         const std::vector<Vec>& v_elems,
                         const std::vector<Vec>& w_elems) {
    Mat v(B.p, 0, B.dv);
    for (const Vec& x : v_elems) {
        if (x.size() != B.dv) throw std::invalid_argument("V element has the wrong length");
        v.append_row(x);
    }
    Mat w(B.p, 0, B.dw);
    for (const Vec& y : w_elems) {
        if (y.size() != B.dw) throw std::invalid_argument("W element has the wrong length");
        w.append_row(y);
    }
    for (std::size_t i = 0; i < v_elems.size(); ++i)
        for (std::size_t j = i + 1; j < v_elems.size(); ++j)
            w.append_row(B.eval(v_elems[i], v_elems[j]));
    return BilinearSub{rref(v).m, rref(w).m};
}

bool indep_bilinear(const Nil2Group& G,
                    const std::vector<Vec>& A,
                    const std::vector<Vec>& B,
                    const std::vector<Vec>& C) {
    BilinearStruct FF = functor_F(G);
    auto image_closure = [&](const std::vector<Vec>& gens) {
        Mat sub = subgroup_rows(G, gens);
        std::vector<Vec> vs, ws;
        for (std::size_t r = 0; r < sub.rows; ++r) {
            Vec vpart = slice(sub.row(r), 0, G.dv());
            if (vec_is_zero(vpart))
                ws.push_back(slice(sub.row(r), G.dv(), G.dim()));
            else
                vs.push_back(vpart);
        }
        return acl_bilinear(FF, vs, ws);
    };
    BilinearSub s_ac = image_closure(joined(A, C));
    BilinearSub s_bc = image_closure(joined(B, C));
    BilinearSub s_c = image_closure(C);
    return spans_equal(intersect_spans(s_ac.v_rows, s_bc.v_rows), s_c.v_rows) &&
           spans_equal(intersect_spans(s_ac.w_rows, s_bc.w_rows), s_c.w_rows);
}

}  // namespace lazlie
