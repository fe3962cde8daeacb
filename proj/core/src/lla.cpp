#include "lazlie/lla.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>
#include <stdexcept>

namespace lazlie {

namespace {

// P_i with the index clamped, so anything past the class reads as 0.
const Mat& flag_at(const Lla& L, int i) {
    int k = std::min(i, L.c + 1);
    if (k < 1) throw std::invalid_argument("flag index must be >= 1");
    return L.flag[static_cast<std::size_t>(k)];
}

// The stored flags are rref; rebuild the pivot list without re-reducing.
RrefResult as_rref(const Mat& m) {
    RrefResult r{m, {}};
    for (std::size_t i = 0; i < m.rows; ++i) {
        std::size_t j = 0;
        while (j < m.cols && m.at(i, j) == 0) ++j;
        r.pivots.push_back(j);
    }
    return r;
}

Mat single_row(u32 p, const Vec& v) {
    Mat m(p, 1, v.size());
    m.set_row(0, v);
    return m;
}

std::size_t first_nonzero_col(const Vec& v) {
    std::size_t j = 0;
    while (j < v.size() && v[j] == 0) ++j;
    return j;
}

// Reduce v modulo the rref rows of I (clears the pivot coordinates).
Vec reduce_mod(const RrefResult& I, const Vec& v, u32 p) {
    Vec w = v;
    for (std::size_t i = 0; i < I.m.rows; ++i) {
        u32 f = w[I.pivots[i]];
        if (f == 0) continue;
        for (std::size_t j = 0; j < I.m.cols; ++j)
            w[j] = fp_sub(w[j], fp_mul(f, I.m.at(i, j), p), p);
    }
    return w;
}

Mat bracket_closure(const Lla& L, Mat m) {
    m = rref(m).m;
    for (bool grew = true; grew;) {
        grew = false;
        auto rr = as_rref(m);
        for (std::size_t i = 0; i < m.rows && !grew; ++i)
            for (std::size_t j = i + 1; j < m.rows && !grew; ++j) {
                Vec b = L.bracket(m.row(i), m.row(j));
                if (!in_span(rr, b)) {
                    m = rref(vstack(m, single_row(L.p, b))).m;
                    grew = true;
                }
            }
    }
    return m;
}

}  // namespace

// ---- Lla methods ------------------------------------------------------------

std::size_t Lla::pair_index(std::size_t i, std::size_t j) const {
    assert(i < j && j < dim);
    return i * dim - i * (i + 1) / 2 + (j - i - 1);
}

const Vec& Lla::sc_at(std::size_t i, std::size_t j) const { return sc[pair_index(i, j)]; }

Vec Lla::bracket_basis(std::size_t i, std::size_t j) const {
    if (i == j) return vec_zero(dim);
    if (i < j) return sc_at(i, j);
    return vec_scale(p - 1, sc_at(j, i), p);
}

Vec Lla::bracket(const Vec& v, const Vec& w) const {
    assert(v.size() == dim && w.size() == dim);
    Vec acc = vec_zero(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) {
            u32 co = fp_sub(fp_mul(v[i], w[j], p), fp_mul(v[j], w[i], p), p);
            if (co == 0) continue;
            const Vec& s = sc_at(i, j);
            for (std::size_t k = 0; k < dim; ++k)
                acc[k] = fp_add(acc[k], fp_mul(co, s[k], p), p);
        }
    return acc;
}

Mat Lla::ad(const Vec& v) const {
    Mat m(p, dim, dim);
    for (std::size_t k = 0; k < dim; ++k) m.set_row(k, bracket(v, vec_unit(dim, k)));
    return m;
}

int Lla::level(const Vec& v) const {
    for (int i = c + 1; i >= 1; --i)
        if (in_span(as_rref(flag[static_cast<std::size_t>(i)]), v)) return i;
    throw std::logic_error("level: vector not in P_1");
}

std::string Lla::label(std::size_t i) const {
    if (i < labels.size() && !labels[i].empty()) return labels[i];
    return "e" + std::to_string(i + 1);
}

int lev_add(int a, int b, int c) { return std::min(a + b, c + 1); }

bool lla_equal(const Lla& a, const Lla& b) {
    if (a.p != b.p || a.c != b.c || a.dim != b.dim) return false;
    if (a.sc != b.sc) return false;
    for (std::size_t i = 1; i < a.flag.size(); ++i)
        if (!(a.flag[i] == b.flag[i])) return false;
    return true;
}

Lla lla_from_levels(u32 p, int c, const std::vector<Vec>& sc,
                    const std::vector<int>& levels, std::vector<std::string> labels) {
    Lla L;
    L.p = p;
    L.c = c;
    L.dim = levels.size();
    L.sc = sc;
    L.labels = std::move(labels);
    L.flag.assign(static_cast<std::size_t>(c) + 2, Mat(p, 0, L.dim));
    for (int i = 1; i <= c + 1; ++i) {
        Mat m(p, 0, L.dim);
        for (std::size_t k = 0; k < L.dim; ++k) {
            if (levels[k] < 1 || levels[k] > c)
                throw std::invalid_argument("lla_from_levels: level out of range");
            if (levels[k] >= i) m.append_row(vec_unit(L.dim, k));
        }
        L.flag[static_cast<std::size_t>(i)] = rref(m).m;
    }
    return L;
}

Lla lla_zero(u32 p, int c) {
    Lla L;
    L.p = p;
    L.c = c;
    L.dim = 0;
    L.flag.assign(static_cast<std::size_t>(c) + 2, Mat(p, 0, 0));
    return L;
}

std::optional<std::string> validate(const Lla& L) {
    if (!is_odd_prime(L.p)) return "p must be an odd prime";
    if (L.c < 1) return "class must be at least 1";
    const std::size_t n = L.dim;
    if (L.sc.size() != n * (n - 1) / 2) return "structure constant table has wrong size";
    for (const Vec& row : L.sc) {
        if (row.size() != n) return "structure constant row has wrong length";
        for (u32 x : row)
            if (x >= L.p) return "scalar out of range";
    }
    if (!L.labels.empty() && L.labels.size() != n) return "label list has wrong length";
    if (L.flag.size() != static_cast<std::size_t>(L.c) + 2) return "flag has wrong length";
    for (int i = 1; i <= L.c + 1; ++i) {
        const Mat& f = L.flag[static_cast<std::size_t>(i)];
        if (f.cols != n || f.p != L.p) return "flag P_" + std::to_string(i) + " has wrong shape";
        if (!(rref(f).m == f)) return "flag P_" + std::to_string(i) + " is not a reduced basis";
    }
    if (L.flag[1].rows != n) return "P_1 must be the whole algebra";
    if (L.flag[static_cast<std::size_t>(L.c) + 1].rows != 0)
        return "P_" + std::to_string(L.c + 1) + " must vanish";
    for (int i = 1; i <= L.c; ++i) {
        const Mat& lo = L.flag[static_cast<std::size_t>(i)];
        const Mat& hi = L.flag[static_cast<std::size_t>(i) + 1];
        auto rr = as_rref(lo);
        for (std::size_t r = 0; r < hi.rows; ++r)
            if (!in_span(rr, hi.row(r)))
                return "P_" + std::to_string(i + 1) + " is not contained in P_" + std::to_string(i);
    }
    for (int i = 1; i <= L.c; ++i)
        for (int j = i; j <= L.c; ++j) {
            const Mat& fi = L.flag[static_cast<std::size_t>(i)];
            const Mat& fj = L.flag[static_cast<std::size_t>(j)];
            auto target = as_rref(flag_at(L, i + j));
            for (std::size_t r = 0; r < fi.rows; ++r)
                for (std::size_t s = 0; s < fj.rows; ++s)
                    if (!in_span(target, L.bracket(fi.row(r), fj.row(s))))
                        return "bracket of P_" + std::to_string(i) + " and P_" + std::to_string(j) +
                               " leaves P_" + std::to_string(i + j) + " at rows (" +
                               std::to_string(r + 1) + ", " + std::to_string(s + 1) + ")";
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                Vec jac = L.bracket(L.bracket_basis(i, j), vec_unit(n, k));
                jac = vec_add(jac, L.bracket(L.bracket_basis(j, k), vec_unit(n, i)), L.p);
                jac = vec_add(jac, L.bracket(L.bracket_basis(k, i), vec_unit(n, j)), L.p);
                if (!vec_is_zero(jac))
                    return "Jacobi fails at basis triple (" + std::to_string(i + 1) + ", " +
                           std::to_string(j + 1) + ", " + std::to_string(k + 1) + ")";
            }
    return std::nullopt;
}

// ---- subspaces --------------------------------------------------------------

Mat subalgebra(const Lla& L, const std::vector<Vec>& gens) {
    return bracket_closure(L, Mat::from_rows(L.p, L.dim, gens));
}

Mat subalgebra_join(const Lla& L, const Mat& base, const std::vector<Vec>& extra) {
    Mat m = base;
    for (const Vec& v : extra) m.append_row(v);
    return bracket_closure(L, m);
}

Mat ideal_closure(const Lla& L, const std::vector<Vec>& gens) {
    Mat m = rref(Mat::from_rows(L.p, L.dim, gens)).m;
    for (bool grew = true; grew;) {
        grew = false;
        auto rr = as_rref(m);
        for (std::size_t i = 0; i < m.rows && !grew; ++i)
            for (std::size_t k = 0; k < L.dim && !grew; ++k) {
                Vec b = L.bracket(m.row(i), vec_unit(L.dim, k));
                if (!in_span(rr, b)) {
                    m = rref(vstack(m, single_row(L.p, b))).m;
                    grew = true;
                }
            }
    }
    return m;
}

bool is_subalgebra_rows(const Lla& L, const Mat& rows) {
    auto rr = as_rref(rref(rows).m);
    for (std::size_t i = 0; i < rr.m.rows; ++i)
        for (std::size_t j = i + 1; j < rr.m.rows; ++j)
            if (!in_span(rr, L.bracket(rr.m.row(i), rr.m.row(j)))) return false;
    return true;
}

bool is_ideal_rows(const Lla& L, const Mat& rows) {
    auto rr = as_rref(rref(rows).m);
    for (std::size_t i = 0; i < rr.m.rows; ++i)
        for (std::size_t k = 0; k < L.dim; ++k)
            if (!in_span(rr, L.bracket(rr.m.row(i), vec_unit(L.dim, k)))) return false;
    return true;
}

Lla restrict_to(const Lla& L, const Mat& rows) {
    if (!(rref(rows).m == rows))
        throw std::invalid_argument("restrict_to: rows must be a reduced basis");
    if (!is_subalgebra_rows(L, rows))
        throw std::invalid_argument("restrict_to: rows are not bracket-closed");
    // Coordinates in a reduced basis are read off the pivot columns.
    auto rr = as_rref(rows);
    auto pivot_coords = [&](const Vec& v, const char* what) {
        Vec co(rows.rows);
        for (std::size_t j = 0; j < rows.rows; ++j) co[j] = v[rr.pivots[j]];
        Vec back(L.dim, 0);
        for (std::size_t j = 0; j < rows.rows; ++j)
            if (co[j])
                for (std::size_t t = 0; t < L.dim; ++t)
                    back[t] = fp_add(back[t], fp_mul(co[j], rows.at(j, t), L.p), L.p);
        if (back != v) throw std::logic_error(std::string("restrict_to: ") + what);
        return co;
    };
    Lla S;
    S.p = L.p;
    S.c = L.c;
    S.dim = rows.rows;
    for (std::size_t i = 0; i < S.dim; ++i)
        for (std::size_t j = i + 1; j < S.dim; ++j)
            S.sc.push_back(
                pivot_coords(L.bracket(rows.row(i), rows.row(j)), "bracket escaped the subalgebra"));
    S.flag.assign(static_cast<std::size_t>(L.c) + 2, Mat(L.p, 0, S.dim));
    for (int i = 1; i <= L.c + 1; ++i) {
        Mat inter = intersect_spans(rows, L.flag[static_cast<std::size_t>(i)]);
        Mat sub(L.p, 0, S.dim);
        for (std::size_t r = 0; r < inter.rows; ++r)
            sub.append_row(pivot_coords(inter.row(r), "flag intersection escaped"));
        S.flag[static_cast<std::size_t>(i)] = rref(sub).m;
    }
    return S;
}

QuotientResult quotient(const Lla& L, const Mat& ideal_rows) {
    Mat I = rref(ideal_rows).m;
    if (!is_ideal_rows(L, I)) throw std::invalid_argument("quotient: rows are not an ideal");
    auto ri = as_rref(I);
    std::vector<bool> is_piv(L.dim, false);
    for (auto c : ri.pivots) is_piv[c] = true;
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < L.dim; ++j)
        if (!is_piv[j]) keep.push_back(j);
    const std::size_t q = keep.size();

    Mat proj(L.p, L.dim, q);
    for (std::size_t k = 0; k < L.dim; ++k) {
        Vec r = reduce_mod(ri, vec_unit(L.dim, k), L.p);
        for (std::size_t j = 0; j < q; ++j) proj.at(k, j) = r[keep[j]];
    }

    QuotientResult out;
    out.proj = proj;
    Lla& Q = out.Q;
    Q.p = L.p;
    Q.c = L.c;
    Q.dim = q;
    if (!L.labels.empty())
        for (auto k : keep) Q.labels.push_back(L.labels[k]);
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = a + 1; b < q; ++b)
            Q.sc.push_back(vec_apply(L.bracket_basis(keep[a], keep[b]), proj));
    Q.flag.assign(static_cast<std::size_t>(L.c) + 2, Mat(L.p, 0, q));
    for (int i = 1; i <= L.c + 1; ++i)
        Q.flag[static_cast<std::size_t>(i)] =
            rref(mat_mul(L.flag[static_cast<std::size_t>(i)], proj)).m;
    return out;
}

// ---- levels and ranks -------------------------------------------------------

int level_over(const Lla& L, const Mat& base_rows) {
    for (int i = L.c + 1; i >= 1; --i)
        if (span_dim(vstack(base_rows, flag_at(L, i))) == L.dim) return i;
    throw std::logic_error("level_over: P_1 did not span");
}

bool operator==(const Rank& a, const Rank& b) { return a.nu == b.nu && a.n == b.n; }
bool operator!=(const Rank& a, const Rank& b) { return !(a == b); }

bool rank_precedes(const Rank& a, const Rank& b) {
    if (a.nu != b.nu) return a.nu > b.nu;
    return a.n < b.n;
}

Rank rank_over(const Lla& L, const Mat& base_rows) {
    Rank r;
    r.nu = level_over(L, base_rows);
    if (r.nu == L.c + 1) {
        r.n = 0;
        return r;
    }
    r.n = L.dim - span_dim(vstack(base_rows, flag_at(L, r.nu + 1)));
    return r;
}

std::vector<Vec> malcev_basis(const Lla& L, const Mat& base_rows) {
    if (!is_subalgebra_rows(L, base_rows))
        throw std::invalid_argument("malcev_basis: base is not a subalgebra");
    Mat cur = rref(base_rows).m;
    std::vector<Vec> out;
    for (int i = L.c; i >= 1; --i) {
        const Mat& f = L.flag[static_cast<std::size_t>(i)];
        for (std::size_t r = 0; r < f.rows; ++r) {
            if (in_span(as_rref(cur), f.row(r))) continue;
            out.push_back(f.row(r));
            cur = rref(vstack(cur, single_row(L.p, f.row(r)))).m;
        }
    }
    return out;
}

bool is_malcev(const Lla& L, const std::vector<Vec>& tuple, const Mat& base_rows) {
    Mat C = rref(base_rows).m;
    if (!is_subalgebra_rows(L, C))
        throw std::invalid_argument("is_malcev: base is not a subalgebra");
    Mat all = C;
    for (const Vec& v : tuple) all.append_row(v);
    if (span_dim(all) != C.rows + tuple.size()) return false;  // dependent over base
    Mat A = subalgebra_join(L, C, tuple);
    for (int i = 1; i <= L.c; ++i) {
        Mat lhs = sum_spans(C, intersect_spans(A, L.flag[static_cast<std::size_t>(i)]));
        Mat sel(L.p, 0, L.dim);
        for (const Vec& v : tuple)
            if (L.level(v) >= i) sel.append_row(v);
        if (!spans_equal(lhs, sum_spans(C, sel))) return false;
    }
    return true;
}

// ---- derivations ------------------------------------------------------------

DerLaz der_laz(const Lla& L) {
    const std::size_t n = L.dim;
    const std::size_t N = n * n;
    Mat sys(L.p, 0, N);
    // Leibniz rows: delta([e_i,e_j]) - [delta(e_i), e_j] - [e_i, delta(e_j)] = 0.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec& sij = L.sc_at(i, j);
            for (std::size_t t = 0; t < n; ++t) {
                Vec row(N, 0);
                for (std::size_t k = 0; k < n; ++k)
                    row[k * n + t] = fp_add(row[k * n + t], sij[k], L.p);
                for (std::size_t s = 0; s < n; ++s) {
                    u32 a = L.bracket_basis(s, j)[t];
                    row[i * n + s] = fp_sub(row[i * n + s], a, L.p);
                    u32 b = L.bracket_basis(i, s)[t];
                    row[j * n + s] = fp_sub(row[j * n + s], b, L.p);
                }
                if (!vec_is_zero(row)) sys.append_row(row);
            }
        }
    // Displacement rows: delta(P_l) <= P_{l+1} for every l.
    for (int l = 1; l <= L.c; ++l) {
        const Mat& f = L.flag[static_cast<std::size_t>(l)];
        Mat K = kernel(flag_at(L, l + 1));
        for (std::size_t r = 0; r < f.rows; ++r)
            for (std::size_t x = 0; x < K.rows; ++x) {
                Vec row(N, 0);
                for (std::size_t a = 0; a < n; ++a) {
                    if (f.at(r, a) == 0) continue;
                    for (std::size_t b = 0; b < n; ++b)
                        row[a * n + b] =
                            fp_add(row[a * n + b], fp_mul(f.at(r, a), K.at(x, b), L.p), L.p);
                }
                if (!vec_is_zero(row)) sys.append_row(row);
            }
    }
    Mat sol = kernel(sys);

    DerLaz out;
    out.ambient = n;
    const std::size_t k = sol.rows;
    out.basis.reserve(k);
    for (std::size_t a = 0; a < k; ++a) {
        Mat m(L.p, n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t s = 0; s < n; ++s) m.at(r, s) = sol.at(a, r * n + s);
        out.basis.push_back(std::move(m));
    }

    Lla& D = out.D;
    D.p = L.p;
    D.c = std::max(1, L.c - 1);
    D.dim = k;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            // Operator commutator on row vectors: apply b, then a, minus the
            // reverse, which is the matrix product in reversed order.
            Mat com = mat_add(mat_mul(out.basis[b], out.basis[a]),
                              mat_scale(L.p - 1, mat_mul(out.basis[a], out.basis[b])));
            Vec flat(N);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t s = 0; s < n; ++s) flat[r * n + s] = com.at(r, s);
            auto co = coords_in(sol, flat);
            if (!co) throw std::logic_error("der_laz: commutator left the derivation space");
            D.sc.push_back(*co);
        }
    D.flag.assign(static_cast<std::size_t>(D.c) + 2, Mat(L.p, 0, k));
    D.flag[1] = Mat::identity(L.p, k);
    for (int i = 2; i <= D.c; ++i) {
        // Coordinates y with sum_a y_a basis[a] of displacement >= i.
        Mat con(L.p, 0, k);
        for (int l = 1; l <= L.c; ++l) {
            const Mat& f = L.flag[static_cast<std::size_t>(l)];
            Mat K = kernel(flag_at(L, l + i));
            for (std::size_t r = 0; r < f.rows; ++r)
                for (std::size_t x = 0; x < K.rows; ++x) {
                    Vec row(k, 0);
                    for (std::size_t a = 0; a < k; ++a) {
                        Vec w = vec_apply(f.row(r), out.basis[a]);
                        u32 dot = 0;
                        for (std::size_t b = 0; b < n; ++b)
                            dot = fp_add(dot, fp_mul(w[b], K.at(x, b), L.p), L.p);
                        row[a] = dot;
                    }
                    if (!vec_is_zero(row)) con.append_row(row);
                }
        }
        D.flag[static_cast<std::size_t>(i)] = rref(kernel(con)).m;
    }
    return out;
}

Mat der_matrix(const DerLaz& d, const Vec& coords) {
    Mat m(d.D.p, d.ambient, d.ambient);
    for (std::size_t a = 0; a < d.basis.size(); ++a)
        if (coords[a]) m = mat_add(m, mat_scale(coords[a], d.basis[a]));
    return m;
}

// ---- semidirect product ------------------------------------------------------

Lla semidirect(const Lla& C, const Lla& F, const DerLaz& derC, const Mat& g) {
    if (auto bad = hom_violation(F, derC.D, g))
        throw std::invalid_argument("semidirect: action is not a certified flag hom (" + *bad + ")");
    std::vector<Mat> act;
    act.reserve(F.dim);
    for (std::size_t kk = 0; kk < F.dim; ++kk) act.push_back(der_matrix(derC, g.row(kk)));
    return semidirect(C, F, act);
}

Lla semidirect(const Lla& C, const Lla& F, const std::vector<Mat>& act) {
    if (C.p != F.p || C.c != F.c)
        throw std::invalid_argument("semidirect: operands disagree on p or c");
    if (act.size() != F.dim) throw std::invalid_argument("semidirect: one action per F basis vector");
    const std::size_t nc = C.dim, nf = F.dim, n = nc + nf;
    for (const Mat& m : act)
        if (m.rows != nc || m.cols != nc || m.p != C.p)
            throw std::invalid_argument("semidirect: action matrix shape mismatch");
    // Each action must be a derivation of C.
    for (std::size_t kk = 0; kk < nf; ++kk)
        for (std::size_t i = 0; i < nc; ++i)
            for (std::size_t j = i + 1; j < nc; ++j) {
                Vec lhs = vec_apply(C.sc_at(i, j), act[kk]);
                Vec rhs = vec_add(C.bracket(act[kk].row(i), vec_unit(nc, j)),
                                  C.bracket(vec_unit(nc, i), act[kk].row(j)), C.p);
                if (lhs != rhs) throw std::invalid_argument("semidirect: action breaks Leibniz");
            }
    // The action of P_i(F) must displace the flag of C by at least i.
    for (int l = 1; l <= F.c; ++l) {
        const Mat& ff = F.flag[static_cast<std::size_t>(l)];
        for (std::size_t r = 0; r < ff.rows; ++r) {
            Mat m(C.p, nc, nc);
            for (std::size_t kk = 0; kk < nf; ++kk)
                if (ff.at(r, kk)) m = mat_add(m, mat_scale(ff.at(r, kk), act[kk]));
            for (int i = 1; i <= C.c; ++i) {
                auto target = as_rref(flag_at(C, lev_add(i, l, C.c)));
                const Mat& fc = C.flag[static_cast<std::size_t>(i)];
                for (std::size_t s = 0; s < fc.rows; ++s)
                    if (!in_span(target, vec_apply(fc.row(s), m)))
                        throw std::invalid_argument("semidirect: action does not respect the flag");
            }
        }
    }
    // Compatibility with the bracket of F: the action of [f_i, f_j] is the
    // operator commutator of the actions.
    for (std::size_t i = 0; i < nf; ++i)
        for (std::size_t j = i + 1; j < nf; ++j) {
            Mat lhs(C.p, nc, nc);
            const Vec& s = F.sc_at(i, j);
            for (std::size_t kk = 0; kk < nf; ++kk)
                if (s[kk]) lhs = mat_add(lhs, mat_scale(s[kk], act[kk]));
            Mat rhs = mat_add(mat_mul(act[j], act[i]), mat_scale(C.p - 1, mat_mul(act[i], act[j])));
            if (!(lhs == rhs)) throw std::invalid_argument("semidirect: action is not a Lie hom");
        }

    auto embC = [&](const Vec& v) {
        Vec w(n, 0);
        std::copy(v.begin(), v.end(), w.begin());
        return w;
    };
    auto embF = [&](const Vec& v) {
        Vec w(n, 0);
        std::copy(v.begin(), v.end(), w.begin() + static_cast<std::ptrdiff_t>(nc));
        return w;
    };

    Lla S;
    S.p = C.p;
    S.c = C.c;
    S.dim = n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j < nc) {
                S.sc.push_back(embC(C.sc_at(i, j)));
            } else if (i < nc) {
                // [c_i, f_k] = -g(f_k)(c_i)
                std::size_t kk = j - nc;
                S.sc.push_back(embC(vec_scale(C.p - 1, act[kk].row(i), C.p)));
            } else {
                S.sc.push_back(embF(F.sc_at(i - nc, j - nc)));
            }
        }
    S.flag.assign(static_cast<std::size_t>(S.c) + 2, Mat(S.p, 0, n));
    for (int i = 1; i <= S.c + 1; ++i) {
        Mat m(S.p, 0, n);
        const Mat& fc = C.flag[static_cast<std::size_t>(i)];
        const Mat& ff = F.flag[static_cast<std::size_t>(i)];
        for (std::size_t r = 0; r < fc.rows; ++r) m.append_row(embC(fc.row(r)));
        for (std::size_t r = 0; r < ff.rows; ++r) m.append_row(embF(ff.row(r)));
        S.flag[static_cast<std::size_t>(i)] = rref(m).m;
    }
    if (!C.labels.empty() || !F.labels.empty()) {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < n; ++i) {
            std::string base = i < nc ? C.label(i) : F.label(i - nc);
            while (seen.count(base)) base += "'";
            seen.insert(base);
            S.labels.push_back(base);
        }
    }
    return S;
}

// ---- hom checking -------------------------------------------------------------

std::optional<std::string> hom_violation(const Lla& A, const Lla& B, const Mat& f) {
    if (A.p != B.p) return "source and target have different p";
    if (f.p != A.p || f.rows != A.dim || f.cols != B.dim) return "matrix shape mismatch";
    for (std::size_t i = 0; i < A.dim; ++i)
        for (std::size_t j = i + 1; j < A.dim; ++j) {
            Vec lhs = vec_apply(A.sc_at(i, j), f);
            Vec rhs = B.bracket(f.row(i), f.row(j));
            if (lhs != rhs)
                return "bracket not preserved at basis pair (" + std::to_string(i + 1) + ", " +
                       std::to_string(j + 1) + ")";
        }
    for (int l = 1; l <= A.c; ++l) {
        const Mat& fl = A.flag[static_cast<std::size_t>(l)];
        auto target = as_rref(flag_at(B, l));
        for (std::size_t r = 0; r < fl.rows; ++r)
            if (!in_span(target, vec_apply(fl.row(r), f)))
                return "flag P_" + std::to_string(l) + " not preserved";
    }
    return std::nullopt;
}

bool is_hom(const Lla& A, const Lla& B, const Mat& f) { return !hom_violation(A, B, f); }

std::optional<std::string> embedding_violation(const Lla& A, const Lla& B, const Mat& f) {
    if (auto bad = hom_violation(A, B, f)) return bad;
    if (span_dim(f) != A.dim) return "not injective";
    for (int l = 1; l <= A.c; ++l) {
        Mat img = rref(f).m;
        std::size_t want = A.flag[static_cast<std::size_t>(l)].rows;
        if (intersect_spans(img, flag_at(B, l)).rows != want)
            return "levels not exact at P_" + std::to_string(l);
    }
    return std::nullopt;
}

// ---- partial maps and iso search ----------------------------------------------

PartialHom::PartialHom(u32 p, std::size_t sdim, std::size_t tdim)
    : src_(p, 0, sdim), img_(p, 0, tdim) {}

bool PartialHom::add(const Vec& src, const Vec& img) {
    const u32 p = src_.p;
    Vec s = src, im = img;
    for (std::size_t i = 0; i < src_.rows; ++i) {
        std::size_t piv = 0;
        while (piv < src_.cols && src_.at(i, piv) == 0) ++piv;
        u32 f = s[piv];
        if (f == 0) continue;
        s = vec_sub(s, vec_scale(f, src_.row(i), p), p);
        im = vec_sub(im, vec_scale(f, img_.row(i), p), p);
    }
    if (vec_is_zero(s)) return vec_is_zero(im);
    std::size_t pc = 0;
    while (s[pc] == 0) ++pc;
    u32 inv = fp_inv(s[pc], p);
    s = vec_scale(inv, s, p);
    im = vec_scale(inv, im, p);
    // clear column pc above, keep rows ordered by pivot
    std::vector<Vec> srows, irows;
    for (std::size_t i = 0; i < src_.rows; ++i) {
        Vec rs = src_.row(i), ri = img_.row(i);
        u32 f = rs[pc];
        if (f != 0) {
            rs = vec_sub(rs, vec_scale(f, s, p), p);
            ri = vec_sub(ri, vec_scale(f, im, p), p);
        }
        srows.push_back(rs);
        irows.push_back(ri);
    }
    std::size_t pos = 0;
    while (pos < srows.size() && first_nonzero_col(srows[pos]) < pc) ++pos;
    srows.insert(srows.begin() + static_cast<std::ptrdiff_t>(pos), s);
    irows.insert(irows.begin() + static_cast<std::ptrdiff_t>(pos), im);
    src_ = Mat::from_rows(p, src_.cols, srows);
    img_ = Mat::from_rows(p, img_.cols, irows);
    return true;
}

std::optional<Vec> PartialHom::image(const Vec& v) const {
    const u32 p = src_.p;
    Vec s = v;
    Vec acc = vec_zero(img_.cols);
    for (std::size_t i = 0; i < src_.rows; ++i) {
        std::size_t piv = 0;
        while (piv < src_.cols && src_.at(i, piv) == 0) ++piv;
        u32 f = s[piv];
        if (f == 0) continue;
        s = vec_sub(s, vec_scale(f, src_.row(i), p), p);
        acc = vec_add(acc, vec_scale(f, img_.row(i), p), p);
    }
    if (!vec_is_zero(s)) return std::nullopt;
    return acc;
}

namespace {

bool saturate(const Lla& A, const Lla& B, PartialHom& h,
              std::vector<std::pair<Vec, Vec>>& placed,
              std::vector<std::pair<Vec, Vec>> queue) {
    while (!queue.empty()) {
        auto [s, im] = queue.back();
        queue.pop_back();
        if (auto ex = h.image(s)) {
            if (*ex != im) return false;
            continue;
        }
        if (!h.add(s, im)) return false;
        for (const auto& [s2, im2] : placed)
            queue.emplace_back(A.bracket(s, s2), B.bracket(im, im2));
        placed.emplace_back(s, im);
    }
    return true;
}

}  // namespace

IsoOutcome iso_search(const Lla& A, const Lla& B, const Mat& fixA, const Mat& fixB,
                      std::size_t ceiling) {
    IsoOutcome out;
    if (A.p != B.p || A.c != B.c || A.dim != B.dim) {
        out.status = IsoStatus::none;
        out.note = "shape mismatch";
        return out;
    }
    if (A.dim > ceiling) {
        out.status = IsoStatus::refused;
        out.note = "search refused: dimension " + std::to_string(A.dim) +
                   " exceeds ceiling " + std::to_string(ceiling);
        return out;
    }
    for (int l = 1; l <= A.c + 1; ++l)
        if (A.flag[static_cast<std::size_t>(l)].rows != B.flag[static_cast<std::size_t>(l)].rows) {
            out.status = IsoStatus::none;
            out.note = "flag profile mismatch at P_" + std::to_string(l);
            return out;
        }
    if (fixA.rows != fixB.rows)
        throw std::invalid_argument("iso_search: fixed assignment length mismatch");

    PartialHom h(A.p, A.dim, B.dim);
    std::vector<std::pair<Vec, Vec>> placed;
    {
        std::vector<std::pair<Vec, Vec>> q;
        for (std::size_t r = 0; r < fixA.rows; ++r) q.emplace_back(fixA.row(r), fixB.row(r));
        if (!saturate(A, B, h, placed, std::move(q))) {
            out.status = IsoStatus::none;
            out.note = "fixed assignment is inconsistent";
            return out;
        }
    }

    // Source generators: unit vectors by increasing level, then index; the
    // first one outside the current span is placed next.
    std::vector<std::size_t> order(A.dim);
    for (std::size_t i = 0; i < A.dim; ++i) order[i] = i;
    std::vector<int> unit_level(A.dim);
    for (std::size_t i = 0; i < A.dim; ++i) unit_level[i] = A.level(vec_unit(A.dim, i));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return unit_level[a] < unit_level[b]; });

    std::function<std::optional<Mat>(PartialHom&, std::vector<std::pair<Vec, Vec>>&)> rec =
        [&](PartialHom& cur, std::vector<std::pair<Vec, Vec>>& curPlaced) -> std::optional<Mat> {
        std::size_t next = A.dim;
        for (auto k : order)
            if (!cur.image(vec_unit(A.dim, k))) {
                next = k;
                break;
            }
        if (next == A.dim) {
            // fully determined: assemble and certify
            std::vector<Vec> rows;
            for (std::size_t k = 0; k < A.dim; ++k) rows.push_back(*cur.image(vec_unit(A.dim, k)));
            Mat f = Mat::from_rows(A.p, B.dim, rows);
            if (span_dim(f) != A.dim) return std::nullopt;
            if (hom_violation(A, B, f)) return std::nullopt;
            auto inv = mat_inverse(f);
            if (!inv || hom_violation(B, A, *inv)) return std::nullopt;
            return f;
        }
        int l = unit_level[next];
        const Mat& cand = flag_at(B, l);
        auto beyond = as_rref(flag_at(B, l + 1));
        const std::size_t m = cand.rows;
        std::vector<u32> lam(m, 0);
        // odometer over coefficient tuples, first coordinate most significant
        while (true) {
            // next tuple
            std::size_t pos = m;
            while (pos > 0) {
                --pos;
                if (++lam[pos] < A.p) break;
                lam[pos] = 0;
                if (pos == 0) return std::nullopt;  // wrapped: exhausted
            }
            if (m == 0) return std::nullopt;
            Vec v = vec_zero(B.dim);
            for (std::size_t i = 0; i < m; ++i)
                if (lam[i]) v = vec_add(v, vec_scale(lam[i], cand.row(i), A.p), A.p);
            if (vec_is_zero(v) || in_span(beyond, v)) continue;  // wrong level
            // injectivity: the image must enlarge the image span
            std::size_t ir = span_dim(cur.img());
            if (span_dim(vstack(cur.img(), single_row(A.p, v))) == ir) continue;
            PartialHom h2 = cur;
            auto placed2 = curPlaced;
            std::vector<std::pair<Vec, Vec>> q;
            q.emplace_back(vec_unit(A.dim, next), v);
            if (!saturate(A, B, h2, placed2, std::move(q))) continue;
            if (span_dim(h2.img()) != h2.rank()) continue;  // collapsed somewhere
            if (auto got = rec(h2, placed2)) return got;
        }
    };

    if (A.dim == 0) {
        out.status = IsoStatus::found;
        out.iso = Mat(A.p, 0, 0);
        return out;
    }
    auto got = rec(h, placed);
    if (got) {
        out.status = IsoStatus::found;
        out.iso = *got;
    } else {
        out.status = IsoStatus::none;
        out.note = "no isomorphism";
    }
    return out;
}

Mat exp_ad(const Lla& L, const Vec& x) {
    if (static_cast<u32>(L.c) >= L.p)
        throw std::domain_error("exp_ad requires c < p");
    Mat adx = L.ad(x);
    Mat acc = Mat::identity(L.p, L.dim);
    Mat term = Mat::identity(L.p, L.dim);
    u32 fact = 1;
    for (int k = 1; k <= L.c; ++k) {
        term = mat_mul(term, adx);
        fact = fp_mul(fact, static_cast<u32>(k) % L.p, L.p);
        acc = mat_add(acc, mat_scale(fp_inv(fact, L.p), term));
    }
    return acc;
}

}  // namespace lazlie
