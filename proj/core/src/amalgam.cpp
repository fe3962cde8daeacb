#include "lazlie/amalgam.hpp"

#include <stdexcept>
#include <string>
#include <utility>

#include "lazlie/hall.hpp"

namespace lazlie {

namespace {

[[noreturn]] void panic(const std::string& msg) { throw std::logic_error("amalgam: " + msg); }

Mat rref_of(const Mat& m) { return rref(m).m; }

std::vector<std::size_t> pivots_of(const Mat& reduced) {
    std::vector<std::size_t> piv;
    piv.reserve(reduced.rows);
    for (std::size_t i = 0; i < reduced.rows; ++i) {
        std::size_t j = 0;
        while (j < reduced.cols && reduced.at(i, j) == 0) ++j;
        if (j == reduced.cols) panic("pivots_of: zero row in a reduced basis");
        piv.push_back(j);
    }
    return piv;
}

// Coordinates in a reduced basis, read off the pivot columns and verified.
Vec read_coords(const Mat& reduced, const std::vector<std::size_t>& piv, const Vec& v,
                const char* what) {
    Vec co(reduced.rows);
    for (std::size_t j = 0; j < reduced.rows; ++j) co[j] = v[piv[j]];
    Vec back(reduced.cols, 0);
    for (std::size_t j = 0; j < reduced.rows; ++j) {
        if (!co[j]) continue;
        for (std::size_t t = 0; t < reduced.cols; ++t)
            back[t] = fp_add(back[t], fp_mul(co[j], reduced.at(j, t), reduced.p), reduced.p);
    }
    if (back != v) panic(std::string(what) + ": vector escaped the span");
    return co;
}

// All rows of vecs rewritten in the coordinates of a reduced basis.
Mat rows_in(const Mat& reduced, const Mat& vecs, const char* what) {
    auto piv = pivots_of(reduced);
    Mat out(vecs.p, 0, reduced.rows);
    for (std::size_t i = 0; i < vecs.rows; ++i)
        out.append_row(read_coords(reduced, piv, vecs.row(i), what));
    return out;
}

// Level of a subspace over a base inside the ambient algebra, using the
// induced flag sub ∩ P_i; both arguments live in ambient coordinates.
int level_within(const Lla& S, const Mat& sub_rref, const Mat& base_rows) {
    for (int i = S.c + 1; i >= 1; --i) {
        Mat inter = intersect_spans(sub_rref, S.flag[static_cast<std::size_t>(i)]);
        if (span_dim(vstack(base_rows, inter)) == sub_rref.rows) return i;
    }
    panic("level_within: P_1 did not span");
}

Rank rank_within(const Lla& S, const Mat& sub_rref, const Mat& base_rows) {
    Rank r;
    r.nu = level_within(S, sub_rref, base_rows);
    if (r.nu == S.c + 1) return r;
    Mat inter = intersect_spans(sub_rref, S.flag[static_cast<std::size_t>(r.nu) + 1]);
    r.n = sub_rref.rows - span_dim(vstack(base_rows, inter));
    return r;
}

// Validates that e embeds C into X with the induced flag: certified
// embedding plus dim(image ∩ P_i(X)) = dim P_i(C) for every i.
void check_embedding(const Lla& C, const Lla& X, const Mat& e, const char* who) {
    if (C.p != X.p || C.c != X.c)
        throw std::invalid_argument(std::string(who) + ": operands disagree on p or c");
    if (e.rows != C.dim || e.cols != X.dim || e.p != C.p)
        throw std::invalid_argument(std::string(who) + ": embedding shape mismatch");
    if (auto bad = embedding_violation(C, X, e))
        throw std::invalid_argument(std::string(who) + ": base embedding not certified (" + *bad +
                                    ")");
    Mat img = rref_of(e);
    for (int i = 1; i <= C.c + 1; ++i) {
        std::size_t got = intersect_spans(img, X.flag[static_cast<std::size_t>(i)]).rows;
        if (got != C.flag[static_cast<std::size_t>(i)].rows)
            throw std::invalid_argument(std::string(who) + ": base flag is not induced");
    }
}

// A vector of maximal level outside the base span, scanning the flag from
// the deepest step upward; first basis row outside the span wins.
std::pair<Vec, int> select_generator(const Lla& A, const Mat& base_rref) {
    auto rr = rref(base_rref);
    for (int i = A.c; i >= 1; --i) {
        const Mat& f = A.flag[static_cast<std::size_t>(i)];
        for (std::size_t r = 0; r < f.rows; ++r)
            if (!in_span(rr, f.row(r))) return {f.row(r), i};
    }
    return {vec_zero(A.dim), A.c + 1};
}

void check_square(const AmalgamResult& r, const Mat& e_ca, const Mat& e_cb) {
    if (!(mat_mul(e_ca, r.emb_a) == mat_mul(e_cb, r.emb_b)))
        panic("embeddings disagree on the base");
}

// S = B: A coincides with C and is carried over through e_ca^{-1} e_cb.
AmalgamResult degenerate_a(const Lla& A, const Mat& e_ca, const Lla& B, const Mat& e_cb) {
    auto inv = mat_inverse(e_ca);
    if (!inv) panic("degenerate base is not an isomorphism");
    AmalgamResult r;
    r.S = B;
    r.emb_a = mat_mul(*inv, e_cb);
    r.emb_b = Mat::identity(B.p, B.dim);
    r.c_rows = rref_of(e_cb);
    r.h_rows = Mat::identity(B.p, B.dim);
    r.gen = vec_zero(B.dim);
    auto node = std::make_shared<AmalgamTrace>();
    node->kind = AmalgamTrace::Kind::degenerate_a;
    node->e_ca = e_ca;
    node->e_cb = e_cb;
    node->lev_h_over_b = B.c + 1;
    node->dim_c = A.dim;
    r.trace = std::move(node);
    check_square(r, e_ca, e_cb);
    return r;
}

// S = A: B coincides with C; the base itself serves as H.
AmalgamResult degenerate_b(const Lla& A, const Mat& e_ca, const Lla& B, const Mat& e_cb) {
    auto inv = mat_inverse(e_cb);
    if (!inv) panic("degenerate base is not an isomorphism");
    AmalgamResult r;
    r.S = A;
    r.emb_a = Mat::identity(A.p, A.dim);
    r.emb_b = mat_mul(*inv, e_ca);
    r.c_rows = rref_of(e_ca);
    r.h_rows = r.c_rows;
    r.gen = select_generator(A, r.c_rows).first;
    auto node = std::make_shared<AmalgamTrace>();
    node->kind = AmalgamTrace::Kind::degenerate_b;
    node->e_ca = e_ca;
    node->e_cb = e_cb;
    node->lev_h_over_b = A.c + 1;
    node->dim_c = B.dim;
    r.trace = std::move(node);
    check_square(r, e_ca, e_cb);
    return r;
}

void check_strong(const AmalgamResult& r) {
    if (!spans_equal(intersect_spans(rref_of(r.emb_a), rref_of(r.emb_b)), r.c_rows))
        panic("amalgam is not strong");
}

}  // namespace

// ---- stage 1 ----------------------------------------------------------------

AmalgamResult stage1(const Lla& C, const Lla& A, const Mat& e_ca, const Lla& B, const Mat& e_cb,
                     std::optional<Vec> a_gen, std::optional<Vec> b_gen) {
    check_embedding(C, A, e_ca, "stage1");
    check_embedding(C, B, e_cb, "stage1");
    Mat ca = rref_of(e_ca);
    Mat cb = rref_of(e_cb);
    if (!is_ideal_rows(A, ca) || !is_ideal_rows(B, cb))
        throw std::invalid_argument("stage1: base is not an ideal of both extensions");
    if (A.dim > C.dim + 1 || B.dim > C.dim + 1)
        throw std::invalid_argument("stage1: extension is not generated by one vector over the base");
    if (!a_gen && A.dim == C.dim) return degenerate_a(A, e_ca, B, e_cb);
    if (!b_gen && B.dim == C.dim) return degenerate_b(A, e_ca, B, e_cb);

    auto pick = [](const Lla& X, const Mat& base, const std::optional<Vec>& given,
                   const char* side) -> std::pair<Vec, int> {
        auto best = select_generator(X, base);
        if (!given) return best;
        const Vec& v = *given;
        if (v.size() != X.dim || in_span(rref(base), v))
            throw std::invalid_argument(std::string("stage1: ") + side +
                                        " generator does not extend the base");
        int lev = X.level(v);
        if (lev != best.second)
            throw std::invalid_argument(std::string("stage1: ") + side +
                                        " generator level is not maximal");
        return {v, lev};
    };
    auto [a_sel, alpha] = pick(A, ca, a_gen, "first");
    auto [b_sel, beta] = pick(B, cb, b_gen, "second");

    const std::size_t nc = C.dim;
    // Decompositions over (base, generator) come from one matrix inversion.
    auto split = [&](const Lla& X, const Mat& e, const Vec& gen) {
        Mat stack = e;
        stack.append_row(gen);
        auto inv = mat_inverse(stack);
        if (!inv) panic("base plus generator fails to span the extension");
        return *inv;  // row i = coordinates of basis vector i as (base part, gen part)
    };
    Mat deca = split(A, e_ca, a_sel);
    Mat decb = split(B, e_cb, b_sel);

    // Adjoint action of the generator on the base, in base coordinates.
    auto adjoint = [&](const Lla& X, const Mat& e, const Mat& dec, const Vec& gen) {
        Mat d(C.p, nc, nc);
        for (std::size_t k = 0; k < nc; ++k) {
            Vec co = vec_apply(X.bracket(gen, e.row(k)), dec);
            if (co[nc] != 0) panic("adjoint action left the base ideal");
            for (std::size_t j = 0; j < nc; ++j) d.at(k, j) = co[j];
        }
        return d;
    };
    Mat der_a = adjoint(A, e_ca, deca, a_sel);
    Mat der_b = adjoint(B, e_cb, decb, b_sel);

    FreeLie Fc({alpha, beta}, C.c, C.p);
    Lla F = Fc.to_lla();
    const std::size_t nf = F.dim;
    std::vector<Mat> act(nf, Mat(C.p, nc, nc));
    for (std::size_t id = 0; id < nf; ++id) {
        const HallMono& m = Fc.mono(static_cast<int>(id));
        if (m.gen == 0) {
            act[id] = der_a;
        } else if (m.gen == 1) {
            act[id] = der_b;
        } else {
            const Mat& l = act[static_cast<std::size_t>(m.left)];
            const Mat& r = act[static_cast<std::size_t>(m.right)];
            act[id] = mat_add(mat_mul(r, l), mat_scale(C.p - 1, mat_mul(l, r)));
        }
    }
    Lla S = semidirect(C, F, act);

    const std::size_t n = S.dim;
    auto embed = [&](const Mat& dec, std::size_t gen_col) {
        Mat emb(C.p, dec.rows, n);
        for (std::size_t i = 0; i < dec.rows; ++i) {
            for (std::size_t j = 0; j < nc; ++j) emb.at(i, j) = dec.at(i, j);
            emb.at(i, gen_col) = dec.at(i, nc);
        }
        return emb;
    };
    AmalgamResult out;
    out.S = std::move(S);
    out.emb_a = embed(deca, nc + static_cast<std::size_t>(Fc.gen_id(0)));
    out.emb_b = embed(decb, nc + static_cast<std::size_t>(Fc.gen_id(1)));
    if (auto bad = embedding_violation(A, out.S, out.emb_a))
        panic("first embedding not certified (" + *bad + ")");
    if (auto bad = embedding_violation(B, out.S, out.emb_b))
        panic("second embedding not certified (" + *bad + ")");
    check_square(out, e_ca, e_cb);
    out.c_rows = rref_of(mat_mul(e_ca, out.emb_a));
    out.gen = vec_apply(a_sel, out.emb_a);

    auto node = std::make_shared<AmalgamTrace>();
    node->kind = AmalgamTrace::Kind::stage_one;
    node->e_ca = e_ca;
    node->e_cb = e_cb;
    node->alpha = alpha;
    node->beta = beta;
    node->a_sel = a_sel;
    node->b_sel = b_sel;
    node->der_a = der_a;
    node->der_b = der_b;
    node->dim_c = nc;

    // H = <emb_b(B), h_3 ... h_k>: the image of B together with every
    // bracket monomial of the free part.
    Mat h = out.emb_b;
    for (std::size_t id = 0; id < nf; ++id)
        if (Fc.mono(static_cast<int>(id)).gen < 0) {
            node->hall_ids.push_back(static_cast<int>(id));
            h.append_row(vec_unit(n, nc + id));
        }
    out.h_rows = rref_of(h);
    if (out.h_rows.rows + 1 != n) panic("H has the wrong codimension");
    if (!is_ideal_rows(out.S, out.h_rows)) panic("H is not an ideal");
    node->lev_h_over_b = level_within(out.S, out.h_rows, rref_of(out.emb_b));
    if (node->lev_h_over_b != lev_add(alpha, beta, C.c))
        panic("lev(H/B) differs from the sum of the generator levels");
    check_strong(out);
    out.trace = std::move(node);
    return out;
}

// ---- stage 2 ----------------------------------------------------------------

AmalgamResult stage2(const Lla& C, const Lla& A, const Mat& e_ca, const Lla& B, const Mat& e_cb) {
    check_embedding(C, A, e_ca, "stage2");
    check_embedding(C, B, e_cb, "stage2");
    Mat ca = rref_of(e_ca);
    Mat cb = rref_of(e_cb);
    if (!is_ideal_rows(A, ca))
        throw std::invalid_argument("stage2: base is not an ideal of the first extension");
    if (A.dim > C.dim + 1)
        throw std::invalid_argument("stage2: extension is not generated by one vector over the base");
    if (A.dim == C.dim) return degenerate_a(A, e_ca, B, e_cb);
    if (B.dim == C.dim) return degenerate_b(A, e_ca, B, e_cb);

    auto [a_sel, mu] = select_generator(A, ca);
    std::vector<Vec> mb = malcev_basis(B, cb);
    const int nu = B.level(mb.back());
    const int lev_bc = level_over(B, cb);
    if (lev_bc != nu) panic("Malcev basis level disagrees with lev(B/C)");

    auto node = std::make_shared<AmalgamTrace>();
    node->kind = AmalgamTrace::Kind::stage_two;
    node->e_ca = e_ca;
    node->e_cb = e_cb;
    node->mu = mu;
    node->nu = nu;
    node->rank = rank_over(B, cb);

    const int cls = C.c;
    auto sat = [&](int x) { return x > cls ? cls + 1 : x; };

    // Current A side: LA basic over the rows CA; current B side: LB basic
    // over the rows DB via the last Malcev vector.  T identifies the
    // abstract base (basis = rows of CA) inside LB.
    Lla LA = A;
    Mat CA = ca;
    Lla LB = B;
    Mat DB = cb;
    for (std::size_t i = 0; i + 1 < mb.size(); ++i) DB = rref_of(vstack(DB, Mat::from_rows(B.p, B.dim, {mb[i]})));
    if (!is_ideal_rows(LB, DB)) panic("Malcev prefix is not an ideal");
    // T carries the reduced base rows CA through the abstract base into LB.
    Mat co = rows_in(ca, e_ca, "stage2 base");
    auto coinv = mat_inverse(co);
    if (!coinv) panic("base embedding is not invertible onto its image");
    Mat T = mat_mul(*coinv, e_cb);
    Mat acc_a = Mat::identity(A.p, A.dim);
    Mat acc_b = Mat::identity(B.p, B.dim);

    std::optional<AmalgamResult> closing;
    for (int iter = 0;; ++iter) {
        if (iter > cls + 1) panic("induction failed to terminate within the class bound");
        if (CA.rows == DB.rows) {
            // C_t = D_t: both sides are one-generator extensions of the
            // same base; close directly.
            Lla Cab = restrict_to(LA, CA);
            closing = stage1(Cab, LA, CA, LB, T);
            acc_a = mat_mul(acc_a, closing->emb_a);
            acc_b = mat_mul(acc_b, closing->emb_b);
            break;
        }

        // Rebuild the A side against D_i.
        Lla Cab = restrict_to(LA, CA);
        Lla Dab = restrict_to(LB, DB);
        Mat e_cd = rows_in(DB, T, "stage2 base into D");
        Rank rk = rank_within(LB, DB, rref_of(T));
        if (!rank_precedes(rk, node->rank)) panic("rank failed to decrease at a half-step");
        AmalgamResult ra = stage2(Cab, LA, CA, Dab, e_cd);
        acc_a = mat_mul(acc_a, ra.emb_a);
        {
            AmalgamTrace::Link ln;
            ln.a_side = true;
            ln.arg_rows = DB;
            ln.rank = rk;
            ln.lev_gain = ra.trace->lev_h_over_b;
            if (ln.lev_gain < sat((iter + 1) * (mu + nu)))
                panic("level gain below the induction bound");
            ln.res = ra;
            node->links.push_back(std::move(ln));
        }
        Lla LA2 = ra.S;
        Mat CA2 = ra.h_rows;
        Mat d_in_c = rows_in(CA2, ra.emb_b, "D inside the rebuilt base");

        if (CA2.rows == DB.rows) {
            // D_t = C_{t+1}: one extra half-step happened; close over it.
            closing = stage1(Dab, LA2, ra.emb_b, LB, DB);
            acc_a = mat_mul(acc_a, closing->emb_a);
            acc_b = mat_mul(acc_b, closing->emb_b);
            break;
        }

        // Rebuild the B side against C_{i+1}.
        Lla Cnew = restrict_to(LA2, CA2);
        Rank rk2 = rank_within(LA2, CA2, rref_of(ra.emb_b));
        if (!rank_precedes(rk2, node->rank)) panic("rank failed to decrease at a half-step");
        AmalgamResult rb = stage2(Dab, LB, DB, Cnew, d_in_c);
        acc_b = mat_mul(acc_b, rb.emb_a);
        {
            AmalgamTrace::Link ln;
            ln.a_side = false;
            ln.arg_rows = CA2;
            ln.rank = rk2;
            ln.lev_gain = rb.trace->lev_h_over_b;
            if (ln.lev_gain < sat((iter + 1) * (mu + nu) + nu))
                panic("level gain below the induction bound");
            ln.res = rb;
            node->links.push_back(std::move(ln));
        }
        LA = std::move(LA2);
        CA = std::move(CA2);
        LB = rb.S;
        DB = rb.h_rows;
        T = rb.emb_b;
    }

    AmalgamResult out;
    out.S = closing->S;
    out.emb_a = std::move(acc_a);
    out.emb_b = std::move(acc_b);
    out.h_rows = closing->h_rows;
    out.gen = closing->gen;
    if (auto bad = embedding_violation(A, out.S, out.emb_a))
        panic("first embedding not certified (" + *bad + ")");
    if (auto bad = embedding_violation(B, out.S, out.emb_b))
        panic("second embedding not certified (" + *bad + ")");
    check_square(out, e_ca, e_cb);
    out.c_rows = rref_of(mat_mul(e_ca, out.emb_a));
    node->closing = std::move(*closing);
    node->lev_h_over_b = level_within(out.S, out.h_rows, rref_of(out.emb_b));
    if (node->lev_h_over_b != lev_add(mu, lev_bc, cls))
        panic("lev(H/B) differs from lev(a) + lev(B/C)");
    check_strong(out);
    out.trace = std::move(node);
    return out;
}

// ---- stage 3 ----------------------------------------------------------------

AmalgamResult free_amalgam(const Lla& A, const Lla& B, const Lla& C, const Mat& e_ca,
                           const Mat& e_cb) {
    check_embedding(C, A, e_ca, "free_amalgam");
    check_embedding(C, B, e_cb, "free_amalgam");
    Mat ca = rref_of(e_ca);
    if (A.dim == C.dim) return degenerate_a(A, e_ca, B, e_cb);

    std::vector<Vec> mb = malcev_basis(A, ca);
    auto node = std::make_shared<AmalgamTrace>();
    node->kind = AmalgamTrace::Kind::stage_three;
    node->e_ca = e_ca;
    node->e_cb = e_cb;
    node->dim_c = C.dim;
    node->rank = rank_over(A, ca);

    Mat prev_rows = ca;      // A_{i-1} inside A
    Lla prev = C;            // abstract A_{i-1}
    Mat prev_emb = e_ca;     // abstract basis of A_{i-1} inside A
    Lla Scur = B;
    Mat base_emb = e_cb;     // abstract A_{i-1} inside Scur
    Mat emb_b_tot = Mat::identity(B.p, B.dim);
    Mat emb_a_last;
    for (std::size_t i = 0; i < mb.size(); ++i) {
        Mat rows = rref_of(vstack(prev_rows, Mat::from_rows(A.p, A.dim, {mb[i]})));
        Lla Ai = restrict_to(A, rows);
        Mat e_prev = rows_in(rows, prev_emb, "chain base");
        AmalgamResult res = stage2(prev, Ai, e_prev, Scur, base_emb);
        emb_b_tot = mat_mul(emb_b_tot, res.emb_b);
        emb_a_last = res.emb_a;
        base_emb = res.emb_a;
        Scur = res.S;
        AmalgamTrace::Link ln;
        ln.a_side = true;
        ln.arg_rows = rows;
        ln.rank = rank_within(A, rows, prev_rows);
        ln.lev_gain = res.trace->lev_h_over_b;
        ln.res = std::move(res);
        node->links.push_back(std::move(ln));
        prev_rows = rows;
        prev = std::move(Ai);
        prev_emb = std::move(rows);
    }
    const AmalgamResult& last = node->links.back().res;

    AmalgamResult out;
    out.S = std::move(Scur);
    out.emb_a = std::move(emb_a_last);
    out.emb_b = std::move(emb_b_tot);
    out.h_rows = last.h_rows;
    out.gen = last.gen;
    if (auto bad = embedding_violation(A, out.S, out.emb_a))
        panic("first embedding not certified (" + *bad + ")");
    if (auto bad = embedding_violation(B, out.S, out.emb_b))
        panic("second embedding not certified (" + *bad + ")");
    check_square(out, e_ca, e_cb);
    out.c_rows = rref_of(mat_mul(e_ca, out.emb_a));
    node->lev_h_over_b = level_within(out.S, out.h_rows, rref_of(out.emb_b));
    check_strong(out);
    if (auto bad = validate(out.S)) panic("result fails validation (" + *bad + ")");
    // Generation: the images close to all of S under brackets.
    Mat joined = subalgebra_join(out.S, sum_spans(rref_of(out.emb_a), rref_of(out.emb_b)), {});
    if (joined.rows != out.S.dim) panic("images fail to generate the amalgam");
    out.trace = std::move(node);
    return out;
}

// ---- predicates --------------------------------------------------------------

bool is_strong(const AmalgamResult& r) {
    return spans_equal(intersect_spans(rref_of(r.emb_a), rref_of(r.emb_b)), r.c_rows);
}

namespace {

Mat freeness_walk(const AmalgamResult& r, const Lla& L, const Mat& f, const Mat& g) {
    const AmalgamTrace& t = *r.trace;
    Mat h;
    switch (t.kind) {
        case AmalgamTrace::Kind::degenerate_a:
            h = g;
            break;
        case AmalgamTrace::Kind::degenerate_b:
            h = f;
            break;
        case AmalgamTrace::Kind::stage_one: {
            h = Mat(L.p, r.S.dim, L.dim);
            for (std::size_t k = 0; k < t.dim_c; ++k) h.set_row(k, vec_apply(t.e_ca.row(k), f));
            FreeLie Fc({t.alpha, t.beta}, r.S.c, r.S.p);
            Mat img = hom_from_generators(Fc, L,
                                          {vec_apply(t.a_sel, f), vec_apply(t.b_sel, g)});
            for (std::size_t j = 0; j < Fc.dim(); ++j) h.set_row(t.dim_c + j, img.row(j));
            break;
        }
        case AmalgamTrace::Kind::stage_two: {
            Mat fc = f, gc = g;
            for (const auto& ln : t.links) {
                if (ln.a_side)
                    fc = freeness_walk(ln.res, L, fc, mat_mul(ln.arg_rows, gc));
                else
                    gc = freeness_walk(ln.res, L, gc, mat_mul(ln.arg_rows, fc));
            }
            h = freeness_walk(*t.closing, L, fc, gc);
            break;
        }
        case AmalgamTrace::Kind::stage_three: {
            Mat gc = g;
            for (const auto& ln : t.links) gc = freeness_walk(ln.res, L, mat_mul(ln.arg_rows, f), gc);
            h = gc;
            break;
        }
    }
    if (!(mat_mul(r.emb_a, h) == f) || !(mat_mul(r.emb_b, h) == g))
        panic("mediating hom fails its commuting square");
    return h;
}

}  // namespace

std::optional<Mat> freeness_check(const AmalgamResult& r, const Lla& A, const Lla& B, const Lla& L,
                                  const Mat& f, const Mat& g) {
    if (!is_hom(A, L, f) || !is_hom(B, L, g)) return std::nullopt;
    if (!(mat_mul(r.trace->e_ca, f) == mat_mul(r.trace->e_cb, g))) return std::nullopt;
    Mat h = freeness_walk(r, L, f, g);
    if (!is_hom(r.S, L, h)) panic("mediating hom is not a certified hom");
    // Uniqueness: h is pinned on the images of A and B, which generate S.
    Mat joined = subalgebra_join(r.S, sum_spans(rref_of(r.emb_a), rref_of(r.emb_b)), {});
    if (joined.rows != r.S.dim) panic("images fail to generate the amalgam");
    return h;
}

namespace {

// [x, sub] <= ideal for every x in the subalgebra, with both given as rows.
bool ideal_in(const Lla& L, const Mat& sub_rows, const Mat& ideal_rref) {
    auto rr = rref(ideal_rref);
    for (std::size_t i = 0; i < ideal_rref.rows; ++i)
        for (std::size_t j = 0; j < sub_rows.rows; ++j)
            if (!in_span(rr, L.bracket(ideal_rref.row(i), sub_rows.row(j)))) return false;
    return true;
}

}  // namespace

Indep indep_otimes(const Lla& ambient, const std::vector<Vec>& a, const std::vector<Vec>& b,
                   const Mat& c_rows, std::size_t iso_ceiling) {
    Mat C = rref_of(c_rows);
    if (!is_subalgebra_rows(ambient, C))
        throw std::invalid_argument("indep_otimes: base is not a subalgebra");
    Mat Ar = subalgebra_join(ambient, C, a);
    Mat Br = subalgebra_join(ambient, C, b);
    if (Ar.rows == C.rows || Br.rows == C.rows) return Indep::yes;

    if (a.size() == 1 && b.size() == 1 && ideal_in(ambient, Ar, C) && ideal_in(ambient, Br, C)) {
        // Closed criterion: the base stays an ideal of the join, the span
        // generated by the two vectors misses the base, and it carries the
        // free algebra on their levels.
        Mat ABr = subalgebra_join(ambient, C, {a[0], b[0]});
        if (!ideal_in(ambient, ABr, C)) return Indep::no;
        Mat ab = subalgebra(ambient, {a[0], b[0]});
        if (intersect_spans(ab, C).rows != 0) return Indep::no;
        int alpha = ambient.level(a[0]), beta = ambient.level(b[0]);
        FreeLie Fc({alpha, beta}, ambient.c, ambient.p);
        Mat phi = hom_from_generators(Fc, ambient, {a[0], b[0]});
        if (auto bad = hom_violation(Fc.to_lla(), ambient, phi))
            panic("free evaluation is not a hom (" + *bad + ")");
        return span_dim(phi) == Fc.dim() ? Indep::yes : Indep::no;
    }

    Lla Cabs = restrict_to(ambient, C);
    Lla Aabs = restrict_to(ambient, Ar);
    Lla Babs = restrict_to(ambient, Br);
    Mat e_ca = rows_in(Ar, C, "indep base in A");
    Mat e_cb = rows_in(Br, C, "indep base in B");
    AmalgamResult am = free_amalgam(Aabs, Babs, Cabs, e_ca, e_cb);

    std::vector<Vec> all = a;
    all.insert(all.end(), b.begin(), b.end());
    Mat Tr = subalgebra_join(ambient, C, all);
    Lla T = restrict_to(ambient, Tr);
    Mat fix_s = vstack(am.emb_a, am.emb_b);
    Mat fix_t = vstack(rows_in(Tr, Ar, "join in target"), rows_in(Tr, Br, "join in target"));
    IsoOutcome iso = iso_search(am.S, T, fix_s, fix_t, iso_ceiling);
    switch (iso.status) {
        case IsoStatus::found:
            return Indep::yes;
        case IsoStatus::none:
            return Indep::no;
        case IsoStatus::refused:
            return Indep::undecided;
    }
    return Indep::undecided;
}

BaseChangeReport base_change_check(const Lla& ambient, const std::vector<Vec>& a,
                                   const std::vector<Vec>& b, const Mat& c_rows, const Mat& e_rows,
                                   std::size_t iso_ceiling) {
    Mat C = rref_of(c_rows);
    Mat E = rref_of(e_rows);
    auto cr = rref(C);
    for (std::size_t i = 0; i < E.rows; ++i)
        if (!in_span(cr, E.row(i)))
            throw std::invalid_argument("base_change_check: E is not contained in C");
    if (!is_malcev(ambient, a, C) || !is_malcev(ambient, a, E) || !is_malcev(ambient, b, C) ||
        !is_malcev(ambient, b, E))
        throw std::invalid_argument("base_change_check: tuples must be Malcev over both bases");
    BaseChangeReport rep;
    rep.at_c = indep_otimes(ambient, a, b, C, iso_ceiling);
    rep.at_e = indep_otimes(ambient, a, b, E, iso_ceiling);
    rep.held = !(rep.at_c == Indep::yes && rep.at_e == Indep::no);
    return rep;
}

}  // namespace lazlie
