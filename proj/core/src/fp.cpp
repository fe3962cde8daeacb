#include "lazlie/fp.hpp"

#include <algorithm>
#include <cassert>

namespace lazlie {

u32 fp_inv(u32 a, u32 p) {
    a %= p;
    if (a == 0) throw std::domain_error("fp_inv: division by zero mod " + std::to_string(p));
    i64 t = 0, nt = 1, r = p, nr = a;
    while (nr != 0) {
        i64 q = r / nr;
        t -= q * nt; std::swap(t, nt);
        r -= q * nr; std::swap(r, nr);
    }
    if (t < 0) t += p;
    return static_cast<u32>(t);
}

u32 fp_pow(u32 a, u64 e, u32 p) {
    u64 base = a % p, acc = 1;
    while (e) {
        if (e & 1) acc = acc * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return static_cast<u32>(acc);
}

u32 fp_of_rational(i64 num, i64 den, u32 p) {
    if (den % static_cast<i64>(p) == 0)
        throw std::domain_error("fp_of_rational: denominator divisible by p");
    i64 n = num % static_cast<i64>(p);
    if (n < 0) n += p;
    i64 d = den % static_cast<i64>(p);
    if (d < 0) d += p;
    return fp_mul(static_cast<u32>(n), fp_inv(static_cast<u32>(d), p), p);
}

bool is_odd_prime(u32 p) {
    if (p < 3 || p % 2 == 0) return false;
    for (u32 d = 3; static_cast<u64>(d) * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

Vec vec_add(const Vec& a, const Vec& b, u32 p) {
    assert(a.size() == b.size());
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = fp_add(a[i], b[i], p);
    return r;
}

Vec vec_sub(const Vec& a, const Vec& b, u32 p) {
    assert(a.size() == b.size());
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = fp_sub(a[i], b[i], p);
    return r;
}

Vec vec_scale(u32 s, const Vec& a, u32 p) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = fp_mul(s, a[i], p);
    return r;
}

bool vec_is_zero(const Vec& a) {
    return std::all_of(a.begin(), a.end(), [](u32 x) { return x == 0; });
}

Vec vec_zero(std::size_t n) { return Vec(n, 0); }

Vec vec_unit(std::size_t n, std::size_t i) {
    Vec v(n, 0);
    v[i] = 1;
    return v;
}

void Mat::set_row(std::size_t i, const Vec& v) {
    assert(v.size() == cols);
    std::copy(v.begin(), v.end(), a.begin() + i * cols);
}

void Mat::append_row(const Vec& v) {
    assert(v.size() == cols);
    a.insert(a.end(), v.begin(), v.end());
    ++rows;
}

Mat Mat::identity(u32 p, std::size_t n) {
    Mat m(p, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

Mat Mat::from_rows(u32 p, std::size_t cols, const std::vector<Vec>& rs) {
    Mat m(p, 0, cols);
    for (const auto& r : rs) m.append_row(r);
    return m;
}

RrefResult rref(const Mat& m) {
    Mat w = m;
    const u32 p = w.p;
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < w.cols && r < w.rows; ++c) {
        std::size_t sel = r;
        while (sel < w.rows && w.at(sel, c) == 0) ++sel;
        if (sel == w.rows) continue;
        if (sel != r)
            for (std::size_t j = 0; j < w.cols; ++j) std::swap(w.at(sel, j), w.at(r, j));
        u32 inv = fp_inv(w.at(r, c), p);
        for (std::size_t j = c; j < w.cols; ++j) w.at(r, j) = fp_mul(w.at(r, j), inv, p);
        for (std::size_t i = 0; i < w.rows; ++i) {
            if (i == r || w.at(i, c) == 0) continue;
            u32 f = w.at(i, c);
            for (std::size_t j = c; j < w.cols; ++j)
                w.at(i, j) = fp_sub(w.at(i, j), fp_mul(f, w.at(r, j), p), p);
        }
        pivots.push_back(c);
        ++r;
    }
    Mat out(p, r, w.cols);
    std::copy(w.a.begin(), w.a.begin() + r * w.cols, out.a.begin());
    return {out, pivots};
}

std::size_t span_dim(const Mat& m) { return rref(m).m.rows; }

std::optional<Vec> solve(const Mat& m, const Vec& b) {
    if (b.size() != m.rows) throw std::invalid_argument("solve: dimension mismatch");
    // Augment with b as an extra column, reduce, read off one solution.
    Mat aug(m.p, m.rows, m.cols + 1);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, m.cols) = b[i];
    }
    auto r = rref(aug);
    Vec x(m.cols, 0);
    for (std::size_t i = 0; i < r.m.rows; ++i) {
        if (r.pivots[i] == m.cols) return std::nullopt;  // row 0 ... 0 | 1
        x[r.pivots[i]] = r.m.at(i, m.cols);              // free variables stay 0
    }
    return x;
}

Mat kernel(const Mat& m) {
    auto r = rref(m);
    std::vector<bool> is_pivot(m.cols, false);
    for (auto c : r.pivots) is_pivot[c] = true;
    Mat out(m.p, 0, m.cols);
    for (std::size_t f = 0; f < m.cols; ++f) {
        if (is_pivot[f]) continue;
        Vec v(m.cols, 0);
        v[f] = 1;
        for (std::size_t i = 0; i < r.m.rows; ++i)
            v[r.pivots[i]] = fp_neg(r.m.at(i, f), m.p);
        out.append_row(v);
    }
    return out;
}

Mat complement_basis(const Mat& sub, std::size_t ambient_dim) {
    auto r = rref(sub);
    std::vector<bool> is_pivot(ambient_dim, false);
    for (auto c : r.pivots) is_pivot[c] = true;
    Mat out(sub.p, 0, ambient_dim);
    for (std::size_t j = 0; j < ambient_dim; ++j)
        if (!is_pivot[j]) out.append_row(vec_unit(ambient_dim, j));
    return out;
}

Mat vstack(const Mat& a, const Mat& b) {
    assert(a.cols == b.cols && a.p == b.p);
    Mat m(a.p, a.rows + b.rows, a.cols);
    std::copy(a.a.begin(), a.a.end(), m.a.begin());
    std::copy(b.a.begin(), b.a.end(), m.a.begin() + a.a.size());
    return m;
}

Mat intersect_spans(const Mat& a, const Mat& b) {
    assert(a.cols == b.cols && a.p == b.p);
    const std::size_t n = a.cols;
    // Zassenhaus: reduce [A|A; B|0]; rows with zero left half carry the
    // intersection in their right half.
    Mat block(a.p, a.rows + b.rows, 2 * n);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            block.at(i, j) = a.at(i, j);
            block.at(i, n + j) = a.at(i, j);
        }
    for (std::size_t i = 0; i < b.rows; ++i)
        for (std::size_t j = 0; j < n; ++j) block.at(a.rows + i, j) = b.at(i, j);
    auto r = rref(block);
    Mat out(a.p, 0, n);
    for (std::size_t i = 0; i < r.m.rows; ++i) {
        bool left_zero = true;
        for (std::size_t j = 0; j < n && left_zero; ++j)
            if (r.m.at(i, j) != 0) left_zero = false;
        if (left_zero) {
            Vec v(n);
            for (std::size_t j = 0; j < n; ++j) v[j] = r.m.at(i, n + j);
            if (!vec_is_zero(v)) out.append_row(v);
        }
    }
    return rref(out).m;
}

Mat sum_spans(const Mat& a, const Mat& b) { return rref(vstack(a, b)).m; }

Vec vec_apply(const Vec& v, const Mat& m) {
    assert(v.size() == m.rows);
    Vec out(m.cols, 0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        if (v[i] == 0) continue;
        for (std::size_t j = 0; j < m.cols; ++j)
            out[j] = fp_add(out[j], fp_mul(v[i], m.at(i, j), m.p), m.p);
    }
    return out;
}

Mat mat_mul(const Mat& a, const Mat& b) {
    assert(a.cols == b.rows && a.p == b.p);
    Mat out(a.p, a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            u32 f = a.at(i, k);
            if (f == 0) continue;
            for (std::size_t j = 0; j < b.cols; ++j)
                out.at(i, j) = fp_add(out.at(i, j), fp_mul(f, b.at(k, j), a.p), a.p);
        }
    return out;
}

Mat transpose(const Mat& m) {
    Mat out(m.p, m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out.at(j, i) = m.at(i, j);
    return out;
}

bool in_span(const RrefResult& r, const Vec& v) {
    if (v.size() != r.m.cols && r.m.rows > 0)
        throw std::invalid_argument("in_span: width mismatch");
    Vec w = v;
    const u32 p = r.m.p;
    for (std::size_t i = 0; i < r.m.rows; ++i) {
        u32 f = w[r.pivots[i]];
        if (f == 0) continue;
        for (std::size_t j = 0; j < r.m.cols; ++j)
            w[j] = fp_sub(w[j], fp_mul(f, r.m.at(i, j), p), p);
    }
    return vec_is_zero(w);
}

bool in_span(const Mat& m, const Vec& v) { return in_span(rref(m), v); }

bool spans_equal(const Mat& a, const Mat& b) { return rref(a).m == rref(b).m; }

std::optional<Vec> coords_in(const Mat& basis, const Vec& v) {
    // Solve x * basis = v, i.e. basis^T * x^T = v^T.
    return solve(transpose(basis), v);
}

std::optional<Mat> mat_inverse(const Mat& m) {
    if (m.rows != m.cols) throw std::invalid_argument("mat_inverse: not square");
    const std::size_t n = m.rows;
    if (n == 0) return Mat(m.p, 0, 0);
    Mat aug(m.p, n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, n + i) = 1;
    }
    auto r = rref(aug);
    if (r.m.rows < n || r.pivots[n - 1] != n - 1) return std::nullopt;
    Mat out(m.p, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.at(i, j) = r.m.at(i, n + j);
    return out;
}

Mat mat_add(const Mat& a, const Mat& b) {
    assert(a.rows == b.rows && a.cols == b.cols && a.p == b.p);
    Mat out = a;
    for (std::size_t k = 0; k < out.a.size(); ++k) out.a[k] = fp_add(out.a[k], b.a[k], a.p);
    return out;
}

Mat mat_scale(u32 s, const Mat& m) {
    Mat out = m;
    s %= m.p;
    for (auto& x : out.a) x = fp_mul(x, s, m.p);
    return out;
}

}  // namespace lazlie
