// Exact arithmetic and linear algebra over the prime field F_p (p an odd prime).
// Scalars are uint32_t residues in [0, p); the modulus travels with the
// containing object (matrix, algebra, ...), not with each scalar.

#ifndef LAZLIE_FP_HPP
#define LAZLIE_FP_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lazlie {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

// ---- scalar arithmetic ----------------------------------------------------

inline u32 fp_add(u32 a, u32 b, u32 p) {
    u32 s = a + b;                 // p < 2^31, no overflow
    return s >= p ? s - p : s;
}

inline u32 fp_sub(u32 a, u32 b, u32 p) { return a >= b ? a - b : a + p - b; }

inline u32 fp_neg(u32 a, u32 p) { return a == 0 ? 0 : p - a; }

inline u32 fp_mul(u32 a, u32 b, u32 p) {
    return static_cast<u32>((static_cast<u64>(a) * b) % p);
}

u32 fp_inv(u32 a, u32 p);          // extended Euclid; a != 0 mod p
u32 fp_pow(u32 a, u64 e, u32 p);

// Reduce the rational num/den mod p.  A denominator divisible by p is a hard
// error: it cannot occur in the series coefficients used here (class < p).
u32 fp_of_rational(i64 num, i64 den, u32 p);

bool is_odd_prime(u32 p);

// ---- vectors ---------------------------------------------------------------

using Vec = std::vector<u32>;

Vec vec_add(const Vec& a, const Vec& b, u32 p);
Vec vec_sub(const Vec& a, const Vec& b, u32 p);
Vec vec_scale(u32 s, const Vec& a, u32 p);
bool vec_is_zero(const Vec& a);
Vec vec_zero(std::size_t n);
Vec vec_unit(std::size_t n, std::size_t i);

// ---- matrices --------------------------------------------------------------

// Dense row-major matrix over F_p.  Rows usually play the role of vectors
// (spans are row spaces; linear maps act by v |-> v * M).
struct Mat {
    u32 p = 0;
    std::size_t rows = 0, cols = 0;
    std::vector<u32> a;

    Mat() = default;
    Mat(u32 p_, std::size_t r, std::size_t c) : p(p_), rows(r), cols(c), a(r * c, 0) {}

    u32& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    u32 at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    Vec row(std::size_t i) const { return Vec(a.begin() + i * cols, a.begin() + (i + 1) * cols); }
    void set_row(std::size_t i, const Vec& v);
    void append_row(const Vec& v);

    static Mat identity(u32 p, std::size_t n);
    static Mat from_rows(u32 p, std::size_t cols, const std::vector<Vec>& rs);

    bool operator==(const Mat& o) const { return p == o.p && rows == o.rows && cols == o.cols && a == o.a; }
};

struct RrefResult {
    Mat m;                          // reduced row-echelon form, zero rows dropped
    std::vector<std::size_t> pivots; // pivot column of each remaining row
};

// Unique reduced row-echelon form of the row space; zero rows removed.
RrefResult rref(const Mat& m);

std::size_t span_dim(const Mat& m);

// One solution x of m * x^T = b^T with free variables set to zero, or nullopt.
std::optional<Vec> solve(const Mat& m, const Vec& b);

// Basis (rows) of the right kernel {x : m * x^T = 0}.
Mat kernel(const Mat& m);

// Rows extending `sub` (independent rows, length n) to a basis of F_p^n:
// standard basis vectors at the non-pivot positions, in index order.
Mat complement_basis(const Mat& sub, std::size_t ambient_dim);

// Basis of row_space(a) ∩ row_space(b), in rref (Zassenhaus).
Mat intersect_spans(const Mat& a, const Mat& b);

// rref basis of row_space(a) + row_space(b).
Mat sum_spans(const Mat& a, const Mat& b);

Mat vstack(const Mat& a, const Mat& b);

// v * m  (v a row vector of length m.rows).
Vec vec_apply(const Vec& v, const Mat& m);

Mat mat_mul(const Mat& a, const Mat& b);
Mat transpose(const Mat& m);

// Membership of v in the row space of a *reduced* matrix.
bool in_span(const RrefResult& r, const Vec& v);
bool in_span(const Mat& m, const Vec& v);  // convenience, reduces internally

bool spans_equal(const Mat& a, const Mat& b);

// Coordinates of v in terms of the rows of `basis` (rows independent), or
// nullopt when v is outside the span.
std::optional<Vec> coords_in(const Mat& basis, const Vec& v);

// Inverse of a square matrix, or nullopt when singular.
std::optional<Mat> mat_inverse(const Mat& m);

Mat mat_add(const Mat& a, const Mat& b);
Mat mat_scale(u32 s, const Mat& m);

}  // namespace lazlie

#endif
