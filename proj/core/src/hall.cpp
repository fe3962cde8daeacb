#include "lazlie/hall.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace lazlie {

namespace {

u64 ipow(u64 b, u64 e) {
    u64 r = 1;
    while (e--) r *= b;
    return r;
}

int moebius(u64 k) {
    int m = 1;
    for (u64 q = 2; q * q <= k; ++q) {
        if (k % q == 0) {
            k /= q;
            if (k % q == 0) return 0;
            m = -m;
        }
    }
    if (k > 1) m = -m;
    return m;
}

}  // namespace

u64 witt_count(u64 n, u64 d) {
    if (d == 0) return 0;
    i64 acc = 0;
    for (u64 k = 1; k <= d; ++k) {
        if (d % k != 0) continue;
        acc += moebius(k) * static_cast<i64>(ipow(n, d / k));
    }
    if (acc % static_cast<i64>(d) != 0) throw std::logic_error("witt_count: not divisible");
    return static_cast<u64>(acc / static_cast<i64>(d));
}

FreeLie::FreeLie(std::vector<int> weights, int c, u32 p)
    : weights_(std::move(weights)), c_(c), p_(p) {
    if (c_ < 1) throw std::invalid_argument("FreeLie: class must be >= 1");
    if (!is_odd_prime(p_)) throw std::invalid_argument("FreeLie: p must be an odd prime");
    for (int w : weights_)
        if (w < 1) throw std::invalid_argument("FreeLie: weights must be >= 1");
    build();
}

void FreeLie::build() {
    gen_ids_.assign(weights_.size(), -1);
    for (int d = 1; d <= c_; ++d) {
        for (std::size_t k = 0; k < weights_.size(); ++k) {
            if (weights_[k] != d) continue;
            HallMono m;
            m.gen = static_cast<int>(k);
            m.deg = d;
            gen_ids_[k] = static_cast<int>(arena_.size());
            arena_.push_back(m);
        }
        std::vector<std::pair<int, int>> pairs;
        int before = static_cast<int>(arena_.size());
        for (int P = 0; P < before; ++P) {
            for (int Q = 0; Q < P; ++Q) {
                if (arena_[P].deg + arena_[Q].deg != d) continue;
                if (arena_[P].gen < 0 && arena_[P].right > Q) continue;
                pairs.emplace_back(P, Q);
            }
        }
        std::sort(pairs.begin(), pairs.end());
        for (auto [P, Q] : pairs) {
            HallMono m;
            m.left = P;
            m.right = Q;
            m.deg = d;
            pair_id_[{P, Q}] = static_cast<int>(arena_.size());
            arena_.push_back(m);
        }
    }
}

std::string FreeLie::name(int id) const {
    const HallMono& m = mono(id);
    if (m.gen >= 0) {
        if (weights_.size() <= 3) {
            static const char* letters[3] = {"X", "Y", "Z"};
            return letters[m.gen];
        }
        return "X" + std::to_string(m.gen + 1);
    }
    return "[" + name(m.left) + "," + name(m.right) + "]";
}

LiePoly FreeLie::gen(std::size_t k) const {
    LiePoly q;
    q[gen_ids_[k]] = 1;
    return q;
}

LiePoly FreeLie::add(const LiePoly& a, const LiePoly& b) const {
    LiePoly r = a;
    for (const auto& [m, co] : b) {
        u32 s = fp_add(r.count(m) ? r[m] : 0, co, p_);
        if (s == 0)
            r.erase(m);
        else
            r[m] = s;
    }
    return r;
}

LiePoly FreeLie::sub(const LiePoly& a, const LiePoly& b) const {
    return add(a, scale(p_ - 1, b));
}

LiePoly FreeLie::scale(u32 s, const LiePoly& a) const {
    s %= p_;
    LiePoly r;
    if (s == 0) return r;
    for (const auto& [m, co] : a) r[m] = fp_mul(co, s, p_);
    return r;
}

LiePoly FreeLie::bracket_mono_locked(
    int P, int Q, std::map<std::pair<int, int>, LiePoly>& memo) const {
    const HallMono& mp = arena_[static_cast<std::size_t>(P)];
    const HallMono& mq = arena_[static_cast<std::size_t>(Q)];
    if (mp.deg + mq.deg > c_) return {};
    if (P == Q) return {};
    if (P < Q) return scale(p_ - 1, bracket_mono_locked(Q, P, memo));
    auto key = std::make_pair(P, Q);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    LiePoly res;
    if (mp.gen >= 0 || mp.right <= Q) {
        auto pit = pair_id_.find(key);
        if (pit == pair_id_.end()) throw std::logic_error("bracket_mono: missing Hall pair");
        res[pit->second] = 1;
    } else {
        // [[R,S],Q] with S > Q: Jacobi sends it to [[R,Q],S] + [R,[S,Q]].
        // The rewrite chain must not revisit a pair it is still expanding.
        if (!busy_.insert(key).second) throw std::logic_error("bracket_mono: rewrite cycle");
        int R = mp.left, S = mp.right;
        LiePoly acc;
        for (const auto& [m, co] : bracket_mono_locked(R, Q, memo))
            acc = add(acc, scale(co, bracket_mono_locked(m, S, memo)));
        for (const auto& [m, co] : bracket_mono_locked(S, Q, memo))
            acc = add(acc, scale(co, bracket_mono_locked(R, m, memo)));
        busy_.erase(key);
        res = acc;
    }
    memo[key] = res;
    return res;
}

LiePoly FreeLie::bracket_mono(int P, int Q) const {
    std::lock_guard<std::mutex> lock(memo_mu_);
    return bracket_mono_locked(P, Q, memo_);
}

LiePoly FreeLie::bracket(const LiePoly& a, const LiePoly& b) const {
    std::lock_guard<std::mutex> lock(memo_mu_);
    LiePoly acc;
    for (const auto& [m1, c1] : a)
        for (const auto& [m2, c2] : b)
            acc = add(acc, scale(fp_mul(c1, c2, p_), bracket_mono_locked(m1, m2, memo_)));
    return acc;
}

std::pair<int, int> FreeLie::lev_deg(const LiePoly& q) const {
    if (q.empty()) return {c_ + 1, c_ + 1};
    int lo = c_ + 1, hi = 0;
    for (const auto& [m, co] : q) {
        (void)co;
        lo = std::min(lo, mono(m).deg);
        hi = std::max(hi, mono(m).deg);
    }
    return {lo, hi};
}

std::vector<int> FreeLie::degree_slice(int d) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < arena_.size(); ++i)
        if (arena_[i].deg == d) out.push_back(static_cast<int>(i));
    return out;
}

Lla FreeLie::to_lla() const {
    std::size_t n = dim();
    std::vector<Vec> sc;
    sc.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            Vec row = vec_zero(n);
            for (const auto& [m, co] : bracket_mono(static_cast<int>(i), static_cast<int>(j)))
                row[static_cast<std::size_t>(m)] = co;
            sc.push_back(std::move(row));
        }
    }
    std::vector<int> levels(n);
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        levels[i] = arena_[i].deg;
        labels[i] = name(static_cast<int>(i));
    }
    return lla_from_levels(p_, c_, sc, levels, labels);
}

Lla free_lla(std::vector<int> weights, int c, u32 p) {
    return FreeLie(std::move(weights), c, p).to_lla();
}

Mat hom_from_generators(const FreeLie& F, const Lla& target,
                        const std::vector<Vec>& gen_images) {
    if (gen_images.size() != F.ngens())
        throw std::invalid_argument("hom_from_generators: image count mismatch");
    std::vector<Vec> img(F.dim());
    for (std::size_t i = 0; i < F.dim(); ++i) {
        const HallMono& m = F.mono(static_cast<int>(i));
        if (m.gen >= 0)
            img[i] = gen_images[static_cast<std::size_t>(m.gen)];
        else
            img[i] = target.bracket(img[static_cast<std::size_t>(m.left)],
                                    img[static_cast<std::size_t>(m.right)]);
    }
    return Mat::from_rows(target.p, target.dim, img);
}

}  // namespace lazlie
