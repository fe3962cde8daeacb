// Truncated free associative algebra on letters 0..n-1 over F_p, used as the
// ground-truth model: Lie brackets computed here as xy - yx on words are
// independent of the Hall rewriter and of the series machinery under test.

#ifndef LAZLIE_TESTS_WORDS_HPP
#define LAZLIE_TESTS_WORDS_HPP

#include <map>
#include <vector>

#include "lazlie/fp.hpp"

namespace lazlie::testsupport {

class WordAlg {
  public:
    using Word = std::vector<int>;
    using Elt = std::map<std::size_t, u32>;  // word id -> coefficient

    WordAlg(int n, int c, u32 p) : WordAlg(std::vector<int>(static_cast<std::size_t>(n), 1), c, p) {}

    // letters carry weights; truncation is by total weight, not length
    WordAlg(std::vector<int> weights, int c, u32 p)
        : weights_(std::move(weights)), n_(static_cast<int>(weights_.size())), c_(c), p_(p) {
        Word w;
        grow(w, 0);
    }

    u32 p() const { return p_; }
    std::size_t nwords() const { return words_.size(); }
    const Word& word(std::size_t id) const { return words_[id]; }

    Elt letter(int k) const {
        Elt e;
        e[index_.at({k})] = 1;
        return e;
    }

    Elt add(const Elt& a, const Elt& b) const {
        Elt r = a;
        for (const auto& [w, co] : b) {
            u32 s = fp_add(r.count(w) ? r[w] : 0, co, p_);
            if (s == 0)
                r.erase(w);
            else
                r[w] = s;
        }
        return r;
    }

    Elt scale(u32 s, const Elt& a) const {
        Elt r;
        s %= p_;
        if (s == 0) return r;
        for (const auto& [w, co] : a) r[w] = fp_mul(co, s, p_);
        return r;
    }

    // concatenation product, truncated past total weight c
    Elt mul(const Elt& a, const Elt& b) const {
        Elt r;
        for (const auto& [wa, ca] : a)
            for (const auto& [wb, cb] : b) {
                const Word& u = words_[wa];
                const Word& v = words_[wb];
                if (weight(u) + weight(v) > c_) continue;
                Word w = u;
                w.insert(w.end(), v.begin(), v.end());
                std::size_t id = index_.at(w);
                u32 s = fp_add(r.count(id) ? r[id] : 0, fp_mul(ca, cb, p_), p_);
                if (s == 0)
                    r.erase(id);
                else
                    r[id] = s;
            }
        return r;
    }

    Elt comm(const Elt& a, const Elt& b) const {
        return add(mul(a, b), scale(p_ - 1, mul(b, a)));
    }

    Vec to_vec(const Elt& a) const {
        Vec v(words_.size(), 0);
        for (const auto& [w, co] : a) v[w] = co;
        return v;
    }

  private:
    std::vector<int> weights_;
    int n_, c_;
    u32 p_;
    std::vector<Word> words_;
    std::map<Word, std::size_t> index_;

    int weight(const Word& w) const {
        int s = 0;
        for (int k : w) s += weights_[static_cast<std::size_t>(k)];
        return s;
    }

    void grow(Word& w, int wt) {
        if (!w.empty()) {
            index_[w] = words_.size();
            words_.push_back(w);
        }
        for (int k = 0; k < n_; ++k) {
            if (wt + weights_[static_cast<std::size_t>(k)] > c_) continue;
            w.push_back(k);
            grow(w, wt + weights_[static_cast<std::size_t>(k)]);
            w.pop_back();
        }
    }
};

}  // namespace lazlie::testsupport

#endif
