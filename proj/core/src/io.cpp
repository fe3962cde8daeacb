#include "lazlie/io.hpp"

#include <cstddef>
#include <fstream>
#include <sstream>
#include <vector>

namespace lazlie {

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
    std::string body = line.substr(0, line.find('#'));
    std::istringstream in(body);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

u64 parse_num(const std::string& t, int line, const std::string& what,
              u64 lo, u64 hi) {
    u64 v = 0;
    if (t.empty()) throw ParseError(line, what + " is empty");
    for (char ch : t) {
        if (ch < '0' || ch > '9')
            throw ParseError(line, what + " is not a number: '" + t + "'");
        v = v * 10 + static_cast<u64>(ch - '0');
        if (v > hi) throw ParseError(line, what + " out of range: '" + t + "'");
    }
    if (v < lo) throw ParseError(line, what + " out of range: '" + t + "'");
    return v;
}

// `key=value` with a fixed expected key.
u64 parse_kv(const std::string& t, int line, const std::string& key,
             u64 lo, u64 hi) {
    std::size_t eq = t.find('=');
    if (eq == std::string::npos || t.substr(0, eq) != key)
        throw ParseError(line, "expected " + key + "=<number>, got '" + t + "'");
    return parse_num(t.substr(eq + 1), line, key, lo, hi);
}

// `<k>:<coef>` term of a bracket or beta line.
std::pair<std::size_t, u32> parse_term(const std::string& t, int line,
                                       std::size_t kmax, u32 p) {
    std::size_t colon = t.find(':');
    if (colon == std::string::npos)
        throw ParseError(line, "expected <index>:<coef>, got '" + t + "'");
    u64 k = parse_num(t.substr(0, colon), line, "target index", 1, kmax);
    u64 c = parse_num(t.substr(colon + 1), line, "coefficient", 1, p - 1);
    return {static_cast<std::size_t>(k - 1), static_cast<u32>(c)};
}

struct LineSource {
    std::istringstream in;
    int line = 0;
    explicit LineSource(const std::string& text) : in(text) {}
    bool next(std::vector<std::string>& toks) {
        std::string raw;
        while (std::getline(in, raw)) {
            ++line;
            toks = tokens_of(raw);
            if (!toks.empty()) return true;
        }
        return false;
    }
};

Vec parse_target(const std::vector<std::string>& toks, std::size_t from,
                 int line, std::size_t dim, u32 p) {
    Vec row = vec_zero(dim);
    std::vector<bool> seen(dim, false);
    for (std::size_t t = from; t < toks.size(); ++t) {
        auto [k, c] = parse_term(toks[t], line, dim, p);
        if (seen[k]) throw ParseError(line, "duplicate target index");
        seen[k] = true;
        row[k] = c;
    }
    return row;
}

std::string render_target(const Vec& row) {
    std::string out;
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k] == 0) continue;
        if (!out.empty()) out += ' ';
        out += std::to_string(k + 1) + ':' + std::to_string(row[k]);
    }
    return out;
}

}  // namespace

Lla parse_lla(const std::string& text) {
    LineSource src(text);
    std::vector<std::string> toks;
    if (!src.next(toks)) throw ParseError(1, "empty input");
    if (toks[0] != "lla" || toks.size() != 4)
        throw ParseError(src.line, "expected header: lla p=<prime> c=<class> dim=<n>");
    u32 p = static_cast<u32>(parse_kv(toks[1], src.line, "p", 3, 1u << 20));
    if (!is_odd_prime(p)) throw ParseError(src.line, "p must be an odd prime");
    int c = static_cast<int>(parse_kv(toks[2], src.line, "c", 1, 64));
    std::size_t dim = static_cast<std::size_t>(parse_kv(toks[3], src.line, "dim", 0, 4096));

    std::vector<std::string> labels;
    std::vector<int> levels;
    bool have_levels = false, have_flag = false;
    std::vector<std::vector<Vec>> frows(static_cast<std::size_t>(c) + 2);
    std::vector<Vec> sc(dim < 2 ? 0 : dim * (dim - 1) / 2, vec_zero(dim));
    std::vector<bool> pair_seen(sc.size(), false);

    while (src.next(toks)) {
        int line = src.line;
        if (toks[0] == "labels") {
            if (!labels.empty()) throw ParseError(line, "duplicate labels line");
            if (toks.size() != dim + 1)
                throw ParseError(line, "labels line needs exactly dim names");
            labels.assign(toks.begin() + 1, toks.end());
            if (dim == 0) throw ParseError(line, "labels line needs exactly dim names");
        } else if (toks[0] == "levels") {
            if (have_levels) throw ParseError(line, "duplicate levels line");
            if (have_flag) throw ParseError(line, "levels conflict with explicit flag rows");
            if (toks.size() != dim + 1)
                throw ParseError(line, "levels line needs exactly dim entries");
            for (std::size_t k = 1; k < toks.size(); ++k)
                levels.push_back(static_cast<int>(
                    parse_num(toks[k], line, "level", 1, static_cast<u64>(c))));
            have_levels = true;
        } else if (toks[0] == "flag") {
            if (have_levels) throw ParseError(line, "flag rows conflict with levels line");
            if (toks.size() != dim + 3 || toks[2] != ":")
                throw ParseError(line, "expected: flag <i> : <dim entries>");
            std::size_t i = static_cast<std::size_t>(
                parse_num(toks[1], line, "flag index", 2, static_cast<u64>(c) + 1));
            Vec row(dim);
            for (std::size_t k = 0; k < dim; ++k)
                row[k] = static_cast<u32>(
                    parse_num(toks[3 + k], line, "flag entry", 0, p - 1));
            frows[i].push_back(row);
            have_flag = true;
        } else if (toks[0] == "bracket") {
            if (toks.size() < 4 || toks[3] != "->")
                throw ParseError(line, "expected: bracket <i> <j> -> <k>:<coef> ...");
            std::size_t i = static_cast<std::size_t>(
                parse_num(toks[1], line, "bracket index", 1, dim));
            std::size_t j = static_cast<std::size_t>(
                parse_num(toks[2], line, "bracket index", 1, dim));
            if (i >= j) throw ParseError(line, "bracket needs i < j");
            std::size_t idx = (i - 1) * dim - (i - 1) * i / 2 + (j - i - 1);
            if (pair_seen[idx]) throw ParseError(line, "duplicate bracket pair");
            pair_seen[idx] = true;
            sc[idx] = parse_target(toks, 4, line, dim, p);
        } else {
            throw ParseError(line, "unknown directive '" + toks[0] + "'");
        }
    }

    if (have_flag) {
        Lla L;
        L.p = p;
        L.c = c;
        L.dim = dim;
        L.labels = labels;
        L.sc = sc;
        L.flag.assign(static_cast<std::size_t>(c) + 2, Mat(p, 0, dim));
        L.flag[1] = Mat::identity(p, dim);
        for (std::size_t i = 2; i < frows.size(); ++i)
            if (!frows[i].empty())
                L.flag[i] = rref(Mat::from_rows(p, dim, frows[i])).m;
        return L;
    }
    if (!have_levels) levels.assign(dim, 1);
    return lla_from_levels(p, c, sc, levels, labels);
}

std::string serialize_lla(const Lla& L) {
    std::ostringstream out;
    out << "lla p=" << L.p << " c=" << L.c << " dim=" << L.dim << '\n';
    if (!L.labels.empty()) {
        out << "labels";
        for (const auto& s : L.labels) {
            if (s.empty() || s.find_first_of(" \t#") != std::string::npos)
                throw std::invalid_argument("label '" + s + "' cannot be serialized");
            out << ' ' << s;
        }
        out << '\n';
    }

    // prefer the levels form whenever it spans the same flag
    std::vector<int> lv(L.dim);
    for (std::size_t k = 0; k < L.dim; ++k) lv[k] = L.level(vec_unit(L.dim, k));
    bool by_levels = true;
    for (int i = 1; i <= L.c + 1 && by_levels; ++i) {
        Mat span(L.p, 0, L.dim);
        for (std::size_t k = 0; k < L.dim; ++k)
            if (lv[k] >= i) span.append_row(vec_unit(L.dim, k));
        by_levels = spans_equal(span, L.flag[static_cast<std::size_t>(i)]);
    }
    if (by_levels && L.dim > 0) {
        out << "levels";
        for (int l : lv) out << ' ' << l;
        out << '\n';
    } else if (!by_levels) {
        for (int i = 2; i <= L.c + 1; ++i) {
            const Mat& m = L.flag[static_cast<std::size_t>(i)];
            for (std::size_t r = 0; r < m.rows; ++r) {
                out << "flag " << i << " :";
                for (std::size_t k = 0; k < L.dim; ++k) out << ' ' << m.at(r, k);
                out << '\n';
            }
        }
    }

    for (std::size_t i = 0; i < L.dim; ++i)
        for (std::size_t j = i + 1; j < L.dim; ++j) {
            const Vec& row = L.sc_at(i, j);
            if (vec_is_zero(row)) continue;
            out << "bracket " << i + 1 << ' ' << j + 1 << " -> "
                << render_target(row) << '\n';
        }
    return out.str();
}

BilinearStruct parse_bilinear(const std::string& text) {
    LineSource src(text);
    std::vector<std::string> toks;
    if (!src.next(toks)) throw ParseError(1, "empty input");
    if (toks[0] != "bilinear" || toks.size() != 4)
        throw ParseError(src.line, "expected header: bilinear p=<prime> dv=<n> dw=<m>");
    u32 p = static_cast<u32>(parse_kv(toks[1], src.line, "p", 3, 1u << 20));
    if (!is_odd_prime(p)) throw ParseError(src.line, "p must be an odd prime");
    std::size_t dv = static_cast<std::size_t>(parse_kv(toks[2], src.line, "dv", 0, 4096));
    std::size_t dw = static_cast<std::size_t>(parse_kv(toks[3], src.line, "dw", 0, 4096));

    BilinearStruct B(p, dv, dw);
    std::vector<bool> pair_seen(B.beta.size(), false);
    while (src.next(toks)) {
        int line = src.line;
        if (toks[0] != "beta")
            throw ParseError(line, "unknown directive '" + toks[0] + "'");
        if (toks.size() < 4 || toks[3] != "->")
            throw ParseError(line, "expected: beta <i> <j> -> <k>:<coef> ...");
        std::size_t i = static_cast<std::size_t>(
            parse_num(toks[1], line, "beta index", 1, dv));
        std::size_t j = static_cast<std::size_t>(
            parse_num(toks[2], line, "beta index", 1, dv));
        if (i >= j) throw ParseError(line, "beta needs i < j");
        std::size_t idx = B.pair_index(i - 1, j - 1);
        if (pair_seen[idx]) throw ParseError(line, "duplicate beta pair");
        pair_seen[idx] = true;
        B.beta[idx] = parse_target(toks, 4, line, dw, p);
    }
    return B;
}

std::string serialize_bilinear(const BilinearStruct& B) {
    std::ostringstream out;
    out << "bilinear p=" << B.p << " dv=" << B.dv << " dw=" << B.dw << '\n';
    for (std::size_t i = 0; i < B.dv; ++i)
        for (std::size_t j = i + 1; j < B.dv; ++j) {
            const Vec& row = B.beta_at(i, j);
            if (vec_is_zero(row)) continue;
            out << "beta " << i + 1 << ' ' << j + 1 << " -> "
                << render_target(row) << '\n';
        }
    return out.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace lazlie
