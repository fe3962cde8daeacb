// Line-oriented text format for flagged algebras and bilinear pairing
// structures.  '#' starts a comment, blank lines are skipped, and the
// serializer emits one canonical form that parses back bit-exactly.

#ifndef LAZLIE_IO_HPP
#define LAZLIE_IO_HPP

#include <stdexcept>
#include <string>

#include "lazlie/lla.hpp"
#include "lazlie/nil2.hpp"

namespace lazlie {

// Grammar failure with the 1-based source line.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_),
          line(line_) {}
};

// `lla p=<prime> c=<class> dim=<n>`
// `labels <name> ...`                      optional, dim names
// `levels <l1> ... <ln>`                   flag as level spans
// `flag <i> : <dim entries>`               explicit row of P_i, i >= 2
// `bracket <i> <j> -> <k>:<coef> ...`      1-based, i < j, zero pairs omitted
// Exactly one of levels / flag rows may appear.  Structural soundness
// beyond the grammar is validate's job, not the parser's.
Lla parse_lla(const std::string& text);
std::string serialize_lla(const Lla& L);

// `bilinear p=<prime> dv=<n> dw=<m>`
// `beta <i> <j> -> <k>:<coef> ...`         1-based, i < j, zero pairs omitted
BilinearStruct parse_bilinear(const std::string& text);
std::string serialize_bilinear(const BilinearStruct& B);

// Whole-file helpers; throw std::runtime_error with the path on failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace lazlie

#endif  // LAZLIE_IO_HPP
