#pragma once

#include "chenverify/ambient.hpp"

#include <optional>
#include <string>

namespace chenverify {

// Manifold spec files: structured text, one key per line, sections in
// square brackets, indices 1-based, unspecified entries default to zero.
//
//   [manifold]      dim=<int>  domain=<lo,hi>[;<lo,hi>...]
//   [metric]        g_<i>_<j>=<expr in x1..xd>   (upper triangle; diagonal
//                                                 required)
//   [connection]    mode=skewness|explicit
//                   K_<i>_<j>_<k>=<expr>  or  Gamma_<k>_<i>_<j>=<expr>
//   [quaternionic]  J<a>_<i>_<j>=<expr>  omega<a>_<i>=<expr>
//                   c=<real|unknown>
//   [submanifold]   n=<int>  domain=<box>  f_<k>=<expr in u1..un>
//
// A single lo,hi pair in a domain applies to every coordinate. '#' starts a
// comment.

struct SpecFileError : std::runtime_error {
    int line;
    SpecFileError(const std::string& msg, int line_no)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg),
          line(line_no) {}
};

struct SubmanifoldSpec {
    int n = 0;
    DomainBox domain;
    std::vector<std::string> vars;   // u1..un
    std::vector<ExprAst> immersion;  // d components over the chart vars
};

struct ManifoldSpec {
    AmbientModel ambient;
    std::optional<SubmanifoldSpec> submanifold;
};

ManifoldSpec parse_spec_text(const std::string& text,
                             const std::string& name = "spec");
ManifoldSpec read_spec_file(const std::string& path);

std::string write_spec_text(const ManifoldSpec& spec);
void write_spec_file(const ManifoldSpec& spec, const std::string& path);

}  // namespace chenverify
