#pragma once

#include <string>

#include "lagphase/grid.hpp"

// Line-oriented problem-spec format:
//
//   setting    = real2 | real3 | complex1 | complex2
//   box        = <d lower coords> <d upper coords>
//   resolution = <nodes per axis>
//   delta      = <supercriticality margin>
//   h          = expr:<expression> | csv:<path>
//   phi        = expr:<expression> | csv:<path>
//   usub       = expr:<expression> | csv:<path>
//
// '#' starts a comment; expressions use x1..x4 and the function set of
// expr.hpp.  CSV paths are resolved relative to base_dir.

namespace lagphase {

class ProblemParseError : public std::runtime_error {
 public:
  ProblemParseError(const std::string& message, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses and fully validates a ProblemSpec.  Throws ProblemParseError
/// for syntax problems and std::invalid_argument for invariant
/// violations (with the violated inequality and node named).
ProblemSpec ParseProblem(const std::string& text,
                         const std::string& base_dir = ".");

ProblemSpec LoadProblem(const std::string& path);

}  // namespace lagphase
