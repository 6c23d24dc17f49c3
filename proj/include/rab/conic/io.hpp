#pragma once

// Plain-text dump of a ConicProblem, loosely modelled on the CBF benchmark format.
//
//   CONIC 1
//   VAR <n>
//   CON <m>
//   CONES <count>
//   Z <k> | L <k> | Q <k> | S <side>      one line per cone, in order
//   OBJ <nnz>
//   <j> <value>                            nonzero entries of c
//   A <nnz>
//   <i> <j> <value>                        nonzero entries of A
//   B <nnz>
//   <i> <value>                            nonzero entries of b
//
// Indices are zero-based.  Values are written with 17 significant digits so that
// a dump/load round trip is exact.  Lines starting with '#' are ignored.

#include <iosfwd>
#include <string>

#include "rab/conic/problem.hpp"

namespace rab::conic {

void write_problem(std::ostream& os, const ConicProblem& problem);
ConicProblem read_problem(std::istream& is);  // throws InvalidInput on malformed text

void save_problem(const std::string& path, const ConicProblem& problem);
ConicProblem load_problem(const std::string& path);

}  // namespace rab::conic
