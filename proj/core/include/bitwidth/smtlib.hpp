#pragma once

#include "bitwidth/constraint_system.hpp"

#include <string>

namespace bw {

/// SMT-LIB 2 (QF_NRA) script asking whether the objective can exceed
/// `bound` (Upper) or fall below it (Lower). Deterministic byte for byte.
std::string emit_smtlib(const ConstraintSystem& cs, Side side, const Rational& bound);

/// Rational as an SMT-LIB real term, e.g. "(- (/ 1 12))".
std::string smt_real(const Rational& value);

}  // namespace bw
