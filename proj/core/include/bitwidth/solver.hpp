#pragma once

// Satisfiability backends for bound queries "objective > bound" (or <).

#include "bitwidth/bnb.hpp"
#include "bitwidth/constraint_system.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bw {

/// Solver crashed, could not be started, or answered something other than
/// sat/unsat/unknown.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual SatResult check(const ConstraintSystem& cs, Side side, const Rational& bound) = 0;
  virtual std::string name() const = 0;
};

/// Runs one child process per query: the SMT-LIB script goes to its standard
/// input, the first token of its standard output is the verdict. A query
/// that exceeds the timeout is killed and reported as Unknown.
class ExternalSolver : public SolverBackend {
 public:
  /// `command` is split on spaces; a bare "z3" gets "-in" appended.
  explicit ExternalSolver(std::string command, double timeout_seconds = 30.0);

  SatResult check(const ConstraintSystem& cs, Side side, const Rational& bound) override;
  std::string name() const override { return command_; }

  /// Sends a raw script and returns the verdict.
  SatResult run_script(const std::string& script);
  std::size_t queries() const { return queries_; }
  std::size_t timeouts() const { return timeouts_; }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  double timeout_;
  std::size_t queries_ = 0;
  std::size_t timeouts_ = 0;
};

class BnbBackend : public SolverBackend {
 public:
  explicit BnbBackend(std::size_t max_nodes = 200000) : max_nodes_(max_nodes) {}
  SatResult check(const ConstraintSystem& cs, Side side, const Rational& bound) override {
    return bnb_decide(cs, side, bound, max_nodes_);
  }
  std::string name() const override { return "bnb"; }

 private:
  std::size_t max_nodes_;
};

/// Solver command from BITWIDTH_SOLVER, else "z3" if it is on PATH.
std::optional<std::string> find_solver();

}  // namespace bw
