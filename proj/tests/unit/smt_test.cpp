#include "bitwidth/bound_search.hpp"
#include "bitwidth/fixed_point.hpp"
#include "bitwidth/interval_analysis.hpp"
#include "bitwidth/smtlib.hpp"
#include "bitwidth/suite.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <sys/stat.h>
#include <unistd.h>

using namespace bw;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConstraintSystem common_x() {
  Pipeline p = build_of(0);
  return build_constraints(p, p.index_of("Common_x"), analyze_interval(p).ranges());
}

Pipeline small(Expr e, Interval x) {
  return Pipeline("t", 8, 8, {make_input("x", x), make_pointwise("y", std::move(e))});
}

ConstraintSystem system_of(const Pipeline& p) {
  return build_constraints(p, p.size() - 1, analyze_interval(p).ranges());
}

std::vector<std::string> names(const Pipeline& p, const DepSet& d) {
  std::vector<std::string> out;
  for (const auto& e : d) out.push_back(p.stage(e.stage).name);
  return out;
}

// Executable shell script in a per-test temporary directory.
class FakeSolver {
 public:
  explicit FakeSolver(const std::string& body) {
    dir_ = fs::temp_directory_path() / ("bw-fake-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::create_directories(dir_);
    path_ = dir_ / "solver.sh";
    std::ofstream(path_) << "#!/bin/sh\n" << body << "\n";
    ::chmod(path_.c_str(), 0755);
  }
  ~FakeSolver() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  std::string command() const { return path_.string(); }
  fs::path dir() const { return dir_; }

 private:
  static inline int counter_ = 0;
  fs::path dir_, path_;
};

}  // namespace

TEST(DepHat, Examples) {
  Pipeline of = build_of(0);
  EXPECT_EQ(names(of, dep_hat(of, of.index_of("Common_x"))), (std::vector<std::string>{"Ix", "Iy"}));
  EXPECT_EQ(names(of, dep_hat(of, of.index_of("Vx0"))), (std::vector<std::string>{"img1", "img2", "Ix", "Iy"}));
  EXPECT_EQ(names(of, dep_hat(of, of.index_of("img1"))), (std::vector<std::string>{"img1"}));
  EXPECT_EQ(names(of, dep_hat(of, of.index_of("Ix"))), (std::vector<std::string>{"Ix"}));
}

TEST(Dep, ReachesInputPixels) {
  Pipeline hcd = build_hcd();
  auto d = dep(hcd, hcd.index_of("Ix"));
  EXPECT_EQ(d.size(), 6u);  // Sobel has six non-zero taps
  auto s = dep(hcd, hcd.index_of("Sxx"));
  EXPECT_EQ(s.size(), 25u);
  for (const auto& e : s) EXPECT_EQ(hcd.stage(e.stage).name, "img");
}

TEST(BuildConstraints, CommonX) {
  ConstraintSystem cs = common_x();
  std::vector<std::string> vars;
  for (const auto& v : cs.vars) vars.push_back(v.name);
  EXPECT_EQ(vars, (std::vector<std::string>{"Ix", "Iy", "Ixx", "Iyy", "denom", "Common_x"}));
  ASSERT_EQ(cs.sources().size(), 2u);
  EXPECT_EQ(*cs.vars[0].range, Interval(-85, 85));
  EXPECT_EQ(cs.defs.size(), 4u);
  EXPECT_EQ(cs.vars[static_cast<size_t>(cs.objective)].name, "Common_x");
  Rational vals[] = {2, 0};
  EXPECT_EQ(cs.evaluate(std::span<const Rational>(vals)).back(), Rational(1, 4));
}

TEST(BuildConstraints, SharedSourceAcrossDefinitions) {
  Pipeline of = build_of(1);
  ConstraintSystem cs = build_constraints(of, of.index_of("Vx1"), analyze_interval(of).ranges());
  int ix = 0;
  for (const auto& v : cs.vars) ix += v.name == "Ix";
  EXPECT_EQ(ix, 1);
  int common = -1, cx = -1, ixv = -1;
  for (size_t k = 0; k < cs.vars.size(); ++k) {
    if (cs.vars[k].name == "Common0") common = static_cast<int>(k);
    if (cs.vars[k].name == "Common_x") cx = static_cast<int>(k);
    if (cs.vars[k].name == "Ix") ixv = static_cast<int>(k);
  }
  ASSERT_GE(common, 0);
  ASSERT_GE(cx, 0);
  ASSERT_GE(ixv, 0);
  int readers = 0;
  for (const auto& d : cs.defs)
    if (d.var == common || d.var == cx)
      readers += std::count(d.leaf_vars.begin(), d.leaf_vars.end(), ixv) > 0;
  EXPECT_EQ(readers, 2);
}

TEST(BuildConstraints, InputOnlyStage) {
  Pipeline p = small(Expr::mul(Expr::constant(2), Expr::ref("x")), Interval(0, 255));
  ConstraintSystem cs = system_of(p);
  EXPECT_EQ(cs.sources().size(), 1u);
  EXPECT_EQ(cs.defs.size(), 1u);
  EXPECT_EQ(*cs.vars[0].range, Interval(0, 255));
}

TEST(SmtLib, CommonXGolden) {
  std::string script = emit_smtlib(common_x(), Side::Upper, 1);
  EXPECT_EQ(script, emit_smtlib(common_x(), Side::Upper, 1));
  EXPECT_EQ(script, read_file(fs::path(BITWIDTH_GOLDEN_DIR) / "common_x_upper_1.smt2"));
  EXPECT_NE(emit_smtlib(common_x(), Side::Lower, Rational(-1, 10)).find("(assert (< Common_x (- (/ 1.0 10.0))))"),
            std::string::npos);
}

TEST(SmtLib, RealsAndSymbols) {
  EXPECT_EQ(smt_real(Rational(-1, 12)), "(- (/ 1.0 12.0))");
  EXPECT_EQ(smt_real(7), "7.0");
  Pipeline p("t", 4, 4, {make_input("in.1", Interval(0, 1)), make_pointwise("out", Expr::ref("in.1"))});
  std::string s = emit_smtlib(system_of(p), Side::Upper, 2);
  EXPECT_NE(s.find("(declare-const |in.1| Real)"), std::string::npos);
}

TEST(Bnb, Examples) {
  const Rational eps(1, 16);
  auto cx = bnb_bound(common_x(), Side::Upper);
  EXPECT_GE(cx.bound, Rational(1, 4));
  EXPECT_LE(cx.bound, Rational(1, 4) + eps);
  EXPECT_FALSE(cx.capped);

  Pipeline diff = small(Expr::sub(Expr::ref("x"), Expr::ref("x")), Interval(-85, 85));
  auto d = bnb_bound(system_of(diff), Side::Upper);
  EXPECT_GE(d.bound, 0);
  EXPECT_LE(d.bound, eps);

  Pipeline sq = small(Expr::mul(Expr::ref("x"), Expr::ref("x")), Interval(-85, 85));
  auto lo = bnb_bound(system_of(sq), Side::Lower);
  auto hi = bnb_bound(system_of(sq), Side::Upper);
  EXPECT_LE(lo.bound, 0);
  EXPECT_GE(lo.bound, -eps);
  EXPECT_GE(hi.bound, 7225);
  EXPECT_LE(hi.bound, 7225 + eps);
}

TEST(Bnb, Decide) {
  EXPECT_EQ(bnb_decide(common_x(), Side::Upper, 1), SatResult::Unsat);
  EXPECT_EQ(bnb_decide(common_x(), Side::Upper, Rational(1, 10)), SatResult::Sat);
  EXPECT_EQ(bnb_decide(common_x(), Side::Lower, Rational(-1, 2)), SatResult::Unsat);
  EXPECT_EQ(bnb_decide(common_x(), Side::Lower, Rational(-1, 10)), SatResult::Sat);
  EXPECT_EQ(bnb_decide(common_x(), Side::Upper, Rational(1, 4) - Rational(1, 1000000), 1), SatResult::Unknown);
}

TEST(SearchBound, CommonXAndSingleSource) {
  BnbBackend bnb;
  BoundSearchConfig cfg;
  cfg.stop = StopRule::Width;
  auto r = search_bound(common_x(), Side::Upper, cfg, bnb);
  EXPECT_GE(r.bound, Rational(19, 100));
  EXPECT_LE(r.bound, Rational(1, 4) + cfg.epsilon);
  EXPECT_GE(r.bound, Rational(1, 4));
  EXPECT_EQ(alpha_from_range(-r.bound, r.bound), 1);

  Pipeline id = small(Expr::ref("x"), Interval(0, 255));
  auto s = search_bound(system_of(id), Side::Upper, BoundSearchConfig{}, bnb);
  EXPECT_EQ(s.bound, 255);
  EXPECT_LE(s.queries, 1);
}

TEST(SearchBound, VxZero) {
  Pipeline of = build_of(0);
  BnbBackend bnb;
  auto smt = analyze_smt(of, bnb);
  const auto& v = smt.at(of, "Vx0");
  EXPECT_GE(v.range.hi, Rational(255, 4));
  EXPECT_LT(v.range.hi, 64);
  EXPECT_EQ(v.alpha, 7);
}

TEST(SearchBound, SoundOnRandomAssignments) {
  // Every point-wise stage of every benchmark: exact evaluation at random
  // source points never leaves the solver-refined range.
  std::mt19937_64 rng(23);
  for (const auto& p : {build_hcd(), build_usm(), build_dus(), build_of(4)}) {
    BnbBackend bnb;
    auto smt = analyze_smt(p, bnb);
    auto prior = smt.ranges();
    for (size_t s = 0; s < p.size(); ++s) {
      if (!p.stage(s).is_pointwise()) continue;
      ConstraintSystem cs = build_constraints(p, s, prior);
      auto box = cs.source_box();
      std::vector<Rational> point(box.size());
      for (int k = 0; k < 2000; ++k) {
        for (size_t v = 0; v < box.size(); ++v) {
          std::uniform_int_distribution<int> t(0, 1024);
          point[v] = box[v].lo + box[v].width() * Rational(t(rng), 1024);
        }
        Rational val = cs.evaluate(std::span<const Rational>(point))[static_cast<size_t>(cs.objective)];
        ASSERT_TRUE(smt.stages[s].range.contains(val)) << p.name() << "." << p.stage(s).name;
      }
    }
  }
}

TEST(AnalyzeSmt, TightensAndContainsBlowUp) {
  for (const auto& p : {build_hcd(), build_usm(), build_dus()}) {
    BnbBackend bnb;
    auto smt = analyze_smt(p, bnb);
    auto ia = analyze_interval(p);
    for (size_t s = 0; s < p.size(); ++s) {
      EXPECT_TRUE(ia.stages[s].range.contains(smt.stages[s].range));
      EXPECT_LE(std::abs(smt.stages[s].alpha - ia.stages[s].alpha), 1);
    }
  }
  Pipeline of = build_of(4);
  BnbBackend bnb;
  auto smt = analyze_smt(of, bnb);
  auto ia = analyze_interval(of);
  for (int k = 1; k <= 4; ++k) {
    std::string cur = "Vx" + std::to_string(k), prev = "Vx" + std::to_string(k - 1);
    EXPECT_LE(smt.at(of, cur).alpha - smt.at(of, prev).alpha, 2);
    EXPECT_GE(ia.at(of, cur).alpha - ia.at(of, prev).alpha, 10);
  }
}

TEST(ExternalSolver, VerdictsFromFakeSolver) {
  FakeSolver sat("cat > /dev/null; echo sat");
  FakeSolver unsat("cat > /dev/null; echo unsat");
  FakeSolver unknown("cat > /dev/null; echo unknown");
  EXPECT_EQ(ExternalSolver(sat.command()).check(common_x(), Side::Upper, 1), SatResult::Sat);
  EXPECT_EQ(ExternalSolver(unsat.command()).check(common_x(), Side::Upper, 1), SatResult::Unsat);
  EXPECT_EQ(ExternalSolver(unknown.command()).check(common_x(), Side::Upper, 1), SatResult::Unknown);
}

TEST(ExternalSolver, ReceivesTheScript) {
  FakeSolver spy("cat > \"$(dirname \"$0\")/seen.smt2\"; echo unsat");
  ExternalSolver ext(spy.command());
  ext.check(common_x(), Side::Upper, 1);
  EXPECT_EQ(read_file(spy.dir() / "seen.smt2"), emit_smtlib(common_x(), Side::Upper, 1));
  EXPECT_EQ(ext.queries(), 1u);
}

TEST(ExternalSolver, CrashAndGarbageRaise) {
  FakeSolver crash("cat > /dev/null; exit 7");
  FakeSolver garbage("cat > /dev/null; echo '(error \"boom\")'");
  EXPECT_THROW(ExternalSolver(crash.command()).check(common_x(), Side::Upper, 1), SolverError);
  EXPECT_THROW(ExternalSolver(garbage.command()).check(common_x(), Side::Upper, 1), SolverError);
  EXPECT_THROW(ExternalSolver("/nonexistent/solver").check(common_x(), Side::Upper, 1), SolverError);
}

TEST(ExternalSolver, TimeoutIsUnknownAndKeepsSoundBound) {
  FakeSolver slow("cat > /dev/null; sleep 5; echo unsat");
  ExternalSolver ext(slow.command(), 0.2);
  auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(ext.check(common_x(), Side::Upper, 1), SatResult::Unknown);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 3.0);
  EXPECT_EQ(ext.timeouts(), 1u);

  // Every query times out: the bound never moves off the sound initial side.
  BoundSearchConfig cfg;
  cfg.max_queries = 3;
  Interval initial(Rational(-85, 4), Rational(85, 4));
  auto r = search_bound(common_x(), Side::Upper, cfg, ext, initial);
  EXPECT_EQ(r.bound, initial.hi);
  EXPECT_EQ(r.unknowns, r.queries);
}

TEST(AnalyzeSmt, SolverFailureFallsBack) {
  FakeSolver crash("cat > /dev/null; exit 1");
  ExternalSolver ext(crash.command());
  Pipeline of = build_of(0);
  auto plain = analyze_smt(of, ext);
  const auto& cx = plain.at(of, "Common_x");
  EXPECT_TRUE(cx.fallback);
  EXPECT_EQ(cx.range, analyze_interval(of).at(of, "Common_x").range);

  BnbBackend bnb;
  SmtOptions opts;
  opts.fallback = &bnb;
  auto fb = analyze_smt(of, ext, opts);
  EXPECT_TRUE(fb.at(of, "Common_x").fallback);
  EXPECT_EQ(fb.at(of, "Common_x").alpha, 1);

  opts.strict = true;
  EXPECT_THROW(analyze_smt(of, ext, opts), SolverError);
}

TEST(ExternalSolver, AgreesWithBnbWhenAvailable) {
  auto cmd = find_solver();
  if (!cmd) GTEST_SKIP() << "no SMT solver installed";
  ExternalSolver ext(*cmd);
  EXPECT_EQ(ext.run_script(emit_smtlib(common_x(), Side::Upper, 1)), SatResult::Unsat);
  EXPECT_EQ(ext.run_script(emit_smtlib(common_x(), Side::Upper, Rational(1, 10))), SatResult::Sat);
  Pipeline empty("t", 4, 4, {make_input("x", Interval(0, 1)), make_pointwise("y", Expr::ref("x"))});
  EXPECT_EQ(ext.check(system_of(empty), Side::Upper, 2), SatResult::Unsat);
  BoundSearchConfig cfg;
  cfg.stop = StopRule::Width;
  Rational a = search_bound(common_x(), Side::Upper, cfg, ext).bound;
  Rational b = bnb_bound(common_x(), Side::Upper).bound;
  EXPECT_LE(abs(a - b), 2 * cfg.epsilon);
}
