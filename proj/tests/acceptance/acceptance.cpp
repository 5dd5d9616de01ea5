// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "bitwidth/affine.hpp"
#include "bitwidth/bnb.hpp"
#include "bitwidth/bound_search.hpp"
#include "bitwidth/evaluate.hpp"
#include "bitwidth/interval_analysis.hpp"
#include "bitwidth/precision_search.hpp"
#include "bitwidth/profiler.hpp"
#include "bitwidth/simulator.hpp"
#include "bitwidth/smtlib.hpp"
#include "bitwidth/suite.hpp"

#include "samples.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

using namespace bw;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& text) {
    if (!pass) return;
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

std::vector<int> alphas(const Pipeline& p, const AnalysisResult& r, const std::vector<std::string>& names) {
  std::vector<int> out;
  for (const auto& n : names) out.push_back(r.at(p, n).alpha);
  return out;
}

std::vector<Pipeline> all_benchmarks(int size = 256) {
  return {build_hcd(size, size), build_usm(size, size), build_dus(size, size), build_of(4, size, size)};
}

AnalysisResult smt_bnb(const Pipeline& p) {
  BnbBackend bnb;
  return analyze_smt(p, bnb);
}

Outcome hcd_interval_row() {
  Outcome o;
  auto t0 = Clock::now();
  Pipeline p = build_hcd();
  auto r = analyze_interval(p);
  double dt = seconds_since(t0);
  std::vector<std::string> names{"img", "Ix", "Iy", "Ixx", "Ixy", "Iyy", "Sxx", "Sxy", "Syy", "det", "trace", "harris"};
  std::vector<int> want{8, 8, 8, 13, 14, 13, 16, 17, 16, 33, 17, 34};
  auto got = alphas(p, r, names);
  if (got != want) o.fail("alpha " + join(got));
  if (dt >= 1.0) o.fail("took " + std::to_string(dt) + " s");
  o.note("alpha " + join(got));
  return o;
}

Outcome usm_dus_interval_rows() {
  Outcome o;
  auto t0 = Clock::now();
  Pipeline usm = build_usm();
  Pipeline dus = build_dus();
  auto ru = analyze_interval(usm);
  auto rd = analyze_interval(dus);
  double dt = seconds_since(t0);
  auto u = alphas(usm, ru, {"img", "blurx", "blury", "sharpen", "mask"});
  auto d = alphas(dus, rd, {"img", "Dx", "Dy", "Ux", "Uy"});
  if (std::vector<int>(u.begin(), u.begin() + 4) != std::vector<int>{8, 8, 8, 10}) o.fail("usm " + join(u));
  if (u[4] != 10) o.fail("usm mask " + std::to_string(u[4]) + " (expected 10)");
  if (d != std::vector<int>(5, 8)) o.fail("dus " + join(d));
  if (dt >= 1.0) o.fail("took " + std::to_string(dt) + " s");
  o.note("usm " + join(u) + ", dus " + join(d));
  return o;
}

bool close_rel(const Rational& got, double want) {
  double g = to_double(got);
  if (want == 0) return g == 0;
  return std::abs(g - want) <= 1e-3 * std::abs(want);
}

Outcome of_interval_ranges() {
  Outcome o;
  auto t0 = Clock::now();
  Pipeline p = build_of(4);
  auto r = analyze_interval(p);
  double dt = seconds_since(t0);
  struct Row {
    const char* stage;
    double lo, hi;
  };
  const Row rows[] = {
      {"img1", 0, 255},           {"It", -255, 255},
      {"Ix", -85, 85},            {"Ixx", 0, 7225},
      {"denom", 4, 14454},        {"Common_x", -21.25, 21.25},
      {"Vx0", -5418.75, 5418.75}, {"Avx0", -5418.75, 5418.75},
      {"Common0", -921443, 921443}, {"Vx1", -1.95861e7, 1.95861e7},
      {"Avx1", -1.95861e7, 1.95861e7}, {"Common1", -3.32964e9, 3.32964e9},
      {"Vx2", -7.07743e10, 7.07743e10}, {"Avx2", -7.07743e10, 7.07743e10},
      {"Common2", -1.20317e13, 1.20317e13}, {"Vx3", -2.55743e14, 2.55743e14},
      {"Avx3", -2.55743e14, 2.55743e14}, {"Common3", -4.34763e16, 4.34763e16},
      {"Vx4", -9.24127e17, 9.24127e17},
  };
  for (const auto& row : rows) {
    const auto& range = r.at(p, row.stage).range;
    if (!close_rel(range.lo, row.lo) || !close_rel(range.hi, row.hi))
      o.fail(std::string(row.stage) + " " + to_string(range));
  }
  auto chain = alphas(p, r, of_vx_chain(4));
  std::vector<int> want{14, 14, 21, 26, 26, 33, 38, 38, 45, 49, 49, 57, 61};
  if (chain != want) o.fail("chain " + join(chain));
  if (dt >= 2.0) o.fail("took " + std::to_string(dt) + " s");
  o.note("chain " + join(chain));
  return o;
}

void check_z3ra(Outcome& o, const Pipeline& p, const AnalysisResult& smt, const std::string& label) {
  std::vector<int> reference{7, 7, 14, 9, 9, 16, 10, 10, 17, 10, 10, 17, 11};
  auto chain = alphas(p, smt, of_vx_chain(4));
  for (size_t k = 0; k < chain.size(); ++k)
    if (std::abs(chain[k] - reference[k]) > 1) o.fail(label + " chain " + join(chain));
  if (smt.at(p, "Vx4").alpha > 13) o.fail(label + " Vx4 alpha " + std::to_string(smt.at(p, "Vx4").alpha));
  if (smt.at(p, "Common_x").alpha != 1) o.fail(label + " Common_x alpha " + std::to_string(smt.at(p, "Common_x").alpha));
  for (const auto& s : smt.stages)
    if (s.fallback) o.fail(label + " fallback: " + s.note);
  o.note(label + " " + join(chain));
}

Outcome of_z3ra_containment() {
  Outcome o;
  Pipeline p = build_of(4);
  auto ia = analyze_interval(p);
  if (ia.at(p, "Vx4").alpha != 61) o.fail("interval Vx4 alpha " + std::to_string(ia.at(p, "Vx4").alpha));
  auto t0 = Clock::now();
  auto smt = smt_bnb(p);
  double dt = seconds_since(t0);
  check_z3ra(o, p, smt, "bnb");
  if (dt >= 300) o.fail("bnb took " + std::to_string(dt) + " s");
  std::ostringstream os;
  os.precision(3);
  os << "bnb " << dt << " s";
  o.note(os.str());
  if (auto cmd = find_solver()) {
    ExternalSolver ext(*cmd);
    BnbBackend fallback;
    SmtOptions opts;
    opts.fallback = &fallback;
    check_z3ra(o, p, analyze_smt(p, ext, opts), "external");
  }
  return o;
}

Outcome affine_parity() {
  Outcome o;
  for (const auto& p : all_benchmarks()) {
    auto ia = analyze_interval(p);
    auto aa = analyze_affine(p);
    for (size_t s = 0; s < p.size(); ++s) {
      if (ia.stages[s].alpha != aa.stages[s].alpha)
        o.fail(p.name() + "." + p.stage(s).name + " affine " + std::to_string(aa.stages[s].alpha) +
               " vs interval " + std::to_string(ia.stages[s].alpha));
      if (!ia.stages[s].range.contains(aa.stages[s].range))
        o.fail(p.name() + "." + p.stage(s).name + " affine range wider than interval");
    }
  }
  Pipeline diff("diff", 8, 8,
                {make_input("x", Interval(-3, 5)),
                 make_pointwise("d", Expr::sub(Expr::ref("x"), Expr::ref("x")))});
  auto aa = analyze_affine(diff);
  if (!(aa.at(diff, "d").range == Interval(0, 0))) o.fail("x-x gives " + to_string(aa.at(diff, "d").range));
  if (!(analyze_interval(diff).at(diff, "d").range == Interval(-8, 8))) o.fail("x-x interval baseline");
  o.note("4 benchmarks, x-x = [0, 0]");
  return o;
}

// Saturation counts. Interval ranges compose stage by stage, so they bound the
// quantized dataflow at any β, and the affine formats have the same widths.
// Solver ranges bound the exact dataflow only; coarse quantization of OF's
// Common_x pushes later stages past them, which is counted separately.
struct SaturationTally {
  std::size_t strict = 0;
  std::size_t smt_coarse = 0;
};

Outcome soundness_suite() {
  Outcome o;
  constexpr int kSamples = 100;
  std::size_t checked = 0;
  SaturationTally sat;
  for (const auto& p : all_benchmarks(16)) {
    auto ia = analyze_interval(p);
    auto aa = analyze_affine(p);
    auto smt = smt_bnb(p);
    const AnalysisResult* methods[] = {&ia, &aa, &smt};
    const TypeAssignment strict[] = {make_assignment(ia, 0), make_assignment(aa, 0), make_assignment(ia, 8),
                                     make_assignment(aa, 8), make_assignment(smt, 8)};
    const TypeAssignment coarse = make_assignment(smt, 0);
    for (const auto& sample : fixtures::mixed_samples(p, kSamples, 16, 1000)) {
      StagePlanes ref = eval_reference(p, sample);
      for (size_t s = 0; s < p.size(); ++s)
        for (const auto& v : ref[s].data) {
          ++checked;
          for (const auto* m : methods)
            if (!m->stages[s].range.contains(v)) {
              o.fail(p.name() + "." + p.stage(s).name + " value " + to_decimal(v) + " escapes " +
                     m->method + " " + to_string(m->stages[s].range));
              return o;
            }
        }
      for (const auto& t : strict) sat.strict += simulate(p, t, sample).total_overflows();
      sat.smt_coarse += simulate(p, coarse, sample).total_overflows();
    }
  }
  if (sat.strict != 0) o.fail(std::to_string(sat.strict) + " saturation events under sound formats");
  o.note(std::to_string(checked) + " stage values, " + std::to_string(kSamples) +
         " images per benchmark, 0 saturations (smt ranges at beta 0: " + std::to_string(sat.smt_coarse) + ")");
  return o;
}

Outcome profiler_ordering() {
  Outcome o;
  for (const auto& p : all_benchmarks(24)) {
    auto ia = analyze_interval(p);
    auto smt = smt_bnb(p);
    auto stats = profile(p, fixtures::mixed_samples(p, 12, 24, 77));
    for (size_t s = 0; s < p.size(); ++s) {
      int mp = stats.stages[s].alpha_max, sm = smt.stages[s].alpha, iv = ia.stages[s].alpha;
      if (!(mp <= sm && sm <= iv))
        o.fail(p.name() + "." + p.stage(s).name + " maxP " + std::to_string(mp) + " smt " +
               std::to_string(sm) + " interval " + std::to_string(iv));
      const auto& c = stats.stages[s].cumulative;
      for (size_t b = 1; b < c.size(); ++b)
        if (c[b] < c[b - 1]) o.fail(p.stage(s).name + " cumulative not monotone");
      if (c.empty() || c.back() != 1.0) o.fail(p.stage(s).name + " cumulative does not end at 1");
    }
  }
  o.note("4 benchmarks");
  return o;
}

void check_assignment(Outcome& o, QualityEvaluator& eval, const QualityTarget& target,
                      const BetaAssignment& a, const std::string& label) {
  if (!target.met(eval.quality(a.beta))) o.fail(label + " assignment misses target");
  for (int b : a.beta)
    if (b > a.uniform_beta || b < 0) o.fail(label + " refined beta above uniform");
}

Outcome beta_search_contract() {
  Outcome o;
  {
    Pipeline p = build_dus(32, 32);
    QualityEvaluator eval(p, analyze_interval(p), fixtures::synthetic_samples(p, 3, 32, 5), Metric::Psnr);
    QualityTarget target{Metric::Psnr, std::numeric_limits<double>::infinity()};
    auto a = search_beta(eval, target, 12);
    check_assignment(o, eval, target, a, "dus");
    int mx = *std::max_element(a.beta.begin(), a.beta.end());
    if (mx > 12) o.fail("dus max beta " + std::to_string(mx));
    o.note("dus beta " + join(a.beta));
  }
  {
    Pipeline p = build_hcd(48, 48);
    QualityEvaluator eval(p, analyze_interval(p), fixtures::synthetic_samples(p, 4, 48, 11), Metric::Corners);
    double q0 = eval.quality(0);
    if (!(q0 > 99.0)) o.fail("hcd accuracy at beta 0 is " + std::to_string(q0));
    QualityTarget target{Metric::Corners, 99.9};
    auto a = search_beta(eval, target, 16);
    check_assignment(o, eval, target, a, "hcd");
    std::ostringstream os;
    os.precision(4);
    os << "hcd beta0 " << q0 << "%";
    o.note(os.str());
  }
  {
    Pipeline p = build_usm(32, 32);
    QualityEvaluator eval(p, analyze_interval(p), fixtures::synthetic_samples(p, 3, 32, 21), Metric::Mask);
    QualityTarget target{Metric::Mask, 0.001};
    check_assignment(o, eval, target, search_beta(eval, target, 16), "usm");
  }
  {
    Pipeline p = build_of(1, 16, 16);
    QualityEvaluator eval(p, analyze_interval(p), fixtures::synthetic_samples(p, 2, 16, 31), Metric::Aae);
    QualityTarget target{Metric::Aae, 0.5};
    check_assignment(o, eval, target, search_beta(eval, target, 16), "of");
  }
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  auto cmd = find_solver();
  if (!cmd) {
    o.fail("no external SMT solver (set BITWIDTH_SOLVER or put z3 on PATH)");
    return o;
  }
  ExternalSolver ext(*cmd);
  const Rational eps(1, 16);
  BoundSearchConfig cfg;
  cfg.stop = StopRule::Width;
  cfg.epsilon = eps;
  int systems = 0;
  for (const auto& p : all_benchmarks()) {
    auto prior = smt_bnb(p).ranges();
    for (size_t s = 0; s < p.size(); ++s) {
      if (!p.stage(s).is_pointwise()) continue;
      ConstraintSystem cs = build_constraints(p, s, prior);
      if (cs.sources().size() > 6) continue;
      ++systems;
      Interval enclosure = cs.evaluate(std::span<const Interval>(cs.source_box()))[static_cast<size_t>(cs.objective)];
      for (Side side : {Side::Upper, Side::Lower}) {
        Rational b = bnb_bound(cs, side, BnbOptions{eps, 200000}).bound;
        Rational e = search_bound(cs, side, cfg, ext, enclosure).bound;
        if (abs(b - e) > 2 * eps)
          o.fail(p.name() + "." + p.stage(s).name + " " + std::string(to_string(side)) + " bnb " +
                 to_decimal(b) + " external " + to_decimal(e));
      }
    }
  }
  Pipeline of0 = build_of(0);
  ConstraintSystem cx = build_constraints(of0, of0.index_of("Common_x"), analyze_interval(of0).ranges());
  SatResult at1 = ext.run_script(emit_smtlib(cx, Side::Upper, 1));
  SatResult at01 = ext.run_script(emit_smtlib(cx, Side::Upper, Rational(1, 10)));
  if (at1 != SatResult::Unsat) o.fail("Common_x > 1 is " + std::string(to_string(at1)));
  if (at01 != SatResult::Sat) o.fail("Common_x > 0.1 is " + std::string(to_string(at01)));
  o.note(std::to_string(systems) + " systems, solver " + *cmd);
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"HCD interval row", hcd_interval_row},
      {"USM/DUS interval rows", usm_dus_interval_rows},
      {"OF interval ranges", of_interval_ranges},
      {"OF solver-refined containment", of_z3ra_containment},
      {"Affine parity", affine_parity},
      {"Soundness suite", soundness_suite},
      {"Profiler bound ordering", profiler_ordering},
      {"Beta search contract", beta_search_contract},
      {"Oracle equivalence", oracle_equivalence},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    auto t0 = Clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::ostringstream line;
    line.precision(3);
    line << (o.pass ? "PASS" : "FAIL") << "  " << index << ". " << name << "  [" << std::fixed
         << seconds_since(t0) << " s]  " << o.detail;
    std::cout << line.str() << std::endl;
    if (!o.pass) ++failures;
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << "\n";
  return failures == 0 ? 0 : 1;
}
