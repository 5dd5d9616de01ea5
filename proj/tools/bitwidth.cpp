#include "bitwidth/affine.hpp"
#include "bitwidth/bound_search.hpp"
#include "bitwidth/interval_analysis.hpp"
#include "bitwidth/pipeline_json.hpp"
#include "bitwidth/precision_search.hpp"
#include "bitwidth/profiler.hpp"
#include "bitwidth/report.hpp"
#include "bitwidth/simulator.hpp"
#include "bitwidth/smtlib.hpp"
#include "bitwidth/suite.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

namespace fs = std::filesystem;
using namespace bw;

namespace {

enum Exit { kOk = 0, kUsage = 1, kAnalysis = 2, kSolver = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SourceOptions {
  std::string benchmark;
  std::string pipeline_file;
};

struct SolverOptions {
  std::string solver;
  bool no_solver = false;
  bool strict = false;
  double timeout = 30.0;
  std::string epsilon = "1/16";
  std::string stop = "bits";
};

struct SampleOptions {
  std::string images;
  int synthesize = 0;
  std::uint64_t seed = 1;
  int size = 64;
};

struct RunConfig {
  SourceOptions source;
  SolverOptions solver;
  SampleOptions samples;
  std::vector<std::string> methods{"interval"};
  std::string out_dir = ".";
  std::string metric;
  std::string target;
  std::string alpha_from = "interval";
  int beta_max = 16;
  int beta = 0;
  std::string rounding = "truncate";
  std::string overflow = "saturate";
  std::string stage;
  std::string side = "upper";
  std::string bound;
  std::string output;
  std::string report_file;
  std::string format = "text";
};

void add_source(CLI::App* cmd, SourceOptions& s) {
  auto* b = cmd->add_option("--benchmark", s.benchmark, "Built-in pipeline: hcd, usm, dus, of:<k>");
  auto* f = cmd->add_option("--pipeline", s.pipeline_file, "Pipeline JSON file")->check(CLI::ExistingFile);
  b->excludes(f);
  f->excludes(b);
}

void add_solver(CLI::App* cmd, SolverOptions& s) {
  cmd->add_option("--solver", s.solver, "SMT solver command (overrides BITWIDTH_SOLVER)");
  cmd->add_flag("--no-solver", s.no_solver, "Use the built-in branch-and-bound oracle");
  cmd->add_flag("--strict-solver", s.strict, "Fail instead of falling back when the solver fails");
  cmd->add_option("--timeout", s.timeout, "Per-query solver timeout in seconds")->capture_default_str();
  cmd->add_option("--epsilon", s.epsilon, "Bound search resolution")->capture_default_str();
  cmd->add_option("--stop", s.stop, "Bound search stop rule: bits or width")
      ->check(CLI::IsMember({"bits", "width"}))
      ->capture_default_str();
}

void add_samples(CLI::App* cmd, SampleOptions& s) {
  auto* i = cmd->add_option("--images", s.images, "Directory of 8-bit PGM images");
  auto* n = cmd->add_option("--synthesize", s.synthesize, "Number of synthetic textured images");
  i->excludes(n);
  n->excludes(i);
  cmd->add_option("--seed", s.seed, "Seed for synthetic images")->capture_default_str();
  cmd->add_option("--size", s.size, "Side length of synthetic images")->capture_default_str();
}

Pipeline load_pipeline(const SourceOptions& s) {
  if (!s.benchmark.empty()) return build(parse_benchmark(s.benchmark));
  if (s.pipeline_file.empty()) throw UsageError("one of --benchmark or --pipeline is required");
  std::ifstream in(s.pipeline_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pipeline(ss.str());
}

std::vector<ImageSample> load_samples(const Pipeline& p, const SampleOptions& s) {
  std::vector<ImageSample> out;
  if (!s.images.empty()) {
    for (const auto& path : list_pgm(s.images))
      out.push_back(make_sample(p, read_pgm(path), path.filename().string()));
    if (out.empty()) throw ImageError("no .pgm files in " + s.images);
  } else if (s.synthesize > 0) {
    for (int k = 0; k < s.synthesize; ++k) {
      auto seed = s.seed + static_cast<std::uint64_t>(k);
      out.push_back(make_sample(p, synthesize(s.size, s.size, seed), "synthetic-" + std::to_string(seed)));
    }
  } else {
    throw UsageError("one of --images or --synthesize is required");
  }
  return out;
}

std::string samples_hash(const std::vector<ImageSample>& samples) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (const auto& s : samples)
    for (const auto& img : s.inputs) {
      mix(static_cast<std::uint64_t>(img.rows));
      mix(static_cast<std::uint64_t>(img.cols));
      for (int px : img.pixels) mix(static_cast<std::uint64_t>(px));
    }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

struct SolverSetup {
  std::unique_ptr<SolverBackend> primary;
  std::unique_ptr<BnbBackend> fallback;
  std::string description;
};

SolverSetup make_solver(const SolverOptions& o) {
  SolverSetup s;
  s.fallback = std::make_unique<BnbBackend>();
  if (o.no_solver) {
    s.description = "bnb";
    return s;
  }
  std::optional<std::string> cmd = o.solver.empty() ? find_solver() : std::optional(o.solver);
  if (!cmd) {
    if (o.strict) throw SolverError("no SMT solver found (set --solver or BITWIDTH_SOLVER)");
    std::cerr << "warning: no SMT solver found; using the built-in branch-and-bound oracle\n";
    s.description = "bnb";
    return s;
  }
  s.primary = std::make_unique<ExternalSolver>(*cmd, o.timeout);
  s.description = *cmd;
  return s;
}

BoundSearchConfig search_config(const SolverOptions& o) {
  BoundSearchConfig c;
  c.epsilon = parse_rational(o.epsilon);
  if (c.epsilon <= 0) throw UsageError("--epsilon must be positive");
  c.stop = o.stop == "width" ? StopRule::Width : StopRule::BitwidthStable;
  return c;
}

AnalysisResult run_smt(const Pipeline& p, const SolverOptions& o, std::string* solver_name) {
  SolverSetup s = make_solver(o);
  SmtOptions opts;
  opts.search = search_config(o);
  opts.strict = o.strict;
  if (solver_name) *solver_name = s.description;
  if (!s.primary) return analyze_smt(p, *s.fallback, opts);
  opts.fallback = o.strict ? nullptr : s.fallback.get();
  return analyze_smt(p, *s.primary, opts);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_report(const BitwidthReport& r, const std::string& dir) {
  fs::path base = fs::path(dir) / r.pipeline;
  write_file(base.string() + ".report.json", render(r, ReportFormat::Json));
  write_file(base.string() + ".report.txt", render(r, ReportFormat::Text));
  write_file(base.string() + ".report.csv", render(r, ReportFormat::Csv));
  std::cout << render(r, ReportFormat::Text);
}

// Ranges that set α for simulation and β search.
AnalysisResult alpha_source(const Pipeline& p, const RunConfig& c,
                            const std::vector<ImageSample>& samples) {
  if (c.alpha_from == "interval") return analyze_interval(p);
  if (c.alpha_from == "affine") return analyze_affine(p);
  if (c.alpha_from == "smt") return run_smt(p, c.solver, nullptr);
  ProfileStats stats = profile(p, samples);
  AnalysisResult r;
  r.method = "maxP";
  for (const auto& s : stats.stages) r.stages.push_back(make_stage_range(s.observed_hull()));
  return r;
}

int cmd_analyze(const RunConfig& c) {
  Pipeline p = load_pipeline(c.source);
  BitwidthReport r = make_report(p);
  for (const auto& m : c.methods) {
    if (m == "interval") {
      r.add(analyze_interval(p));
    } else if (m == "affine") {
      r.add(analyze_affine(p));
    } else if (m == "smt") {
      std::string solver;
      r.add(run_smt(p, c.solver, &solver));
      r.set_meta("solver", solver);
      r.set_meta("epsilon", c.solver.epsilon);
      r.set_meta("stop", c.solver.stop);
    } else {
      throw UsageError("unknown method '" + m + "' (expected interval, affine or smt)");
    }
  }
  write_report(r, c.out_dir);
  return kOk;
}

int cmd_profile(const RunConfig& c) {
  Pipeline p = load_pipeline(c.source);
  auto samples = load_samples(p, c.samples);
  ProfileStats stats = profile(p, samples);
  BitwidthReport r = make_report(p);
  r.add(stats);
  r.set_meta("samples", std::to_string(samples.size()));
  r.set_meta("sample_hash", samples_hash(samples));
  r.set_meta("avgP_rounding", "half-up");
  write_report(r, c.out_dir);

  nlohmann::ordered_json doc;
  doc["pipeline"] = p.name();
  doc["samples"] = stats.sample_ids;
  std::string csv = "stage,bits,fraction\n";
  for (size_t s = 0; s < p.size(); ++s) {
    const auto& sp = stats.stages[s];
    nlohmann::ordered_json js;
    js["stage"] = p.stage(s).name;
    js["alpha_max"] = sp.alpha_max;
    js["alpha_avg"] = sp.alpha_avg;
    js["alpha_per_sample"] = sp.alpha_per_sample;
    js["cumulative"] = sp.cumulative;
    doc["stages"].push_back(js);
    for (size_t b = 0; b < sp.cumulative.size(); ++b) {
      std::ostringstream f;
      f.precision(9);
      f << sp.cumulative[b];
      csv += p.stage(s).name + "," + std::to_string(b) + "," + f.str() + "\n";
    }
  }
  fs::path base = fs::path(c.out_dir) / p.name();
  write_file(base.string() + ".profile.json", doc.dump(2) + "\n");
  write_file(base.string() + ".profile.csv", csv);
  return kOk;
}

double parse_target(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "+inf") return std::numeric_limits<double>::infinity();
  try {
    size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("--target must be a number or 'inf'");
}

int cmd_search_beta(const RunConfig& c) {
  Pipeline p = load_pipeline(c.source);
  QualityTarget target{parse_metric(c.metric), parse_target(c.target)};
  auto samples = load_samples(p, c.samples);
  AnalysisResult alpha = alpha_source(p, c, samples);
  QualityEvaluator eval(p, alpha, samples, target.metric, parse_rounding(c.rounding),
                        parse_overflow(c.overflow));
  BetaAssignment a = search_beta(eval, target, c.beta_max);
  BitwidthReport r = make_report(p);
  r.add(alpha);
  r.beta = a.beta;
  r.set_meta("metric", std::string(to_string(target.metric)));
  r.set_meta("target", c.target);
  r.set_meta("uniform_beta", std::to_string(a.uniform_beta));
  std::ostringstream q;
  q.precision(9);
  q << a.quality;
  r.set_meta("quality", q.str());
  r.set_meta("evaluations", std::to_string(eval.evaluations()));
  r.set_meta("rounding", c.rounding);
  r.set_meta("overflow", c.overflow);
  r.set_meta("sample_hash", samples_hash(samples));
  write_report(r, c.out_dir);
  return kOk;
}

int cmd_simulate(const RunConfig& c) {
  Pipeline p = load_pipeline(c.source);
  auto samples = load_samples(p, c.samples);
  AnalysisResult alpha = alpha_source(p, c, samples);
  TypeAssignment t = make_assignment(alpha, c.beta, parse_rounding(c.rounding), parse_overflow(c.overflow));
  nlohmann::ordered_json doc;
  doc["pipeline"] = p.name();
  for (size_t s = 0; s < p.size(); ++s) doc["formats"][p.stage(s).name] = to_string(t.formats[s]);
  std::vector<std::size_t> overflows(p.size(), 0);
  std::vector<StagePlanes> ref, test;
  for (const auto& sample : samples) {
    SimulationResult sim = simulate(p, t, sample);
    for (size_t s = 0; s < p.size(); ++s) overflows[s] += sim.overflows[s];
    ref.push_back(eval_reference(p, sample));
    test.push_back(std::move(sim.values));
  }
  for (size_t s = 0; s < p.size(); ++s) doc["overflows"][p.stage(s).name] = overflows[s];
  double q = pipeline_quality(p, Metric::Psnr, ref, test);
  doc["psnr"] = std::isinf(q) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(q);

  // Output stage of the first sample, clipped to 8 bits.
  const auto& last = test.front().back();
  Image img(last.domain.rows(), last.domain.cols());
  for (int i = 0; i < img.rows; ++i)
    for (int j = 0; j < img.cols; ++j)
      img.at(i, j) = std::clamp(static_cast<int>(to_double(last.at(last.domain.r0 + i, last.domain.c0 + j))), 0, 255);
  fs::path base = fs::path(c.out_dir) / p.name();
  write_file(base.string() + ".simulate.json", doc.dump(2) + "\n");
  write_file(base.string() + ".output.pgm", format_pgm(img));
  std::cout << doc.dump(2) << "\n";
  return kOk;
}

int cmd_emit_smt(const RunConfig& c) {
  Pipeline p = load_pipeline(c.source);
  if (!p.has_stage(c.stage)) throw UsageError("unknown stage '" + c.stage + "'");
  size_t s = p.index_of(c.stage);
  if (!p.stage(s).is_pointwise()) throw UsageError("emit-smt needs a point-wise stage");
  auto ia = analyze_interval(p);
  ConstraintSystem cs = build_constraints(p, s, ia.ranges());
  Side side = c.side == "lower" ? Side::Lower : Side::Upper;
  Rational bound = c.bound.empty() ? (side == Side::Upper ? ia.stages[s].range.hi : ia.stages[s].range.lo)
                                   : parse_rational(c.bound);
  std::string script = emit_smtlib(cs, side, bound);
  if (c.output.empty())
    std::cout << script;
  else
    write_file(c.output, script);
  return kOk;
}

int cmd_report(const RunConfig& c) {
  std::ifstream in(c.report_file);
  std::stringstream ss;
  ss << in.rdbuf();
  BitwidthReport r = parse_report(ss.str());
  ReportFormat f = c.format == "json" ? ReportFormat::Json : c.format == "csv" ? ReportFormat::Csv : ReportFormat::Text;
  std::cout << render(r, f);
  return kOk;
}

int cmd_export(const RunConfig& c) {
  Pipeline p = load_pipeline(c.source);
  std::string text = serialize_pipeline(p);
  if (c.output.empty())
    std::cout << text;
  else
    write_file(c.output, text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integral and fractional bitwidth analysis for image-processing pipelines"};
  app.require_subcommand(1);
  RunConfig c;

  auto* analyze = app.add_subcommand("analyze", "Static range analysis (interval, affine, smt)");
  add_source(analyze, c.source);
  add_solver(analyze, c.solver);
  analyze->add_option("--method", c.methods, "Comma-separated methods")->delimiter(',')->capture_default_str();
  analyze->add_option("--out", c.out_dir, "Directory for report files")->capture_default_str();

  auto* prof = app.add_subcommand("profile", "Profile-driven bitwidths from sample images");
  add_source(prof, c.source);
  add_samples(prof, c.samples);
  prof->add_option("--out", c.out_dir, "Directory for report files")->capture_default_str();

  auto* search = app.add_subcommand("search-beta", "Fractional bitwidth search for a quality target");
  add_source(search, c.source);
  add_solver(search, c.solver);
  add_samples(search, c.samples);
  search->add_option("--metric", c.metric, "corners, mask, psnr or aae")->required();
  search->add_option("--target", c.target, "Quality threshold (number or inf)")->required();
  search->add_option("--alpha-from", c.alpha_from, "interval, affine, smt or profile")
      ->check(CLI::IsMember({"interval", "affine", "smt", "profile"}))
      ->capture_default_str();
  search->add_option("--beta-max", c.beta_max, "Largest uniform beta tried")->capture_default_str();
  search->add_option("--rounding", c.rounding, "truncate or nearest-even")->capture_default_str();
  search->add_option("--overflow", c.overflow, "saturate or wrap")->capture_default_str();
  search->add_option("--out", c.out_dir, "Directory for report files")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Fixed-point simulation with uniform beta");
  add_source(sim, c.source);
  add_solver(sim, c.solver);
  add_samples(sim, c.samples);
  sim->add_option("--alpha-from", c.alpha_from, "interval, affine, smt or profile")
      ->check(CLI::IsMember({"interval", "affine", "smt", "profile"}))
      ->capture_default_str();
  sim->add_option("--beta", c.beta, "Fractional bits for every stage")->capture_default_str();
  sim->add_option("--rounding", c.rounding, "truncate or nearest-even")->capture_default_str();
  sim->add_option("--overflow", c.overflow, "saturate or wrap")->capture_default_str();
  sim->add_option("--out", c.out_dir, "Directory for output files")->capture_default_str();

  auto* emit = app.add_subcommand("emit-smt", "Print the SMT-LIB query for one stage bound");
  add_source(emit, c.source);
  emit->add_option("--stage", c.stage, "Point-wise stage")->required();
  emit->add_option("--side", c.side, "upper or lower")->check(CLI::IsMember({"upper", "lower"}))->capture_default_str();
  emit->add_option("--bound", c.bound, "Bound to test (default: interval bound)");
  emit->add_option("-o,--output", c.output, "Write to file instead of stdout");

  auto* rep = app.add_subcommand("report", "Re-render a saved JSON report");
  rep->add_option("file", c.report_file, "Report JSON file")->required()->check(CLI::ExistingFile);
  rep->add_option("--format", c.format, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();

  auto* bench = app.add_subcommand("benchmark", "Built-in benchmark pipelines");
  bench->require_subcommand(1);
  auto* exp = bench->add_subcommand("export", "Write a benchmark's pipeline JSON");
  exp->add_option("--benchmark", c.source.benchmark, "hcd, usm, dus or of:<k>")->required();
  exp->add_option("-o,--output", c.output, "Write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) return cmd_analyze(c);
    if (*prof) return cmd_profile(c);
    if (*search) return cmd_search_beta(c);
    if (*sim) return cmd_simulate(c);
    if (*emit) return cmd_emit_smt(c);
    if (*rep) return cmd_report(c);
    if (*exp) return cmd_export(c);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolver;
  } catch (const TargetUnreachable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAnalysis;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAnalysis;
  }
  return kUsage;
}
