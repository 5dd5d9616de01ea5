#include "bitwidth/pipeline_json.hpp"
#include "bitwidth/suite.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace bw;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

size_t position(const std::vector<size_t>& order, size_t stage) {
  return static_cast<size_t>(std::find(order.begin(), order.end(), stage) - order.begin());
}

PipelineError parse_error(const std::string& text) {
  try {
    parse_pipeline(text);
  } catch (const PipelineError& e) {
    return e;
  }
  ADD_FAILURE() << "no PipelineError for " << text;
  return PipelineError("", "", "");
}

const char* kUsmHead = R"({"name": "u", "params": {"R": 8, "C": 8}, "stages": [
  {"name": "img", "kind": "input", "range": [0, 255]},
)";

}  // namespace

TEST(Pipeline, HcdHasTwelveNodes) {
  Pipeline p = build_hcd();
  EXPECT_EQ(p.size(), 12u);
  EXPECT_EQ(p.stage(0).name, "img");
  EXPECT_TRUE(p.stage("Ix").is_stencil());
  EXPECT_TRUE(p.stage("harris").is_pointwise());
}

TEST(Pipeline, SingleInput) {
  Pipeline p = parse_pipeline(R"({"name": "one", "params": {"R": 4, "C": 4},
    "stages": [{"name": "img", "kind": "input", "range": [0, 255]}]})");
  EXPECT_EQ(p.size(), 1u);
  EXPECT_EQ(p.edge_count(), 0u);
  EXPECT_EQ(topo_order(p), std::vector<size_t>{0});
}

TEST(Pipeline, DanglingReferenceNamesTheStage) {
  auto e = parse_error(std::string(kUsmHead) +
                       R"({"name": "sharpen", "kind": "pointwise", "expr": {"op": "ref", "stage": "blurz"}}]})");
  EXPECT_EQ(e.stage(), "sharpen");
  EXPECT_NE(std::string(e.what()).find("blurz"), std::string::npos);
}

TEST(Pipeline, EvenKernelRejected) {
  auto e = parse_error(std::string(kUsmHead) + R"({"name": "b", "kind": "stencil", "input": "img",
      "kernel": {"rows": 1, "cols": 2, "coeffs": [[1, 1]]}}]})");
  EXPECT_EQ(e.stage(), "b");
  EXPECT_NE(e.path().find("kernel"), std::string::npos);
}

TEST(Pipeline, SchemaErrorsCarryPath) {
  auto e = parse_error(std::string(kUsmHead) + R"({"name": "b", "kind": "stencil", "input": "img",
      "kernel": {"rows": 1, "cols": 3, "coeffs": [[1, "x", 1]]}}]})");
  EXPECT_EQ(e.path(), "stages[1].kernel.coeffs[0][1]");
  auto d = parse_error(std::string(kUsmHead) + R"({"name": "img", "kind": "input", "range": [0, 1]}]})");
  EXPECT_NE(std::string(d.what()).find("duplicate"), std::string::npos);
  auto k = parse_error(std::string(kUsmHead) + R"({"name": "q", "kind": "blur"}]})");
  EXPECT_EQ(k.stage(), "q");
  EXPECT_THROW(parse_pipeline("{not json"), PipelineError);
}

TEST(Pipeline, CycleDetected) {
  auto e = parse_error(R"({"name": "c", "params": {"R": 4, "C": 4}, "stages": [
    {"name": "a", "kind": "pointwise", "expr": {"op": "ref", "stage": "b"}},
    {"name": "b", "kind": "pointwise", "expr": {"op": "ref", "stage": "a"}}]})");
  EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos);
}

TEST(Pipeline, PointwiseOffsetsRejected) {
  auto e = parse_error(std::string(kUsmHead) +
                       R"({"name": "s", "kind": "pointwise", "expr": {"op": "ref", "stage": "img", "di": 1, "dj": 0}}]})");
  EXPECT_EQ(e.stage(), "s");
}

TEST(Pipeline, ConstantsAreExact) {
  Pipeline p = parse_pipeline(std::string(kUsmHead) + R"(
    {"name": "s", "kind": "pointwise", "expr": {"op": "mul", "args": [{"op": "const", "value": 0.04},
                                                 {"op": "ref", "stage": "img"}]}}]})");
  const Expr& e = p.stage("s").pointwise().expr;
  EXPECT_EQ(e.args()[0].value(), Rational(1, 25));
}

TEST(TopoOrder, RespectsEdgesAndDeclarationOrder) {
  Pipeline hcd = build_hcd();
  auto order = topo_order(hcd);
  ASSERT_EQ(order.size(), hcd.size());
  EXPECT_LT(position(order, hcd.index_of("img")), position(order, hcd.index_of("Ix")));
  EXPECT_LT(position(order, hcd.index_of("det")), position(order, hcd.index_of("harris")));
  for (const auto& p : {build_hcd(), build_usm(), build_dus(), build_of(4)}) {
    auto o = topo_order(p);
    for (size_t s = 0; s < p.size(); ++s)
      for (size_t pred : p.predecessors(s)) EXPECT_LT(position(o, pred), position(o, s));
  }
  Pipeline dus = build_dus();
  std::vector<std::string> names;
  for (size_t s : topo_order(dus)) names.push_back(dus.stage(s).name);
  EXPECT_EQ(names, (std::vector<std::string>{"img", "Dx", "Dy", "Ux", "Uy"}));
}

TEST(RewriteSquares, Examples) {
  Expr ix = Expr::ref("Ix");
  EXPECT_EQ(rewrite_squares(Expr::mul(ix, ix)), Expr::pow(ix, 2));
  Expr mixed = Expr::mul(ix, Expr::ref("Iy"));
  EXPECT_EQ(rewrite_squares(mixed), mixed);
  EXPECT_EQ(rewrite_squares(Expr::pow(ix, 2)), Expr::pow(ix, 2));
}

TEST(RewriteSquares, PreservesValuesAndIsIdempotent) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> num(-50, 50);
  Expr a = Expr::ref("a"), b = Expr::ref("b");
  const Expr exprs[] = {
      Expr::mul(a, a),
      Expr::sub(Expr::mul(Expr::mul(a, a), b), Expr::mul(b, b)),
      Expr::div(Expr::mul(a, a), Expr::add(Expr::mul(b, b), Expr::constant(1))),
      Expr::mul(Expr::mul(a, b), Expr::mul(a, b)),
  };
  for (const auto& e : exprs) {
    Expr r = rewrite_squares(e);
    EXPECT_EQ(rewrite_squares(r), r);
    Program before = compile(e), after = compile(r);
    ExactOps ops;
    for (int k = 0; k < 50; ++k) {
      std::vector<Rational> leaves_b, leaves_a;
      Rational va(num(rng), 7), vb(num(rng), 3);
      for (const auto& ref : before.leaves) leaves_b.push_back(ref.stage == "a" ? va : vb);
      for (const auto& ref : after.leaves) leaves_a.push_back(ref.stage == "a" ? va : vb);
      EXPECT_EQ(run(before, std::span<const Rational>(leaves_b), ops),
                run(after, std::span<const Rational>(leaves_a), ops));
    }
  }
}

TEST(PipelineJson, RoundTripsEveryBenchmark) {
  for (const auto& p : {build_hcd(), build_usm(), build_dus(), build_of(0), build_of(4)}) {
    std::string text = serialize_pipeline(p);
    Pipeline q = parse_pipeline(text);
    EXPECT_EQ(p, q) << p.name();
    EXPECT_EQ(serialize_pipeline(q), text);
  }
}

TEST(PipelineJson, GoldenFilesAreByteStable) {
  const std::pair<const char*, BenchmarkId> cases[] = {
      {"hcd.json", {BenchmarkKind::HCD, 0}},
      {"usm.json", {BenchmarkKind::USM, 0}},
      {"dus.json", {BenchmarkKind::DUS, 0}},
      {"of4.json", {BenchmarkKind::OF, 4}},
  };
  for (const auto& [file, id] : cases)
    EXPECT_EQ(serialize_pipeline(build(id)), read_file(std::string(BITWIDTH_GOLDEN_DIR) + "/" + file)) << file;
}

TEST(StageDomains, InteriorOnly) {
  Pipeline hcd = build_hcd(16, 16);
  auto d = stage_domains(hcd, 16, 16);
  EXPECT_EQ(d[hcd.index_of("img")], (Rect{0, 16, 0, 16}));
  EXPECT_EQ(d[hcd.index_of("Ix")], (Rect{1, 15, 1, 15}));
  EXPECT_EQ(d[hcd.index_of("Sxx")], (Rect{2, 14, 2, 14}));
  EXPECT_EQ(d[hcd.index_of("harris")], (Rect{2, 14, 2, 14}));
}
