#include "bitwidth/affine.hpp"
#include "bitwidth/interval_analysis.hpp"
#include "bitwidth/precision_search.hpp"
#include "bitwidth/profiler.hpp"
#include "bitwidth/report.hpp"
#include "bitwidth/suite.hpp"

#include "samples.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace bw;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int ceil_log2_int(int n) {
  int k = 0;
  while ((1 << k) < n) ++k;
  return k;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

class DusSearch : public ::testing::Test {
 protected:
  Pipeline p = build_dus(32, 32);
  QualityEvaluator eval{p, analyze_interval(p), fixtures::synthetic_samples(p, 3, 32, 5), Metric::Psnr};
};

TEST_F(DusSearch, ExactTargetGivesTenFractionalBits) {
  QualityTarget target{Metric::Psnr, kInf};
  EXPECT_EQ(uniform_beta_search(eval, target, 12), 10);
  auto a = refine_beta(eval, target, 10);
  EXPECT_EQ(a.beta, (std::vector<int>{0, 3, 6, 8, 10}));
  EXPECT_TRUE(std::isinf(eval.quality(a.beta)));
  EXPECT_EQ(a.uniform_beta, 10);
}

TEST_F(DusSearch, EvaluationCountIsLinearInStages) {
  QualityTarget target{Metric::Psnr, kInf};
  auto a = search_beta(eval, target, 16);
  int bound = ceil_log2_int(16) + 2;
  for (size_t s = 0; s < p.size(); ++s) bound += ceil_log2_int(a.uniform_beta) + 1;
  EXPECT_LE(static_cast<int>(eval.evaluations()), bound);
}

TEST_F(DusSearch, LooseTargetMetAtZero) {
  QualityTarget target{Metric::Psnr, 10};
  auto a = search_beta(eval, target, 12);
  EXPECT_EQ(a.uniform_beta, 0);
  EXPECT_EQ(a.beta, std::vector<int>(p.size(), 0));
}

TEST_F(DusSearch, UnreachableTarget) {
  QualityTarget target{Metric::Psnr, kInf};
  try {
    uniform_beta_search(eval, target, 2);
    FAIL();
  } catch (const TargetUnreachable& e) {
    EXPECT_EQ(e.beta_max(), 2);
    EXPECT_TRUE(std::isfinite(e.best_quality()));
  }
}

TEST_F(DusSearch, CurveIsDeterministicAndMonotone) {
  auto c1 = quality_curve(eval, 0, 12);
  auto c2 = quality_curve(eval, 0, 12);
  EXPECT_EQ(c1, c2);
  for (size_t k = 1; k < c1.size(); ++k) EXPECT_GE(c1[k].second, c1[k - 1].second);
}

TEST(PrecisionSearch, HcdRefinementShape) {
  Pipeline p = build_hcd(48, 48);
  QualityEvaluator eval(p, analyze_interval(p), fixtures::synthetic_samples(p, 3, 48, 11), Metric::Corners);
  QualityTarget target{Metric::Corners, 99.99};
  auto a = search_beta(eval, target, 16);
  EXPECT_TRUE(target.met(eval.quality(a.beta)));
  for (int b : a.beta) EXPECT_LE(b, a.uniform_beta);
  // Later stages need no more fractional bits than the derivative stages.
  int early = std::max({a.beta[p.index_of("Ix")], a.beta[p.index_of("Iy")]});
  EXPECT_LE(a.beta[p.index_of("harris")], early);
  EXPECT_LE(a.beta[p.index_of("det")], early);
}

TEST(PrecisionSearch, UsmMaskCurveDecreases) {
  Pipeline p = build_usm(32, 32);
  QualityEvaluator eval(p, analyze_interval(p), fixtures::synthetic_samples(p, 3, 32, 21), Metric::Mask);
  auto curve = quality_curve(eval, 0, 14);
  EXPECT_GT(curve.front().second, 0.0);
  EXPECT_EQ(curve.back().second, 0.0);
  for (size_t k = 1; k < curve.size(); ++k) EXPECT_LE(curve[k].second, curve[k - 1].second);
  QualityTarget target{Metric::Mask, 0.001};
  auto a = search_beta(eval, target, 16);
  EXPECT_TRUE(target.met(eval.quality(a.beta)));
}

TEST(PrecisionSearch, FlowAaeContract) {
  Pipeline p = build_of(1, 16, 16);
  QualityEvaluator eval(p, analyze_affine(p), fixtures::synthetic_samples(p, 2, 16, 31), Metric::Aae);
  QualityTarget target{Metric::Aae, 0.5};
  auto a = search_beta(eval, target, 16);
  EXPECT_TRUE(target.met(eval.quality(a.beta)));
  for (int b : a.beta) EXPECT_LE(b, a.uniform_beta);
}

TEST(Report, TextRowsAndColumns) {
  Pipeline hcd = build_hcd();
  BitwidthReport r = make_report(hcd);
  std::string empty = render(r, ReportFormat::Text);
  EXPECT_NE(empty.find("harris"), std::string::npos);
  EXPECT_EQ(empty.find("interval"), std::string::npos);
  r.add(analyze_interval(hcd));
  std::string text = render(r, ReportFormat::Text);
  std::istringstream lines(text);
  std::string line;
  bool found = false;
  while (std::getline(lines, line)) {
    if (line.rfind("interval ", 0) != 0 || line.find('[') != std::string::npos) continue;
    std::istringstream cells(line.substr(8));
    std::vector<int> row;
    int v;
    while (cells >> v) row.push_back(v);
    EXPECT_EQ(row, (std::vector<int>{8, 8, 8, 13, 14, 13, 16, 17, 16, 33, 17, 34}));
    found = true;
    break;
  }
  EXPECT_TRUE(found) << text;
}

TEST(Report, JsonRoundTrip) {
  Pipeline of = build_of(1, 16, 16);
  BitwidthReport r = make_report(of);
  r.add(analyze_interval(of));
  r.add(analyze_affine(of));
  r.add(profile(of, fixtures::synthetic_samples(of, 2, 16, 3)));
  r.beta = std::vector<int>(of.size(), 4);
  r.set_meta("epsilon", "1/16");
  r.set_meta("solver", "bnb");
  std::string json = render(r, ReportFormat::Json);
  BitwidthReport back = parse_report(json);
  EXPECT_EQ(back, r);
  EXPECT_EQ(render(back, ReportFormat::Json), json);
  ASSERT_NE(r.row("maxP"), nullptr);
  ASSERT_NE(r.row("avgP"), nullptr);
  EXPECT_EQ(r.row("smt"), nullptr);
  EXPECT_THROW(parse_report("[]"), std::invalid_argument);
  EXPECT_THROW(parse_report("{\"pipeline\": 3}"), std::invalid_argument);
}

TEST(Report, CsvAndFallbackFlag) {
  Pipeline of = build_of(0);
  AnalysisResult r = analyze_interval(of);
  r.method = "smt";
  r.stages[of.index_of("Common_x")].fallback = true;
  r.stages[of.index_of("Common_x")].note = "solver failed";
  BitwidthReport rep = make_report(of);
  rep.add(r);
  std::string csv = render(rep, ReportFormat::Csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "stage,method,alpha,lo,hi,lo_approx,hi_approx,fallback");
  EXPECT_NE(csv.find("Common_x,smt,6,-85/4,85/4,-21.25,21.25,1"), std::string::npos);
  EXPECT_NE(render(rep, ReportFormat::Text).find("6*"), std::string::npos);
}

TEST(Report, GoldenHcdJson) {
  Pipeline hcd = build_hcd();
  BitwidthReport r = make_report(hcd);
  r.add(analyze_interval(hcd));
  r.add(analyze_affine(hcd));
  EXPECT_EQ(render(r, ReportFormat::Json), read_file(std::string(BITWIDTH_GOLDEN_DIR) + "/hcd.report.json"));
}
