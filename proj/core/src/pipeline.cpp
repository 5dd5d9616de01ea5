#include "bitwidth/pipeline.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace bw {

PipelineError::PipelineError(std::string stage, std::string path, const std::string& message)
    : std::runtime_error((stage.empty() ? std::string() : "stage '" + stage + "': ") +
                         (path.empty() ? std::string() : path + ": ") + message),
      stage_(std::move(stage)),
      path_(std::move(path)) {}

Stage make_input(std::string name, Interval range) {
  return Stage{std::move(name), InputStage{std::move(range)}};
}

Stage make_pointwise(std::string name, Expr expr) {
  return Stage{std::move(name), PointwiseStage{std::move(expr)}};
}

Stage make_stencil(std::string name, std::string input, StencilKernel kernel) {
  return Stage{std::move(name), StencilStage{std::move(input), std::move(kernel)}};
}

namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '^' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

void check_kernel(const Stage& s, size_t pos) {
  const auto& k = s.stencil().kernel;
  std::string path = "stages[" + std::to_string(pos) + "].kernel";
  if (k.rows <= 0 || k.cols <= 0)
    throw PipelineError(s.name, path, "kernel dimensions must be positive");
  if (k.rows % 2 == 0 || k.cols % 2 == 0)
    throw PipelineError(s.name, path,
                        "kernel must be odd-dimensioned, got " + std::to_string(k.rows) + "x" +
                            std::to_string(k.cols));
  if (k.coeffs.size() != static_cast<size_t>(k.rows) * static_cast<size_t>(k.cols))
    throw PipelineError(s.name, path + ".coeffs",
                        "expected " + std::to_string(k.rows * k.cols) + " coefficients, got " +
                            std::to_string(k.coeffs.size()));
  for (int axis = 0; axis < 2; ++axis) {
    if (k.stride[axis] < 1) throw PipelineError(s.name, path + ".stride", "stride must be >= 1");
    if (k.upsample[axis] < 1)
      throw PipelineError(s.name, path + ".upsample", "upsample must be >= 1");
  }
}

long floor_div_l(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long ceil_div_l(long a, long b) { return -floor_div_l(-a, b); }

// Output index range along one axis for a stencil reading [lo, hi) of its input.
std::pair<int, int> stencil_axis(int lo, int hi, int half, int stride, int up) {
  long base_lo = lo + half;
  long base_hi = static_cast<long>(hi) - 1 - half;
  if (base_hi < base_lo) return {0, 0};
  long first = ceil_div_l(base_lo * up, stride);
  long last = floor_div_l((base_hi + 1) * up - 1, stride);
  if (last < first) return {0, 0};
  return {static_cast<int>(first), static_cast<int>(last + 1)};
}

}  // namespace

Pipeline::Pipeline(std::string name, int rows, int cols, std::vector<Stage> stages)
    : name_(std::move(name)), rows_(rows), cols_(cols), stages_(std::move(stages)) {
  if (rows_ <= 0 || cols_ <= 0)
    throw PipelineError("", "params", "R and C must be positive integers");
  if (stages_.empty()) throw PipelineError("", "stages", "pipeline has no stages");

  for (size_t i = 0; i < stages_.size(); ++i) {
    const auto& s = stages_[i];
    std::string path = "stages[" + std::to_string(i) + "]";
    if (!valid_identifier(s.name))
      throw PipelineError(s.name, path + ".name", "invalid stage name");
    if (!index_.emplace(s.name, i).second)
      throw PipelineError(s.name, path + ".name", "duplicate stage name");
  }

  // Normalise point-wise expressions before anything reads them.
  for (auto& s : stages_)
    if (s.is_pointwise()) std::get<PointwiseStage>(s.body).expr = rewrite_squares(s.pointwise().expr);

  preds_.resize(stages_.size());
  succs_.resize(stages_.size());
  programs_.resize(stages_.size());
  leaf_stages_.resize(stages_.size());

  for (size_t i = 0; i < stages_.size(); ++i) {
    const auto& s = stages_[i];
    std::string path = "stages[" + std::to_string(i) + "]";
    auto resolve = [&](const std::string& ref, const std::string& where) {
      auto it = index_.find(ref);
      if (it == index_.end())
        throw PipelineError(s.name, where, "dangling reference to undeclared stage '" + ref + "'");
      return it->second;
    };
    if (s.is_pointwise()) {
      for (const auto& r : referenced_stages(s.pointwise().expr)) {
        size_t j = resolve(r.stage, path + ".expr");
        if (r.di != 0 || r.dj != 0)
          throw PipelineError(s.name, path + ".expr",
                              "point-wise reference to '" + r.stage + "' must use offset (0,0)");
        if (std::find(preds_[i].begin(), preds_[i].end(), j) == preds_[i].end())
          preds_[i].push_back(j);
      }
      programs_[i] = compile(s.pointwise().expr);
      for (const auto& leaf : programs_[i].leaves) leaf_stages_[i].push_back(index_.at(leaf.stage));
    } else if (s.is_stencil()) {
      check_kernel(s, i);
      preds_[i].push_back(resolve(s.stencil().input, path + ".input"));
    }
  }
  for (size_t i = 0; i < stages_.size(); ++i)
    for (size_t j : preds_[i]) succs_[j].push_back(i);
  for (auto& v : succs_) std::sort(v.begin(), v.end());

  // Cycle detection first so that a cycle is reported as such.
  std::vector<size_t> indeg(stages_.size());
  for (size_t i = 0; i < stages_.size(); ++i) indeg[i] = preds_[i].size();
  std::vector<size_t> ready;
  for (size_t i = 0; i < stages_.size(); ++i)
    if (indeg[i] == 0) ready.push_back(i);
  size_t visited = 0;
  while (!ready.empty()) {
    size_t n = ready.back();
    ready.pop_back();
    ++visited;
    for (size_t m : succs_[n])
      if (--indeg[m] == 0) ready.push_back(m);
  }
  if (visited != stages_.size()) {
    std::string members;
    for (size_t i = 0; i < stages_.size(); ++i)
      if (indeg[i] != 0) members += (members.empty() ? "" : ", ") + stages_[i].name;
    throw PipelineError("", "stages", "cycle detected among {" + members + "}");
  }

  for (size_t i = 0; i < stages_.size(); ++i)
    for (size_t j : preds_[i])
      if (j > i)
        throw PipelineError(stages_[i].name, "stages[" + std::to_string(i) + "]",
                            "references stage '" + stages_[j].name + "' declared later");
}

size_t Pipeline::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw PipelineError(name, "", "unknown stage");
  return it->second;
}

std::vector<size_t> Pipeline::inputs() const {
  std::vector<size_t> out;
  for (size_t i = 0; i < stages_.size(); ++i)
    if (stages_[i].is_input()) out.push_back(i);
  return out;
}

size_t Pipeline::edge_count() const {
  size_t n = 0;
  for (const auto& p : preds_) n += p.size();
  return n;
}

std::vector<size_t> topo_order(const Pipeline& p) {
  // Kahn's algorithm with a min-heap on declaration index.
  std::vector<size_t> indeg(p.size());
  std::priority_queue<size_t, std::vector<size_t>, std::greater<>> ready;
  for (size_t i = 0; i < p.size(); ++i) {
    indeg[i] = p.predecessors(i).size();
    if (indeg[i] == 0) ready.push(i);
  }
  std::vector<size_t> order;
  order.reserve(p.size());
  while (!ready.empty()) {
    size_t n = ready.top();
    ready.pop();
    order.push_back(n);
    for (size_t m : p.successors(n))
      if (--indeg[m] == 0) ready.push(m);
  }
  return order;
}

std::vector<Rect> stage_domains(const Pipeline& p, int rows, int cols) {
  std::vector<Rect> dom(p.size());
  for (size_t i : topo_order(p)) {
    const auto& s = p.stage(i);
    if (s.is_input()) {
      dom[i] = Rect{0, rows, 0, cols};
    } else if (s.is_pointwise()) {
      Rect r{0, rows, 0, cols};
      for (size_t j : p.predecessors(i)) {
        const Rect& d = dom[j];
        r.r0 = std::max(r.r0, d.r0);
        r.r1 = std::min(r.r1, d.r1);
        r.c0 = std::max(r.c0, d.c0);
        r.c1 = std::min(r.c1, d.c1);
      }
      if (r.r1 < r.r0) r.r1 = r.r0;
      if (r.c1 < r.c0) r.c1 = r.c0;
      dom[i] = r;
    } else {
      const auto& k = s.stencil().kernel;
      const Rect& in = dom[p.predecessors(i)[0]];
      auto [r0, r1] = stencil_axis(in.r0, in.r1, k.half_rows(), k.stride[0], k.upsample[0]);
      auto [c0, c1] = stencil_axis(in.c0, in.c1, k.half_cols(), k.stride[1], k.upsample[1]);
      dom[i] = Rect{r0, r1, c0, c1};
    }
  }
  return dom;
}

}  // namespace bw
