#include "bitwidth/evaluate.hpp"

#include <algorithm>

namespace bw {

EvaluationError::EvaluationError(std::string stage, const std::string& message)
    : std::runtime_error((stage.empty() ? std::string() : "stage '" + stage + "': ") + message),
      stage_(std::move(stage)) {}

StagePlanes evaluate(const Pipeline& p, const ImageSample& sample, const ValueHook& hook) {
  auto inputs = p.inputs();
  if (sample.inputs.size() != inputs.size())
    throw EvaluationError("", "sample '" + sample.id + "' has " + std::to_string(sample.inputs.size()) +
                                  " image(s), pipeline has " + std::to_string(inputs.size()) + " input(s)");
  int rows = sample.inputs.at(0).rows, cols = sample.inputs.at(0).cols;
  for (const auto& img : sample.inputs)
    if (img.rows != rows || img.cols != cols)
      throw EvaluationError("", "sample '" + sample.id + "': input images differ in size");

  auto domains = stage_domains(p, rows, cols);
  for (size_t s = 0; s < p.size(); ++s)
    if (domains[s].empty())
      throw EvaluationError(p.stage(s).name, "image " + std::to_string(rows) + "x" + std::to_string(cols) +
                                                 " is too small for this stage's window");

  StagePlanes planes(p.size());
  ExactOps ops;
  std::vector<Rational> leaves, slots;
  for (size_t s : topo_order(p)) {
    const auto& st = p.stage(s);
    Plane<Rational> out(domains[s]);
    const Rect& d = domains[s];
    if (st.is_input()) {
      size_t k = static_cast<size_t>(std::find(inputs.begin(), inputs.end(), s) - inputs.begin());
      const Image& img = sample.inputs[k];
      const auto& range = st.input().range;
      for (int i = d.r0; i < d.r1; ++i) {
        for (int j = d.c0; j < d.c1; ++j) {
          Rational v(img.at(i, j));
          if (!range.contains(v))
            throw EvaluationError(st.name, "pixel (" + std::to_string(i) + "," + std::to_string(j) +
                                               ") = " + to_string(v) + " outside " + to_string(range));
          if (hook) hook(s, v);
          out.at(i, j) = std::move(v);
        }
      }
    } else if (st.is_stencil()) {
      const auto& k = st.stencil().kernel;
      const auto& in = planes[p.predecessors(s)[0]];
      for (int i = d.r0; i < d.r1; ++i) {
        int bi = stencil_base(i, k.stride[0], k.upsample[0]);
        bool mi = stencil_mirrored(i, k.upsample[0]);
        for (int j = d.c0; j < d.c1; ++j) {
          int bj = stencil_base(j, k.stride[1], k.upsample[1]);
          bool mj = stencil_mirrored(j, k.upsample[1]);
          Rational acc = 0;
          for (int a = -k.half_rows(); a <= k.half_rows(); ++a)
            for (int b = -k.half_cols(); b <= k.half_cols(); ++b) {
              const Rational& c = k.at(mi ? -a : a, mj ? -b : b);
              if (c != 0) acc += c * in.at(bi + a, bj + b);
            }
          acc *= k.scale;
          if (hook) hook(s, acc);
          out.at(i, j) = std::move(acc);
        }
      }
    } else {
      const auto& prog = p.program(s);
      const auto& leaf_stages = p.program_leaves(s);
      for (int i = d.r0; i < d.r1; ++i) {
        for (int j = d.c0; j < d.c1; ++j) {
          leaves.clear();
          for (size_t l : leaf_stages) leaves.push_back(planes[l].at(i, j));
          Rational v;
          try {
            v = run<Rational>(prog, leaves, ops, slots);
          } catch (const std::domain_error&) {
            throw EvaluationError(st.name, "division by zero at pixel (" + std::to_string(i) + "," +
                                               std::to_string(j) + ")");
          }
          if (hook) hook(s, v);
          out.at(i, j) = std::move(v);
        }
      }
    }
    planes[s] = std::move(out);
  }
  return planes;
}

Plane<int> select_branches(const Pipeline& p, size_t stage, const StagePlanes& planes) {
  const auto& st = p.stage(stage);
  if (!st.is_pointwise() || st.pointwise().expr.op() != Op::Select)
    throw EvaluationError(st.name, "stage is not a select");
  Program cond = compile(st.pointwise().expr.args()[0]);
  std::vector<size_t> leaf_stages;
  for (const auto& l : cond.leaves) leaf_stages.push_back(p.index_of(l.stage));
  const Rect& d = planes[stage].domain;
  Plane<int> out(d);
  ExactOps ops;
  std::vector<Rational> leaves, slots;
  for (int i = d.r0; i < d.r1; ++i)
    for (int j = d.c0; j < d.c1; ++j) {
      leaves.clear();
      for (size_t l : leaf_stages) leaves.push_back(planes[l].at(i, j));
      out.at(i, j) = run<Rational>(cond, leaves, ops, slots) != 0 ? 1 : 0;
    }
  return out;
}

}  // namespace bw
