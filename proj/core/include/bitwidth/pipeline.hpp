#pragma once

// Pipeline DAG intermediate representation: input, point-wise and stencil
// stages over 2-D grids.

#include "bitwidth/expr.hpp"
#include "bitwidth/interval.hpp"
#include "bitwidth/rational.hpp"

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bw {

class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, std::string path, const std::string& message);
  const std::string& stage() const { return stage_; }
  const std::string& path() const { return path_; }

 private:
  std::string stage_;
  std::string path_;
};

/// output(i,j) = scale · Σ coeff(a,b) · input(base_i + a, base_j + b), where
/// base = ⌊i·stride / upsample⌋ per axis and (a,b) ranges over the centred,
/// odd-sized window. With upsample > 1 the window is mirrored along that
/// axis on odd output phases.
struct StencilKernel {
  int rows = 1;
  int cols = 1;
  std::vector<Rational> coeffs;  // row-major, rows*cols entries
  Rational scale{1};
  std::array<int, 2> stride{1, 1};
  std::array<int, 2> upsample{1, 1};

  int half_rows() const { return rows / 2; }
  int half_cols() const { return cols / 2; }
  /// Coefficient at window offset (a, b), a ∈ [-half_rows, half_rows].
  const Rational& at(int a, int b) const {
    return coeffs[static_cast<size_t>((a + half_rows()) * cols + (b + half_cols()))];
  }

  friend bool operator==(const StencilKernel&, const StencilKernel&) = default;
};

inline int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Input index of the window centre for output index `i` along one axis.
inline int stencil_base(int i, int stride, int upsample) {
  return floor_div(i * stride, upsample);
}

/// Whether the window is mirrored along an axis for output index `i`.
inline bool stencil_mirrored(int i, int upsample) {
  return upsample > 1 && (i - floor_div(i, upsample) * upsample) % 2 == 1;
}

struct InputStage {
  Interval range;
  friend bool operator==(const InputStage&, const InputStage&) = default;
};

struct PointwiseStage {
  Expr expr;
  friend bool operator==(const PointwiseStage& a, const PointwiseStage& b) {
    return a.expr == b.expr;
  }
};

struct StencilStage {
  std::string input;
  StencilKernel kernel;
  friend bool operator==(const StencilStage&, const StencilStage&) = default;
};

struct Stage {
  std::string name;
  std::variant<InputStage, PointwiseStage, StencilStage> body;

  bool is_input() const { return std::holds_alternative<InputStage>(body); }
  bool is_pointwise() const { return std::holds_alternative<PointwiseStage>(body); }
  bool is_stencil() const { return std::holds_alternative<StencilStage>(body); }
  const InputStage& input() const { return std::get<InputStage>(body); }
  const PointwiseStage& pointwise() const { return std::get<PointwiseStage>(body); }
  const StencilStage& stencil() const { return std::get<StencilStage>(body); }

  friend bool operator==(const Stage&, const Stage&) = default;
};

Stage make_input(std::string name, Interval range);
Stage make_pointwise(std::string name, Expr expr);
Stage make_stencil(std::string name, std::string input, StencilKernel kernel);

/// Half-open rectangle [r0, r1) × [c0, c1) in a stage's own coordinates.
struct Rect {
  int r0 = 0, r1 = 0, c0 = 0, c1 = 0;
  int rows() const { return r1 > r0 ? r1 - r0 : 0; }
  int cols() const { return c1 > c0 ? c1 - c0 : 0; }
  bool empty() const { return rows() == 0 || cols() == 0; }
  bool contains(int i, int j) const { return i >= r0 && i < r1 && j >= c0 && j < c1; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// A validated pipeline. Construction checks every structural invariant and
/// throws PipelineError naming the offending stage.
class Pipeline {
 public:
  Pipeline(std::string name, int rows, int cols, std::vector<Stage> stages);

  const std::string& name() const { return name_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<Stage>& stages() const { return stages_; }
  size_t size() const { return stages_.size(); }
  const Stage& stage(size_t index) const { return stages_[index]; }
  const Stage& stage(const std::string& name) const { return stages_[index_of(name)]; }
  size_t index_of(const std::string& name) const;
  bool has_stage(const std::string& name) const { return index_.count(name) != 0; }

  /// Indices of the stages this stage reads, in first-reference order.
  const std::vector<size_t>& predecessors(size_t index) const { return preds_[index]; }
  /// Indices of the stages that read this stage, ascending.
  const std::vector<size_t>& successors(size_t index) const { return succs_[index]; }
  /// Input stage indices in declaration order.
  std::vector<size_t> inputs() const;
  /// Number of (predecessor → stage) edges.
  size_t edge_count() const;

  /// Compiled point-wise expression for `index` (empty Program otherwise).
  const Program& program(size_t index) const { return programs_[index]; }
  /// Stage index of every leaf of program(index).
  const std::vector<size_t>& program_leaves(size_t index) const { return leaf_stages_[index]; }

  friend bool operator==(const Pipeline& a, const Pipeline& b) {
    return a.name_ == b.name_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
           a.stages_ == b.stages_;
  }

 private:
  std::string name_;
  int rows_;
  int cols_;
  std::vector<Stage> stages_;
  std::map<std::string, size_t> index_;
  std::vector<std::vector<size_t>> preds_;
  std::vector<std::vector<size_t>> succs_;
  std::vector<Program> programs_;
  std::vector<std::vector<size_t>> leaf_stages_;
};

/// Stage indices such that every stage follows all stages it references.
/// Ties are broken by declaration order.
std::vector<size_t> topo_order(const Pipeline& p);

/// Interior domain of every stage for an input grid of rows × cols: a stage
/// is defined only where its whole window (transitively) fits.
std::vector<Rect> stage_domains(const Pipeline& p, int rows, int cols);

}  // namespace bw
