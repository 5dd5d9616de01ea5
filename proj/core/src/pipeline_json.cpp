#include "bitwidth/pipeline_json.hpp"

#include "json.hpp"

#include <charconv>
#include <limits>

namespace bw {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct Ctx {
  std::string stage;
  std::string path;

  [[noreturn]] void fail(const std::string& message, const std::string& sub = "") const {
    throw PipelineError(stage, sub.empty() ? path : path + sub, message);
  }
};

BigInt json_integer(const json& j, const Ctx& ctx, const std::string& sub) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return BigInt(std::to_string(j.get<std::uint64_t>()));
    return BigInt(std::to_string(j.get<std::int64_t>()));
  }
  if (j.is_string()) {
    try {
      return BigInt(j.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  ctx.fail("expected an integer", sub);
}

Rational json_rational(const json& j, const Ctx& ctx, const std::string& sub) {
  if (j.is_number_integer()) return Rational(json_integer(j, ctx, sub));
  if (j.is_number_float()) {
    double d = j.get<double>();
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
    if (ec != std::errc()) ctx.fail("unrepresentable number", sub);
    return parse_rational(std::string_view(buf, static_cast<size_t>(ptr - buf)));
  }
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::exception& e) {
      ctx.fail(e.what(), sub);
    }
  }
  if (j.is_array() && j.size() == 3 && j[0].is_string() && j[0] == "rat") {
    BigInt p = json_integer(j[1], ctx, sub + "[1]");
    BigInt q = json_integer(j[2], ctx, sub + "[2]");
    if (q == 0) ctx.fail("zero denominator", sub);
    Rational r(p, q);
    r.canonicalize();
    return r;
  }
  ctx.fail("expected a number or [\"rat\", p, q]", sub);
}

ordered_json rational_json(const Rational& r) {
  auto fits = [](const BigInt& z) { return z.fits_slong_p(); };
  auto int_json = [&](const BigInt& z) -> ordered_json {
    if (fits(z)) return ordered_json(z.get_si());
    return ordered_json(z.get_str());
  };
  if (r.get_den() == 1) return int_json(r.get_num());
  return ordered_json::array({"rat", int_json(r.get_num()), int_json(r.get_den())});
}

int json_int(const json& j, const Ctx& ctx, const std::string& sub) {
  if (!j.is_number_integer()) ctx.fail("expected an integer", sub);
  auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    ctx.fail("integer out of range", sub);
  return static_cast<int>(v);
}

const json& member(const json& obj, const char* key, const Ctx& ctx, const std::string& sub) {
  if (!obj.is_object()) ctx.fail("expected an object", sub);
  auto it = obj.find(key);
  if (it == obj.end()) ctx.fail(std::string("missing field '") + key + "'", sub);
  return *it;
}

Expr parse_expr(const json& j, const Ctx& ctx, const std::string& sub) {
  const auto& op_j = member(j, "op", ctx, sub);
  if (!op_j.is_string()) ctx.fail("'op' must be a string", sub + ".op");
  std::string op = op_j.get<std::string>();

  if (op == "const") return Expr::constant(json_rational(member(j, "value", ctx, sub), ctx, sub + ".value"));
  if (op == "ref") {
    const auto& st = member(j, "stage", ctx, sub);
    if (!st.is_string()) ctx.fail("'stage' must be a string", sub + ".stage");
    int di = j.contains("di") ? json_int(j["di"], ctx, sub + ".di") : 0;
    int dj = j.contains("dj") ? json_int(j["dj"], ctx, sub + ".dj") : 0;
    return Expr::ref(st.get<std::string>(), di, dj);
  }

  const auto& args_j = member(j, "args", ctx, sub);
  if (!args_j.is_array()) ctx.fail("'args' must be an array", sub + ".args");
  std::vector<Expr> args;
  for (size_t i = 0; i < args_j.size(); ++i)
    args.push_back(parse_expr(args_j[i], ctx, sub + ".args[" + std::to_string(i) + "]"));
  auto arity = [&](size_t n) {
    if (args.size() != n)
      ctx.fail("'" + op + "' expects " + std::to_string(n) + " argument(s), got " +
                   std::to_string(args.size()),
               sub + ".args");
  };

  if (op == "add") { arity(2); return Expr::add(args[0], args[1]); }
  if (op == "sub") { arity(2); return Expr::sub(args[0], args[1]); }
  if (op == "mul") { arity(2); return Expr::mul(args[0], args[1]); }
  if (op == "div") { arity(2); return Expr::div(args[0], args[1]); }
  if (op == "lt") { arity(2); return Expr::lt(args[0], args[1]); }
  if (op == "le") { arity(2); return Expr::le(args[0], args[1]); }
  if (op == "neg") { arity(1); return Expr::neg(args[0]); }
  if (op == "abs") { arity(1); return Expr::abs(args[0]); }
  if (op == "select") { arity(3); return Expr::select(args[0], args[1], args[2]); }
  if (op == "pow") {
    arity(1);
    int n = json_int(member(j, "n", ctx, sub), ctx, sub + ".n");
    if (n < 1) ctx.fail("pow exponent must be a positive integer", sub + ".n");
    return Expr::pow(args[0], static_cast<unsigned>(n));
  }
  ctx.fail("unknown op '" + op + "'", sub + ".op");
}

ordered_json expr_json(const Expr& e) {
  ordered_json j;
  j["op"] = std::string(op_name(e.op()));
  switch (e.op()) {
    case Op::Const: j["value"] = rational_json(e.value()); return j;
    case Op::Ref:
      j["stage"] = e.stage_ref().stage;
      j["di"] = e.stage_ref().di;
      j["dj"] = e.stage_ref().dj;
      return j;
    case Op::Pow: j["n"] = e.exponent(); break;
    default: break;
  }
  ordered_json args = ordered_json::array();
  for (const auto& a : e.args()) args.push_back(expr_json(a));
  j["args"] = std::move(args);
  return j;
}

std::array<int, 2> int_pair(const json& j, const Ctx& ctx, const std::string& sub) {
  if (!j.is_array() || j.size() != 2) ctx.fail("expected [rows, cols] pair", sub);
  return {json_int(j[0], ctx, sub + "[0]"), json_int(j[1], ctx, sub + "[1]")};
}

Stage parse_stage(const json& j, size_t index) {
  Ctx ctx{"", "stages[" + std::to_string(index) + "]"};
  const auto& name_j = member(j, "name", ctx, "");
  if (!name_j.is_string()) ctx.fail("'name' must be a string", ".name");
  ctx.stage = name_j.get<std::string>();
  const auto& kind_j = member(j, "kind", ctx, "");
  if (!kind_j.is_string()) ctx.fail("'kind' must be a string", ".kind");
  std::string kind = kind_j.get<std::string>();

  if (kind == "input") {
    const auto& r = member(j, "range", ctx, "");
    if (!r.is_array() || r.size() != 2) ctx.fail("'range' must be [lo, hi]", ".range");
    Rational lo = json_rational(r[0], ctx, ".range[0]");
    Rational hi = json_rational(r[1], ctx, ".range[1]");
    if (lo > hi) ctx.fail("empty input range (lo > hi)", ".range");
    return make_input(ctx.stage, Interval(lo, hi));
  }
  if (kind == "pointwise") return make_pointwise(ctx.stage, parse_expr(member(j, "expr", ctx, ""), ctx, ".expr"));
  if (kind == "stencil") {
    const auto& in = member(j, "input", ctx, "");
    if (!in.is_string()) ctx.fail("'input' must be a string", ".input");
    const auto& kj = member(j, "kernel", ctx, "");
    StencilKernel k;
    k.rows = json_int(member(kj, "rows", ctx, ".kernel"), ctx, ".kernel.rows");
    k.cols = json_int(member(kj, "cols", ctx, ".kernel"), ctx, ".kernel.cols");
    if (k.rows <= 0 || k.cols <= 0 || k.rows % 2 == 0 || k.cols % 2 == 0)
      ctx.fail("kernel must be odd-dimensioned, got " + std::to_string(k.rows) + "x" +
                   std::to_string(k.cols),
               ".kernel");
    const auto& cj = member(kj, "coeffs", ctx, ".kernel");
    if (!cj.is_array() || cj.size() != static_cast<size_t>(k.rows))
      ctx.fail("'coeffs' must have one array per kernel row", ".kernel.coeffs");
    for (size_t r = 0; r < cj.size(); ++r) {
      std::string rsub = ".kernel.coeffs[" + std::to_string(r) + "]";
      if (!cj[r].is_array() || cj[r].size() != static_cast<size_t>(k.cols))
        ctx.fail("row must have " + std::to_string(k.cols) + " coefficients", rsub);
      for (size_t c = 0; c < cj[r].size(); ++c)
        k.coeffs.push_back(json_rational(cj[r][c], ctx, rsub + "[" + std::to_string(c) + "]"));
    }
    if (kj.contains("scale")) k.scale = json_rational(kj["scale"], ctx, ".kernel.scale");
    if (kj.contains("stride")) k.stride = int_pair(kj["stride"], ctx, ".kernel.stride");
    if (kj.contains("upsample")) k.upsample = int_pair(kj["upsample"], ctx, ".kernel.upsample");
    return make_stencil(ctx.stage, in.get<std::string>(), std::move(k));
  }
  ctx.fail("unknown stage kind '" + kind + "'", ".kind");
}

}  // namespace

Pipeline parse_pipeline(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PipelineError("", "", std::string("malformed JSON: ") + e.what());
  }
  Ctx root{"", ""};
  if (!doc.is_object()) root.fail("document must be a JSON object");
  const auto& name = member(doc, "name", root, "");
  if (!name.is_string()) root.fail("'name' must be a string", "name");
  const auto& params = member(doc, "params", root, "");
  int rows = json_int(member(params, "R", root, "params"), root, "params.R");
  int cols = json_int(member(params, "C", root, "params"), root, "params.C");
  const auto& stages_j = member(doc, "stages", root, "");
  if (!stages_j.is_array()) root.fail("'stages' must be an array", "stages");
  std::vector<Stage> stages;
  for (size_t i = 0; i < stages_j.size(); ++i) stages.push_back(parse_stage(stages_j[i], i));
  return Pipeline(name.get<std::string>(), rows, cols, std::move(stages));
}

std::string serialize_pipeline(const Pipeline& p) {
  ordered_json doc;
  doc["name"] = p.name();
  doc["params"] = {{"R", p.rows()}, {"C", p.cols()}};
  ordered_json stages = ordered_json::array();
  for (const auto& s : p.stages()) {
    ordered_json j;
    j["name"] = s.name;
    if (s.is_input()) {
      j["kind"] = "input";
      j["range"] = ordered_json::array({rational_json(s.input().range.lo), rational_json(s.input().range.hi)});
    } else if (s.is_pointwise()) {
      j["kind"] = "pointwise";
      j["expr"] = expr_json(s.pointwise().expr);
    } else {
      const auto& st = s.stencil();
      j["kind"] = "stencil";
      j["input"] = st.input;
      ordered_json k;
      k["rows"] = st.kernel.rows;
      k["cols"] = st.kernel.cols;
      ordered_json coeffs = ordered_json::array();
      for (int r = 0; r < st.kernel.rows; ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < st.kernel.cols; ++c)
          row.push_back(rational_json(st.kernel.coeffs[static_cast<size_t>(r * st.kernel.cols + c)]));
        coeffs.push_back(std::move(row));
      }
      k["coeffs"] = std::move(coeffs);
      k["scale"] = rational_json(st.kernel.scale);
      if (st.kernel.stride != std::array<int, 2>{1, 1})
        k["stride"] = ordered_json::array({st.kernel.stride[0], st.kernel.stride[1]});
      if (st.kernel.upsample != std::array<int, 2>{1, 1})
        k["upsample"] = ordered_json::array({st.kernel.upsample[0], st.kernel.upsample[1]});
      j["kernel"] = std::move(k);
    }
    stages.push_back(std::move(j));
  }
  doc["stages"] = std::move(stages);
  return doc.dump(2) + "\n";
}

}  // namespace bw
