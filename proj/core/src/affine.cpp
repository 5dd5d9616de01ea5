#include "bitwidth/affine.hpp"

#include "bitwidth/fixed_point.hpp"

#include <optional>
#include <tuple>

namespace bw {

AffineForm AffineForm::from_interval(const Interval& range, SymbolCounter& symbols) {
  AffineForm f((range.lo + range.hi) / 2);
  Rational rad = (range.hi - range.lo) / 2;
  if (rad != 0) f.terms.emplace(symbols.fresh(), rad);
  return f;
}

Rational AffineForm::radius() const {
  Rational r = 0;
  for (const auto& [id, c] : terms) r += abs(c);
  return r;
}

Interval AffineForm::to_interval() const {
  Rational r = radius();
  return {x0 - r, x0 + r};
}

namespace {

AffineForm combine(const AffineForm& a, const AffineForm& b, const Rational& ka,
                   const Rational& kb) {
  AffineForm out(ka * a.x0 + kb * b.x0);
  auto ia = a.terms.begin(), ib = b.terms.begin();
  while (ia != a.terms.end() || ib != b.terms.end()) {
    if (ib == b.terms.end() || (ia != a.terms.end() && ia->first < ib->first)) {
      Rational c = ka * ia->second;
      if (c != 0) out.terms.emplace_hint(out.terms.end(), ia->first, c);
      ++ia;
    } else if (ia == a.terms.end() || ib->first < ia->first) {
      Rational c = kb * ib->second;
      if (c != 0) out.terms.emplace_hint(out.terms.end(), ib->first, c);
      ++ib;
    } else {
      Rational c = ka * ia->second + kb * ib->second;
      if (c != 0) out.terms.emplace_hint(out.terms.end(), ia->first, c);
      ++ia;
      ++ib;
    }
  }
  return out;
}

void add_noise(AffineForm& f, const Rational& weight, SymbolCounter& symbols) {
  if (weight != 0) f.terms.emplace(symbols.fresh(), abs(weight));
}

}  // namespace

AffineForm aa_add(const AffineForm& a, const AffineForm& b) { return combine(a, b, 1, 1); }
AffineForm aa_sub(const AffineForm& a, const AffineForm& b) { return combine(a, b, 1, -1); }
AffineForm aa_neg(const AffineForm& a) { return aa_scale(a, -1); }

AffineForm aa_scale(const AffineForm& a, const Rational& k) {
  if (k == 0) return AffineForm(Rational(0));
  AffineForm out(a.x0 * k);
  for (const auto& [id, c] : a.terms) out.terms.emplace_hint(out.terms.end(), id, c * k);
  return out;
}

AffineForm aa_mul(const AffineForm& a, const AffineForm& b, SymbolCounter& symbols) {
  if (a.is_constant()) return aa_scale(b, a.x0);
  if (b.is_constant()) return aa_scale(a, b.x0);
  AffineForm out = combine(a, b, b.x0, a.x0);
  out.x0 = a.x0 * b.x0;
  add_noise(out, a.radius() * b.radius(), symbols);
  return out;
}

AffineForm aa_square(const AffineForm& a, SymbolCounter& symbols) {
  if (a.is_constant()) return AffineForm(a.x0 * a.x0);
  // (x0 + s)^2 with s ∈ [-r, r]: s^2 ∈ [0, r^2] is centred at r^2/2.
  Rational r = a.radius();
  Rational half = r * r / 2;
  AffineForm out = aa_scale(a, 2 * a.x0);
  out.x0 = a.x0 * a.x0 + half;
  add_noise(out, half, symbols);
  return out;
}

AffineForm aa_pow(const AffineForm& a, unsigned n, SymbolCounter& symbols) {
  if (n == 0) return AffineForm(Rational(1));
  if (n == 1) return a;
  AffineForm half = aa_pow(a, n / 2, symbols);
  AffineForm sq = aa_square(half, symbols);
  return n % 2 == 0 ? sq : aa_mul(sq, a, symbols);
}

AffineForm aa_reciprocal(const AffineForm& a, const Interval& range, SymbolCounter& symbols) {
  if (range.contains_zero()) throw DivisionThroughZero("", range);
  if (range.hi < 0) {
    return aa_neg(aa_reciprocal(aa_neg(a), iv_neg(range), symbols));
  }
  if (a.is_constant()) return AffineForm(1 / a.x0);
  // Slope of 1/x at the far end; the residual 1/x - slope·x is decreasing.
  const Rational& l = range.lo;
  const Rational& h = range.hi;
  Rational slope = -1 / (h * h);
  Rational r_lo = 1 / h - slope * h;
  Rational r_hi = 1 / l - slope * l;
  AffineForm out = aa_scale(a, slope);
  out.x0 += (r_lo + r_hi) / 2;
  add_noise(out, (r_hi - r_lo) / 2, symbols);
  return out;
}

AffineForm aa_abs(const AffineForm& a, const Interval& range, SymbolCounter& symbols) {
  if (range.lo >= 0) return a;
  if (range.hi <= 0) return aa_neg(a);
  const Rational& l = range.lo;
  const Rational& h = range.hi;
  Rational slope = (h + l) / (h - l);
  Rational chord0 = -l * (slope + 1);  // chord value at x = 0, the largest gap
  AffineForm out = aa_scale(a, slope);
  out.x0 += chord0 / 2;
  add_noise(out, chord0 / 2, symbols);
  return out;
}

std::string to_string(const AffineForm& f) {
  std::string s = to_string(f.x0);
  for (const auto& [id, c] : f.terms)
    s += (c < 0 ? " - " : " + ") + to_string(abs(c)) + "·e" + std::to_string(id);
  return s;
}

namespace {

// A form plus the interval enclosure computed alongside it.
struct AAValue {
  AffineForm form;
  Interval box;

  Interval range() const {
    Interval f = form.to_interval();
    return intersect(f, box);
  }
};

struct AffineOps {
  SymbolCounter& symbols;

  AAValue constant(const Rational& c) const { return {AffineForm(c), Interval::point(c)}; }
  AAValue add(const AAValue& a, const AAValue& b) const {
    return {aa_add(a.form, b.form), iv_add(a.box, b.box)};
  }
  AAValue sub(const AAValue& a, const AAValue& b) const {
    return {aa_sub(a.form, b.form), iv_sub(a.box, b.box)};
  }
  AAValue mul(const AAValue& a, const AAValue& b) const {
    return {aa_mul(a.form, b.form, symbols), iv_mul(a.box, b.box)};
  }
  AAValue div(const AAValue& a, const AAValue& b) const {
    Interval box = iv_div(a.box, b.box);
    AffineForm inv = aa_reciprocal(b.form, b.range(), symbols);
    return {aa_mul(a.form, inv, symbols), box};
  }
  AAValue pow(const AAValue& a, unsigned n) const {
    return {aa_pow(a.form, n, symbols), iv_pow(a.box, n)};
  }
  AAValue neg(const AAValue& a) const { return {aa_neg(a.form), iv_neg(a.box)}; }
  AAValue abs(const AAValue& a) const {
    return {aa_abs(a.form, a.range(), symbols), iv_abs(a.box)};
  }
  AAValue compare(const AAValue& a, const AAValue& b, bool strict) const {
    Interval d = intersect(aa_sub(a.form, b.form).to_interval(), iv_sub(a.box, b.box));
    bool yes = strict ? d.hi < 0 : d.hi <= 0;
    bool no = strict ? d.lo >= 0 : d.lo > 0;
    if (yes) return constant(1);
    if (no) return constant(0);
    Interval unit(0, 1);
    return {AffineForm::from_interval(unit, symbols), unit};
  }
  AAValue lt(const AAValue& a, const AAValue& b) const { return compare(a, b, true); }
  AAValue le(const AAValue& a, const AAValue& b) const { return compare(a, b, false); }
  AAValue select(const AAValue& c, const AAValue& t, const AAValue& e) const {
    Interval cr = c.range();
    if (!cr.contains_zero()) return t;
    if (cr.lo == 0 && cr.hi == 0) return e;
    Interval h = hull(t.range(), e.range());
    return {AffineForm::from_interval(h, symbols), hull(t.box, e.box)};
  }
};

class ConeExpander {
 public:
  explicit ConeExpander(const Pipeline& p) : p_(p), ops_{symbols_} {}

  const AAValue& value(size_t stage, int i, int j) {
    auto key = std::make_tuple(stage, i, j);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    AAValue v = compute(stage, i, j);
    return memo_.emplace(key, std::move(v)).first->second;
  }

 private:
  AAValue compute(size_t stage, int i, int j) {
    const auto& s = p_.stage(stage);
    if (s.is_input()) {
      const auto& r = s.input().range;
      return {AffineForm::from_interval(r, symbols_), r};
    }
    if (s.is_stencil()) {
      const auto& k = s.stencil().kernel;
      size_t in = p_.predecessors(stage)[0];
      int bi = stencil_base(i, k.stride[0], k.upsample[0]);
      int bj = stencil_base(j, k.stride[1], k.upsample[1]);
      bool mi = stencil_mirrored(i, k.upsample[0]);
      bool mj = stencil_mirrored(j, k.upsample[1]);
      AAValue acc = ops_.constant(0);
      for (int a = -k.half_rows(); a <= k.half_rows(); ++a) {
        for (int b = -k.half_cols(); b <= k.half_cols(); ++b) {
          const Rational& c = k.at(mi ? -a : a, mj ? -b : b);
          if (c == 0) continue;
          const AAValue& x = value(in, bi + a, bj + b);
          acc = ops_.add(acc, ops_.mul(ops_.constant(c), x));
        }
      }
      return ops_.mul(ops_.constant(k.scale), acc);
    }
    std::vector<AAValue> leaves;
    for (size_t leaf : p_.program_leaves(stage)) leaves.push_back(value(leaf, i, j));
    try {
      return run<AAValue>(p_.program(stage), leaves, ops_);
    } catch (const DivisionThroughZero& e) {
      throw DivisionThroughZero(s.name, e.denominator());
    }
  }

  const Pipeline& p_;
  SymbolCounter symbols_;
  AffineOps ops_;
  std::map<std::tuple<size_t, int, int>, AAValue> memo_;
};

bool has_upsampling(const Pipeline& p) {
  for (const auto& s : p.stages())
    if (s.is_stencil() && (s.stencil().kernel.upsample[0] > 1 || s.stencil().kernel.upsample[1] > 1))
      return true;
  return false;
}

}  // namespace

AnalysisResult analyze_affine(const Pipeline& p) {
  AnalysisResult result;
  result.method = "affine";
  result.stages.resize(p.size());
  // Upsampling stages have distinct even/odd phases; cover both.
  std::vector<std::pair<int, int>> pixels{{0, 0}};
  if (has_upsampling(p)) pixels = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  ConeExpander cone(p);
  for (size_t i : topo_order(p)) {
    std::optional<Interval> range;
    for (auto [r, c] : pixels) {
      Interval x = cone.value(i, r, c).range();
      range = range ? hull(*range, x) : x;
    }
    result.stages[i] = make_stage_range(*range);
  }
  return result;
}

}  // namespace bw
