#include "bitwidth/bnb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>

namespace bw {

std::string_view to_string(SatResult r) {
  switch (r) {
    case SatResult::Sat: return "sat";
    case SatResult::Unsat: return "unsat";
    case SatResult::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double down(double x) { return std::isinf(x) ? x : std::nextafter(x, -kInf); }
double up(double x) { return std::isinf(x) ? x : std::nextafter(x, kInf); }

// Closed interval of doubles; every operation rounds outward by one ulp.
struct DI {
  double lo = 0, hi = 0;

  static DI point(double v) { return {v, v}; }
  static DI enclose(const Rational& r) {
    double d = to_double(r);
    if (Rational(d) == r) return {d, d};
    return {down(d), up(d)};
  }
  static DI enclose(const Interval& r) { return {enclose(r.lo).lo, enclose(r.hi).hi}; }
  static DI entire() { return {-kInf, kInf}; }
  bool contains_zero() const { return lo <= 0 && hi >= 0; }
  double width() const { return hi - lo; }
  double mid() const { return lo + (hi - lo) / 2; }
  double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
};

bool operator==(const DI& a, const DI& b) { return a.lo == b.lo && a.hi == b.hi; }

DI fix(double lo, double hi) {
  return {std::isnan(lo) ? -kInf : lo, std::isnan(hi) ? kInf : hi};
}

DI operator+(DI a, DI b) { return fix(down(a.lo + b.lo), up(a.hi + b.hi)); }
DI operator-(DI a, DI b) { return fix(down(a.lo - b.hi), up(a.hi - b.lo)); }
DI operator-(DI a) { return {-a.hi, -a.lo}; }

double mul_nan0(double a, double b) {
  double r = a * b;
  return std::isnan(r) ? 0.0 : r;  // 0 · ∞ contributes nothing
}

DI operator*(DI a, DI b) {
  double t[4] = {mul_nan0(a.lo, b.lo), mul_nan0(a.lo, b.hi), mul_nan0(a.hi, b.lo),
                 mul_nan0(a.hi, b.hi)};
  return {down(*std::min_element(t, t + 4)), up(*std::max_element(t, t + 4))};
}

DI recip(DI b) {
  if (b.contains_zero()) return DI::entire();
  return {down(1.0 / b.hi), up(1.0 / b.lo)};
}

DI operator/(DI a, DI b) {
  if (b.contains_zero()) return DI::entire();
  return a * recip(b);
}

DI hull(DI a, DI b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

DI intersect(DI a, DI b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

DI ipow(DI x, unsigned n) {
  if (n == 0) return DI::point(1);
  if (n % 2 == 1 || x.lo >= 0) {
    DI r = x;
    for (unsigned k = 1; k < n; ++k) r = r * x;
    if (x.lo >= 0) r.lo = std::max(r.lo, 0.0);
    return r;
  }
  // Even power: fold onto |x| first.
  DI a = x.hi <= 0 ? -x : DI{x.contains_zero() ? 0.0 : std::min(std::fabs(x.lo), std::fabs(x.hi)),
                               x.mag()};
  DI r = a;
  for (unsigned k = 1; k < n; ++k) r = r * a;
  r.lo = std::max(r.lo, 0.0);
  return r;
}

DI dabs(DI x) {
  if (x.lo >= 0) return x;
  if (x.hi <= 0) return -x;
  return {0.0, x.mag()};
}

// Value with interval gradient w.r.t. every source.
struct GV {
  DI v;
  std::vector<DI> g;
};

struct GradOps {
  size_t n;
  bool* nonsmooth;

  GV zero_grad(DI v) const { return {v, std::vector<DI>(n, DI::point(0))}; }
  GV constant(const Rational& c) const { return zero_grad(DI::enclose(c)); }
  GV add(const GV& a, const GV& b) const {
    GV r{a.v + b.v, a.g};
    for (size_t i = 0; i < n; ++i) r.g[i] = a.g[i] + b.g[i];
    return r;
  }
  GV sub(const GV& a, const GV& b) const {
    GV r{a.v - b.v, a.g};
    for (size_t i = 0; i < n; ++i) r.g[i] = a.g[i] - b.g[i];
    return r;
  }
  GV mul(const GV& a, const GV& b) const {
    GV r{a.v * b.v, a.g};
    for (size_t i = 0; i < n; ++i) r.g[i] = a.g[i] * b.v + b.g[i] * a.v;
    return r;
  }
  GV div(const GV& a, const GV& b) const {
    DI q = a.v / b.v;
    GV r{q, a.g};
    DI inv = recip(b.v);
    for (size_t i = 0; i < n; ++i) r.g[i] = (a.g[i] - q * b.g[i]) * inv;
    return r;
  }
  GV pow(const GV& a, unsigned k) const {
    GV r{ipow(a.v, k), a.g};
    DI d = DI::point(static_cast<double>(k)) * ipow(a.v, k - 1);
    for (size_t i = 0; i < n; ++i) r.g[i] = d * a.g[i];
    return r;
  }
  GV neg(const GV& a) const {
    GV r{-a.v, a.g};
    for (size_t i = 0; i < n; ++i) r.g[i] = -a.g[i];
    return r;
  }
  GV abs(const GV& a) const {
    DI s = a.v.lo >= 0 ? DI::point(1) : a.v.hi <= 0 ? DI::point(-1) : DI{-1, 1};
    GV r{dabs(a.v), a.g};
    for (size_t i = 0; i < n; ++i) r.g[i] = s * a.g[i];
    return r;
  }
  GV compare(const GV& a, const GV& b, bool strict) const {
    DI d = a.v - b.v;
    bool yes = strict ? d.hi < 0 : d.hi <= 0;
    bool no = strict ? d.lo >= 0 : d.lo > 0;
    if (yes) return zero_grad(DI::point(1));
    if (no) return zero_grad(DI::point(0));
    *nonsmooth = true;
    return zero_grad({0, 1});
  }
  GV lt(const GV& a, const GV& b) const { return compare(a, b, true); }
  GV le(const GV& a, const GV& b) const { return compare(a, b, false); }
  GV select(const GV& c, const GV& t, const GV& e) const {
    if (!c.v.contains_zero()) return t;
    if (c.v.lo == 0 && c.v.hi == 0) return e;
    *nonsmooth = true;
    GV r{hull(t.v, e.v), t.g};
    for (size_t i = 0; i < n; ++i) r.g[i] = hull(t.g[i], e.g[i]);
    return r;
  }
};

struct DoubleOps {
  DI constant(const Rational& c) const { return DI::enclose(c); }
  DI add(DI a, DI b) const { return a + b; }
  DI sub(DI a, DI b) const { return a - b; }
  DI mul(DI a, DI b) const { return a * b; }
  DI div(DI a, DI b) const { return a / b; }
  DI pow(DI a, unsigned k) const { return ipow(a, k); }
  DI neg(DI a) const { return -a; }
  DI abs(DI a) const { return dabs(a); }
  DI lt(DI a, DI b) const {
    DI d = a - b;
    return d.hi < 0 ? DI::point(1) : d.lo >= 0 ? DI::point(0) : DI{0, 1};
  }
  DI le(DI a, DI b) const {
    DI d = a - b;
    return d.hi <= 0 ? DI::point(1) : d.lo > 0 ? DI::point(0) : DI{0, 1};
  }
  DI select(DI c, DI t, DI e) const {
    if (!c.contains_zero()) return t;
    if (c.lo == 0 && c.hi == 0) return e;
    return hull(t, e);
  }
};

class Searcher {
 public:
  Searcher(const ConstraintSystem& cs, Side side) : cs_(cs), sign_(side == Side::Upper ? 1 : -1) {
    src_ = cs.sources();
    for (int s : src_) {
      exact_box_.push_back(*cs.vars[static_cast<size_t>(s)].range);
      box0_.push_back(DI::enclose(exact_box_.back()));
    }
  }

  struct Node {
    std::vector<DI> box;
    double ub;  // of sign·objective
    std::vector<DI> grad;
    bool smooth;
    bool operator<(const Node& o) const { return ub < o.ub; }
  };

  // Interval bound on sign·objective over `box`, plus gradient information.
  Node bound(std::vector<DI> box) const {
    bool nonsmooth = false;
    GradOps ops{box.size(), &nonsmooth};
    std::vector<GV> leaves;
    std::vector<GV> values(cs_.vars.size());
    for (size_t k = 0; k < src_.size(); ++k) {
      GV v = ops.zero_grad(box[k]);
      v.g[k] = DI::point(1);
      values[static_cast<size_t>(src_[k])] = std::move(v);
    }
    std::vector<GV> slots;
    for (const auto& d : cs_.defs) {
      leaves.clear();
      for (int lv : d.leaf_vars) leaves.push_back(values[static_cast<size_t>(lv)]);
      values[static_cast<size_t>(d.var)] = run<GV>(d.program, leaves, ops, slots);
    }
    GV obj = values[static_cast<size_t>(cs_.objective)];
    if (sign_ < 0) obj = ops.neg(obj);
    DI range = obj.v;
    if (!nonsmooth) {
      // Mean-value form around the box centre.
      std::vector<DI> centre(box.size());
      for (size_t k = 0; k < box.size(); ++k) centre[k] = DI::point(box[k].mid());
      DI fc = natural(centre);
      DI mv = fc;
      for (size_t k = 0; k < box.size(); ++k) mv = mv + obj.g[k] * (box[k] - centre[k]);
      DI both = intersect(range, mv);
      if (both.lo <= both.hi) range = both;
    }
    return {std::move(box), range.hi, std::move(obj.g), !nonsmooth};
  }

  DI natural(const std::vector<DI>& box) const {
    DoubleOps ops;
    std::vector<DI> values(cs_.vars.size()), leaves, slots;
    for (size_t k = 0; k < src_.size(); ++k) values[static_cast<size_t>(src_[k])] = box[k];
    for (const auto& d : cs_.defs) {
      leaves.clear();
      for (int lv : d.leaf_vars) leaves.push_back(values[static_cast<size_t>(lv)]);
      values[static_cast<size_t>(d.var)] = run<DI>(d.program, leaves, ops, slots);
    }
    DI v = values[static_cast<size_t>(cs_.objective)];
    return sign_ < 0 ? -v : v;
  }

  // Exact sign·objective at a point (clamped into the rational source box).
  std::optional<Rational> exact(const std::vector<double>& point) const {
    std::vector<Rational> xs;
    for (size_t k = 0; k < point.size(); ++k) {
      Rational x = rational_from_double(point[k]);
      if (x < exact_box_[k].lo) x = exact_box_[k].lo;
      if (x > exact_box_[k].hi) x = exact_box_[k].hi;
      xs.push_back(std::move(x));
    }
    try {
      Rational v = cs_.evaluate(std::span<const Rational>(xs))[static_cast<size_t>(cs_.objective)];
      return sign_ < 0 ? Rational(-v) : v;
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  }

  // Candidate points inside a node: centre, and the gradient-suggested corner.
  void probe(const Node& n, std::optional<Rational>& best) const {
    std::vector<double> centre, corner;
    for (size_t k = 0; k < n.box.size(); ++k) {
      centre.push_back(n.box[k].mid());
      const DI& g = n.grad[k];
      double c = g.lo >= 0 ? n.box[k].hi : g.hi <= 0 ? n.box[k].lo : n.box[k].mid();
      corner.push_back(c);
    }
    for (const auto* pt : {&centre, &corner}) {
      auto v = exact(*pt);
      if (v && (!best || *v > *best)) best = v;
    }
  }

  // Fixes monotone coordinates at their improving endpoint, then splits.
  std::vector<std::vector<DI>> branch(const Node& n) const {
    std::vector<DI> box = n.box;
    if (n.smooth) {
      for (size_t k = 0; k < box.size(); ++k) {
        if (box[k].width() == 0) continue;
        if (n.grad[k].lo >= 0) box[k] = DI::point(box[k].hi);
        else if (n.grad[k].hi <= 0) box[k] = DI::point(box[k].lo);
      }
      if (box != n.box) return {box};
    }
    size_t best = 0;
    double score = -1;
    for (size_t k = 0; k < box.size(); ++k) {
      double w = box[k].width();
      double s = n.smooth ? w * std::max(n.grad[k].mag(), 1e-300) : w;
      if (w > 0 && s > score) {
        score = s;
        best = k;
      }
    }
    if (score < 0) return {};
    double m = box[best].mid();
    std::vector<DI> left = box, right = box;
    left[best].hi = m;
    right[best].lo = m;
    return {left, right};
  }

  const std::vector<DI>& root_box() const { return box0_; }

 private:
  const ConstraintSystem& cs_;
  int sign_;
  std::vector<int> src_;
  std::vector<Interval> exact_box_;
  std::vector<DI> box0_;
};

// ub <= r, safe for infinite ub.
bool ub_le(double ub, const Rational& r) {
  if (std::isinf(ub)) return ub < 0;
  return Rational(ub) <= r;
}

bool gap_below(double ub, const Rational& best, const Rational& eps) {
  if (std::isinf(ub)) return ub < 0;
  return Rational(ub) - best < eps;
}

bool is_point(const std::vector<DI>& box) {
  for (const auto& d : box)
    if (d.width() > 0) return false;
  return true;
}

// Shared best-first loop. `decide` returns a verdict to stop with, or nullopt
// to continue; it sees the incumbent (sign-adjusted) and the top node.
struct LoopOutcome {
  std::optional<Rational> best;
  double top_ub = kInf;
  bool exhausted = false;  // queue emptied: best is the exact optimum
  bool capped = false;
  size_t nodes = 0;
  std::optional<SatResult> verdict;
};

template <typename Decide>
LoopOutcome search(const ConstraintSystem& cs, Side side, size_t max_nodes, Decide decide) {
  Searcher S(cs, side);
  LoopOutcome out;
  std::priority_queue<Searcher::Node> queue;
  auto admit = [&](Searcher::Node n) {
    ++out.nodes;
    S.probe(n, out.best);
    if (is_point(n.box)) {
      std::vector<double> pt;
      for (const auto& d : n.box) pt.push_back(d.lo);
      if (auto v = S.exact(pt)) n.ub = DI::enclose(*v).hi;
    }
    if (out.best && ub_le(n.ub, *out.best)) return;
    queue.push(std::move(n));
  };
  admit(S.bound(S.root_box()));
  while (true) {
    if (queue.empty()) {
      out.exhausted = true;
      out.top_ub = out.best ? to_double(*out.best) : -kInf;
      return out;
    }
    const Searcher::Node& top = queue.top();
    out.top_ub = top.ub;
    if (auto v = decide(out.best, top)) {
      out.verdict = v;
      return out;
    }
    if (out.nodes >= max_nodes) {
      out.capped = true;
      return out;
    }
    Searcher::Node n = top;
    queue.pop();
    for (auto& child : S.branch(n)) admit(S.bound(std::move(child)));
  }
}

}  // namespace

BnbResult bnb_bound(const ConstraintSystem& cs, Side side, const BnbOptions& options) {
  const Rational& eps = options.epsilon;
  auto decide = [&](const std::optional<Rational>& best,
                    const Searcher::Node& top) -> std::optional<SatResult> {
    if (best && gap_below(top.ub, *best, eps)) return SatResult::Unsat;
    return std::nullopt;
  };
  LoopOutcome o = search(cs, side, options.max_nodes, decide);
  BnbResult r;
  r.nodes = o.nodes;
  r.capped = o.capped;
  // The exact interval enclosure caps the bound when the search stopped early.
  Interval iv = cs.evaluate(std::span<const Interval>(cs.source_box()))[static_cast<size_t>(cs.objective)];
  Rational cap = side == Side::Upper ? iv.hi : Rational(-iv.lo);
  Rational bound = cap;
  if (o.exhausted && o.best) bound = *o.best;
  else if (!std::isinf(o.top_ub) && Rational(o.top_ub) < cap) bound = Rational(o.top_ub);
  Rational best = o.best ? *o.best : bound;
  if (bound < best) bound = best;
  r.bound = side == Side::Upper ? bound : Rational(-bound);
  r.witness = side == Side::Upper ? best : Rational(-best);
  return r;
}

SatResult bnb_decide(const ConstraintSystem& cs, Side side, const Rational& bound,
                     std::size_t max_nodes) {
  Rational target = side == Side::Upper ? bound : Rational(-bound);
  auto decide = [&](const std::optional<Rational>& best,
                    const Searcher::Node& top) -> std::optional<SatResult> {
    if (best && *best > target) return SatResult::Sat;
    if (ub_le(top.ub, target)) return SatResult::Unsat;
    return std::nullopt;
  };
  LoopOutcome o = search(cs, side, max_nodes, decide);
  if (o.verdict) return *o.verdict;
  if (o.exhausted) return o.best && *o.best > target ? SatResult::Sat : SatResult::Unsat;
  return SatResult::Unknown;
}

}  // namespace bw
