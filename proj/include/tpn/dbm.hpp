#pragma once

// Difference bound matrices over named variables.
//
// Entry (i,j) of a DBM bounds x_i - x_j. Index 0 is the reference variable,
// written "0", whose value is fixed at zero, so (i,0) is an upper bound on x_i
// and (0,j) bounds -x_j. All constraints built by the public API are
// non-strict; strict entries appear only in the pieces returned by
// difference(), where complementing a non-strict constraint needs them.

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tpn/rational.hpp"

namespace tpn {

inline constexpr std::string_view kZero = "0";

/// Upper bound of a difference constraint: a rational or +inf.
class Bound {
 public:
  Bound() = default;  // +inf

  static Bound le(Rational c) { return Bound(c, false); }
  static Bound lt(Rational c) { return Bound(c, true); }
  static Bound infinity() { return Bound(); }
  static Bound zero() { return le(0); }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  bool is_strict() const { return strict_; }
  const Rational& value() const { return value_; }

  /// Bound on y - x equivalent to NOT (x - y <= this).
  Bound complement() const {
    if (infinite_) throw std::logic_error("complement of an infinite bound");
    return Bound(-value_, !strict_);
  }

  friend Bound operator+(const Bound& a, const Bound& b) {
    if (a.infinite_ || b.infinite_) return Bound();
    return Bound(a.value_ + b.value_, a.strict_ || b.strict_);
  }

  friend bool operator==(const Bound& a, const Bound& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_ && a.strict_ == b.strict_;
  }
  friend std::strong_ordering operator<=>(const Bound& a, const Bound& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    if (auto c = a.value_ <=> b.value_; c != 0) return c;
    // (c,<) is tighter than (c,<=)
    return b.strict_ <=> a.strict_;
  }

  std::string str() const {
    if (infinite_) return "<= inf";
    return std::string(strict_ ? "< " : "<= ") + value_.str();
  }

 private:
  Bound(Rational v, bool strict) : value_(v), infinite_(false), strict_(strict) {}

  Rational value_{};
  bool infinite_ = true;
  bool strict_ = false;
};

/// Atomic constraint x - y <= bound; either side may be the reference "0".
struct Constraint {
  std::string x;
  std::string y;
  Bound bound;

  static Constraint diff(std::string x, std::string y, Rational c) {
    return {std::move(x), std::move(y), Bound::le(c)};
  }
  static Constraint upper(std::string x, Rational c) { return {std::move(x), std::string(kZero), Bound::le(c)}; }
  static Constraint lower(std::string x, Rational c) { return {std::string(kZero), std::move(x), Bound::le(-c)}; }
};

class Dbm {
 public:
  /// The empty conjunction over no variables.
  Dbm() : entries_(1, Bound::zero()) {}

  /// Unconstrained DBM: zero diagonal, +inf everywhere else.
  explicit Dbm(std::vector<std::string> vars) : vars_(std::move(vars)) {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == kZero) throw std::invalid_argument("variable name '0' is reserved");
      for (std::size_t j = 0; j < i; ++j)
        if (vars_[i] == vars_[j]) throw std::invalid_argument("name collision: " + vars_[i]);
    }
    entries_.assign(dim() * dim(), Bound::infinity());
    for (std::size_t i = 0; i < dim(); ++i) ref(i, i) = Bound::zero();
    canonical_ = true;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  std::size_t dim() const { return vars_.size() + 1; }

  std::optional<std::size_t> index(std::string_view name) const {
    if (name == kZero) return 0;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return i + 1;
    return std::nullopt;
  }
  std::size_t require(std::string_view name) const {
    if (auto i = index(name)) return *i;
    throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
  }
  bool has(std::string_view name) const { return index(name).has_value(); }
  const std::string& name(std::size_t i) const {
    static const std::string zero(kZero);
    return i == 0 ? zero : vars_[i - 1];
  }

  const Bound& at(std::size_t i, std::size_t j) const { return entries_[i * dim() + j]; }
  const Bound& at(std::string_view x, std::string_view y) const { return at(require(x), require(y)); }

  /// Intersects entry (i,j) with `b`.
  void tighten(std::size_t i, std::size_t j, const Bound& b) {
    if (b < ref(i, j)) {
      ref(i, j) = b;
      canonical_ = false;
    }
  }
  /// Overwrites entry (i,j); used by operations that rebuild matrices.
  void set(std::size_t i, std::size_t j, const Bound& b) {
    ref(i, j) = b;
    canonical_ = false;
  }

  bool is_canonical() const { return canonical_; }
  /// Meaningful once canonical: true iff the solution set is empty.
  bool is_empty() const { return empty_; }

  /// Floyd-Warshall closure; marks the DBM empty on a negative cycle.
  void close() {
    if (canonical_) return;
    const std::size_t n = dim();
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        const Bound& ik = ref(i, k);
        if (ik.is_infinite()) continue;
        for (std::size_t j = 0; j < n; ++j) {
          const Bound& kj = ref(k, j);
          if (kj.is_infinite()) continue;
          Bound via = ik + kj;
          if (via < ref(i, j)) ref(i, j) = via;
        }
        if (ref(i, i) < Bound::zero()) {
          empty_ = true;
          canonical_ = true;
          return;
        }
      }
    empty_ = false;
    for (std::size_t i = 0; i < n; ++i)
      if (ref(i, i) < Bound::zero()) empty_ = true;
    canonical_ = true;
  }

 private:
  Bound& ref(std::size_t i, std::size_t j) { return entries_[i * dim() + j]; }

  std::vector<std::string> vars_;
  std::vector<Bound> entries_;
  bool canonical_ = true;
  bool empty_ = false;
};

using DbmSet = std::vector<Dbm>;

namespace detail {
/// Keeps an inconsistent source inconsistent after its entries were copied.
inline void carry_emptiness(const Dbm& src, Dbm& out) {
  if (src.is_canonical() && src.is_empty()) out.set(0, 0, Bound::le(-1));
}

}  // namespace detail

inline Dbm canonicalize(Dbm d) {
  d.close();
  return d;
}

inline bool is_consistent(const Dbm& d) {
  if (d.is_canonical()) return !d.is_empty();
  return !canonicalize(d).is_empty();
}

inline Dbm conjoin(Dbm d, const Constraint& c) {
  d.tighten(d.require(c.x), d.require(c.y), c.bound);
  return d;
}

inline Dbm conjoin(Dbm d, std::span<const Constraint> cs) {
  for (const auto& c : cs) d.tighten(d.require(c.x), d.require(c.y), c.bound);
  return d;
}

/// Adds unconstrained variables.
inline Dbm extend(const Dbm& d, const std::vector<std::string>& new_vars) {
  if (new_vars.empty()) return d;
  std::vector<std::string> vars = d.vars();
  vars.insert(vars.end(), new_vars.begin(), new_vars.end());
  Dbm out(std::move(vars));
  for (std::size_t i = 0; i < d.dim(); ++i)
    for (std::size_t j = 0; j < d.dim(); ++j)
      if (i != j) out.set(i, j, d.at(i, j));
  detail::carry_emptiness(d, out);
  if (d.is_canonical()) out.close();
  return out;
}

/// Relabels variables; entries are untouched.
inline Dbm rename(const Dbm& d, const std::map<std::string, std::string>& mapping) {
  std::vector<std::string> vars = d.vars();
  for (const auto& [from, to] : mapping) {
    auto it = std::find(vars.begin(), vars.end(), from);
    if (it == vars.end()) throw std::invalid_argument("unknown variable '" + from + "'");
    *it = to;
  }
  Dbm out(std::move(vars));  // rejects collisions
  for (std::size_t i = 0; i < d.dim(); ++i)
    for (std::size_t j = 0; j < d.dim(); ++j)
      if (i != j) out.set(i, j, d.at(i, j));
  detail::carry_emptiness(d, out);
  if (d.is_canonical()) out = canonicalize(std::move(out));
  return out;
}

/// Same constraints over a permutation of the variables.
inline Dbm reorder(const Dbm& d, const std::vector<std::string>& order) {
  if (order.size() != d.size()) throw std::invalid_argument("reorder: not a permutation");
  std::vector<std::size_t> src(order.size() + 1, 0);
  for (std::size_t i = 0; i < order.size(); ++i) src[i + 1] = d.require(order[i]);
  Dbm out(order);
  for (std::size_t i = 0; i < out.dim(); ++i)
    for (std::size_t j = 0; j < out.dim(); ++j)
      if (i != j) out.set(i, j, d.at(src[i], src[j]));
  detail::carry_emptiness(d, out);
  if (d.is_canonical()) out.close();
  return out;
}

/// Existential elimination: canonicalize, then drop the rows and columns.
inline Dbm project_out(const Dbm& d, const std::vector<std::string>& vars_to_remove) {
  Dbm c = canonicalize(d);
  std::vector<bool> drop(c.dim(), false);
  for (const auto& v : vars_to_remove) drop[c.require(v)] = true;
  std::vector<std::string> keep_names;
  std::vector<std::size_t> keep{0};
  for (std::size_t i = 1; i < c.dim(); ++i)
    if (!drop[i]) {
      keep.push_back(i);
      keep_names.push_back(c.name(i));
    }
  Dbm out(std::move(keep_names));
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j)
      if (i != j) out.set(i, j, c.at(keep[i], keep[j]));
  detail::carry_emptiness(c, out);
  // Deleting rows of a closed matrix keeps it closed.
  out.close();
  return out;
}

/// Substitutes x_i + x_by for every shifted x_i, i.e. re-expresses the
/// shifted variables relative to `by`, and keeps only solutions where every
/// shifted variable is nonnegative.
///
/// The shifted set must be empty or contain every variable except `by`.
/// The result keeps `by` with its own simple bounds but without any relation
/// to the shifted variables (x'_i + x_by is not a difference), so the
/// projection of the result away from `by` is exact.
inline Dbm substitute_shift(const Dbm& d, const std::vector<std::string>& shifted, const std::string& by) {
  const std::size_t b = d.require(by);
  if (shifted.empty()) return d;
  std::vector<bool> is_shifted(d.dim(), false);
  for (const auto& v : shifted) {
    const std::size_t i = d.require(v);
    if (i == b) throw std::invalid_argument("cannot shift '" + by + "' by itself");
    is_shifted[i] = true;
  }
  for (std::size_t i = 1; i < d.dim(); ++i)
    if (i != b && !is_shifted[i])
      throw std::invalid_argument("substitute_shift: variable '" + d.name(i) +
                                  "' must be shifted along with the others");
  Dbm c = canonicalize(d);
  if (c.is_empty()) return c;
  Dbm out(d.vars());
  for (std::size_t i = 1; i < c.dim(); ++i) {
    if (i == b) continue;
    for (std::size_t j = 1; j < c.dim(); ++j)
      if (j != b && i != j) out.set(i, j, c.at(i, j));
    out.set(i, 0, c.at(i, b));
    out.set(0, i, std::min(c.at(b, i), Bound::zero()));
  }
  out.set(b, 0, c.at(b, 0));
  out.set(0, b, c.at(0, b));
  out.close();
  return out;
}

/// Row and column of the reference variable removed (set to +inf).
inline Dbm triangular_view(const Dbm& d) {
  Dbm c = canonicalize(d);
  if (c.is_empty()) return c;
  for (std::size_t i = 1; i < c.dim(); ++i) {
    c.set(i, 0, Bound::infinity());
    c.set(0, i, Bound::infinity());
  }
  c.close();
  return c;
}

namespace detail {
inline bool same_var_set(const Dbm& a, const Dbm& b) {
  if (a.size() != b.size()) return false;
  for (const auto& v : a.vars())
    if (!b.has(v)) return false;
  return true;
}
inline Dbm aligned(const Dbm& a, const Dbm& b) {
  if (!same_var_set(a, b)) throw std::invalid_argument("DBM variable mismatch");
  if (a.vars() == b.vars()) return b;
  return reorder(b, a.vars());
}
}  // namespace detail

/// sol(b) is a subset of sol(a).
inline bool includes(const Dbm& a, const Dbm& b) {
  const Dbm cb = canonicalize(detail::aligned(a, b));
  if (cb.is_empty()) return true;
  const Dbm ca = canonicalize(a);
  if (ca.is_empty()) return false;
  for (std::size_t i = 0; i < ca.dim(); ++i)
    for (std::size_t j = 0; j < ca.dim(); ++j)
      if (ca.at(i, j) < cb.at(i, j)) return false;
  return true;
}

inline bool operator==(const Dbm& a, const Dbm& b) {
  if (!detail::same_var_set(a, b)) return false;
  const Dbm ca = canonicalize(a);
  const Dbm cb = canonicalize(detail::aligned(a, b));
  if (ca.is_empty() || cb.is_empty()) return ca.is_empty() == cb.is_empty();
  for (std::size_t i = 0; i < ca.dim(); ++i)
    for (std::size_t j = 0; j < ca.dim(); ++j)
      if (!(ca.at(i, j) == cb.at(i, j))) return false;
  return true;
}

/// Smallest DBM containing every member (entry-wise maximum).
inline Dbm enclosing(std::span<const Dbm> ds) {
  if (ds.empty()) throw std::invalid_argument("enclosing of an empty list");
  Dbm out = canonicalize(ds.front());
  for (const auto& raw : ds.subspan(1)) {
    const Dbm d = canonicalize(detail::aligned(out, raw));
    for (std::size_t i = 0; i < out.dim(); ++i)
      for (std::size_t j = 0; j < out.dim(); ++j)
        if (out.at(i, j) < d.at(i, j)) out.set(i, j, d.at(i, j));
  }
  out.close();
  return out;
}

/// sol(a) minus sol(b) as pairwise-disjoint DBMs.
///
/// b's finite constraints are negated one at a time in row-major order; each
/// piece is what remains of `a` after the earlier constraints were assumed
/// and the current one violated.
inline DbmSet difference(const Dbm& a, const Dbm& b) {
  Dbm rest = canonicalize(a);
  const Dbm cb = canonicalize(detail::aligned(a, b));
  DbmSet out;
  if (rest.is_empty()) return out;
  if (cb.is_empty()) {
    out.push_back(rest);
    return out;
  }
  for (std::size_t i = 0; i < cb.dim(); ++i)
    for (std::size_t j = 0; j < cb.dim(); ++j) {
      if (i == j) continue;
      const Bound& c = cb.at(i, j);
      if (c.is_infinite() || !(c < rest.at(i, j))) continue;
      Dbm piece = rest;
      piece.tighten(j, i, c.complement());
      piece.close();
      if (!piece.is_empty()) out.push_back(std::move(piece));
      rest.tighten(i, j, c);
      rest.close();
      if (rest.is_empty()) return out;
    }
  return out;
}

/// Enclosing DBM when it equals the union of the members, otherwise nullopt.
///
/// Subtracts the members in list order from the enclosing DBM and checks that
/// what is left fits in the last member.
inline std::optional<Dbm> convex_union(std::span<const Dbm> ds) {
  if (ds.empty()) throw std::invalid_argument("convex_union of an empty list");
  Dbm hull = enclosing(ds);
  DbmSet residue{hull};
  for (std::size_t k = 0; k + 1 < ds.size() && !residue.empty(); ++k) {
    DbmSet next;
    for (const auto& r : residue)
      for (auto& piece : difference(r, ds[k])) next.push_back(std::move(piece));
    residue = std::move(next);
  }
  for (const auto& r : residue)
    if (!includes(ds.back(), r)) return std::nullopt;
  return hull;
}

inline std::optional<Dbm> convex_union(const Dbm& a, const Dbm& b) {
  const Dbm pair[] = {a, b};
  return convex_union(std::span<const Dbm>(pair));
}

/// Finite off-diagonal entries of the canonical form.
inline std::vector<Constraint> constraints(const Dbm& d) {
  const Dbm c = canonicalize(d);
  std::vector<Constraint> out;
  for (std::size_t i = 0; i < c.dim(); ++i)
    for (std::size_t j = 0; j < c.dim(); ++j)
      if (i != j && c.at(i, j).is_finite()) out.push_back({c.name(i), c.name(j), c.at(i, j)});
  return out;
}

/// Sorted "x - y <= c" list of the canonical form; "true"/"false" for the
/// unconstrained and empty cases.
inline std::string to_string(const Dbm& d) {
  const Dbm c = canonicalize(d);
  if (c.is_empty()) return "false";
  std::vector<std::string> items;
  for (const auto& k : constraints(c)) items.push_back(k.x + " - " + k.y + " " + k.bound.str());
  if (items.empty()) return "true";
  std::sort(items.begin(), items.end());
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Dbm& d) { return os << to_string(d); }

inline std::size_t hash_value(const Dbm& d) {
  const Dbm c = canonicalize(d);
  std::size_t h = std::hash<bool>{}(c.is_empty());
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (const auto& v : c.vars()) mix(std::hash<std::string>{}(v));
  if (c.is_empty()) return h;
  for (std::size_t i = 0; i < c.dim(); ++i)
    for (std::size_t j = 0; j < c.dim(); ++j) {
      const Bound& b = c.at(i, j);
      mix(b.is_infinite() ? 0x51ed27 : std::hash<Rational>{}(b.value()) ^ (b.is_strict() ? 1 : 2));
    }
  return h;
}

}  // namespace tpn
