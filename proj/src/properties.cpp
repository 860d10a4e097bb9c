#include "prefset/properties.hpp"

#include <algorithm>
#include <map>

namespace prefset {

std::string to_string(const PropertyValue& value) {
  if (value.integral) return std::to_string(value.v);
  return value.as_bool() ? "true" : "false";
}

int SetProperty::connective_budget() const {
  int k = phi.connective_count();
  if (kind == PropertyKind::count_vs_count)
    k = std::max(k, psi.connective_count());
  return k;
}

int PropertySet::index_of(const std::string& id) const {
  for (int i = 0; i < size(); ++i)
    if (props[i].id == id) return i;
  return -1;
}

bool PropertyAssignment::full() const {
  for (const auto& v : values)
    if (!v) return false;
  return true;
}

std::vector<PropertyValue> value_domain(const SetProperty& p,
                                        int catalog_size) {
  std::vector<PropertyValue> out;
  if (p.boolean()) {
    out.push_back(PropertyValue::of_bool(true));
    out.push_back(PropertyValue::of_bool(false));
  } else {
    for (long c = 0; c <= catalog_size; ++c)
      out.push_back(PropertyValue::of_count(c));
  }
  return out;
}

PropertyValue eval_property(const SetProperty& p, const Catalog& catalog,
                            const std::vector<int>& subset) {
  long phi_count = count_satisfying(p.phi, catalog, subset);
  switch (p.kind) {
    case PropertyKind::count_vs_const:
      return PropertyValue::of_bool(rel_holds(phi_count, p.rel, p.k));
    case PropertyKind::count_vs_count: {
      long psi_count = count_satisfying(p.psi, catalog, subset);
      return PropertyValue::of_bool(rel_holds(phi_count, p.rel, psi_count));
    }
    case PropertyKind::counter:
      return PropertyValue::of_count(phi_count);
  }
  return PropertyValue::of_bool(false);
}

namespace {

std::vector<PropertyValue> boolean_set(bool has_true, bool has_false) {
  std::vector<PropertyValue> out;
  if (has_true) out.push_back(PropertyValue::of_bool(true));
  if (has_false) out.push_back(PropertyValue::of_bool(false));
  return out;
}

}  // namespace

std::vector<PropertyValue> reachable_values(const SetProperty& p,
                                            const Catalog& catalog,
                                            const std::vector<int>& current,
                                            const std::vector<int>& remaining) {
  long cur = count_satisfying(p.phi, catalog, current);
  switch (p.kind) {
    case PropertyKind::count_vs_const: {
      long extra = count_satisfying(p.phi, catalog, remaining);
      bool has_true = false, has_false = false;
      for (long t = 0; t <= extra && !(has_true && has_false); ++t)
        (rel_holds(cur + t, p.rel, p.k) ? has_true : has_false) = true;
      return boolean_set(has_true, has_false);
    }
    case PropertyKind::count_vs_count: {
      // Only items in exactly one of the phi/psi classes move the
      // difference, and every value in the interval is achievable.
      long psi_cur = 0, only_phi = 0, only_psi = 0;
      for (int i : current)
        if (eval_formula(p.psi, catalog.item(i))) ++psi_cur;
      for (int i : remaining) {
        bool a = eval_formula(p.phi, catalog.item(i));
        bool b = eval_formula(p.psi, catalog.item(i));
        if (a && !b) ++only_phi;
        if (b && !a) ++only_psi;
      }
      long base = cur - psi_cur;
      bool has_true = false, has_false = false;
      for (long d = base - only_psi; d <= base + only_phi; ++d) {
        (rel_holds(d, p.rel, 0) ? has_true : has_false) = true;
        if (has_true && has_false) break;
      }
      return boolean_set(has_true, has_false);
    }
    case PropertyKind::counter: {
      long extra = count_satisfying(p.phi, catalog, remaining);
      std::vector<PropertyValue> out;
      for (long c = cur; c <= cur + extra; ++c)
        out.push_back(PropertyValue::of_count(c));
      return out;
    }
  }
  return {};
}

namespace {

// Rewrites strict relations and resolves bounds that fall outside the
// achievable sum range [lo, hi].
void normalize_constraint(CardinalityConstraint& c) {
  if (c.rel == Rel::lt) {
    c.rel = Rel::le;
    c.bound -= 1;
  } else if (c.rel == Rel::gt) {
    c.rel = Rel::ge;
    c.bound += 1;
  }
  long lo = -static_cast<long>(c.neg.size());
  long hi = static_cast<long>(c.pos.size());
  switch (c.rel) {
    case Rel::ge:
      if (c.bound <= lo) c.constant = true;
      else if (c.bound > hi) c.constant = false;
      break;
    case Rel::le:
      if (c.bound >= hi) c.constant = true;
      else if (c.bound < lo) c.constant = false;
      break;
    case Rel::eq:
      if (c.bound < lo || c.bound > hi) c.constant = false;
      else if (lo == hi) c.constant = true;
      break;
    case Rel::ne:
      if (c.bound < lo || c.bound > hi) c.constant = true;
      else if (lo == hi) c.constant = false;
      break;
    default:
      break;
  }
}

}  // namespace

std::vector<CardinalityConstraint> property_to_constraints(
    const SetProperty& p, const PropertyValue& value, const Catalog& catalog) {
  CardinalityConstraint c;
  c.id = p.id;
  std::vector<uint8_t> phi_sat = satisfier_flags(p.phi, catalog);
  switch (p.kind) {
    case PropertyKind::count_vs_const: {
      for (int i = 0; i < catalog.size(); ++i)
        if (phi_sat[i]) c.pos.push_back(i);
      c.rel = value.as_bool() ? p.rel : negate(p.rel);
      c.bound = p.k;
      break;
    }
    case PropertyKind::count_vs_count: {
      std::vector<uint8_t> psi_sat = satisfier_flags(p.psi, catalog);
      for (int i = 0; i < catalog.size(); ++i) {
        if (phi_sat[i] && !psi_sat[i]) c.pos.push_back(i);
        if (psi_sat[i] && !phi_sat[i]) c.neg.push_back(i);
      }
      c.rel = value.as_bool() ? p.rel : negate(p.rel);
      c.bound = 0;
      break;
    }
    case PropertyKind::counter: {
      for (int i = 0; i < catalog.size(); ++i)
        if (phi_sat[i]) c.pos.push_back(i);
      c.rel = Rel::eq;
      c.bound = value.as_count();
      break;
    }
  }
  normalize_constraint(c);
  return {std::move(c)};
}

namespace {

// Admissible counts of a count-vs-const property, characterized over
// [0..horizon] plus the constant tail beyond it.
struct CountSet {
  std::vector<bool> head;
  bool tail = false;

  static CountSet of(Rel rel, long k, long horizon) {
    CountSet s;
    s.head.resize(horizon + 1);
    for (long t = 0; t <= horizon; ++t) s.head[t] = rel_holds(t, rel, k);
    s.tail = rel == Rel::ne || rel == Rel::gt || rel == Rel::ge;
    return s;
  }

  bool subset_of(const CountSet& other) const {
    for (size_t t = 0; t < head.size(); ++t)
      if (head[t] && !other.head[t]) return false;
    return !tail || other.tail;
  }

  bool disjoint_from(const CountSet& other) const {
    for (size_t t = 0; t < head.size(); ++t)
      if (head[t] && other.head[t]) return false;
    return !(tail && other.tail);
  }
};

}  // namespace

ConflictReport resolve_offline_conflicts(
    const std::vector<SetProperty>& props) {
  ConflictReport report;
  for (size_t i = 0; i < props.size(); ++i)
    for (size_t j = i + 1; j < props.size(); ++j) {
      const SetProperty& a = props[i];
      const SetProperty& b = props[j];
      if (a.kind != PropertyKind::count_vs_const ||
          b.kind != PropertyKind::count_vs_const)
        continue;
      if (!(a.phi == b.phi)) continue;
      long horizon = std::max(a.k, b.k) + 2;
      CountSet sa = CountSet::of(a.rel, a.k, horizon);
      CountSet sb = CountSet::of(b.rel, b.k, horizon);
      ConflictEntry entry;
      entry.first = static_cast<int>(i);
      entry.second = static_cast<int>(j);
      bool ab = sa.subset_of(sb);
      bool ba = sb.subset_of(sa);
      if (ab && ba) {
        entry.kind = ConflictKind::equivalent;
        entry.forced = {static_cast<int>(j), true};
      } else if (ab) {
        entry.kind = ConflictKind::first_subsumes_second;
        entry.forced = {static_cast<int>(j), true};
      } else if (ba) {
        entry.kind = ConflictKind::second_subsumes_first;
        entry.forced = {static_cast<int>(i), true};
      } else if (sa.disjoint_from(sb)) {
        entry.kind = ConflictKind::mutually_exclusive;
        entry.forced = {static_cast<int>(j), false};
      } else {
        entry.kind = ConflictKind::compatible;
      }
      report.entries.push_back(std::move(entry));
    }
  return report;
}

}  // namespace prefset
