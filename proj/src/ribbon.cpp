#include "s3qd/ribbon.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace s3qd {

namespace {

Elem dual_multiply(const Triangle& t, Elem w, Elem x) {
  const bool aligned = t.alignment == Alignment::Aligned;
  if (t.orientation == Orientation::CCW) return aligned ? mul(x, inv(w)) : mul(w, x);
  return aligned ? mul(inv(w), x) : mul(x, w);
}

// One step of the reference evaluator: a direct edge with a sign, or a dual triangle.
struct Item {
  bool direct;
  SignedEdge se;
  Triangle tri;
};

std::vector<Item> items_of(const RibbonPath& r) {
  std::vector<Item> out;
  for (const auto& s : r.z_prefix) out.push_back({true, s, {}});
  for (const auto& t : r.triangles) {
    if (t.kind == TriKind::Direct)
      out.push_back({true, {t.edge, t.alignment == Alignment::Aligned ? 1 : -1}, t});
    else
      out.push_back({false, {}, t});
  }
  for (const auto& s : r.z_suffix) out.push_back({true, s, {}});
  return out;
}

WaveFunction apply_item(const Item& it, MicroLabel f, const WaveFunction& psi) {
  if (it.direct) {
    return filter_terms(psi, [&](Key k) {
      Elem x = psi.get(k, it.se.edge);
      return (it.se.sign > 0 ? x : inv(x)) == f.z;
    });
  }
  return apply_triangle(it.tri, f, psi);
}

WaveFunction recurse(const std::vector<Item>& items, size_t at, MicroLabel f, const WaveFunction& psi) {
  if (at + 1 == items.size()) return apply_item(items[at], f, psi);
  WaveFunction out(psi.lattice());
  for (Elem k = 0; k < ORDER; ++k) {
    if (!items[at].direct && k != E) continue;  // dual triangles carry delta_{k,e}
    Elem kb = inv(k);
    WaveFunction rest = recurse(items, at + 1, {mul(kb, f.z), mul(mul(kb, f.v), k)}, psi);
    if (rest.empty()) continue;
    out = out + apply_item(items[at], {k, f.v}, rest);
  }
  return out;
}

}  // namespace

WaveFunction apply_triangle(const Triangle& t, MicroLabel f, const WaveFunction& psi) {
  if (t.kind == TriKind::Direct) {
    const bool aligned = t.alignment == Alignment::Aligned;
    return filter_terms(psi, [&](Key k) {
      Elem x = psi.get(k, t.edge);
      return (aligned ? x : inv(x)) == f.z;
    });
  }
  if (f.z != E) return WaveFunction(psi.lattice());
  return map_terms(psi, [&](Key k) {
    return std::pair<Key, cplx>{psi.set(k, t.edge, dual_multiply(t, f.v, psi.get(k, t.edge))), 1.0};
  });
}

WaveFunction apply_ribbon(MicroLabel f, const RibbonPath& r, const WaveFunction& psi) {
  std::set<int> direct_edges, dual_edges;
  for (const auto& s : r.z_prefix) direct_edges.insert(s.edge);
  for (const auto& s : r.z_suffix) direct_edges.insert(s.edge);
  for (const auto& t : r.triangles) (t.kind == TriKind::Direct ? direct_edges : dual_edges).insert(t.edge);
  for (int e : dual_edges)
    if (direct_edges.count(e)) throw std::invalid_argument("ribbon uses edge " + std::to_string(e) + " as both direct and dual");

  return map_terms(psi, [&](Key k) {
    Key out = k;
    Elem x = E;
    for (const auto& s : r.z_prefix) {
      Elem g = psi.get(k, s.edge);
      x = mul(x, s.sign > 0 ? g : inv(g));
    }
    for (const auto& t : r.triangles) {
      Elem g = psi.get(k, t.edge);
      if (t.kind == TriKind::Direct) {
        x = mul(x, t.alignment == Alignment::Aligned ? g : inv(g));
      } else {
        Elem w = mul(mul(inv(x), f.v), x);
        out = psi.set(out, t.edge, dual_multiply(t, w, psi.get(out, t.edge)));
      }
    }
    for (const auto& s : r.z_suffix) {
      Elem g = psi.get(k, s.edge);
      x = mul(x, s.sign > 0 ? g : inv(g));
    }
    return std::pair<Key, cplx>{out, x == f.z ? 1.0 : 0.0};
  });
}

WaveFunction apply_ribbon_recursive(MicroLabel f, const RibbonPath& r, const WaveFunction& psi) {
  auto items = items_of(r);
  return recurse(items, 0, f, psi);
}

const Irrep& label_irrep(const AnyonLabel& a) { return irrep(centralizer_kind(a.cls), a.irrep); }

void check_label(const AnyonLabel& a) {
  const Irrep& R = label_irrep(a);
  if (class_of(a.c) != a.cls || class_of(a.cp) != a.cls) throw std::invalid_argument("label flavors are not in the class");
  if (a.j < 1 || a.j > R.dim || a.jp < 1 || a.jp > R.dim) throw std::invalid_argument("label index out of range");
}

std::vector<std::pair<cplx, MicroLabel>> anyon_expansion(const AnyonLabel& a) {
  check_label(a);
  const Irrep& R = label_irrep(a);
  const Elem r = conjugacy_class(a.cls).representative;
  const Elem qc = q_rep(a.c, r), qcp = q_rep(a.cp, r);
  const double pref = double(R.dim) / double(R.elements.size());
  std::vector<std::pair<cplx, MicroLabel>> out;
  for (Elem n : R.elements) {
    cplx coef = pref * R(n)(a.j - 1, a.jp - 1);
    if (std::abs(coef) < kPrune) continue;
    out.push_back({coef, {mul(mul(qc, n), inv(qcp)), a.c}});
  }
  return out;
}

WaveFunction apply_combination(const std::vector<std::pair<cplx, MicroLabel>>& terms, const RibbonPath& r,
                               const WaveFunction& psi) {
  WaveFunction out(psi.lattice());
  for (const auto& [c, f] : terms) {
    WaveFunction part = apply_ribbon(f, r, psi);
    for (auto& [k, a] : part.terms()) out.add(k, c * a);
  }
  return out.prune();
}

WaveFunction apply_anyon_ribbon(const AnyonLabel& a, const RibbonPath& r, const WaveFunction& psi) {
  return apply_combination(anyon_expansion(a), r, psi);
}

WaveFunction apply_anyon_ribbon_summed(ClassLabel cls, std::string_view irrep_label, Elem c, int j, int jp,
                                       const RibbonPath& r, const WaveFunction& psi) {
  std::vector<std::pair<cplx, MicroLabel>> terms;
  for (Elem cp : conjugacy_class(cls).members) {
    auto part = anyon_expansion({cls, std::string(irrep_label), c, j, cp, jp});
    terms.insert(terms.end(), part.begin(), part.end());
  }
  return apply_combination(terms, r, psi);
}

std::string format_label(const AnyonLabel& a) {
  std::ostringstream os;
  os << class_name(a.cls) << ':' << a.irrep << ':' << name(a.c) << ':' << a.j << ':' << name(a.cp) << ':' << a.jp;
  return os.str();
}

AnyonLabel parse_label(std::string_view s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 6) throw InputError("anyon label needs 6 fields: '" + std::string(s) + "'");
  AnyonLabel a;
  if (parts[0] == "C1")
    a.cls = ClassLabel::C1;
  else if (parts[0] == "C2")
    a.cls = ClassLabel::C2;
  else if (parts[0] == "C3")
    a.cls = ClassLabel::C3;
  else
    throw InputError("unknown class '" + parts[0] + "'");
  a.irrep = parts[1];
  try {
    a.c = parse_elem(parts[2]);
    a.j = std::stoi(parts[3]);
    a.cp = parse_elem(parts[4]);
    a.jp = std::stoi(parts[5]);
    check_label(a);
  } catch (const std::exception& e) {
    throw InputError(std::string("bad anyon label: ") + e.what());
  }
  return a;
}

RibbonPath direct_loop(const Lattice& L, const Site& start, Orientation o) {
  return trace_ribbon(L, start, "DDDD", o);
}

RibbonPath dual_loop(const Lattice& L, const Site& start, Orientation o) {
  return trace_ribbon(L, start, "UUUU", o);
}

MicroLabel exchange_label(Orientation o, MicroLabel f1, MicroLabel f2) {
  Elem v2 = o == Orientation::CCW ? inv(f2.v) : f2.v;
  return {mul(mul(mul(f1.z, inv(f2.z)), v2), f2.z), f1.v};
}

void check_exchange_geometry(const RibbonPath& t1, const RibbonPath& t2) {
  if (!(t1.end() == t2.end())) throw std::invalid_argument("ribbons do not end at one site");
  if (t1.orientation != t2.orientation) throw std::invalid_argument("ribbons differ in local orientation");
  auto edges = [](const RibbonPath& r) {
    std::set<int> s;
    for (const auto& t : r.triangles) s.insert(t.edge);
    for (const auto& e : r.z_prefix) s.insert(e.edge);
    for (const auto& e : r.z_suffix) s.insert(e.edge);
    return s;
  };
  auto a = edges(t1), b = edges(t2);
  std::vector<int> shared;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
  if (shared.size() != 1) throw std::invalid_argument("ribbons must share exactly one edge");
  const Triangle &l1 = t1.triangles.back(), &l2 = t2.triangles.back();
  if (l1.edge != shared[0] || l2.edge != shared[0]) throw std::invalid_argument("shared edge must close both ribbons");
  if (l1.kind != TriKind::Direct || l2.kind != TriKind::Dual)
    throw std::invalid_argument("shared edge must be direct on t1 and dual on t2");
}

}  // namespace s3qd
