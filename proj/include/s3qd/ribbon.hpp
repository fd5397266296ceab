#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "s3qd/group.hpp"
#include "s3qd/lattice.hpp"
#include "s3qd/state.hpp"

namespace s3qd {

struct MicroLabel {
  Elem z = E;
  Elem v = E;
  bool operator==(const MicroLabel&) const = default;
};

// Single triangle operator F^{(k,v)}(t). Direct: delta_{k, x} with x the edge value
// (inverted when opposite). Dual: delta_{k, e} times a multiplication of the edge:
//   ccw opposite: x -> v x     ccw aligned: x -> x v^-1
//   cw aligned:   x -> v^-1 x  cw opposite: x -> x v
WaveFunction apply_triangle(const Triangle& t, MicroLabel f, const WaveFunction& psi);

// Constructive evaluation. Walks prefix, triangles and suffix keeping the running
// product x of direct edges; dual edges are multiplied as in apply_triangle with v
// replaced by x^-1 v x; finally projects x onto z. Requires the dual edges to be
// disjoint from the direct edges (std::invalid_argument otherwise).
WaveFunction apply_ribbon(MicroLabel f, const RibbonPath& r, const WaveFunction& psi);

// Reference evaluation by the splitting rule
//   F^{(z,v)}(t1 u rest) = sum_k F^{(k,v)}(t1) F^{(k^-1 z, k^-1 v k)}(rest),
// with prefix and suffix edges treated as extra direct triangles. Exponential in length.
WaveFunction apply_ribbon_recursive(MicroLabel f, const RibbonPath& r, const WaveFunction& psi);

// Anyon-basis label: class C, centralizer irrep R, u = (c, j), u' = (c', j'), j 1-based.
struct AnyonLabel {
  ClassLabel cls = ClassLabel::C1;
  std::string irrep = "+";
  Elem c = E;
  int j = 1;
  Elem cp = E;
  int jp = 1;
  bool operator==(const AnyonLabel&) const = default;
};

const Irrep& label_irrep(const AnyonLabel& a);
// Validates class membership and index bounds; throws std::invalid_argument.
void check_label(const AnyonLabel& a);
// Terms (coefficient, (z, v)) of
//   F^{(R,C);u,u'} = |R|/|Z(r)| sum_{n in Z(r)} Gamma^R_{jj'}(n) F^{(q_c n q_c'^-1, c)}.
std::vector<std::pair<cplx, MicroLabel>> anyon_expansion(const AnyonLabel& a);
WaveFunction apply_anyon_ribbon(const AnyonLabel& a, const RibbonPath& r, const WaveFunction& psi);
// Sum of F^{(R,C);(c,j),(c',j')} over c' with j' fixed: leaves no charge at the end vertex
// for the trivial irrep.
WaveFunction apply_anyon_ribbon_summed(ClassLabel cls, std::string_view irrep, Elem c, int j, int jp,
                                       const RibbonPath& r, const WaveFunction& psi);
// Linear combination of micro ribbons along one path.
WaveFunction apply_combination(const std::vector<std::pair<cplx, MicroLabel>>& terms, const RibbonPath& r,
                               const WaveFunction& psi);

// "C<1|2|3>:<irrep>:<c>:<j>:<c'>:<j'>", e.g. "C2:+:s:1:us:1".
std::string format_label(const AnyonLabel& a);
AnyonLabel parse_label(std::string_view s);

// Closed loops: four direct triangles around p from the given corner, and four dual
// triangles around vertex s starting from the given adjacent plaquette.
RibbonPath direct_loop(const Lattice& L, const Site& start, Orientation o);
RibbonPath dual_loop(const Lattice& L, const Site& start, Orientation o);

// Exchange rule for two ribbons ending at one site and sharing one edge:
// F2(t2) F1(t1) = F^{label}(t1) F2(t2) with the returned label for t1.
MicroLabel exchange_label(Orientation o, MicroLabel f1, MicroLabel f2);
// Throws std::invalid_argument unless t1, t2 end at one site, share exactly one edge,
// and that edge carries the final triangle of each: direct on t1, dual on t2.
void check_exchange_geometry(const RibbonPath& t1, const RibbonPath& t2);

}  // namespace s3qd
