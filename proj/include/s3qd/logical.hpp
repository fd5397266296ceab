#pragma once

#include <array>
#include <map>
#include <utility>

#include "s3qd/register.hpp"
#include "s3qd/ribbon.hpp"

namespace s3qd {

// Two ribbons leaving one origin site towards distinct end plaquettes. A logical qutrit
// is the pair of C2 fluxes at the two ends.
struct LogicalPatch {
  Lattice lattice;
  Site origin;
  RibbonPath t1, t2;
};

// 3x1 open patch, origin at the SW corner of the middle plaquette: t1 = ccw DUD to the
// right plaquette, t2 = cw UD to the left one.
LogicalPatch default_logical_patch();

// F^{[C2];c}: sum over end flavors c' of the trivial-charge flux-basis ribbon.
WaveFunction apply_flux_ribbon(Elem c, const RibbonPath& r, const WaveFunction& psi);

// F^{[C2];c_a}(t1) F^{[C2];c_a}(t2) |gs>, not normalized.
WaveFunction init_computational(const LogicalPatch& patch, const WaveFunction& gs, int a);
// (1/sqrt3) sum_a w^{ia} of the computational states; takes them precomputed.
WaveFunction init_dual(const std::array<WaveFunction, 3>& computational, int i);

// Signed direct edges from the origin vertex to the end vertex (prefix, triangles, suffix).
std::vector<SignedEdge> z_string(const Lattice& L, const RibbonPath& r);
// End-plaquette holonomy of configuration k conjugated back to the ribbon's start vertex.
Elem transported_flux(const WaveFunction& psi, Key k, const RibbonPath& r);

struct LogicalReadout {
  Qutrit amps = Qutrit::Zero();  // <L_a|psi> / |psi| with L_a the normalized computational states
  double captured = 0;           // |amps|^2; 1 when psi lies in their span
  std::map<std::pair<Elem, Elem>, double> flux;  // distribution of the two transported end fluxes
};
LogicalReadout read_logical(const LogicalPatch& patch, const std::array<WaveFunction, 3>& computational,
                            const WaveFunction& psi);
// 1 - |<target|amps>|^2 for normalized target.
double fidelity_deficit(const LogicalReadout& r, const Qutrit& target);

}  // namespace s3qd
