#include "s3qd/logical.hpp"

#include <cmath>

namespace s3qd {

LogicalPatch default_logical_patch() {
  Lattice L(3, 1, Boundary::Open);
  const Site origin{L.vertex(1, 0), L.plaquette(1, 0)};
  return {L, origin, trace_ribbon(L, origin, "DUD", Orientation::CCW), trace_ribbon(L, origin, "UD", Orientation::CW)};
}

WaveFunction apply_flux_ribbon(Elem c, const RibbonPath& r, const WaveFunction& psi) {
  return apply_anyon_ribbon_summed(ClassLabel::C2, "+", c, 1, 1, r, psi);
}

WaveFunction init_computational(const LogicalPatch& patch, const WaveFunction& gs, int a) {
  const Elem c = c_flux(a);
  return apply_flux_ribbon(c, patch.t1, apply_flux_ribbon(c, patch.t2, gs));
}

WaveFunction init_dual(const std::array<WaveFunction, 3>& computational, int i) {
  WaveFunction out(computational[0].lattice());
  for (int a = 0; a < 3; ++a) out = out + (std::pow(omega(), (i * a) % 3) / std::sqrt(3.0)) * computational[a];
  return out.prune();
}

std::vector<SignedEdge> z_string(const Lattice& L, const RibbonPath& r) {
  std::vector<SignedEdge> path = r.z_prefix;
  for (const auto& t : r.triangles)
    if (t.kind == TriKind::Direct) path.push_back({t.edge, L.tail(t.edge) == t.start.vertex ? 1 : -1});
  path.insert(path.end(), r.z_suffix.begin(), r.z_suffix.end());
  return path;
}

Elem transported_flux(const WaveFunction& psi, Key k, const RibbonPath& r) {
  const Elem h = holonomy(psi, k, r.end());
  const Elem x = path_product(psi, k, z_string(psi.lattice(), r));
  return mul(mul(x, h), inv(x));
}

LogicalReadout read_logical(const LogicalPatch& patch, const std::array<WaveFunction, 3>& computational,
                            const WaveFunction& psi) {
  LogicalReadout out;
  const double n = psi.norm();
  if (n == 0) throw std::invalid_argument("cannot read out the zero state");
  for (int a = 0; a < 3; ++a) out.amps(a) = inner(computational[a], psi) / (computational[a].norm() * n);
  out.captured = out.amps.squaredNorm();
  for (const auto& [k, amp] : psi.terms()) {
    auto key = std::pair{transported_flux(psi, k, patch.t1), transported_flux(psi, k, patch.t2)};
    out.flux[key] += std::norm(amp) / (n * n);
  }
  return out;
}

double fidelity_deficit(const LogicalReadout& r, const Qutrit& target) {
  return 1 - std::norm(target.normalized().dot(r.amps));
}

}  // namespace s3qd
