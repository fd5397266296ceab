#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "s3qd/group.hpp"
#include "s3qd/register.hpp"
#include "s3qd/ribbon.hpp"

namespace s3qd {

// ---- microscopic <-> anyon basis

// Micro basis state |z, w> of a flux pair: w is the topological flux, the local flux is z w z^-1.
struct MicroTerm {
  Elem z = E;
  Elem w = E;
  cplx amp = 0;
};

struct AnyonTerm {
  AnyonLabel label;  // label.cp is the topological flux w
  cplx amp = 0;
};

// Labels (R, c, j, j') of the six-dimensional sector with topological flux w, in a fixed order.
std::vector<AnyonLabel> sector_labels(Elem w);
// Column k holds the micro amplitudes, indexed by z, of sector_labels(w)[k]:
//   sqrt(|R|/|Z(r)|) Gamma^R_{jj'}(n) at z = q_c n q_w^-1.
Eigen::MatrixXcd basis_change(Elem w);
// Throws std::invalid_argument if the terms span more than one conjugacy class.
std::vector<AnyonTerm> micro_to_anyon(const std::vector<MicroTerm>& in);
std::vector<MicroTerm> anyon_to_micro(const std::vector<AnyonTerm>& in);

// ---- fusion

using FusionTable = std::map<std::pair<char, char>, std::vector<char>>;
// Outcomes sorted by letter, one entry per channel.
const FusionTable& fusion_table();
std::vector<char> fuse(char a, char b);

// ---- anyon-level states

enum class ParticleKind { Flux, Charge, Dyon };

struct Particle {
  ParticleKind kind = ParticleKind::Charge;
  ClassLabel cls = ClassLabel::C1;  // flux class (C1 for charges)
  std::string irrep = "+";          // S3 irrep for charges, centralizer irrep for dyons
  int slot = 0;
};

// Joint internal labels per basis term: the flux label w for fluxes and dyons, the
// component index for charges.
struct AnyonState {
  std::vector<Particle> particles;
  std::map<std::vector<int>, cplx> amps;

  double norm() const;
  // Throws std::invalid_argument if a label leaves its particle's class or irrep.
  void check() const;
};

// Applies Gamma^R(w) to the component index of particle `charge`.
AnyonState wind_flux_around_charge(Elem w, int charge, const AnyonState& s);

// ---- charge transfer

// |chi^R(a) / dim R|^2 for a in the class; R is an S3 irrep.
double charge_transfer_prob(const Irrep& R, ClassLabel c);
// Builds (1/sqrt d) sum_j |j> (x) |j>* in R (x) R-bar, winds flux a around the first charge
// and returns the probability that the pair still fuses to the vacuum.
double simulated_charge_transfer(const Irrep& R, Elem a);

// ---- flux measurement with a [2] charge singlet

enum class FluxOutcome { Vacuum = 0, Minus = 1, TwoPlus = 2, TwoMinus = 3 };
std::string_view outcome_name(FluxOutcome o);

// <o| (1 (x) rho(w)) |psi0>, psi0 = (|+-> + |-+>)/sqrt2, for total flux w inside the loop.
cplx flux_channel_amplitude(FluxOutcome o, Elem w);

// Particle group with a definite total flux on every basis term.
struct FluxTarget {
  std::vector<Elem> flux;
  Eigen::VectorXcd amp;
};

std::array<double, 4> flux_channel_distribution(const FluxTarget& t);
// Normalized post-state for an outcome; throws std::invalid_argument if it cannot occur.
FluxTarget flux_channel_post(const FluxTarget& t, FluxOutcome o);
// Probability that `rounds` consecutive rounds all return the vacuum.
double vacuum_streak_probability(const FluxTarget& t, int rounds);

struct FluxRun {
  std::vector<FluxOutcome> outcomes;
  std::vector<MeasurementRecord> records;
  FluxTarget post;
};
FluxRun measure_flux_channel(const FluxTarget& t, int rounds, Rng& rng);

// ---- computational-basis measurement of a logical qutrit

// Pairs one flux of the qutrit with one flux of each reference |0>,|1>,|2> in turn and runs
// the flux channel until two references are excluded by a non-vacuum outcome. Outcome -1
// means the comparison cap ran out (branch marked failed, register left as it was).
std::vector<std::pair<int, Branch>> measure_computational(const Branch& b, int slot, Exec& ex, int cap = 64);
// Probability that the loop concludes within `cap` comparisons when the true value is fixed.
double computational_conclusion_probability(int cap);

// Winds one flux of a |0~> probe pair around both fluxes of the qutrit and fuses the probe.
// Returns the vacuum probability and the joint (qutrit, probe) state before fusion.
std::pair<double, Register> dual_probe_winding(const Qutrit& q);

}  // namespace s3qd
