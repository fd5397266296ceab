#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "s3qd/anyon.hpp"
#include "s3qd/register.hpp"

namespace s3qd {

struct Caps {
  int sign_flip = 101;   // sign-flip repetitions
  int prep = 64;         // |+>, xi and |-_Y> preparation rounds
  int compare = 64;      // flux-channel comparisons per computational measurement
  int x_steps = 3;       // two-comparison steps of the qubit X-basis measurement
};

struct GateResult {
  std::string applied;
  int repetitions = 0;
  bool corrected = true;
  double residual_error = 0;
};
void to_json(nlohmann::json& j, const GateResult& r);

// Raised when a qubit-level gate sees support on |2>.
struct LeakageError : std::domain_error {
  using std::domain_error::domain_error;
};

// ---- deterministic gates on a register

// |a,b> -> |a,-a-b>: both fluxes of pair j conjugated by the flux c_a of pair i.
void gate_U(Register& r, int i, int j);
// |a,b> -> |a,b+a> and |a,b-a>, each borrowing |0> ancillas that are returned.
void gate_U_plus(Register& r, int i, int j);
void gate_U_minus(Register& r, int i, int j);
// |a> -> w^a |a> by U_minus onto a |1~> ancilla.
void qutrit_Z(Register& r, int i);
// a|0>+b|1> -> a|1>+b|0> with |0>,|1> ancillas ending in |2>,|1>. Throws LeakageError.
void qubit_X(Register& r, int i);
// Ancilla slot must hold q exactly (up to 1e-9); it is removed. Throws std::logic_error otherwise.
void release(Register& r, int slot, const Qutrit& q);
void require_qubit(const Register& r, int slot);

// ---- ideal comparisons (projectors), outcome 0 = yes, 1 = no

std::vector<std::pair<int, Branch>> compare_basis(const Branch& b, int slot, int a, Exec& ex);
// Projects onto |which~> and its complement.
std::vector<std::pair<int, Branch>> compare_dual(const Branch& b, int slot, int which, Exec& ex);

// ---- measurements and preparations

// Qubit X-basis measurement: per step compare with |0~> then |2>; any yes means |+> (outcome 0).
// After caps.x_steps steps of no the result is |-> (outcome 1); the measured slot is removed.
// Branches whose discarded qutrit was actually |+> carry error = true.
std::vector<std::pair<int, Branch>> measure_qubit_x(const Branch& b, int slot, Exec& ex, const Caps& caps);

// Single-qutrit preparations; failed branches mark an exhausted cap.
Branches prepare_plus(Exec& ex, const Caps& caps);
Branches prepare_xi(Exec& ex, const Caps& caps);
// |-_Y> relative to a pool whose reference member is |+_Y>: compares one half of a fresh
// Bell pair with the reference and keeps the partner when the outcome is |+>.
Branches prepare_minus_y(Exec& ex, const Caps& caps);

// ---- Y-eigenstate pool circuits (ideal controlled Paulis between qubits)

// Controlled-X then controlled-Z from `plus` onto `y`: copies a Y eigenstate onto |+>.
void y_copy(Register& r, int plus, int y);
// Controlled-Z then controlled-X from `probe` onto `ref`.
void y_compare(Register& r, int probe, int ref);
// Two-component mixture over the hidden convention: (1/2) sum_s (|s_Y><s_Y|)^(x)n built by
// repeated copying from one reference; returned on the qubit subspace (2^n x 2^n).
Eigen::MatrixXcd y_pool_density(int n);

// ---- gates with measurements; all act on every live branch

GateResult sign_flip(Branches& bs, int slot, int which, Exec& ex, const Caps& caps);
GateResult cz(Branches& bs, int i, int j, Exec& ex, const Caps& caps);
GateResult ccz(Branches& bs, int i, int j, int k, Exec& ex, const Caps& caps);
GateResult hadamard(Branches& bs, int i, Exec& ex, const Caps& caps);
GateResult phase_s(Branches& bs, int i, Exec& ex, const Caps& caps);
// Computational measurement through reference fluxes; outcome per branch is recorded.
GateResult measure_z(Branches& bs, int i, Exec& ex, const Caps& caps);
GateResult measure_x(Branches& bs, int i, Exec& ex, const Caps& caps);

// 1 - (2/3)(7/9)^((N-1)/2), N odd.
double sign_flip_success(int n);

// ---- circuits

struct CircuitOp {
  std::string gate;
  std::vector<int> targets;
  nlohmann::json params;
};

struct Circuit {
  std::vector<Qutrit> init;
  std::vector<CircuitOp> ops;
};

// Either a JSON list of {gate, targets, params} (register of |0>s sized by the targets) or
// {"init": ["0","1","2","+","-","0~","1~","2~","xi"], "ops": [...]}. Throws InputError.
Circuit parse_circuit(const nlohmann::json& j);

struct RunOutput {
  Branches branches;
  std::vector<GateResult> results;
  bool cap_exhausted = false;  // sampled: the trajectory hit a cap
};
RunOutput run_circuit(const Circuit& c, Mode mode, std::uint64_t seed, const Caps& caps);
nlohmann::json run_to_json(const RunOutput& out, Mode mode);

}  // namespace s3qd
