#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "s3qd/group.hpp"
#include "s3qd/rng.hpp"

namespace s3qd {

using Qutrit = Eigen::Vector3cd;

Qutrit ket(int a);       // |a>, a mod 3
Qutrit dual_ket(int i);  // (1/sqrt3) sum_b w^{ib} |b>
Qutrit plus_ket();       // (|0>+|1>)/sqrt2
Qutrit minus_ket();
Qutrit xi_ket();         // (|0>-|1>+|2>)/sqrt3
Qutrit plus_y_ket();     // (1+i)/2 |0> - (1-i)/2 |1>
Qutrit minus_y_ket();    // (1+i)/2 |0> + (1-i)/2 |1>

// Flux labels of the computational basis: |a> is the pair (c_a, c_a), c_a = mu^a sigma.
Elem c_flux(int a);
int c_index(Elem c);  // inverse of c_flux; throws outside C2

// Dense state of n qutrits; qutrit 0 is the most significant base-3 digit.
struct Register {
  int n = 0;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);

  static Register product(const std::vector<Qutrit>& qs);
  long dim() const { return psi.size(); }
  int digit(long idx, int slot) const;
};

void apply1(Register& r, int slot, const Eigen::Matrix3cd& m);
// Basis permutation (or partial map) of two slots: |a,b> -> |f(a,b)>.
void apply_map2(Register& r, int i, int j, const std::function<std::pair<int, int>(int, int)>& f);
// Diagonal phase/weight per basis digit of one slot.
void apply_diag(Register& r, int slot, const std::array<cplx, 3>& d);
void append(Register& r, const Qutrit& q);
// (<q| on slot) psi with the slot removed; not renormalized.
Register contract(const Register& r, int slot, const Qutrit& q);
// Moves qutrit `from` to position `to`, shifting the ones in between.
void move_slot(Register& r, int from, int to);
Eigen::Matrix3cd reduced(const Register& r, int slot);
// |<a|b>| close to 1 for normalized a, b.
bool same_ray(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, double tol = 1e-10);

enum class Mode { Exact, Sampled };

struct MeasurementRecord {
  int round = 0;
  std::string probe;
  std::string outcome;
  double p = 0;
};
void to_json(nlohmann::json& j, const MeasurementRecord& r);

// One term of the classical mixture produced by measurements. Sampled runs carry a
// single branch with p = 1.
struct Branch {
  double p = 1;
  Register reg;
  bool failed = false;       // a repetition cap ran out
  bool error = false;        // a heralded outcome misidentified the state
  int reps = 0;              // repetitions used by the last protocol
  std::vector<int> outcomes;  // circuit-level measurement results
  std::vector<MeasurementRecord> records;
};
using Branches = std::vector<Branch>;

class Exec {
 public:
  Exec(Mode mode, std::uint64_t seed = 0) : mode_(mode), rng_(seed) {}
  Mode mode() const { return mode_; }
  Rng& rng() { return rng_; }

  // Outcome i of b with unnormalized post-measurement register outs[i]. Exact mode
  // returns every outcome with probability above the pruning threshold; sampled mode
  // draws one and appends a record. Children come back normalized with their index.
  std::vector<std::pair<int, Branch>> split(const Branch& b, const std::vector<Register>& outs, std::string_view probe,
                                            const std::vector<std::string>& labels);

  static constexpr double kPruneProb = 1e-15;

 private:
  Mode mode_;
  Rng rng_;
};

// Combines branches with equal flags and register ray.
void merge(Branches& bs);
double total_probability(const Branches& bs);

}  // namespace s3qd
