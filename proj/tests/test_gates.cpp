#include "doctest.h"

#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "s3qd/gates.hpp"
#include "s3qd/lattice.hpp"

using namespace s3qd;

namespace {

const cplx w = std::polar(1.0, 2 * M_PI / 3);
const cplx I(0, 1);

// Qubit vector (2^n) placed in the qutrit register space (3^n).
Eigen::VectorXcd embed(const Eigen::VectorXcd& v, int n) {
  long d = 1;
  for (int k = 0; k < n; ++k) d *= 3;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d);
  for (long bits = 0; bits < (1L << n); ++bits) {
    long idx = 0;
    for (int k = 0; k < n; ++k) idx = idx * 3 + ((bits >> (n - 1 - k)) & 1);
    out(idx) = v(bits);
  }
  return out;
}

Register qubits(const Eigen::VectorXcd& v, int n) {
  Register r;
  r.n = n;
  r.psi = embed(v, n);
  return r;
}

Eigen::VectorXcd random_state(std::mt19937& gen, long d) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(d);
  for (long k = 0; k < d; ++k) v(k) = cplx(g(gen), g(gen));
  return v.normalized();
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Eigen::Matrix2cd pauli_x() { return (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(); }
Eigen::Matrix2cd pauli_z() { return (Eigen::Matrix2cd() << 1, 0, 0, -1).finished(); }
Eigen::Matrix2cd hadamard_m() { return (Eigen::Matrix2cd() << 1, 1, 1, -1).finished() / std::sqrt(2.0); }
Eigen::Matrix2cd phase_m() { return (Eigen::Matrix2cd() << 1, 0, 0, I).finished(); }

Eigen::MatrixXcd diag_phase(int n, const std::function<int(long)>& sign) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(1L << n, 1L << n);
  for (long k = 0; k < (1L << n); ++k) m(k, k) = sign(k);
  return m;
}

// The single surviving (not failed, not misassigned) branch of an exact run.
const Branch& good(const Branches& bs) {
  const Branch* g = nullptr;
  int count = 0;
  for (const auto& b : bs)
    if (!b.failed && !b.error) {
      g = &b;
      ++count;
    }
  REQUIRE(count == 1);
  return *g;
}

double success_mass(const Branches& bs) {
  double s = 0;
  for (const auto& b : bs)
    if (!b.failed && !b.error) s += b.p;
  return s;
}

Branches single(const Register& r) {
  Branch b;
  b.reg = r;
  return {b};
}

}  // namespace

TEST_CASE("U truth table and the flux-conjugation oracle") {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Register r = Register::product({ket(a), ket(b)});
      gate_U(r, 0, 1);
      const int expect = ((-a - b) % 3 + 3) % 3;
      CHECK(std::abs(r.psi(3 * a + expect) - 1.0) < 1e-12);
      // winding conjugates both fluxes of the target pair by c_a
      const Elem conjugated = mul(mul(c_flux(a), c_flux(b)), inv(c_flux(a)));
      CHECK(c_index(conjugated) == expect);
    }
  Register r = Register::product({ket(0), ket(1)});
  gate_U(r, 0, 1);
  CHECK(std::abs(r.psi(2) - 1.0) < 1e-12);
}

TEST_CASE("U_plus and U_minus") {
  Register r = Register::product({ket(1), ket(2)});
  gate_U_plus(r, 0, 1);
  CHECK(r.n == 2);
  CHECK(std::abs(r.psi(3 * 1 + 0) - 1.0) < 1e-12);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Register p = Register::product({ket(a), ket(b)});
      gate_U_plus(p, 0, 1);
      CHECK(std::abs(p.psi(3 * a + (a + b) % 3) - 1.0) < 1e-12);
      Register m = Register::product({ket(a), ket(b)});
      gate_U_minus(m, 0, 1);
      CHECK(std::abs(m.psi(3 * a + ((b - a) % 3 + 3) % 3) - 1.0) < 1e-12);
    }
  std::mt19937 gen(7);
  Eigen::VectorXcd v = random_state(gen, 9);
  Register s{2, v};
  gate_U_plus(s, 0, 1);
  gate_U_minus(s, 0, 1);
  CHECK((s.psi - v).norm() < 1e-12);
  // reversed roles and a spectator
  Register t = Register::product({ket(2), ket(1), ket(1)});
  gate_U_plus(t, 2, 0);
  CHECK(std::abs(t.psi(0 * 9 + 1 * 3 + 1) - 1.0) < 1e-12);
}

TEST_CASE("ancilla release rejects entanglement") {
  Register r = Register::product({plus_ket(), ket(0)});
  gate_U_plus(r, 0, 1);
  CHECK_THROWS_AS(release(r, 1, ket(0)), std::logic_error);
}

TEST_CASE("qutrit Z") {
  Eigen::Matrix3cd z;
  for (int a = 0; a < 3; ++a) {
    Register r = Register::product({ket(a)});
    qutrit_Z(r, 0);
    z.col(a) = r.psi;
  }
  Eigen::Matrix3cd want = Eigen::Matrix3cd::Zero();
  want.diagonal() << 1, w, w * w;
  CHECK((z - want).norm() < 1e-12);
  Eigen::Matrix3cd shift = Eigen::Matrix3cd::Zero();
  for (int a = 0; a < 3; ++a) shift((a + 1) % 3, a) = 1;
  CHECK((z * shift - w * shift * z).norm() < 1e-12);
}

TEST_CASE("qubit X") {
  Register r = Register::product({ket(0)});
  qubit_X(r, 0);
  CHECK(std::abs(r.psi(1) - 1.0) < 1e-12);
  std::mt19937 gen(3);
  Eigen::VectorXcd v = random_state(gen, 2);
  Register q = qubits(v, 1);
  qubit_X(q, 0);
  CHECK((q.psi - embed(pauli_x() * v, 1)).norm() < 1e-12);
  qubit_X(q, 0);
  CHECK((q.psi - embed(v, 1)).norm() < 1e-12);
  Register leak = Register::product({xi_ket()});
  CHECK_THROWS_AS(qubit_X(leak, 0), LeakageError);
}

TEST_CASE("qubit X-basis measurement") {
  Caps caps;
  SUBCASE("one step succeeds with 8/9 on |+>") {
    caps.x_steps = 1;
    Exec ex(Mode::Exact);
    Branch b;
    b.reg = Register::product({plus_ket()});
    double yes = 0, err = 0;
    for (auto& [o, k] : measure_qubit_x(b, 0, ex, caps)) {
      if (o == 0) yes += k.p;
      if (k.error) err += k.p;
    }
    CHECK(yes == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(err == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  }
  SUBCASE("|-> is always declared |->; residual misassignment (1/9)^n") {
    Exec ex(Mode::Exact);
    Branch b;
    b.reg = Register::product({minus_ket()});
    auto kids = measure_qubit_x(b, 0, ex, caps);
    REQUIRE(kids.size() == 1);
    CHECK(kids[0].first == 1);
    CHECK_FALSE(kids[0].second.error);
    Branch p;
    p.reg = Register::product({plus_ket()});
    double err = 0;
    for (auto& [o, k] : measure_qubit_x(p, 0, ex, caps))
      if (k.error) err += k.p;
    CHECK(err == doctest::Approx(std::pow(1.0 / 9.0, 3)).epsilon(1e-10));
  }
  SUBCASE("the rest of the register is projected as by <+| and <-|") {
    std::mt19937 gen(11);
    Eigen::VectorXcd v = random_state(gen, 4);
    Exec ex(Mode::Exact);
    Branch b;
    b.reg = qubits(v, 2);
    Eigen::VectorXcd plus_part(2), minus_part(2);
    for (int y = 0; y < 2; ++y) {
      plus_part(y) = (v(y) + v(2 + y)) / std::sqrt(2.0);
      minus_part(y) = (v(y) - v(2 + y)) / std::sqrt(2.0);
    }
    for (auto& [o, k] : measure_qubit_x(b, 0, ex, caps)) {
      if (k.error) continue;
      CHECK(same_ray(k.reg.psi, embed((o == 0 ? plus_part : minus_part).normalized(), 1)));
    }
  }
  SUBCASE("sampled per-step frequency within 3 sigma") {
    caps.x_steps = 1;
    Exec ex(Mode::Sampled, 2024);
    const int n = 10000;
    int yes = 0;
    Branch b;
    b.reg = Register::product({plus_ket()});
    for (int t = 0; t < n; ++t) yes += measure_qubit_x(b, 0, ex, caps).front().first == 0;
    const double p = 8.0 / 9.0, sigma = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(double(yes) / n - p) < 3 * sigma);
  }
}

TEST_CASE("prepare |+>") {
  Caps caps;
  SUBCASE("exact output and success probability") {
    for (int cap : {1, 5, 64}) {
      caps.prep = cap;
      Exec ex(Mode::Exact);
      Branches bs = prepare_plus(ex, caps);
      CHECK(success_mass(bs) == doctest::Approx(1 - std::pow(1.0 / 3.0, cap)).epsilon(1e-12));
      CHECK(same_ray(good(bs).reg.psi, plus_ket()));
    }
    caps.prep = 5;
    Exec ex(Mode::Exact);
    CHECK(success_mass(prepare_plus(ex, caps)) >= 0.99);
  }
  SUBCASE("sampled single-round success 2/3") {
    caps.prep = 1;
    Exec ex(Mode::Sampled, 5);
    const int n = 10000;
    int ok = 0;
    for (int t = 0; t < n; ++t) ok += !prepare_plus(ex, caps).front().failed;
    const double p = 2.0 / 3.0;
    CHECK(std::abs(double(ok) / n - p) < 3 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("prepare xi") {
  Caps caps;
  SUBCASE("exact") {
    Exec ex(Mode::Exact);
    Branches bs = prepare_xi(ex, caps);
    CHECK((good(bs).reg.psi - xi_ket()).norm() < 1e-12);
    CHECK(success_mass(bs) == doctest::Approx(1 - std::pow(0.75, 64)).epsilon(1e-9));
    caps.prep = 1;
    Exec ex1(Mode::Exact);
    // one attempt, each |+> with a single round
    CHECK(success_mass(prepare_xi(ex1, caps)) == doctest::Approx(0.25 * (4.0 / 9.0)).epsilon(1e-12));
  }
  SUBCASE("mean attempts 4 within 3 sigma") {
    Exec ex(Mode::Sampled, 99);
    const int n = 10000;
    double sum = 0;
    for (int t = 0; t < n; ++t) {
      Branches bs = prepare_xi(ex, caps);
      REQUIRE_FALSE(bs.front().failed);
      sum += bs.front().reps;
    }
    const double p = 0.25, sigma = std::sqrt((1 - p) / (p * p) / n);
    CHECK(std::abs(sum / n - 4.0) < 3 * sigma);
  }
}

TEST_CASE("sign flips") {
  std::mt19937 gen(17);
  Caps caps;
  SUBCASE("exact action is sigma_which on a random qutrit") {
    for (int which = 0; which < 3; ++which) {
      Eigen::VectorXcd v = random_state(gen, 3);
      Exec ex(Mode::Exact);
      Branches bs = single(Register{1, v});
      GateResult g = sign_flip(bs, 0, which, ex, caps);
      Eigen::VectorXcd want = v;
      want(which) = -want(which);
      CHECK(same_ray(good(bs).reg.psi, want));
      CHECK(g.residual_error < 1e-5);
      CHECK(g.residual_error == doctest::Approx(1 - sign_flip_success(caps.sign_flip)).epsilon(1e-6));
    }
  }
  SUBCASE("success probability after N repetitions") {
    for (int n : {1, 3, 11, 35}) {
      caps.sign_flip = n;
      Exec ex(Mode::Exact);
      Branches bs = single(Register::product({plus_ket()}));
      sign_flip(bs, 0, 1, ex, caps);
      CHECK(success_mass(bs) == doctest::Approx(sign_flip_success(n)).epsilon(1e-6));
    }
    CHECK(sign_flip_success(35) >= 0.99);
    CHECK(sign_flip_success(33) < 0.99);
  }
  SUBCASE("sigma_1 on the qubit subspace is Pauli Z; products of flips") {
    Eigen::VectorXcd v = random_state(gen, 2);
    Exec ex(Mode::Exact);
    Branches bs = single(qubits(v, 1));
    sign_flip(bs, 0, 1, ex, caps);
    CHECK(same_ray(good(bs).reg.psi, embed(pauli_z() * v, 1)));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        const int k = 3 - i - j;
        Eigen::Matrix3cd si = Eigen::Matrix3cd::Identity(), sj = si, sk = si;
        si(i, i) = -1;
        sj(j, j) = -1;
        sk(k, k) = -1;
        CHECK((si * sj + sk).norm() < 1e-12);
      }
  }
  SUBCASE("sampled success frequency within 3 sigma") {
    for (int n : {1, 11, 35}) {
      caps.sign_flip = n;
      Exec ex(Mode::Sampled, 1000 + n);
      const int trials = 10000;
      int ok = 0;
      for (int t = 0; t < trials; ++t) {
        Branches bs = single(Register::product({ket(0)}));
        sign_flip(bs, 0, 2, ex, caps);
        ok += !bs.front().failed;
      }
      const double p = sign_flip_success(n);
      CHECK(std::abs(double(ok) / trials - p) < 3 * std::sqrt(p * (1 - p) / trials) + 1e-12);
    }
  }
  SUBCASE("sampled trajectories stop exactly on the target parity") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Eigen::VectorXcd v = random_state(gen, 3);
      Exec ex(Mode::Sampled, seed);
      Branches bs = single(Register{1, v});
      sign_flip(bs, 0, 0, ex, caps);
      REQUIRE_FALSE(bs.front().failed);
      Eigen::VectorXcd want = v;
      want(0) = -want(0);
      CHECK(same_ray(bs.front().reg.psi, want));
    }
  }
}

TEST_CASE("CZ and CCZ") {
  Caps caps;
  SUBCASE("CZ truth table") {
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        Exec ex(Mode::Exact);
        Branches bs = single(Register::product({ket(x), ket(y)}));
        cz(bs, 0, 1, ex, caps);
        const Branch& g = good(bs);
        CHECK(g.reg.n == 2);
        CHECK(std::abs(g.reg.psi(3 * x + y) - (x && y ? -1.0 : 1.0)) < 1e-12);
      }
  }
  SUBCASE("CZ on a random two-qubit state") {
    std::mt19937 gen(21);
    Eigen::VectorXcd v = random_state(gen, 4);
    Exec ex(Mode::Exact);
    Branches bs = single(qubits(v, 2));
    cz(bs, 1, 0, ex, caps);
    Eigen::MatrixXcd czm = diag_phase(2, [](long k) { return k == 3 ? -1 : 1; });
    CHECK(same_ray(good(bs).reg.psi, embed(czm * v, 2)));
  }
  SUBCASE("CCZ truth table") {
    for (int bits = 0; bits < 8; ++bits) {
      Exec ex(Mode::Exact);
      Branches bs = single(Register::product({ket(bits >> 2), ket((bits >> 1) & 1), ket(bits & 1)}));
      ccz(bs, 0, 1, 2, ex, caps);
      const long idx = 9 * (bits >> 2) + 3 * ((bits >> 1) & 1) + (bits & 1);
      CHECK(std::abs(good(bs).reg.psi(idx) - (bits == 7 ? -1.0 : 1.0)) < 1e-12);
    }
  }
  SUBCASE("CCZ (X x I x I) CCZ = X x CZ") {
    std::mt19937 gen(5);
    Eigen::MatrixXcd czm = diag_phase(2, [](long k) { return k == 3 ? -1 : 1; });
    Eigen::MatrixXcd want = kron(pauli_x(), czm);
    for (int t = 0; t < 4; ++t) {
      Eigen::VectorXcd v = random_state(gen, 8);
      Circuit c;
      c.init = {};
      Exec ex(Mode::Exact);
      Branches bs = single(qubits(v, 3));
      ccz(bs, 0, 1, 2, ex, caps);
      for (auto& b : bs)
        if (!b.failed) qubit_X(b.reg, 0);
      ccz(bs, 0, 1, 2, ex, caps);
      CHECK(same_ray(good(bs).reg.psi, embed(want * v, 3)));
    }
  }
  SUBCASE("CCZ with |11> controls acts as Z on the third qubit") {
    std::mt19937 gen(8);
    Eigen::VectorXcd v = random_state(gen, 2);
    Exec ex(Mode::Exact);
    Branches bs = single(qubits(kron(Eigen::Vector4cd(0, 0, 0, 1), v), 3));
    ccz(bs, 0, 1, 2, ex, caps);
    CHECK(same_ray(good(bs).reg.psi, embed(kron(Eigen::Vector4cd(0, 0, 0, 1), pauli_z() * v), 3)));
  }
  SUBCASE("leakage is rejected") {
    Exec ex(Mode::Exact);
    Branches bs = single(Register::product({ket(2), ket(1)}));
    CHECK_THROWS_AS(cz(bs, 0, 1, ex, caps), LeakageError);
  }
}

TEST_CASE("Hadamard") {
  Caps caps;
  std::mt19937 gen(13);
  SUBCASE("H|0> = |+> and random states") {
    Exec ex(Mode::Exact);
    Branches bs = single(Register::product({ket(0)}));
    GateResult g = hadamard(bs, 0, ex, caps);
    CHECK(same_ray(good(bs).reg.psi, plus_ket()));
    CHECK(g.residual_error == doctest::Approx(total_probability(bs) - success_mass(bs)).epsilon(1e-9));
    for (int t = 0; t < 3; ++t) {
      Eigen::VectorXcd v = random_state(gen, 4);
      Exec e2(Mode::Exact);
      Branches b2 = single(qubits(v, 2));
      hadamard(b2, 1, e2, caps);
      CHECK(same_ray(good(b2).reg.psi, embed(kron(Eigen::Matrix2cd::Identity(), hadamard_m()) * v, 2)));
    }
  }
  SUBCASE("H twice is the identity") {
    Eigen::VectorXcd v = random_state(gen, 2);
    Exec ex(Mode::Exact);
    Branches bs = single(qubits(v, 1));
    hadamard(bs, 0, ex, caps);
    hadamard(bs, 0, ex, caps);
    CHECK(same_ray(good(bs).reg.psi, embed(v, 1)));
  }
  SUBCASE("the |-> branch holds XH before correction") {
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXcd v = random_state(gen, 2);
      Exec ex(Mode::Exact);
      Branches bs = single(qubits(v, 1));
      for (auto& b : bs) append(b.reg, plus_ket());
      cz(bs, 0, 1, ex, caps);
      bool seen = false;
      for (auto& [o, k] : measure_qubit_x(good(bs), 0, ex, caps)) {
        if (o != 1 || k.error) continue;
        CHECK(same_ray(k.reg.psi, embed(pauli_x() * hadamard_m() * v, 1)));
        seen = true;
      }
      CHECK(seen);
    }
  }
}

TEST_CASE("Y-eigenstate supply") {
  SUBCASE("copy circuit") {
    for (const Qutrit& y : {plus_y_ket(), minus_y_ket()}) {
      Register r = Register::product({plus_ket(), y});
      y_copy(r, 0, 1);
      CHECK(same_ray(r.psi, Register::product({y, y}).psi));
    }
  }
  SUBCASE("pool density is the correlated mixture") {
    for (int n = 1; n <= 4; ++n) {
      Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(1L << n, 1L << n);
      for (const Qutrit& y : {plus_y_ket(), minus_y_ket()}) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
        for (int k = 0; k < n; ++k) v = kron(v, y.head<2>());
        want += 0.5 * v * v.adjoint();
      }
      Eigen::MatrixXcd got = y_pool_density(n);
      CHECK((got - want).norm() < 1e-12);
      if (n >= 2) {
        // a Y measurement on any two members never disagrees
        Eigen::Matrix2cd py = plus_y_ket().head<2>() * plus_y_ket().head<2>().adjoint();
        Eigen::Matrix2cd my = Eigen::Matrix2cd::Identity() - py;
        Eigen::MatrixXcd disagree = kron(kron(py, my), Eigen::MatrixXcd::Identity(1L << (n - 2), 1L << (n - 2)));
        CHECK(std::abs((got * disagree).trace()) < 1e-12);
      }
    }
  }
  SUBCASE("comparison herald on a Bell pair built with U_plus") {
    Register r = Register::product({plus_ket(), ket(0)});
    gate_U_plus(r, 0, 1);
    append(r, plus_y_ket());
    y_compare(r, 0, 2);
    release(r, 2, plus_y_ket());
    Register plus_out = contract(r, 0, plus_ket()), minus_out = contract(r, 0, minus_ket());
    CHECK(plus_out.psi.squaredNorm() == doctest::Approx(0.5));
    CHECK(same_ray(plus_out.psi.normalized(), minus_y_ket()));
    CHECK(same_ray(minus_out.psi.normalized(), plus_y_ket()));
  }
  SUBCASE("prepared state is |-_Y>") {
    Caps caps;
    Exec ex(Mode::Exact);
    Branches bs = prepare_minus_y(ex, caps);
    CHECK(same_ray(good(bs).reg.psi, minus_y_ket()));
    CHECK(success_mass(bs) > 1 - 1e-12);
  }
}

TEST_CASE("phase gate") {
  Caps caps;
  std::mt19937 gen(31);
  SUBCASE("S|1> = i|1> and random states") {
    Exec ex(Mode::Exact);
    Branches bs = single(Register::product({ket(1)}));
    phase_s(bs, 0, ex, caps);
    CHECK(same_ray(good(bs).reg.psi, ket(1)));
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXcd v = random_state(gen, 2);
      Exec e2(Mode::Exact);
      Branches b2 = single(qubits(v, 1));
      phase_s(b2, 0, e2, caps);
      CHECK(same_ray(good(b2).reg.psi, embed(phase_m() * v, 1)));
    }
  }
  SUBCASE("S twice is Z") {
    Eigen::VectorXcd v = random_state(gen, 2);
    Exec ex(Mode::Exact);
    Branches bs = single(qubits(v, 1));
    phase_s(bs, 0, ex, caps);
    phase_s(bs, 0, ex, caps);
    CHECK(same_ray(good(bs).reg.psi, embed(pauli_z() * v, 1)));
  }
  SUBCASE("the |-> branch holds S-dagger before the Z correction") {
    Eigen::VectorXcd v = random_state(gen, 2);
    Exec ex(Mode::Exact);
    Branches bs = single(qubits(v, 1));
    for (auto& b : bs) append(b.reg, minus_y_ket());
    cz(bs, 0, 1, ex, caps);
    for (auto& [o, k] : measure_qubit_x(good(bs), 1, ex, caps)) {
      if (k.error) continue;
      Eigen::Matrix2cd m = o == 0 ? phase_m() : Eigen::Matrix2cd(phase_m().adjoint());
      CHECK(same_ray(k.reg.psi, embed(m * v, 1)));
    }
  }
}

TEST_CASE("circuits") {
  Caps caps;
  SUBCASE("empty circuit") {
    Circuit c = parse_circuit(nlohmann::json{{"init", {"+", "xi"}}, {"ops", nlohmann::json::array()}});
    RunOutput out = run_circuit(c, Mode::Exact, 0, caps);
    REQUIRE(out.branches.size() == 1);
    CHECK((out.branches[0].reg.psi - Register::product({plus_ket(), xi_ket()}).psi).norm() < 1e-15);
  }
  SUBCASE("HSSH against the matrix oracle") {
    Eigen::Matrix2cd m = hadamard_m() * phase_m() * phase_m() * hadamard_m();
    Eigen::Vector2cd want = m * Eigen::Vector2cd(1, 0);
    auto j = nlohmann::json::parse(R"([{"gate":"H","targets":[0]},{"gate":"S","targets":[0]},
                                       {"gate":"S","targets":[0]},{"gate":"H","targets":[0]}])");
    RunOutput out = run_circuit(parse_circuit(j), Mode::Exact, 0, caps);
    CHECK(same_ray(good(out.branches).reg.psi, embed(want, 1)));
    CHECK(out.results.size() == 4);
  }
  SUBCASE("sampled runs are reproducible and records are kept") {
    auto j = nlohmann::json::parse(R"([{"gate":"H","targets":[0]},{"gate":"CZ","targets":[0,1]},
                                       {"gate":"measure_z","targets":[0]}])");
    Circuit c = parse_circuit(j);
    CHECK(c.init.size() == 2);
    auto a = run_to_json(run_circuit(c, Mode::Sampled, 42, caps), Mode::Sampled);
    auto b = run_to_json(run_circuit(c, Mode::Sampled, 42, caps), Mode::Sampled);
    CHECK(a == b);
    CHECK(!a["branches"][0]["records"].empty());
    CHECK(a["branches"][0]["outcomes"].size() == 1);
  }
  SUBCASE("exact measurement splits into outcome branches") {
    auto j = nlohmann::json::parse(R"([{"gate":"H","targets":[0]},{"gate":"measure_z","targets":[0]}])");
    RunOutput out = run_circuit(parse_circuit(j), Mode::Exact, 0, caps);
    double p0 = 0, p1 = 0;
    for (const auto& b : out.branches)
      if (!b.failed && !b.error) (b.outcomes.at(0) == 0 ? p0 : p1) += b.p;
    // the rest is the H gate's residual (mostly X-basis misassignment)
    CHECK(p0 / (p0 + p1) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(p0 + p1 == doctest::Approx(1 - out.results[0].residual_error).epsilon(1e-6));
  }
  SUBCASE("cap exhaustion is reported") {
    caps.sign_flip = 1;
    auto j = nlohmann::json::parse(R"([{"gate":"sign_flip","targets":[0],"params":{"which":1}},
                                       {"gate":"U","targets":[0,1]}])");
    Circuit c = parse_circuit(j);
    bool hit = false;
    for (std::uint64_t seed = 0; seed < 20 && !hit; ++seed) {
      RunOutput out = run_circuit(c, Mode::Sampled, seed, caps);
      if (out.cap_exhausted) {
        hit = true;
        CHECK(out.results.size() == 1);
        CHECK_FALSE(out.results[0].corrected);
      }
    }
    CHECK(hit);
    RunOutput exact = run_circuit(c, Mode::Exact, 0, caps);
    CHECK(exact.results[0].residual_error == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  }
  SUBCASE("malformed circuits") {
    using nlohmann::json;
    CHECK_THROWS_AS(parse_circuit(json::parse(R"([{"gate":"T","targets":[0]}])")), InputError);
    CHECK_THROWS_AS(parse_circuit(json::parse(R"([{"gate":"CZ","targets":[0]}])")), InputError);
    CHECK_THROWS_AS(parse_circuit(json::parse(R"([{"gate":"CZ","targets":[1,1]}])")), InputError);
    CHECK_THROWS_AS(parse_circuit(json::parse(R"([{"gate":"sign_flip","targets":[0]}])")), InputError);
    CHECK_THROWS_AS(parse_circuit(json::parse(R"({"init":["0"],"ops":[{"gate":"H","targets":[3]}]})")), InputError);
    CHECK_THROWS_AS(parse_circuit(json::parse(R"({"init":["q"],"ops":[]})")), InputError);
  }
}
