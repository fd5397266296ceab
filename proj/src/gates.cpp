#include "s3qd/gates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "s3qd/lattice.hpp"

namespace s3qd {

namespace {

int mod3(int x) { return ((x % 3) + 3) % 3; }

double live_mass(const Branches& bs) {
  double s = 0;
  for (const auto& b : bs)
    if (!b.failed) s += b.p;
  return s;
}

double flagged_mass(const Branches& bs) {
  double s = 0;
  for (const auto& b : bs)
    if (b.failed || b.error) s += b.p;
  return s;
}

// Runs `f` on the register of every live branch.
template <class F>
void each_live(Branches& bs, F&& f) {
  for (auto& b : bs)
    if (!b.failed) f(b.reg);
}

// Tensors a prepared standalone state onto every live parent. Exact mode prepares once.
Branches attach(const Branches& parents, const std::function<Branches()>& prep, Exec& ex) {
  Branches out, cached;
  if (ex.mode() == Mode::Exact) cached = prep();
  for (const auto& b : parents) {
    if (b.failed) {
      out.push_back(b);
      continue;
    }
    Branches made = ex.mode() == Mode::Exact ? cached : prep();
    for (const auto& s : made) {
      Branch c = b;
      c.p = b.p * s.p;
      c.reps = s.reps;
      if (c.p < Exec::kPruneProb) continue;
      if (s.failed) {
        c.failed = true;
      } else {
        c.reg.psi = Eigen::kroneckerProduct(b.reg.psi, s.reg.psi).eval();
        c.reg.n = b.reg.n + s.reg.n;
        c.error = b.error || s.error;
      }
      for (auto r : s.records) {
        r.round = static_cast<int>(c.records.size()) + 1;
        c.records.push_back(std::move(r));
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

void ideal_cx(Register& r, int c, int t) {
  apply_map2(r, c, t, [](int a, int b) { return std::pair{a, (a == 1 && b < 2) ? 1 - b : b}; });
}

void ideal_cz(Register& r, int c, int t) {
  for (long idx = 0; idx < r.dim(); ++idx)
    if (r.digit(idx, c) == 1 && r.digit(idx, t) == 1) r.psi(idx) = -r.psi(idx);
}

// Retry loop shared by the preparations: `attempt` turns a fresh empty branch into children
// with outcome 0 for success and anything else for a retry.
Branches repeat_until(int cap, const std::function<std::vector<std::pair<int, Branch>>(const Branch&)>& attempt) {
  Branches out;
  Branch fresh;
  fresh.reg = Register{};
  Branches pending{fresh};
  for (int rep = 1; rep <= cap && !pending.empty(); ++rep) {
    Branches retry;
    for (const auto& cur : pending) {
      for (auto& [o, k] : attempt(cur)) {
        k.reps = rep;
        if (k.failed || o == 0) {
          out.push_back(std::move(k));
        } else {
          k.reg = Register{};
          k.error = false;
          retry.push_back(std::move(k));
        }
      }
    }
    merge(retry);
    pending = std::move(retry);
  }
  for (auto& b : pending) {
    b.failed = true;
    b.reps = cap;
    out.push_back(std::move(b));
  }
  merge(out);
  return out;
}

GateResult finish(std::string name, double live_in, double flagged_before, const Branches& bs, int reps) {
  GateResult g;
  g.applied = std::move(name);
  g.repetitions = reps;
  g.residual_error = live_in > 0 ? std::clamp((flagged_mass(bs) - flagged_before) / live_in, 0.0, 1.0) : 0.0;
  if (g.residual_error < 1e-300) g.residual_error = 0;
  g.corrected = g.residual_error == 0;
  return g;
}

int max_reps(const Branches& bs) {
  int m = 0;
  for (const auto& b : bs) m = std::max(m, b.reps);
  return m;
}

}  // namespace

void to_json(nlohmann::json& j, const GateResult& r) {
  j = nlohmann::json{{"applied", r.applied},
                     {"repetitions", r.repetitions},
                     {"corrected", r.corrected},
                     {"residual_error", r.residual_error}};
}

void gate_U(Register& r, int i, int j) {
  apply_map2(r, i, j, [](int a, int b) { return std::pair{a, mod3(-a - b)}; });
}

void gate_U_plus(Register& r, int i, int j) {
  append(r, ket(0));
  const int k = r.n - 1;
  gate_U(r, i, j);
  gate_U(r, k, j);
  release(r, k, ket(0));
}

void gate_U_minus(Register& r, int i, int j) {
  append(r, ket(0));
  const int k = r.n - 1;
  gate_U(r, i, k);
  gate_U_plus(r, k, j);
  gate_U(r, i, k);
  release(r, k, ket(0));
}

void qutrit_Z(Register& r, int i) {
  append(r, dual_ket(1));
  const int k = r.n - 1;
  gate_U_minus(r, i, k);
  release(r, k, dual_ket(1));
}

void qubit_X(Register& r, int i) {
  require_qubit(r, i);
  append(r, ket(0));
  append(r, ket(1));
  const int a0 = r.n - 2, a1 = r.n - 1;
  gate_U_plus(r, i, a0);
  gate_U_plus(r, a1, a0);
  gate_U_plus(r, a0, i);
  gate_U_plus(r, i, a0);
  release(r, a1, ket(1));
  release(r, a0, ket(2));
}

void release(Register& r, int slot, const Qutrit& q) {
  Register c = contract(r, slot, q);
  const double w = c.psi.squaredNorm() / r.psi.squaredNorm();
  if (w < 1 - 1e-9) throw std::logic_error("ancilla not returned to its declared state");
  r = std::move(c);
}

void require_qubit(const Register& r, int slot) {
  if (slot < 0 || slot >= r.n) throw std::out_of_range("qutrit index out of range");
  if (reduced(r, slot)(2, 2).real() > 1e-12) throw LeakageError("qutrit " + std::to_string(slot) + " has support on |2>");
}

std::vector<std::pair<int, Branch>> compare_basis(const Branch& b, int slot, int a, Exec& ex) {
  std::array<cplx, 3> yes{0, 0, 0}, no{1, 1, 1};
  yes[mod3(a)] = 1;
  no[mod3(a)] = 0;
  std::vector<Register> outs{b.reg, b.reg};
  apply_diag(outs[0], slot, yes);
  apply_diag(outs[1], slot, no);
  return ex.split(b, outs, "compare |" + std::to_string(mod3(a)) + ">", {"yes", "no"});
}

std::vector<std::pair<int, Branch>> compare_dual(const Branch& b, int slot, int which, Exec& ex) {
  const Qutrit d = dual_ket(which);
  const Eigen::Matrix3cd p = d * d.adjoint();
  std::vector<Register> outs{b.reg, b.reg};
  apply1(outs[0], slot, p);
  apply1(outs[1], slot, Eigen::Matrix3cd::Identity() - p);
  return ex.split(b, outs, "compare |" + std::to_string(mod3(which)) + "~>", {"yes", "no"});
}

std::vector<std::pair<int, Branch>> measure_qubit_x(const Branch& b, int slot, Exec& ex, const Caps& caps) {
  require_qubit(b.reg, slot);
  std::vector<std::pair<int, Branch>> out;
  Branches pending{b};
  for (int step = 0; step < caps.x_steps && !pending.empty(); ++step) {
    Branches next;
    for (const auto& cur : pending) {
      for (auto& [o, k] : compare_dual(cur, slot, 0, ex)) {
        if (o == 0) {
          k.reg = contract(k.reg, slot, dual_ket(0));
          out.push_back({0, std::move(k)});
          continue;
        }
        for (auto& [o2, k2] : compare_basis(k, slot, 2, ex)) {
          if (o2 == 0) {
            k2.reg = contract(k2.reg, slot, ket(2));
            out.push_back({0, std::move(k2)});
          } else {
            next.push_back(std::move(k2));
          }
        }
      }
    }
    pending = std::move(next);
  }
  // Every step answered no: declare |->. The slot still carries a suppressed |+> part.
  for (const auto& cur : pending) {
    std::vector<Register> outs{contract(cur.reg, slot, minus_ket()), contract(cur.reg, slot, plus_ket())};
    for (auto& [i, k] : ex.split(cur, outs, "x residual", {"-", "+"})) {
      if (i == 1) k.error = true;
      out.push_back({1, std::move(k)});
    }
  }
  return out;
}

Branches prepare_plus(Exec& ex, const Caps& caps) {
  return repeat_until(caps.prep, [&](const Branch& fresh) {
    Branch b = fresh;
    b.reg = Register::product({dual_ket(0)});
    auto kids = compare_basis(b, 0, 2, ex);
    for (auto& [o, k] : kids) o = o == 1 ? 0 : 1;  // "no" leaves |+>
    return kids;
  });
}

Branches prepare_xi(Exec& ex, const Caps& caps) {
  return repeat_until(caps.prep, [&](const Branch& fresh) {
    std::vector<std::pair<int, Branch>> kids;
    auto plus = [&] { return prepare_plus(ex, caps); };
    Branches bs = attach(attach({fresh}, plus, ex), plus, ex);
    for (auto& b : bs) {
      if (b.failed) {
        kids.push_back({1, std::move(b)});
        continue;
      }
      qutrit_Z(b.reg, 0);
      qutrit_Z(b.reg, 1);
      qutrit_Z(b.reg, 1);
      gate_U_plus(b.reg, 0, 1);
      for (auto& [o, k] : compare_dual(b, 0, 0, ex)) {
        if (o == 0) k.reg = contract(k.reg, 0, dual_ket(0));
        kids.push_back({o, std::move(k)});
      }
    }
    return kids;
  });
}

Branches prepare_minus_y(Exec& ex, const Caps& caps) {
  return repeat_until(caps.prep, [&](const Branch& fresh) {
    std::vector<std::pair<int, Branch>> kids;
    Branches bs = attach({fresh}, [&] { return prepare_plus(ex, caps); }, ex);
    for (auto& b : bs) {
      if (b.failed) {
        kids.push_back({1, std::move(b)});
        continue;
      }
      append(b.reg, ket(0));
      gate_U_plus(b.reg, 0, 1);
      append(b.reg, plus_y_ket());
      y_compare(b.reg, 0, 2);
      release(b.reg, 2, plus_y_ket());
      for (auto& kid : measure_qubit_x(b, 0, ex, caps)) kids.push_back(std::move(kid));
    }
    return kids;
  });
}

void y_copy(Register& r, int plus, int y) {
  ideal_cx(r, plus, y);
  ideal_cz(r, plus, y);
}

void y_compare(Register& r, int probe, int ref) {
  ideal_cz(r, probe, ref);
  ideal_cx(r, probe, ref);
}

Eigen::MatrixXcd y_pool_density(int n) {
  if (n < 1) throw std::invalid_argument("pool needs at least one state");
  const long q = 1L << n;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(q, q);
  for (const Qutrit& ref : {plus_y_ket(), minus_y_ket()}) {
    Register r = Register::product({ref});
    for (int k = 1; k < n; ++k) {
      append(r, plus_ket());
      y_copy(r, k, 0);
    }
    Eigen::VectorXcd v(q);
    for (long bits = 0; bits < q; ++bits) {
      long idx = 0;
      for (int k = 0; k < n; ++k) idx = idx * 3 + ((bits >> (n - 1 - k)) & 1);
      v(bits) = r.psi(idx);
    }
    rho += 0.5 * v * v.adjoint();
  }
  return rho;
}

double sign_flip_success(int n) { return 1 - (2.0 / 3.0) * std::pow(7.0 / 9.0, (n - 1) / 2); }

GateResult sign_flip(Branches& bs, int slot, int which, Exec& ex, const Caps& caps) {
  if (which < 0 || which > 2) throw std::invalid_argument("sign flip index must be 0, 1 or 2");
  const double live_in = live_mass(bs), flagged_in = flagged_mass(bs);
  Branches done;
  std::vector<std::pair<int, Branch>> work;  // parity bits of the applied flips
  for (auto& b : bs) {
    if (b.failed) {
      done.push_back(std::move(b));
    } else {
      b.reps = 0;
      work.push_back({0, std::move(b)});
    }
  }
  int reps = 0;
  auto xi = [&] { return prepare_xi(ex, caps); };
  Branches cached_xi;
  if (ex.mode() == Mode::Exact) cached_xi = xi();
  for (int rep = 1; rep <= caps.sign_flip && !work.empty(); ++rep) {
    reps = rep;
    std::vector<std::pair<int, Branch>> next;
    for (auto& [par, wb] : work) {
      Branches with = attach({wb}, ex.mode() == Mode::Exact ? std::function<Branches()>([&] { return cached_xi; }) : xi, ex);
      for (auto& b : with) {
        b.reps = rep;
        if (b.failed) {
          done.push_back(std::move(b));
          continue;
        }
        const int anc = b.reg.n - 1;
        gate_U_plus(b.reg, slot, anc);
        for (auto& [m, k] : measure_computational(b, anc, ex, caps.compare)) {
          k.reps = rep;
          if (m < 0) {
            done.push_back(std::move(k));
            continue;
          }
          k.reg = contract(k.reg, anc, ket(m));
          const int np = par ^ (1 << mod3(m + 2));
          if (np == (1 << which)) done.push_back(std::move(k));
          else next.push_back({np, std::move(k)});
        }
      }
    }
    // Equal parity and equal origin means equal ray: combine.
    std::vector<std::pair<int, Branch>> merged;
    for (auto& [par, b] : next) {
      bool joined = false;
      for (auto& [mp, mb] : merged) {
        if (mp == par && mb.error == b.error && mb.outcomes == b.outcomes && same_ray(mb.reg.psi, b.reg.psi)) {
          mb.p += b.p;
          joined = true;
          break;
        }
      }
      if (!joined) merged.push_back({par, std::move(b)});
    }
    work = std::move(merged);
  }
  for (auto& [par, b] : work) {
    b.failed = true;
    done.push_back(std::move(b));
  }
  merge(done);
  bs = std::move(done);
  return finish("sign_flip_" + std::to_string(which), live_in, flagged_in, bs, reps);
}

GateResult cz(Branches& bs, int i, int j, Exec& ex, const Caps& caps) {
  const double live_in = live_mass(bs), flagged_in = flagged_mass(bs);
  each_live(bs, [&](Register& r) {
    require_qubit(r, i);
    require_qubit(r, j);
    append(r, ket(0));
    gate_U_plus(r, i, r.n - 1);
    gate_U_plus(r, j, r.n - 1);
  });
  const int k = [&] {
    for (const auto& b : bs)
      if (!b.failed) return b.reg.n - 1;
    return -1;
  }();
  GateResult sf;
  if (k >= 0) sf = sign_flip(bs, k, 2, ex, caps);
  each_live(bs, [&](Register& r) {
    gate_U_minus(r, i, k);
    gate_U_minus(r, j, k);
    release(r, k, ket(0));
  });
  return finish("CZ", live_in, flagged_in, bs, sf.repetitions);
}

GateResult ccz(Branches& bs, int i, int j, int k, Exec& ex, const Caps& caps) {
  const double live_in = live_mass(bs), flagged_in = flagged_mass(bs);
  each_live(bs, [&](Register& r) {
    for (int s : {i, j, k}) require_qubit(r, s);
  });
  int reps = 0;
  for (int s : {i, j, k}) reps += sign_flip(bs, s, 1, ex, caps).repetitions;
  int anc = -1;
  each_live(bs, [&](Register& r) {
    append(r, ket(0));
    anc = r.n - 1;
    for (int s : {i, j, k}) gate_U_plus(r, s, anc);
  });
  if (anc >= 0) reps += sign_flip(bs, anc, 1, ex, caps).repetitions;
  each_live(bs, [&](Register& r) {
    for (int s : {i, j, k}) gate_U_minus(r, s, anc);
    release(r, anc, ket(0));
  });
  return finish("CCZ", live_in, flagged_in, bs, reps);
}

GateResult hadamard(Branches& bs, int i, Exec& ex, const Caps& caps) {
  const double live_in = live_mass(bs), flagged_in = flagged_mass(bs);
  each_live(bs, [&](Register& r) { require_qubit(r, i); });
  bs = attach(bs, [&] { return prepare_plus(ex, caps); }, ex);
  int reps = max_reps(bs);
  int anc = -1;
  for (const auto& b : bs)
    if (!b.failed) anc = b.reg.n - 1;
  if (anc >= 0) reps += cz(bs, i, anc, ex, caps).repetitions;
  Branches out;
  for (auto& b : bs) {
    if (b.failed) {
      out.push_back(std::move(b));
      continue;
    }
    for (auto& [o, k] : measure_qubit_x(b, i, ex, caps)) {
      // The output sits on the ancilla, now the last slot.
      if (o == 1) qubit_X(k.reg, k.reg.n - 1);
      move_slot(k.reg, k.reg.n - 1, i);
      out.push_back(std::move(k));
    }
  }
  merge(out);
  bs = std::move(out);
  return finish("H", live_in, flagged_in, bs, reps);
}

GateResult phase_s(Branches& bs, int i, Exec& ex, const Caps& caps) {
  const double live_in = live_mass(bs), flagged_in = flagged_mass(bs);
  each_live(bs, [&](Register& r) { require_qubit(r, i); });
  bs = attach(bs, [&] { return prepare_minus_y(ex, caps); }, ex);
  int reps = max_reps(bs);
  int anc = -1;
  for (const auto& b : bs)
    if (!b.failed) anc = b.reg.n - 1;
  if (anc >= 0) reps += cz(bs, i, anc, ex, caps).repetitions;
  Branches keep, fix;
  for (auto& b : bs) {
    if (b.failed) {
      keep.push_back(std::move(b));
      continue;
    }
    for (auto& [o, k] : measure_qubit_x(b, anc, ex, caps)) (o == 0 ? keep : fix).push_back(std::move(k));
  }
  // Outcome |-> leaves S^dagger; Z turns it into S.
  if (!fix.empty()) reps += sign_flip(fix, i, 1, ex, caps).repetitions;
  for (auto& b : fix) keep.push_back(std::move(b));
  merge(keep);
  bs = std::move(keep);
  return finish("S", live_in, flagged_in, bs, reps);
}

GateResult measure_z(Branches& bs, int i, Exec& ex, const Caps& caps) {
  const double live_in = live_mass(bs), flagged_in = flagged_mass(bs);
  Branches out;
  int reps = 0;
  for (auto& b : bs) {
    if (b.failed) {
      out.push_back(std::move(b));
      continue;
    }
    for (auto& [m, k] : measure_computational(b, i, ex, caps.compare)) {
      if (m >= 0) k.outcomes.push_back(m);
      out.push_back(std::move(k));
    }
  }
  merge(out);
  bs = std::move(out);
  return finish("measure_z", live_in, flagged_in, bs, reps);
}

GateResult measure_x(Branches& bs, int i, Exec& ex, const Caps& caps) {
  const double live_in = live_mass(bs), flagged_in = flagged_mass(bs);
  Branches out;
  for (auto& b : bs) {
    if (b.failed) {
      out.push_back(std::move(b));
      continue;
    }
    for (auto& [o, k] : measure_qubit_x(b, i, ex, caps)) {
      append(k.reg, o == 0 ? plus_ket() : minus_ket());
      move_slot(k.reg, k.reg.n - 1, i);
      k.outcomes.push_back(o);
      out.push_back(std::move(k));
    }
  }
  merge(out);
  bs = std::move(out);
  return finish("measure_x", live_in, flagged_in, bs, 0);
}

// ---- circuits

namespace {

Qutrit parse_state(const std::string& s) {
  static const std::map<std::string, Qutrit> table = {
      {"0", ket(0)},           {"1", ket(1)},           {"2", ket(2)},           {"+", plus_ket()},
      {"-", minus_ket()},      {"0~", dual_ket(0)},     {"1~", dual_ket(1)},     {"2~", dual_ket(2)},
      {"xi", xi_ket()},        {"+Y", plus_y_ket()},    {"-Y", minus_y_ket()}};
  auto it = table.find(s);
  if (it == table.end()) throw InputError("unknown initial state '" + s + "'");
  return it->second;
}

struct GateSpec {
  int arity;
};

const std::map<std::string, GateSpec>& gate_table() {
  static const std::map<std::string, GateSpec> t = {
      {"U", {2}},  {"U_plus", {2}}, {"U_minus", {2}}, {"Z", {1}}, {"X", {1}},         {"sign_flip", {1}},
      {"CZ", {2}}, {"CCZ", {3}},    {"H", {1}},       {"S", {1}}, {"measure_z", {1}}, {"measure_x", {1}}};
  return t;
}

}  // namespace

Circuit parse_circuit(const nlohmann::json& j) {
  Circuit c;
  const nlohmann::json* ops = &j;
  if (j.is_object()) {
    if (!j.contains("ops") || !j["ops"].is_array()) throw InputError("circuit object needs an 'ops' array");
    ops = &j["ops"];
    if (j.contains("init")) {
      if (!j["init"].is_array()) throw InputError("'init' must be an array of state names");
      for (const auto& s : j["init"]) {
        if (!s.is_string()) throw InputError("'init' entries must be strings");
        c.init.push_back(parse_state(s.get<std::string>()));
      }
    }
  } else if (!j.is_array()) {
    throw InputError("circuit must be a JSON array or object");
  }
  int max_target = -1;
  for (size_t n = 0; n < ops->size(); ++n) {
    const auto& o = (*ops)[n];
    const std::string where = "op " + std::to_string(n) + ": ";
    if (!o.is_object() || !o.contains("gate") || !o["gate"].is_string()) throw InputError(where + "needs a 'gate' string");
    CircuitOp op;
    op.gate = o["gate"].get<std::string>();
    auto spec = gate_table().find(op.gate);
    if (spec == gate_table().end()) throw InputError(where + "unknown gate '" + op.gate + "'");
    if (!o.contains("targets") || !o["targets"].is_array()) throw InputError(where + "needs a 'targets' array");
    for (const auto& t : o["targets"]) {
      if (!t.is_number_integer() || t.get<int>() < 0) throw InputError(where + "targets must be non-negative integers");
      op.targets.push_back(t.get<int>());
      max_target = std::max(max_target, op.targets.back());
    }
    if (static_cast<int>(op.targets.size()) != spec->second.arity)
      throw InputError(where + op.gate + " takes " + std::to_string(spec->second.arity) + " target(s)");
    for (size_t a = 0; a < op.targets.size(); ++a)
      for (size_t b = a + 1; b < op.targets.size(); ++b)
        if (op.targets[a] == op.targets[b]) throw InputError(where + "targets must be distinct");
    op.params = o.value("params", nlohmann::json::object());
    if (op.gate == "sign_flip") {
      if (!op.params.contains("which") || !op.params["which"].is_number_integer() || op.params["which"].get<int>() < 0 ||
          op.params["which"].get<int>() > 2)
        throw InputError(where + "sign_flip needs params.which in {0,1,2}");
    }
    c.ops.push_back(std::move(op));
  }
  if (c.init.empty()) c.init.assign(max_target + 1, ket(0));
  if (max_target >= static_cast<int>(c.init.size()))
    throw InputError("target " + std::to_string(max_target) + " outside a register of " + std::to_string(c.init.size()));
  return c;
}

RunOutput run_circuit(const Circuit& c, Mode mode, std::uint64_t seed, const Caps& caps) {
  Exec ex(mode, seed);
  RunOutput out;
  Branch start;
  start.reg = Register::product(c.init);
  out.branches.push_back(std::move(start));
  for (const auto& op : c.ops) {
    Branches& bs = out.branches;
    const auto& t = op.targets;
    GateResult g;
    g.applied = op.gate;
    if (op.gate == "U") each_live(bs, [&](Register& r) { gate_U(r, t[0], t[1]); });
    else if (op.gate == "U_plus") each_live(bs, [&](Register& r) { gate_U_plus(r, t[0], t[1]); });
    else if (op.gate == "U_minus") each_live(bs, [&](Register& r) { gate_U_minus(r, t[0], t[1]); });
    else if (op.gate == "Z") each_live(bs, [&](Register& r) { qutrit_Z(r, t[0]); });
    else if (op.gate == "X") each_live(bs, [&](Register& r) { qubit_X(r, t[0]); });
    else if (op.gate == "sign_flip") g = sign_flip(bs, t[0], op.params["which"].get<int>(), ex, caps);
    else if (op.gate == "CZ") g = cz(bs, t[0], t[1], ex, caps);
    else if (op.gate == "CCZ") g = ccz(bs, t[0], t[1], t[2], ex, caps);
    else if (op.gate == "H") g = hadamard(bs, t[0], ex, caps);
    else if (op.gate == "S") g = phase_s(bs, t[0], ex, caps);
    else if (op.gate == "measure_z") g = measure_z(bs, t[0], ex, caps);
    else if (op.gate == "measure_x") g = measure_x(bs, t[0], ex, caps);
    else throw InputError("unknown gate '" + op.gate + "'");
    out.results.push_back(g);
    if (mode == Mode::Sampled && bs.front().failed) {
      out.cap_exhausted = true;
      break;
    }
  }
  return out;
}

nlohmann::json run_to_json(const RunOutput& out, Mode mode) {
  nlohmann::json j;
  j["mode"] = mode == Mode::Exact ? "exact" : "sampled";
  j["gates"] = out.results;
  j["cap_exhausted"] = out.cap_exhausted;
  double failed = 0, error = 0;
  nlohmann::json branches = nlohmann::json::array();
  for (const auto& b : out.branches) {
    if (b.failed) failed += b.p;
    if (b.error) error += b.p;
    nlohmann::json e{{"p", b.p}, {"failed", b.failed}, {"error", b.error}, {"outcomes", b.outcomes}};
    if (!b.failed) {
      nlohmann::json amps = nlohmann::json::array();
      for (long k = 0; k < b.reg.dim(); ++k) amps.push_back({b.reg.psi(k).real(), b.reg.psi(k).imag()});
      e["amplitudes"] = std::move(amps);
    }
    if (mode == Mode::Sampled) e["records"] = b.records;
    branches.push_back(std::move(e));
  }
  j["branches"] = std::move(branches);
  j["residual_probability"] = failed + error;
  return j;
}

}  // namespace s3qd
