#include "s3qd/register.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace s3qd {

namespace {

long pow3(int k) {
  long r = 1;
  while (k-- > 0) r *= 3;
  return r;
}

}  // namespace

Qutrit ket(int a) {
  Qutrit q = Qutrit::Zero();
  q(((a % 3) + 3) % 3) = 1;
  return q;
}

Qutrit dual_ket(int i) {
  Qutrit q;
  for (int b = 0; b < 3; ++b) q(b) = std::pow(omega(), ((i * b) % 3 + 3) % 3) / std::sqrt(3.0);
  return q;
}

Qutrit plus_ket() { return (ket(0) + ket(1)) / std::sqrt(2.0); }
Qutrit minus_ket() { return (ket(0) - ket(1)) / std::sqrt(2.0); }
Qutrit xi_ket() { return (ket(0) - ket(1) + ket(2)) / std::sqrt(3.0); }
Qutrit plus_y_ket() { return cplx(0.5, 0.5) * ket(0) - cplx(0.5, -0.5) * ket(1); }
Qutrit minus_y_ket() { return cplx(0.5, 0.5) * ket(0) + cplx(0.5, -0.5) * ket(1); }

Elem c_flux(int a) {
  static const Elem c[3] = {SIG, MUSIG, MUBSIG};
  return c[((a % 3) + 3) % 3];
}

int c_index(Elem c) {
  for (int a = 0; a < 3; ++a)
    if (c_flux(a) == c) return a;
  throw std::invalid_argument("flux is not in C2");
}

Register Register::product(const std::vector<Qutrit>& qs) {
  Register r;
  for (const auto& q : qs) append(r, q);
  return r;
}

int Register::digit(long idx, int slot) const { return static_cast<int>((idx / pow3(n - 1 - slot)) % 3); }

void apply1(Register& r, int slot, const Eigen::Matrix3cd& m) {
  const long stride = pow3(r.n - 1 - slot);
  for (long base = 0; base < r.dim(); ++base) {
    if ((base / stride) % 3 != 0) continue;
    cplx in[3] = {r.psi(base), r.psi(base + stride), r.psi(base + 2 * stride)};
    for (int a = 0; a < 3; ++a) r.psi(base + a * stride) = m(a, 0) * in[0] + m(a, 1) * in[1] + m(a, 2) * in[2];
  }
}

void apply_map2(Register& r, int i, int j, const std::function<std::pair<int, int>(int, int)>& f) {
  if (i == j) throw std::invalid_argument("two-qutrit map needs distinct slots");
  const long si = pow3(r.n - 1 - i), sj = pow3(r.n - 1 - j);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(r.dim());
  for (long idx = 0; idx < r.dim(); ++idx) {
    if (r.psi(idx) == cplx(0)) continue;
    int a = r.digit(idx, i), b = r.digit(idx, j);
    auto [a2, b2] = f(a, b);
    out(idx + (a2 - a) * si + (b2 - b) * sj) += r.psi(idx);
  }
  r.psi = std::move(out);
}

void apply_diag(Register& r, int slot, const std::array<cplx, 3>& d) {
  for (long idx = 0; idx < r.dim(); ++idx) r.psi(idx) *= d[r.digit(idx, slot)];
}

void append(Register& r, const Qutrit& q) {
  Eigen::VectorXcd out(r.dim() * 3);
  for (long idx = 0; idx < r.dim(); ++idx)
    for (int a = 0; a < 3; ++a) out(3 * idx + a) = r.psi(idx) * q(a);
  r.psi = std::move(out);
  ++r.n;
}

Register contract(const Register& r, int slot, const Qutrit& q) {
  const long stride = pow3(r.n - 1 - slot);
  Register out;
  out.n = r.n - 1;
  out.psi = Eigen::VectorXcd::Zero(r.dim() / 3);
  for (long idx = 0; idx < r.dim(); ++idx) {
    long hi = idx / (stride * 3), lo = idx % stride;
    out.psi(hi * stride + lo) += std::conj(q(r.digit(idx, slot))) * r.psi(idx);
  }
  return out;
}

void move_slot(Register& r, int from, int to) {
  if (from == to) return;
  std::vector<int> order(r.n);  // order[new position] = old position
  for (int k = 0; k < r.n; ++k) order[k] = k;
  order.erase(order.begin() + from);
  order.insert(order.begin() + to, from);
  Eigen::VectorXcd out(r.dim());
  for (long idx = 0; idx < r.dim(); ++idx) {
    long nidx = 0;
    for (int k = 0; k < r.n; ++k) nidx = nidx * 3 + r.digit(idx, order[k]);
    out(nidx) = r.psi(idx);
  }
  r.psi = std::move(out);
}

Eigen::Matrix3cd reduced(const Register& r, int slot) {
  Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();
  const long stride = pow3(r.n - 1 - slot);
  for (long idx = 0; idx < r.dim(); ++idx) {
    if (r.digit(idx, slot) != 0) continue;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) rho(a, b) += r.psi(idx + a * stride) * std::conj(r.psi(idx + b * stride));
  }
  return rho;
}

bool same_ray(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, double tol) {
  if (a.size() != b.size()) return false;
  return std::abs(1.0 - std::abs(a.dot(b))) <= tol;
}

void to_json(nlohmann::json& j, const MeasurementRecord& r) {
  j = nlohmann::json{{"round", r.round}, {"probe", r.probe}, {"outcome", r.outcome}, {"p", r.p}};
}

std::vector<std::pair<int, Branch>> Exec::split(const Branch& b, const std::vector<Register>& outs,
                                                std::string_view probe, const std::vector<std::string>& labels) {
  std::vector<double> probs(outs.size());
  for (size_t i = 0; i < outs.size(); ++i) probs[i] = outs[i].psi.squaredNorm();
  auto child = [&](size_t i) {
    Branch c = b;
    c.reg = outs[i];
    c.reg.psi /= std::sqrt(probs[i]);
    return c;
  };
  std::vector<std::pair<int, Branch>> kids;
  if (mode_ == Mode::Exact) {
    for (size_t i = 0; i < outs.size(); ++i) {
      if (b.p * probs[i] < kPruneProb) continue;
      Branch c = child(i);
      c.p = b.p * probs[i];
      kids.push_back({static_cast<int>(i), std::move(c)});
    }
    return kids;
  }
  double total = 0;
  for (double p : probs) total += p;
  double u = rng_.uniform() * total, acc = 0;
  size_t pick = outs.size();
  for (size_t i = 0; i < outs.size(); ++i) {
    if (probs[i] <= 0) continue;
    pick = i;
    acc += probs[i];
    if (u < acc) break;
  }
  if (pick == outs.size()) throw std::logic_error("measurement with no possible outcome");
  Branch c = child(pick);
  c.records.push_back({static_cast<int>(b.records.size()) + 1, std::string(probe),
                       labels.empty() ? std::to_string(pick) : labels[pick], probs[pick] / total});
  kids.push_back({static_cast<int>(pick), std::move(c)});
  return kids;
}

void merge(Branches& bs) {
  Branches out;
  for (auto& b : bs) {
    bool done = false;
    for (auto& o : out) {
      if (o.failed != b.failed || o.error != b.error || o.reg.n != b.reg.n || o.outcomes != b.outcomes) continue;
      if (!same_ray(o.reg.psi, b.reg.psi)) continue;
      o.p += b.p;
      o.reps = std::max(o.reps, b.reps);
      done = true;
      break;
    }
    if (!done) out.push_back(std::move(b));
  }
  bs = std::move(out);
}

double total_probability(const Branches& bs) {
  double s = 0;
  for (const auto& b : bs) s += b.p;
  return s;
}

}  // namespace s3qd
