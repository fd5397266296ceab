#include "s3qd/anyon.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace s3qd {

std::vector<AnyonLabel> sector_labels(Elem w) {
  const ClassLabel cls = class_of(w);
  std::vector<AnyonLabel> out;
  for (const Irrep& R : irreps(centralizer_kind(cls)))
    for (Elem c : conjugacy_class(cls).members)
      for (int j = 1; j <= R.dim; ++j)
        for (int jp = 1; jp <= R.dim; ++jp) out.push_back({cls, R.label, c, j, w, jp});
  return out;
}

Eigen::MatrixXcd basis_change(Elem w) {
  const auto labels = sector_labels(w);
  const Elem r = conjugacy_class(class_of(w)).representative;
  const Elem qw = q_rep(w, r);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(ORDER, static_cast<long>(labels.size()));
  for (size_t k = 0; k < labels.size(); ++k) {
    const AnyonLabel& a = labels[k];
    const Irrep& R = label_irrep(a);
    const double pref = std::sqrt(double(R.dim) / double(R.elements.size()));
    const Elem qc = q_rep(a.c, r);
    for (Elem n : R.elements) M(mul(mul(qc, n), inv(qw)), static_cast<long>(k)) += pref * R(n)(a.j - 1, a.jp - 1);
  }
  return M;
}

namespace {

ClassLabel common_class(const std::vector<Elem>& ws) {
  if (ws.empty()) throw std::invalid_argument("empty input");
  ClassLabel c = class_of(ws.front());
  for (Elem w : ws)
    if (class_of(w) != c) throw std::invalid_argument("terms mix conjugacy classes");
  return c;
}

}  // namespace

std::vector<AnyonTerm> micro_to_anyon(const std::vector<MicroTerm>& in) {
  std::vector<Elem> ws;
  for (const auto& t : in) ws.push_back(t.w);
  common_class(ws);
  std::set<Elem> sectors(ws.begin(), ws.end());
  std::vector<AnyonTerm> out;
  for (Elem w : sectors) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(ORDER);
    for (const auto& t : in)
      if (t.w == w) v(t.z) += t.amp;
    Eigen::VectorXcd a = basis_change(w).adjoint() * v;
    auto labels = sector_labels(w);
    for (long k = 0; k < a.size(); ++k)
      if (std::abs(a(k)) > 1e-14) out.push_back({labels[k], a(k)});
  }
  return out;
}

std::vector<MicroTerm> anyon_to_micro(const std::vector<AnyonTerm>& in) {
  std::vector<Elem> ws;
  for (const auto& t : in) ws.push_back(t.label.cp);
  common_class(ws);
  std::set<Elem> sectors(ws.begin(), ws.end());
  std::vector<MicroTerm> out;
  for (Elem w : sectors) {
    auto labels = sector_labels(w);
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<long>(labels.size()));
    for (const auto& t : in) {
      if (t.label.cp != w) continue;
      auto it = std::find(labels.begin(), labels.end(), t.label);
      if (it == labels.end()) throw std::invalid_argument("label " + format_label(t.label) + " is not a sector label");
      a(it - labels.begin()) += t.amp;
    }
    Eigen::VectorXcd v = basis_change(w) * a;
    for (Elem z = 0; z < ORDER; ++z)
      if (std::abs(v(z)) > 1e-14) out.push_back({z, w, v(z)});
  }
  return out;
}

const FusionTable& fusion_table() {
  static const FusionTable table = [] {
    // upper triangle, row by row
    const std::vector<std::tuple<char, char, std::string>> rows = {
        {'A', 'A', "A"},     {'A', 'B', "B"},     {'A', 'C', "C"},     {'A', 'D', "D"},     {'A', 'E', "E"},
        {'A', 'F', "F"},     {'A', 'G', "G"},     {'A', 'H', "H"},     {'B', 'B', "A"},     {'B', 'C', "C"},
        {'B', 'D', "E"},     {'B', 'E', "D"},     {'B', 'F', "F"},     {'B', 'G', "G"},     {'B', 'H', "H"},
        {'C', 'C', "ABC"},   {'C', 'D', "DE"},    {'C', 'E', "DE"},    {'C', 'F', "GH"},    {'C', 'G', "FH"},
        {'C', 'H', "FG"},    {'D', 'D', "ACFGH"}, {'D', 'E', "BCFGH"}, {'D', 'F', "DE"},    {'D', 'G', "DE"},
        {'D', 'H', "DE"},    {'E', 'E', "ACFGH"}, {'E', 'F', "DE"},    {'E', 'G', "DE"},    {'E', 'H', "DE"},
        {'F', 'F', "ABF"},   {'F', 'G', "CH"},    {'F', 'H', "CG"},    {'G', 'G', "ABG"},   {'G', 'H', "CF"},
        {'H', 'H', "ABH"},
    };
    FusionTable t;
    for (const auto& [a, b, s] : rows) {
      std::vector<char> v(s.begin(), s.end());
      t[{a, b}] = v;
      t[{b, a}] = v;
    }
    return t;
  }();
  return table;
}

std::vector<char> fuse(char a, char b) {
  auto it = fusion_table().find({a, b});
  if (it == fusion_table().end()) throw std::invalid_argument(std::string("unknown anyon type in ") + a + " x " + b);
  return it->second;
}

double AnyonState::norm() const {
  double s = 0;
  for (const auto& [k, a] : amps) s += std::norm(a);
  return std::sqrt(s);
}

void AnyonState::check() const {
  for (const auto& [labels, a] : amps) {
    if (labels.size() != particles.size()) throw std::invalid_argument("label count differs from particle count");
    for (size_t i = 0; i < labels.size(); ++i) {
      const Particle& p = particles[i];
      if (p.kind == ParticleKind::Charge) {
        const Irrep& R = irrep(GroupKind::S3, p.irrep);
        if (labels[i] < 0 || labels[i] >= R.dim) throw std::invalid_argument("charge component out of range");
      } else {
        if (labels[i] < 0 || labels[i] >= ORDER || class_of(static_cast<Elem>(labels[i])) != p.cls)
          throw std::invalid_argument("flux label leaves its class");
      }
    }
  }
}

AnyonState wind_flux_around_charge(Elem w, int charge, const AnyonState& s) {
  const Particle& p = s.particles.at(charge);
  if (p.kind != ParticleKind::Charge) throw std::invalid_argument("winding target is not a charge");
  const Irrep& R = irrep(GroupKind::S3, p.irrep);
  AnyonState out{s.particles, {}};
  for (const auto& [labels, a] : s.amps) {
    for (int i = 0; i < R.dim; ++i) {
      cplx m = R(w)(i, labels[charge]);
      if (m == cplx(0)) continue;
      auto l = labels;
      l[charge] = i;
      out.amps[l] += m * a;
    }
  }
  return out;
}

double charge_transfer_prob(const Irrep& R, ClassLabel c) {
  return std::norm(character(R, conjugacy_class(c).representative) / double(R.dim));
}

double simulated_charge_transfer(const Irrep& R, Elem a) {
  const int d = R.dim;
  Eigen::VectorXcd singlet = Eigen::VectorXcd::Zero(d * d);
  for (int j = 0; j < d; ++j) singlet(j * d + j) = 1.0 / std::sqrt(double(d));
  Eigen::MatrixXcd wind = Eigen::kroneckerProduct(R(a), Eigen::MatrixXcd::Identity(d, d));
  return std::norm(singlet.dot(wind * singlet));
}

std::string_view outcome_name(FluxOutcome o) {
  switch (o) {
    case FluxOutcome::Vacuum: return "vacuum";
    case FluxOutcome::Minus: return "minus";
    case FluxOutcome::TwoPlus: return "2+";
    case FluxOutcome::TwoMinus: return "2-";
  }
  return "?";
}

cplx flux_channel_amplitude(FluxOutcome o, Elem w) {
  const double h = 1 / std::sqrt(2.0);
  Eigen::Vector4cd psi0(0, h, h, 0);  // index 2i+j, component 0 = |2+>
  Eigen::Vector4cd out;
  switch (o) {
    case FluxOutcome::Vacuum: out << 0, h, h, 0; break;
    case FluxOutcome::Minus: out << 0, h, -h, 0; break;
    case FluxOutcome::TwoPlus: out << 1, 0, 0, 0; break;
    case FluxOutcome::TwoMinus: out << 0, 0, 0, 1; break;
  }
  Eigen::Matrix4cd wind = Eigen::kroneckerProduct(Eigen::Matrix2cd::Identity(), Eigen::Matrix2cd(s3_standard()(w)));
  return out.dot(wind * psi0);
}

std::array<double, 4> flux_channel_distribution(const FluxTarget& t) {
  std::array<double, 4> p{};
  for (int o = 0; o < 4; ++o)
    for (long i = 0; i < t.amp.size(); ++i)
      p[o] += std::norm(t.amp(i) * flux_channel_amplitude(FluxOutcome(o), t.flux[i]));
  return p;
}

FluxTarget flux_channel_post(const FluxTarget& t, FluxOutcome o) {
  FluxTarget out = t;
  for (long i = 0; i < t.amp.size(); ++i) out.amp(i) *= flux_channel_amplitude(o, t.flux[i]);
  double n = out.amp.norm();
  if (n < 1e-14) throw std::invalid_argument("flux channel outcome has zero probability");
  out.amp /= n;
  return out;
}

double vacuum_streak_probability(const FluxTarget& t, int rounds) {
  double s = 0;
  for (long i = 0; i < t.amp.size(); ++i)
    s += std::norm(t.amp(i)) * std::pow(std::norm(flux_channel_amplitude(FluxOutcome::Vacuum, t.flux[i])), rounds);
  return s;
}

FluxRun measure_flux_channel(const FluxTarget& t, int rounds, Rng& rng) {
  FluxRun run{{}, {}, t};
  for (int r = 1; r <= rounds; ++r) {
    auto p = flux_channel_distribution(run.post);
    double u = rng.uniform() * (p[0] + p[1] + p[2] + p[3]), acc = 0;
    int pick = 3;
    for (int o = 0; o < 4; ++o) {
      acc += p[o];
      if (u < acc && p[o] > 0) {
        pick = o;
        break;
      }
    }
    while (p[pick] <= 0) --pick;
    auto o = FluxOutcome(pick);
    run.outcomes.push_back(o);
    run.records.push_back({r, "[2] singlet", std::string(outcome_name(o)), p[pick]});
    run.post = flux_channel_post(run.post, o);
  }
  return run;
}

namespace {

// Probability of concluding within `cap` comparisons when the qutrit holds `value`.
double conclusion_probability(int value, int cap) {
  // state: excluded mask and next reference in round-robin order
  std::map<std::pair<int, int>, double> states{{{0, 0}, 1.0}};
  double done = 0;
  for (int step = 0; step < cap && !states.empty(); ++step) {
    std::map<std::pair<int, int>, double> next;
    for (const auto& [st, p] : states) {
      auto [mask, ptr] = st;
      int r = ptr;
      while (mask & (1 << r)) r = (r + 1) % 3;
      int nptr = (r + 1) % 3;
      if (r == value) {
        next[{mask, nptr}] += p;
        continue;
      }
      double excl = std::norm(flux_channel_amplitude(FluxOutcome::Minus, mul(c_flux(value), c_flux(r))));
      int m2 = mask | (1 << r);
      if (std::popcount(unsigned(m2)) == 2)
        done += p * excl;
      else
        next[{m2, nptr}] += p * excl;
      if (excl < 1) next[{mask, nptr}] += p * (1 - excl);
    }
    states = std::move(next);
  }
  return done;
}

}  // namespace

double computational_conclusion_probability(int cap) {
  double worst = 1;
  for (int a = 0; a < 3; ++a) worst = std::min(worst, conclusion_probability(a, cap));
  return worst;
}

std::vector<std::pair<int, Branch>> measure_computational(const Branch& b, int slot, Exec& ex, int cap) {
  std::vector<std::pair<int, Branch>> out;
  if (ex.mode() == Mode::Exact) {
    Eigen::Matrix3cd rho = reduced(b.reg, slot);
    double fail = 0;
    for (int a = 0; a < 3; ++a) {
      double w = rho(a, a).real();
      if (w <= 0) continue;
      double t = conclusion_probability(a, cap);
      fail += w * (1 - t);
      if (b.p * w * t < Exec::kPruneProb) continue;
      Branch c = b;
      std::array<cplx, 3> d{0, 0, 0};
      d[a] = 1;
      apply_diag(c.reg, slot, d);
      c.reg.psi /= c.reg.psi.norm();
      c.p = b.p * w * t;
      out.push_back({a, std::move(c)});
    }
    if (b.p * fail >= Exec::kPruneProb) {
      Branch c = b;
      c.p = b.p * fail;
      c.failed = true;
      out.push_back({-1, std::move(c)});
    }
    return out;
  }

  Branch cur = b;
  int mask = 0, ptr = 0;
  for (int step = 0; step < cap; ++step) {
    int r = ptr;
    while (mask & (1 << r)) r = (r + 1) % 3;
    ptr = (r + 1) % 3;
    std::vector<Register> outs;
    for (FluxOutcome o : {FluxOutcome::Vacuum, FluxOutcome::Minus}) {
      Register reg = cur.reg;
      std::array<cplx, 3> d;
      for (int a = 0; a < 3; ++a) d[a] = flux_channel_amplitude(o, mul(c_flux(a), c_flux(r)));
      apply_diag(reg, slot, d);
      outs.push_back(std::move(reg));
    }
    auto kids = ex.split(cur, outs, "ref " + std::to_string(r), {"vacuum", "minus"});
    auto& [o, next] = kids.front();
    cur = std::move(next);
    if (o == 1) mask |= 1 << r;
    if (std::popcount(unsigned(mask)) == 2) {
      int a = 0;
      while (mask & (1 << a)) ++a;
      out.push_back({a, std::move(cur)});
      return out;
    }
  }
  cur.failed = true;
  out.push_back({-1, std::move(cur)});
  return out;
}

std::pair<double, Register> dual_probe_winding(const Qutrit& q) {
  Register reg = Register::product({q, dual_ket(0)});
  apply_map2(reg, 0, 1, [](int a, int b) { return std::pair{c_index(conj(c_flux(b), c_flux(a))), b}; });
  double p = contract(reg, 1, dual_ket(0)).psi.squaredNorm();
  return {p, reg};
}

}  // namespace s3qd
