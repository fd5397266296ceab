#include "s3qd/group.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace s3qd {

namespace {

using Perm = std::array<int, 3>;

Perm compose(const Perm& a, const Perm& b) {  // a after b
  return {a[b[0]], a[b[1]], a[b[2]]};
}

struct Tables {
  std::array<Perm, ORDER> perms;
  std::array<std::array<Elem, ORDER>, ORDER> mul;
  std::array<Elem, ORDER> inv;

  Tables() {
    const Perm id{0, 1, 2};
    const Perm mu{1, 2, 0};
    const Perm sig{0, 2, 1};
    const Perm mub = compose(mu, mu);
    perms = {id, mu, mub, sig, compose(mu, sig), compose(mub, sig)};
    for (int a = 0; a < ORDER; ++a) {
      for (int b = 0; b < ORDER; ++b) {
        Perm p = compose(perms[a], perms[b]);
        auto it = std::find(perms.begin(), perms.end(), p);
        mul[a][b] = static_cast<Elem>(it - perms.begin());
      }
    }
    for (int a = 0; a < ORDER; ++a)
      for (int b = 0; b < ORDER; ++b)
        if (mul[a][b] == E) inv[a] = static_cast<Elem>(b);
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

constexpr std::array<std::string_view, ORDER> kNames{"e", "u", "U", "s", "us", "Us"};

}  // namespace

Elem mul(Elem g, Elem h) { return tables().mul[g][h]; }
Elem inv(Elem g) { return tables().inv[g]; }
Elem conj(Elem g, Elem h) { return mul(mul(g, h), inv(g)); }
Elem commutator(Elem g, Elem h) { return mul(mul(g, h), mul(inv(g), inv(h))); }

std::string_view name(Elem g) { return kNames.at(g); }

Elem parse_elem(std::string_view s) {
  for (int i = 0; i < ORDER; ++i)
    if (kNames[i] == s) return static_cast<Elem>(i);
  throw std::invalid_argument("unknown group element '" + std::string(s) + "'");
}

std::array<int, 3> permutation(Elem g) {
  Perm p = tables().perms.at(g);
  return {p[0] + 1, p[1] + 1, p[2] + 1};
}

const std::array<ConjugacyClass, 3>& classes() {
  static const std::array<ConjugacyClass, 3> cs{
      ConjugacyClass{ClassLabel::C1, {E}, E},
      ConjugacyClass{ClassLabel::C2, {SIG, MUSIG, MUBSIG}, SIG},
      ConjugacyClass{ClassLabel::C3, {MU, MUB}, MU},
  };
  return cs;
}

ClassLabel class_of(Elem g) {
  if (g == E) return ClassLabel::C1;
  if (g == MU || g == MUB) return ClassLabel::C3;
  return ClassLabel::C2;
}

const ConjugacyClass& conjugacy_class(ClassLabel c) { return classes()[static_cast<int>(c)]; }

std::string_view class_name(ClassLabel c) {
  switch (c) {
    case ClassLabel::C1: return "C1";
    case ClassLabel::C2: return "C2";
    case ClassLabel::C3: return "C3";
  }
  return "?";
}

std::vector<Elem> centralizer(Elem g) {
  std::vector<Elem> out;
  for (Elem h = 0; h < ORDER; ++h)
    if (mul(g, h) == mul(h, g)) out.push_back(h);
  return out;
}

std::vector<Elem> derived_subgroup() {
  std::vector<bool> in(ORDER, false);
  for (Elem a = 0; a < ORDER; ++a)
    for (Elem b = 0; b < ORDER; ++b) in[commutator(a, b)] = true;
  // close under products
  bool grew = true;
  while (grew) {
    grew = false;
    for (Elem a = 0; a < ORDER; ++a)
      for (Elem b = 0; b < ORDER; ++b)
        if (in[a] && in[b] && !in[mul(a, b)]) in[mul(a, b)] = grew = true;
  }
  std::vector<Elem> out;
  for (Elem a = 0; a < ORDER; ++a)
    if (in[a]) out.push_back(a);
  return out;
}

Elem q_rep(Elem c, Elem r) {
  for (Elem q = 0; q < ORDER; ++q)
    if (conj(q, r) == c) return q;
  throw std::invalid_argument("q_rep: elements are not conjugate");
}

const cplx& omega() {
  static const cplx w = std::polar(1.0, 2.0 * M_PI / 3.0);
  return w;
}

bool Irrep::contains(Elem g) const {
  return std::find(elements.begin(), elements.end(), g) != elements.end();
}

const Eigen::MatrixXcd& Irrep::operator()(Elem g) const {
  if (!contains(g)) throw std::invalid_argument("element outside the irrep's group");
  return mats[g];
}

namespace {

Irrep one_dim(GroupKind k, std::string label, std::vector<Elem> elems,
              const std::array<cplx, ORDER>& vals) {
  Irrep r;
  r.group = k;
  r.label = std::move(label);
  r.dim = 1;
  r.elements = std::move(elems);
  for (int g = 0; g < ORDER; ++g) {
    r.mats[g] = Eigen::MatrixXcd::Zero(1, 1);
    r.mats[g](0, 0) = vals[g];
  }
  return r;
}

std::vector<Irrep> build_s3() {
  const std::vector<Elem> all{E, MU, MUB, SIG, MUSIG, MUBSIG};
  std::vector<Irrep> out;
  out.push_back(one_dim(GroupKind::S3, "+", all, {1, 1, 1, 1, 1, 1}));
  out.push_back(one_dim(GroupKind::S3, "-", all, {1, 1, 1, -1, -1, -1}));

  const cplx w = omega();
  Eigen::Matrix2cd rmu, rsig;
  rmu << w, 0, 0, std::conj(w);
  rsig << 0, 1, 1, 0;
  Irrep two;
  two.group = GroupKind::S3;
  two.label = "2";
  two.dim = 2;
  two.elements = all;
  Eigen::Matrix2cd rmub = rmu * rmu;
  two.mats[E] = Eigen::Matrix2cd::Identity();
  two.mats[MU] = rmu;
  two.mats[MUB] = rmub;
  two.mats[SIG] = rsig;
  two.mats[MUSIG] = rmu * rsig;
  two.mats[MUBSIG] = rmub * rsig;
  out.push_back(two);
  return out;
}

std::vector<Irrep> build_z3() {
  const std::vector<Elem> el{E, MU, MUB};
  const cplx w = omega(), wb = std::conj(omega());
  std::vector<Irrep> out;
  out.push_back(one_dim(GroupKind::Z3, "1", el, {1, 1, 1, 0, 0, 0}));
  out.push_back(one_dim(GroupKind::Z3, "w", el, {1, w, wb, 0, 0, 0}));
  out.push_back(one_dim(GroupKind::Z3, "w*", el, {1, wb, w, 0, 0, 0}));
  return out;
}

std::vector<Irrep> build_z2() {
  const std::vector<Elem> el{E, SIG};
  std::vector<Irrep> out;
  out.push_back(one_dim(GroupKind::Z2, "+", el, {1, 0, 0, 1, 0, 0}));
  out.push_back(one_dim(GroupKind::Z2, "-", el, {1, 0, 0, -1, 0, 0}));
  return out;
}

}  // namespace

const std::vector<Irrep>& irreps(GroupKind k) {
  static const std::vector<Irrep> s3 = build_s3();
  static const std::vector<Irrep> z3 = build_z3();
  static const std::vector<Irrep> z2 = build_z2();
  switch (k) {
    case GroupKind::S3: return s3;
    case GroupKind::Z3: return z3;
    case GroupKind::Z2: return z2;
  }
  return s3;
}

const Irrep& irrep(GroupKind k, std::string_view label) {
  for (const auto& r : irreps(k))
    if (r.label == label) return r;
  throw std::invalid_argument("unknown irrep label '" + std::string(label) + "'");
}

const Irrep& s3_standard() { return irreps(GroupKind::S3)[2]; }

cplx character(const Irrep& R, Elem g) { return R(g).trace(); }

GroupKind centralizer_kind(ClassLabel c) {
  switch (c) {
    case ClassLabel::C1: return GroupKind::S3;
    case ClassLabel::C2: return GroupKind::Z2;
    case ClassLabel::C3: return GroupKind::Z3;
  }
  return GroupKind::S3;
}

const std::array<AnyonType, 8>& anyon_types() {
  static const std::array<AnyonType, 8> t{
      AnyonType{'A', ClassLabel::C1, &irreps(GroupKind::S3)[0], 1},
      AnyonType{'B', ClassLabel::C1, &irreps(GroupKind::S3)[1], 1},
      AnyonType{'C', ClassLabel::C1, &irreps(GroupKind::S3)[2], 2},
      AnyonType{'D', ClassLabel::C2, &irreps(GroupKind::Z2)[0], 3},
      AnyonType{'E', ClassLabel::C2, &irreps(GroupKind::Z2)[1], 3},
      AnyonType{'F', ClassLabel::C3, &irreps(GroupKind::Z3)[0], 2},
      AnyonType{'G', ClassLabel::C3, &irreps(GroupKind::Z3)[1], 2},
      AnyonType{'H', ClassLabel::C3, &irreps(GroupKind::Z3)[2], 2},
  };
  return t;
}

const AnyonType& anyon(char letter) {
  for (const auto& a : anyon_types())
    if (a.letter == letter) return a;
  throw std::invalid_argument(std::string("unknown anyon type ") + letter);
}

}  // namespace s3qd
