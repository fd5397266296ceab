#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace s3qd {

using cplx = std::complex<double>;

// Element ids in the fixed order {e, mu, mubar, sigma, mu sigma, mubar sigma}.
using Elem = std::uint8_t;

constexpr Elem E = 0;
constexpr Elem MU = 1;
constexpr Elem MUB = 2;
constexpr Elem SIG = 3;
constexpr Elem MUSIG = 4;
constexpr Elem MUBSIG = 5;
constexpr int ORDER = 6;

// Group product g*h; permutations compose right to left.
Elem mul(Elem g, Elem h);
Elem inv(Elem g);
// g h g^-1
Elem conj(Elem g, Elem h);
Elem commutator(Elem g, Elem h);

// Serialized names "e","u","U","s","us","Us".
std::string_view name(Elem g);
// Throws std::invalid_argument on unknown names.
Elem parse_elem(std::string_view s);
// Images of {1,2,3} as a permutation.
std::array<int, 3> permutation(Elem g);

enum class ClassLabel { C1 = 0, C2 = 1, C3 = 2 };

struct ConjugacyClass {
  ClassLabel label;
  std::vector<Elem> members;
  Elem representative;  // smallest id
};

const std::array<ConjugacyClass, 3>& classes();
ClassLabel class_of(Elem g);
const ConjugacyClass& conjugacy_class(ClassLabel c);
std::string_view class_name(ClassLabel c);

std::vector<Elem> centralizer(Elem g);
std::vector<Elem> derived_subgroup();

// Smallest q with c = q r q^-1; throws if c and r are not conjugate.
Elem q_rep(Elem c, Elem r);

enum class GroupKind { S3, Z3, Z2 };

struct Irrep {
  GroupKind group;
  std::string label;
  int dim = 1;
  // Indexed by S3 element id; only entries for members of the group are meaningful.
  std::array<Eigen::MatrixXcd, ORDER> mats;
  std::vector<Elem> elements;

  bool contains(Elem g) const;
  const Eigen::MatrixXcd& operator()(Elem g) const;
};

const cplx& omega();

// S3: [+], [-], [2]; Z3 (centralizer of mu): [1], [w], [w*]; Z2 (centralizer of sigma): [+], [-].
const std::vector<Irrep>& irreps(GroupKind k);
const Irrep& irrep(GroupKind k, std::string_view label);
const Irrep& s3_standard();

// Trace of Gamma^R(g); throws if g is outside R's group.
cplx character(const Irrep& R, Elem g);

// Centralizer group of the class representative.
GroupKind centralizer_kind(ClassLabel c);

struct AnyonType {
  char letter;
  ClassLabel flux;
  const Irrep* charge;
  int qdim;
};

const std::array<AnyonType, 8>& anyon_types();
const AnyonType& anyon(char letter);

}  // namespace s3qd
