#pragma once

#include <vector>

#include "toric/exactnum.hpp"

namespace toric {

// Points of M = Z^n and of M_Q. The dual lattice N is identified with Z^n
// through the standard pairing.
using LatticePoint = std::vector<Integer>;
using QPoint = std::vector<Rational>;
// Row-major integer matrix.
using IntMatrix = std::vector<std::vector<Integer>>;

LatticePoint lattice_point(std::initializer_list<long> xs);
QPoint q_point(std::initializer_list<long> xs);
QPoint to_q(const LatticePoint& x);

Rational dot(const QPoint& a, const QPoint& b);
Rational dot(const LatticePoint& a, const QPoint& b);
QPoint operator+(const QPoint& a, const QPoint& b);
QPoint operator-(const QPoint& a, const QPoint& b);
QPoint operator*(const Rational& s, const QPoint& a);

Integer content(const LatticePoint& v);
bool is_primitive(const LatticePoint& v);
// Smallest positive integer multiple of a nonzero rational vector.
LatticePoint primitive_direction(const QPoint& v);

// Hermite normal form of the row span: pivots positive and strictly
// increasing, entries above each pivot reduced into [0, pivot). Zero rows
// are dropped.
IntMatrix hermite_normal_form(IntMatrix rows);

// Basis of {w in Z^n : <v, w> = 0} as the rows of an HNF matrix.
IntMatrix integer_kernel(const LatticePoint& v);

// Surjection Z^n -> Z^(n-1) with kernel Z*m, plus a section s (n x (n-1))
// with matrix * s = identity.
struct LatticeProjection {
  int source_rank = 0;
  int target_rank = 0;
  IntMatrix matrix;
  IntMatrix section;

  LatticePoint apply(const LatticePoint& x) const;
  QPoint apply(const QPoint& x) const;
  QPoint lift(const QPoint& y) const;
};

LatticeProjection quotient_by_primitive(const LatticePoint& m);

// M(u) = u^perp in M for nonzero u in N, with a Z-basis and coordinates.
struct PerpLattice {
  LatticePoint normal;  // primitive
  IntMatrix basis;      // n x (n-1); columns form a basis of M(u)

  // Coordinates in the basis of a point of u^perp (rational).
  QPoint to_coords(const QPoint& y) const;
  QPoint from_coords(const QPoint& c) const;

  IntMatrix inverse;    // inverse of [basis | complement], n x n, integral
};

PerpLattice perp_sublattice(const LatticePoint& u);

// Exact inverse of a square rational matrix; throws if singular.
std::vector<QPoint> invert(std::vector<QPoint> a);

}  // namespace toric
