#pragma once

#include <utility>

#include "cuspforge/geometry.hpp"
#include "cuspforge/klein.hpp"
#include "cuspforge/triangulation.hpp"

namespace cuspforge {

// One point of the one-tetrahedron deformation curve in all its coordinates:
// the tetrahedron invariant w of the vertex placed at -w (the shape itself is
// z = -1/w), the trace coordinate x = 1 + w + |w|^2, the commutator trace
// tau = 2 Re(w + w^2), and the curve parameter s it came from.
struct GiesekingPoint {
    cx w{0.0, 0.0};
    cx x{0.0, 0.0};
    double tau = 0.0;
    double s = 0.0;
};

// the generators of the fundamental group as isometries, plus a matrix
// representative for r that all trace formulas refer to
struct FiberGenerators {
    ExtendedIsometry r;  // U o V, orientation preserving
    ExtendedIsometry s;  // V o U, orientation preserving
    ExtendedIsometry t;  // U^-1,  orientation reversing
};

// The one-tetrahedron non-orientable cusped triangulation, with its Klein
// bottle cusp and the distinguished peripheral words "l" and "m" preloaded.
// Its orientation double cover is the two-tetrahedron figure-eight knot
// triangulation.
Triangulation gieseking_triangulation();

// The two orientation-reversing face identifications as isometries of H^3 for
// the structure with tetrahedron invariant w:
//
//     U(z) = 1 / ((1+w)/|w|^2 * conj(z) + 1),    V(z) = -(1+w) conj(z) + 1.
//
// Requires w nonzero and finite; Im w > 0 for a geometric structure.
std::pair<ExtendedIsometry, ExtendedIsometry> isometries(const cx& w);

// distance of U^-1 V^-1 U^2 V^2 from +-identity; zero exactly when the edge
// cycle closes up, i.e. when |w(1+w)| = 1
double edge_relation_residual(const cx& w);

// The deformation curve |w(1+w)| = 1, Im w > 0, parameterized over the open
// interval (0, 2pi) by the angle of (w + 1/2)^2 - 1/4 on the circle of radius
// 1 about 1/4, with a continuous square root branch. s = pi is the complete
// structure w = (-1+i sqrt 3)/2; the ends limit to the real points
// (-1 +- sqrt 5)/2.
GiesekingPoint deformation_curve(double s);

// r = U o V, s = V o U, t = U^-1
FiberGenerators fiber_generators(const cx& w);

// the matrix [[0, |w|^2], [-1/|w|^2, 1 + w + |w|^2]] representing r
// (determinant 1, trace x); trace identities are evaluated on exactly this
// representative
ExtendedIsometry rho_r_matrix(const cx& w);

// x = 1 + w + |w|^2 together with the circle membership residual |x-1| - 1,
// which vanishes exactly on the deformation curve
std::pair<cx, double> character(const cx& w);

// trace of the commutator [r, s] computed from the curve coordinate
double commutator_trace(const cx& w);

// the same trace computed from the character: S(S-3) - 2 with S = x + conj x;
// requires |x - 1| = 1 within the band
double commutator_trace_from_character(const cx& x, double band = 1e-8);

// Position of a character-circle point: Re x > 3/2 is type I (realized by the
// triangulation), Re x = 3/2 the complete parabolic point, Re x < 3/2 type II
// (not realized).  Rejects off-circle points and the reducible point x = 2.
KleinTypeTag classify_character(const cx& x, double band = 1e-8);

// the holonomy pair (rho(t), rho([r, s])) of the peripheral Klein bottle
// group at a curve point, ready for the classifier
KleinRepresentation curve_representation(const cx& w);

// A representation with character x reconstructed in trace coordinates:
// matrices for r and s with traces (x, conj x) and product trace x, and the
// orientation-reversing t conjugating them by the algebraic monodromy.  The
// returned pair (A, B) = (rho(t), rho([r,s])) generates the peripheral Klein
// bottle group and is ready for the classifier.  Rejects x = 2 and off-circle
// points.
KleinRepresentation peripheral_representation(const cx& x, double band = 1e-8);

}  // namespace cuspforge
