#pragma once

#include "cuspforge/geometry.hpp"

namespace cuspforge {

// trace invariants with signs that match no case of the classification
struct InconsistentPatternError : Error {
    using Error::Error;
};

// a degenerate representation has no assigned completion geometry
struct DegenerateTypeError : Error {
    using Error::Error;
};

// images of the generators a, b subject to a b a^-1 = b^-1; a reverses
// orientation, b preserves it
struct KleinRepresentation {
    ExtendedIsometry A;
    ExtendedIsometry B;
};

enum class KleinTypeTag { Parabolic, TypeI, TypeII };

// Conjugation normal form of a representation.  The populated parameters
// depend on the tag:
//   Parabolic: A(z) = conj(z) + 1 (or conj(z) when degenerate), B(z) = z + tau*i
//   TypeI:     A(z) = e^l * conj(z),   B(z) = e^(i*alpha) * z,  l >= 0, alpha in (0, pi]
//   TypeII:    A(z) = e^(i*alpha) / conj(z), B(z) = e^l * z,    alpha in [0, pi], l > 0
// Degenerate means l = 0 (type I), alpha = 0 (type II), or A^2 = Id
// (parabolic).  For a degenerate parabolic the scale of tau is not a
// conjugation invariant; the reported value belongs to the representative
// received.  Type II angles come in non-conjugate pairs alpha and pi - alpha
// restricting to the same index-two subgroup; the angle of the representation
// actually received is reported.
struct KleinType {
    KleinTypeTag tag = KleinTypeTag::Parabolic;
    bool degenerate = false;
    double tau = 0.0;
    double l = 0.0;
    double alpha = 0.0;
};

enum class GeometryKind { Cusp, SolidKleinBottle, DiscOrbiBundle };

// local model of the metric completion of an end; cone_angle stays 0 for a
// cusp, and reaches the boundary value 2*pi only for type II angle pi
struct CompletionGeometry {
    GeometryKind kind = GeometryKind::Cusp;
    double cone_angle = 0.0;
    double length = 0.0;  // soul length (solid Klein bottle) or interval length
};

// normal-form constructors, mostly for tests and round trips
KleinRepresentation parabolic_form(double tau, bool degenerate = false);
KleinRepresentation type1_form(double l, double alpha);
KleinRepresentation type2_form(double alpha, double l);

// distance of A*B*A^-1*B from the identity (zero iff the group relation holds)
double verify_relation(const KleinRepresentation& rep);

// sign-pattern classification from the two trace invariants alone, with a
// tolerance band treated as zero
KleinTypeTag classify_from_traces(double i_a2, double i_b, double band = 1e-8);

// Full classification with parameter extraction.  Requires the orientation
// behaviour stated for KleinRepresentation, the group relation within 1e-6,
// and B distinct from the identity.
KleinType classify(const KleinRepresentation& rep, double band = 1e-8);

// the completion geometry assigned to a non-degenerate or parabolic type
CompletionGeometry completion_geometry(const KleinType& type);

}  // namespace cuspforge
