#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace cuspforge {

using cx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// shape parameter hit an excluded value (0, 1, infinity) or a matrix was singular
struct DegenerateShapeError : Error {
    using Error::Error;
};

// an operation that only makes sense for one orientation type got the other
struct OrientationTypeError : Error {
    using Error::Error;
};

// input data violates a documented precondition
struct ValidationError : Error {
    using Error::Error;
};

// Point of the Riemann sphere.  Infinity is a tag rather than a large float,
// so ideal vertices survive Moebius maps exactly.
struct SpherePoint {
    cx value{0.0, 0.0};
    bool infinite = false;

    SpherePoint() = default;
    SpherePoint(cx v) : value(v) {}
    SpherePoint(double v) : value(v) {}

    static SpherePoint infinity() {
        SpherePoint p;
        p.infinite = true;
        return p;
    }
};

// chordal metric on the sphere; 0 iff equal, diameter 2
double sphere_distance(const SpherePoint& p, const SpherePoint& q);

// Element of Isom(H^3) seen on the sphere at infinity:
//
//     z  |->  (a z' + b) / (c z' + d),    z' = conj(z) if `conjugates` else z.
//
// Coefficients are kept with ad - bc = 1.  The remaining sign freedom is pinned
// by requiring the first coefficient of (a, b, c, d) that is not negligibly
// small to have argument in [0, pi).  Two isometries are equal exactly when
// their flags agree and their pinned coefficient quadruples agree up to a
// global sign, which isometry_distance measures.
struct ExtendedIsometry {
    cx a{1.0}, b{0.0}, c{0.0}, d{1.0};
    bool conjugates = false;
};

// normalizes det to 1 and pins the sign; throws DegenerateShapeError if singular
ExtendedIsometry make_isometry(cx a, cx b, cx c, cx d, bool conjugates = false);

ExtendedIsometry identity_isometry();

// plain complex conjugation z |-> conj(z)
ExtendedIsometry conjugation_isometry();

// group law; conjugation flags combine by XOR
ExtendedIsometry compose(const ExtendedIsometry& g, const ExtendedIsometry& h);

ExtendedIsometry inverse(const ExtendedIsometry& g);

SpherePoint apply(const ExtendedIsometry& g, const SpherePoint& p);

// I(g) = trace(g)^2 - 4 on the normalized representative; well defined because
// the sign ambiguity cancels in the square.  Rejects orientation-reversing
// input, whose matrix trace has no invariant meaning here.
cx trace_invariant(const ExtendedIsometry& g);

// min over the global sign of the largest coefficient difference; isometries on
// different orientation components are reported at distance 2
double isometry_distance(const ExtendedIsometry& g, const ExtendedIsometry& h);

// (z, 1/(1-z), (z-1)/z); the three edge invariants of an ideal tetrahedron.
// Their product is -1 and for Im z > 0 all three lie in the upper half plane.
std::array<cx, 3> shape_triple(cx z);

// ((p3-p0)(p1-p2)) / ((p3-p2)(p1-p0)), with the usual cancellation when one
// point is infinite; cross_ratio(0, 1, inf, z) = z
cx cross_ratio(const SpherePoint& p0, const SpherePoint& p1,
               const SpherePoint& p2, const SpherePoint& p3);

}  // namespace cuspforge
