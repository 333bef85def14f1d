#include "cuspforge/geometry.hpp"

#include <cmath>

namespace cuspforge {

namespace {

bool finite(cx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace

double sphere_distance(const SpherePoint& p, const SpherePoint& q) {
    if (p.infinite && q.infinite) return 0.0;
    if (p.infinite) return 2.0 / std::sqrt(1.0 + std::norm(q.value));
    if (q.infinite) return 2.0 / std::sqrt(1.0 + std::norm(p.value));
    return 2.0 * std::abs(p.value - q.value) /
           std::sqrt((1.0 + std::norm(p.value)) * (1.0 + std::norm(q.value)));
}

ExtendedIsometry make_isometry(cx a, cx b, cx c, cx d, bool conjugates) {
    if (!finite(a) || !finite(b) || !finite(c) || !finite(d))
        throw DegenerateShapeError("isometry coefficients must be finite");
    cx det = a * d - b * c;
    if (std::abs(det) < 1e-300)
        throw DegenerateShapeError("isometry matrix is singular");
    cx s = std::sqrt(det);
    a /= s;
    b /= s;
    c /= s;
    d /= s;

    // pin the sign: the first coefficient of meaningful size gets arg in [0, pi)
    const cx* entries[4] = {&a, &b, &c, &d};
    for (const cx* e : entries) {
        if (std::abs(*e) > 1e-9) {
            double arg = std::arg(*e);
            if (!(arg >= 0.0 && arg < kPi)) {
                a = -a;
                b = -b;
                c = -c;
                d = -d;
            }
            break;
        }
    }

    ExtendedIsometry g;
    g.a = a;
    g.b = b;
    g.c = c;
    g.d = d;
    g.conjugates = conjugates;
    return g;
}

ExtendedIsometry identity_isometry() {
    return ExtendedIsometry{};
}

ExtendedIsometry conjugation_isometry() {
    ExtendedIsometry g;
    g.conjugates = true;
    return g;
}

ExtendedIsometry compose(const ExtendedIsometry& g, const ExtendedIsometry& h) {
    // when g conjugates first, its matrix acts on the conjugated coefficients of h:
    //   g(h(z)) = (A * conj(B)) applied with the combined flag
    cx ha = h.a, hb = h.b, hc = h.c, hd = h.d;
    if (g.conjugates) {
        ha = std::conj(ha);
        hb = std::conj(hb);
        hc = std::conj(hc);
        hd = std::conj(hd);
    }
    return make_isometry(g.a * ha + g.b * hc, g.a * hb + g.b * hd,
                         g.c * ha + g.d * hc, g.c * hb + g.d * hd,
                         g.conjugates != h.conjugates);
}

ExtendedIsometry inverse(const ExtendedIsometry& g) {
    cx a = g.d, b = -g.b, c = -g.c, d = g.a;
    if (g.conjugates) {
        a = std::conj(a);
        b = std::conj(b);
        c = std::conj(c);
        d = std::conj(d);
    }
    return make_isometry(a, b, c, d, g.conjugates);
}

SpherePoint apply(const ExtendedIsometry& g, const SpherePoint& p) {
    SpherePoint q = p;
    if (g.conjugates && !q.infinite) q.value = std::conj(q.value);
    if (q.infinite) {
        if (std::abs(g.c) == 0.0) return SpherePoint::infinity();
        return SpherePoint(g.a / g.c);
    }
    cx den = g.c * q.value + g.d;
    if (std::abs(den) == 0.0) return SpherePoint::infinity();
    return SpherePoint((g.a * q.value + g.b) / den);
}

cx trace_invariant(const ExtendedIsometry& g) {
    if (g.conjugates)
        throw OrientationTypeError(
            "trace invariant is defined for orientation-preserving isometries only");
    cx t = g.a + g.d;
    return t * t - 4.0;
}

double isometry_distance(const ExtendedIsometry& g, const ExtendedIsometry& h) {
    if (g.conjugates != h.conjugates) return 2.0;
    double dm = 0.0, dp = 0.0;
    const cx gs[4] = {g.a, g.b, g.c, g.d};
    const cx hs[4] = {h.a, h.b, h.c, h.d};
    for (int i = 0; i < 4; ++i) {
        dm = std::max(dm, std::abs(gs[i] - hs[i]));
        dp = std::max(dp, std::abs(gs[i] + hs[i]));
    }
    return std::min(dm, dp);
}

std::array<cx, 3> shape_triple(cx z) {
    if (!finite(z) || z == cx(0.0) || z == cx(1.0))
        throw DegenerateShapeError("shape parameter must avoid 0, 1 and infinity");
    return {z, 1.0 / (1.0 - z), (z - 1.0) / z};
}

cx cross_ratio(const SpherePoint& p0, const SpherePoint& p1,
               const SpherePoint& p2, const SpherePoint& p3) {
    int ninf = (p0.infinite ? 1 : 0) + (p1.infinite ? 1 : 0) +
               (p2.infinite ? 1 : 0) + (p3.infinite ? 1 : 0);
    if (ninf > 1) throw DegenerateShapeError("cross-ratio needs distinct points");
    cx num, den;
    if (ninf == 0) {
        num = (p3.value - p0.value) * (p1.value - p2.value);
        den = (p3.value - p2.value) * (p1.value - p0.value);
    } else if (p0.infinite) {
        num = p1.value - p2.value;
        den = p3.value - p2.value;
    } else if (p1.infinite) {
        num = p3.value - p0.value;
        den = p3.value - p2.value;
    } else if (p2.infinite) {
        num = p3.value - p0.value;
        den = p1.value - p0.value;
    } else {
        num = p1.value - p2.value;
        den = p1.value - p0.value;
    }
    if (std::abs(den) == 0.0)
        throw DegenerateShapeError("cross-ratio of coincident points");
    return num / den;
}

}  // namespace cuspforge
