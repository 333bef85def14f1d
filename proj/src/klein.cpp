#include "cuspforge/klein.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cuspforge {

namespace {

ExtendedIsometry conjugate_by(const ExtendedIsometry& frame, const ExtendedIsometry& g) {
    return compose(compose(frame, g), inverse(frame));
}

double real_invariant(const ExtendedIsometry& g) {
    cx value = trace_invariant(g);
    if (std::abs(value.imag()) > 1e-7)
        throw OrientationTypeError(
            "trace invariant is not real; the representation does not preserve "
            "orientation type");
    return value.real();
}

// a Mobius map taking the two fixed points of b to 0 and infinity
ExtendedIsometry axis_frame(const ExtendedIsometry& b) {
    if (std::abs(b.c) < 1e-12) {
        if (std::abs(b.b) < 1e-12) return identity_isometry();
        cx fp = b.b / (b.d - b.a);
        return make_isometry(1, -fp, 0, 1);
    }
    cx disc = std::sqrt((b.a - b.d) * (b.a - b.d) + 4.0 * b.b * b.c);
    cx fp1 = (b.a - b.d + disc) / (2.0 * b.c);
    cx fp2 = (b.a - b.d - disc) / (2.0 * b.c);
    return make_isometry(1, -fp1, 1, -fp2);
}

// The angle of A read off in the frame where B acts as z -> e^l * z.  There A
// must swap 0 and infinity, i.e. act as z -> mu / conj(z); the two lifts of
// the restricted torus representation differ by the sign of mu, so arg(mu)
// identifies the lift that was actually passed in.
double type2_angle(const KleinRepresentation& rep) {
    ExtendedIsometry frame = axis_frame(rep.B);
    ExtendedIsometry a_tilde = conjugate_by(frame, rep.A);
    double anti_diagonal = std::max(std::abs(a_tilde.b), std::abs(a_tilde.c));
    double diagonal = std::max(std::abs(a_tilde.a), std::abs(a_tilde.d));
    if (diagonal > 1e-6 * std::max(anti_diagonal, 1.0))
        throw InconsistentPatternError("A does not swap the endpoints of the axis of B");
    return std::abs(std::arg(a_tilde.b / a_tilde.c));
}

// Translation parameter of a parabolic representation, extracted in the frame
// where B fixes infinity: there B is z -> z + beta and A is z -> u*conj(z)+v
// with |u| = 1.  A rotation normalizes u to 1; the relation then forces beta
// onto the imaginary axis, and scaling by the real translation part of A
// yields tau.  With A^2 = Id that scale is free, so tau is only meaningful
// for the representative received.
double parabolic_tau(const KleinRepresentation& rep, bool degenerate) {
    ExtendedIsometry frame = identity_isometry();
    if (std::abs(rep.B.c) > 1e-12) {
        cx p = (rep.B.a - rep.B.d) / (2.0 * rep.B.c);
        frame = make_isometry(0, 1, -1, p);
    }
    ExtendedIsometry b_tilde = conjugate_by(frame, rep.B);
    ExtendedIsometry a_tilde = conjugate_by(frame, rep.A);
    cx beta = b_tilde.b / b_tilde.d;
    cx u = a_tilde.a / a_tilde.d;
    cx v = a_tilde.b / a_tilde.d;
    cx sigma = std::exp(cx(0.0, -std::arg(u) / 2.0));
    if (degenerate) return std::abs(sigma * beta);
    double rho = (sigma * v).real();
    if (std::abs(rho) < 1e-12)
        throw InconsistentPatternError("parabolic A with vanishing translation part");
    return std::abs((sigma * beta).imag()) / std::abs(rho);
}

}  // namespace

KleinRepresentation parabolic_form(double tau, bool degenerate) {
    if (!(tau > 0.0)) throw ValidationError("tau must be positive");
    KleinRepresentation rep;
    rep.A = degenerate ? make_isometry(1, 0, 0, 1, true) : make_isometry(1, 1, 0, 1, true);
    rep.B = make_isometry(1, cx(0.0, tau), 0, 1);
    return rep;
}

KleinRepresentation type1_form(double l, double alpha) {
    if (l < 0.0) throw ValidationError("l must be nonnegative");
    if (!(alpha > 0.0 && alpha <= kPi)) throw ValidationError("alpha must lie in (0, pi]");
    KleinRepresentation rep;
    rep.A = make_isometry(std::exp(l / 2.0), 0, 0, std::exp(-l / 2.0), true);
    rep.B = make_isometry(std::exp(cx(0.0, alpha / 2.0)), 0, 0, std::exp(cx(0.0, -alpha / 2.0)));
    return rep;
}

KleinRepresentation type2_form(double alpha, double l) {
    if (!(alpha >= 0.0 && alpha <= kPi)) throw ValidationError("alpha must lie in [0, pi]");
    if (!(l > 0.0)) throw ValidationError("l must be positive");
    KleinRepresentation rep;
    rep.A = make_isometry(0, std::exp(cx(0.0, alpha)), 1, 0, true);
    rep.B = make_isometry(std::exp(l / 2.0), 0, 0, std::exp(-l / 2.0));
    return rep;
}

double verify_relation(const KleinRepresentation& rep) {
    ExtendedIsometry lhs = compose(compose(compose(rep.A, rep.B), inverse(rep.A)), rep.B);
    return isometry_distance(lhs, identity_isometry());
}

KleinTypeTag classify_from_traces(double i_a2, double i_b, double band) {
    if (std::abs(i_a2) <= band && std::abs(i_b) <= band) return KleinTypeTag::Parabolic;
    if (i_b < -band && i_a2 >= -band) return KleinTypeTag::TypeI;
    if (i_b > band && i_a2 <= band) return KleinTypeTag::TypeII;
    std::ostringstream msg;
    msg << "trace invariants (" << i_a2 << ", " << i_b
        << ") match no class preserving orientation type";
    throw InconsistentPatternError(msg.str());
}

KleinType classify(const KleinRepresentation& rep, double band) {
    if (!rep.A.conjugates || rep.B.conjugates)
        throw OrientationTypeError(
            "expected A orientation-reversing and B orientation-preserving");
    if (isometry_distance(rep.B, identity_isometry()) < 1e-9)
        throw ValidationError("B must differ from the identity");
    double residual = verify_relation(rep);
    if (residual > 1e-6) {
        std::ostringstream msg;
        msg << "group relation violated, residual " << residual;
        throw ValidationError(msg.str());
    }

    ExtendedIsometry a_squared = compose(rep.A, rep.A);
    double i_a2 = real_invariant(a_squared);
    double i_b = real_invariant(rep.B);

    KleinType out;
    out.tag = classify_from_traces(i_a2, i_b, band);
    switch (out.tag) {
        case KleinTypeTag::Parabolic:
            out.degenerate = isometry_distance(a_squared, identity_isometry()) < 1e-6;
            out.tau = parabolic_tau(rep, out.degenerate);
            break;
        case KleinTypeTag::TypeI:
            out.l = std::asinh(std::sqrt(std::max(i_a2, 0.0)) / 2.0);
            out.alpha = 2.0 * std::asin(std::clamp(std::sqrt(-i_b) / 2.0, 0.0, 1.0));
            out.degenerate = i_a2 <= band;
            break;
        case KleinTypeTag::TypeII:
            out.l = 2.0 * std::asinh(std::sqrt(i_b) / 2.0);
            out.alpha = type2_angle(rep);
            // alpha = pi also flattens the invariant of A^2 but is a genuine
            // rotation; only a vanishing angle is degenerate
            out.degenerate = std::abs(i_a2) <= band && out.alpha < kPi / 2.0;
            break;
    }
    return out;
}

CompletionGeometry completion_geometry(const KleinType& type) {
    CompletionGeometry out;
    switch (type.tag) {
        case KleinTypeTag::Parabolic:
            out.kind = GeometryKind::Cusp;
            break;
        case KleinTypeTag::TypeI:
            if (type.degenerate)
                throw DegenerateTypeError("degenerate type I has no completion model");
            out.kind = GeometryKind::SolidKleinBottle;
            out.cone_angle = type.alpha;
            out.length = type.l;
            break;
        case KleinTypeTag::TypeII:
            if (type.degenerate)
                throw DegenerateTypeError("degenerate type II has no completion model");
            out.kind = GeometryKind::DiscOrbiBundle;
            out.cone_angle = 2.0 * type.alpha;
            out.length = type.l / 2.0;
            break;
    }
    return out;
}

}  // namespace cuspforge
