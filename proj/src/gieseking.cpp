#include "cuspforge/gieseking.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>

#include "cuspforge/holonomy.hpp"

namespace cuspforge {

namespace {

bool finite(const cx& w) { return std::isfinite(w.real()) && std::isfinite(w.imag()); }

void require_usable(const cx& w) {
    if (!finite(w)) throw DegenerateShapeError("tetrahedron invariant w is not finite");
    if (w == cx(0.0, 0.0)) throw DegenerateShapeError("tetrahedron invariant w = 0");
    if (w == cx(-1.0, 0.0)) throw DegenerateShapeError("tetrahedron invariant w = -1");
}

void require_on_circle(const cx& x, double band) {
    if (std::abs(std::abs(x - 1.0) - 1.0) > band) {
        std::ostringstream msg;
        msg << "character x = " << x << " is off the circle |x - 1| = 1";
        throw ValidationError(msg.str());
    }
}

// face identifications of the single tetrahedron: faces 3 <-> 2 under the
// first reversing map, faces 1 <-> 0 under the second
const std::vector<GluingRecord>& gluing_records() {
    static const std::vector<GluingRecord> records = {
        {0, 3, 0, 2, {3, 1, 0, 2}},
        {0, 2, 0, 3, {2, 1, 3, 0}},
        {0, 1, 0, 0, {3, 0, 2, 1}},
        {0, 0, 0, 1, {1, 3, 2, 0}},
    };
    return records;
}

// hol'(l) = 1/|z_0|^2 and the meridian product read off the cusp link; both
// equal 1 exactly at the complete structure
const HolonomyWord kLongitudeWord = {{0, 0, -1, true}, {0, 0, -1, false}};
const HolonomyWord kMeridianWord = {{0, 1, 1, false}, {0, 2, 1, false}, {0, 1, -1, true},
                                    {0, 2, -1, true}, {0, 1, 1, true},  {0, 0, -1, false},
                                    {0, 1, -1, false}, {0, 0, 1, true}};

// right multiplication by conj(R) minus sign * left multiplication by L, as a
// 4x4 matrix acting on vec(A) = (a, b, c, d); its kernel solves
// A conj(R) = sign * L A
Eigen::MatrixXcd intertwiner_block(const Eigen::Matrix2cd& R, const Eigen::Matrix2cd& L,
                                   double sign) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(4, 4);
    Eigen::Matrix2cd Rc = R.conjugate();
    // vec(A * Rc): row-major vec, entry (i, j) of the product is sum_k A(i,k) Rc(k,j)
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) out(2 * i + j, 2 * i + k) += Rc(k, j);
    // minus sign * vec(L * A)
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) out(2 * i + j, 2 * k + j) -= sign * L(i, k);
    return out;
}

}  // namespace

Triangulation gieseking_triangulation() {
    std::vector<CuspData> info(1);
    info[0].name = "cusp0";
    info[0].curves["l"] = kLongitudeWord;
    info[0].curves["m"] = kMeridianWord;
    return Triangulation("gieseking", 1, gluing_records(), std::move(info));
}

std::pair<ExtendedIsometry, ExtendedIsometry> isometries(const cx& w) {
    require_usable(w);
    double norm = std::norm(w);
    ExtendedIsometry U = make_isometry(0.0, 1.0, (1.0 + w) / norm, 1.0, true);
    ExtendedIsometry V = make_isometry(-(1.0 + w), 1.0, 0.0, 1.0, true);
    return {U, V};
}

double edge_relation_residual(const cx& w) {
    auto [U, V] = isometries(w);
    ExtendedIsometry word = compose(inverse(U), inverse(V));
    word = compose(word, U);
    word = compose(word, U);
    word = compose(word, V);
    word = compose(word, V);
    return isometry_distance(word, identity_isometry());
}

GiesekingPoint deformation_curve(double s) {
    if (!(s > 0.0 && s < 2.0 * kPi))
        throw ValidationError("curve parameter must lie strictly between 0 and 2*pi");
    // the point (w + 1/2)^2 - 1/4 runs over the unit circle about 1/4; lift
    // the angle of its position past the cut at s = pi so the root stays on
    // one branch over the whole interval
    cx on_circle = cx(0.25, 0.0) + std::exp(cx(0.0, s));
    double angle = std::arg(on_circle);
    if (s > kPi) angle += 2.0 * kPi;
    cx w = -0.5 + std::sqrt(std::abs(on_circle)) * std::exp(cx(0.0, angle / 2.0));

    if (!(w.imag() > 0.0) || std::abs(std::abs(w * (1.0 + w)) - 1.0) > 1e-9)
        throw BranchJumpError("square root branch left the curve; this is a bug");

    GiesekingPoint point;
    point.w = w;
    point.x = character(w).first;
    point.tau = commutator_trace(w);
    point.s = s;
    return point;
}

FiberGenerators fiber_generators(const cx& w) {
    auto [U, V] = isometries(w);
    FiberGenerators out;
    out.r = compose(U, V);
    out.s = compose(V, U);
    out.t = inverse(U);
    return out;
}

ExtendedIsometry rho_r_matrix(const cx& w) {
    require_usable(w);
    double norm = std::norm(w);
    // determinant is 1 as written, so the matrix is kept verbatim instead of
    // passing through the normalizing constructor (which could flip the sign
    // and with it the trace)
    ExtendedIsometry out;
    out.a = 0.0;
    out.b = norm;
    out.c = -1.0 / norm;
    out.d = 1.0 + w + norm;
    out.conjugates = false;
    return out;
}

std::pair<cx, double> character(const cx& w) {
    require_usable(w);
    cx x = 1.0 + w + std::norm(w);
    return {x, std::abs(x - 1.0) - 1.0};
}

double commutator_trace(const cx& w) {
    require_usable(w);
    return 2.0 * (w + w * w).real();
}

double commutator_trace_from_character(const cx& x, double band) {
    require_on_circle(x, band);
    double S = 2.0 * x.real();
    return S * (S - 3.0) - 2.0;
}

KleinTypeTag classify_character(const cx& x, double band) {
    require_on_circle(x, band);
    if (std::abs(x - 2.0) <= band)
        throw DegenerateShapeError("x = 2 is the reducible character; no type is assigned");
    if (x.real() > 1.5 + band) return KleinTypeTag::TypeI;
    if (x.real() >= 1.5 - band) return KleinTypeTag::Parabolic;
    return KleinTypeTag::TypeII;
}

KleinRepresentation curve_representation(const cx& w) {
    FiberGenerators gen = fiber_generators(w);
    ExtendedIsometry b =
        compose(compose(gen.r, gen.s), compose(inverse(gen.r), inverse(gen.s)));
    return {gen.t, b};
}

KleinRepresentation peripheral_representation(const cx& x, double band) {
    require_on_circle(x, band);
    if (std::abs(x - 2.0) <= band)
        throw DegenerateShapeError("x = 2 is the reducible character; no representation here");

    // trace-coordinate representatives: trace R = x, trace S = conj x, and
    // zeta + 1/zeta = x makes trace(RS) = x
    cx zeta = (x + std::sqrt(x * x - 4.0)) / 2.0;
    Eigen::Matrix2cd R, S;
    R << x, -1.0, 1.0, 0.0;
    S << 0.0, zeta, -1.0 / zeta, std::conj(x);
    Eigen::Matrix2cd RS = R * S;

    // The reversing element T acts by z -> Mobius(T)(conj z) and carries the
    // algebraic monodromy r -> s, s -> rs.  On matrices that reads
    // T conj(R) T^-1 = +-S and T conj(S) T^-1 = +-(RS); try the four sign
    // choices and keep the one whose linear system has a kernel.
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd best_vec = Eigen::VectorXcd::Zero(4);
    for (double sign_r : {1.0, -1.0}) {
        for (double sign_s : {1.0, -1.0}) {
            Eigen::MatrixXcd system(8, 4);
            system.topRows(4) = intertwiner_block(R, S, sign_r);
            system.bottomRows(4) = intertwiner_block(S, RS, sign_s);
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(system, Eigen::ComputeFullV);
            double smallest = svd.singularValues()(3);
            if (smallest < best) {
                best = smallest;
                best_vec = svd.matrixV().col(3);
            }
        }
    }
    if (best > 1e-6)
        throw InconsistentPatternError(
            "no orientation-reversing element intertwines the monodromy at this character");

    ExtendedIsometry A =
        make_isometry(best_vec(0), best_vec(1), best_vec(2), best_vec(3), true);
    ExtendedIsometry r = make_isometry(R(0, 0), R(0, 1), R(1, 0), R(1, 1));
    ExtendedIsometry s = make_isometry(S(0, 0), S(0, 1), S(1, 0), S(1, 1));
    ExtendedIsometry B = compose(compose(r, s), compose(inverse(r), inverse(s)));
    return {A, B};
}

std::vector<CuspInvariant> coordinate_report(const std::vector<cx>& shapes,
                                             const Triangulation& tri) {
    if (tri.size() != 1) throw UnavailableReportError("no matrix backend for this triangulation");
    for (const GluingRecord& want : gluing_records()) {
        const FaceGluing& have = tri.gluing(want.tet, want.face);
        if (have.to_tet != want.to_tet || have.to_face != want.to_face ||
            have.vertex_map != want.vertex_map)
            throw UnavailableReportError("no matrix backend for this triangulation");
    }
    if (shapes.size() != 1)
        throw ValidationError("expected exactly one shape for the one-tetrahedron space");
    if (shapes[0] == cx(0.0, 0.0)) throw DegenerateShapeError("shape is zero");

    // the vertex at -w sits where the shape puts z = -1/w
    cx w = -1.0 / shapes[0];

    CuspInvariant inv;
    inv.cusp = tri.cusps().at(0).name;
    inv.klein = true;
    inv.value = trace_invariant(curve_representation(w).B);
    return {inv};
}

}  // namespace cuspforge
