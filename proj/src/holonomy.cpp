#include "cuspforge/holonomy.hpp"

#include <cmath>
#include <sstream>

namespace cuspforge {

cx evaluate_word(const HolonomyWord& word, const std::vector<cx>& shapes) {
    cx result = 1.0;
    for (const WordFactor& f : word) {
        if (f.tet < 0 || static_cast<size_t>(f.tet) >= shapes.size())
            throw ValidationError("word factor references an unassigned tetrahedron");
        if (f.edge_class < 0 || f.edge_class > 2)
            throw ValidationError("word factor references an invalid edge class");
        cx value = shape_triple(shapes[f.tet])[f.edge_class];
        if (f.conjugated) value = std::conj(value);
        if (f.exponent == 1)
            result *= value;
        else if (f.exponent == -1)
            result /= value;
        else
            result *= std::pow(value, f.exponent);
    }
    return result;
}

cx track_log(const cx& previous_log, const cx& previous_value, const cx& value) {
    if (previous_value == 0.0 || value == 0.0)
        throw DegenerateShapeError("cannot track the log of a vanishing holonomy");
    cx step = std::log(value / previous_value);
    if (std::abs(step.imag()) >= kPi - 1e-6)
        throw BranchJumpError("log branch increment is ambiguous; refine the path");
    cx principal = std::log(value);
    double winding =
        std::round((previous_log.imag() + step.imag() - principal.imag()) / (2.0 * kPi));
    return principal + cx(0.0, 2.0 * kPi * winding);
}

PeripheralState track_logs(const PeripheralState& previous, const cx& L, const cx& M) {
    PeripheralState next;
    next.L = L;
    next.M = M;
    next.u = track_log(previous.u, previous.L, L);
    next.v = track_log(previous.v, previous.M, M);
    next.coefficients = dehn_coefficients(next.u, next.v);
    return next;
}

DehnPair dehn_coefficients(const cx& u, const cx& v) {
    double scale = std::max(std::abs(u), std::abs(v));
    if (scale < 1e-9) return std::nullopt;
    // the real 2x2 system [Re u, Re v; Im u, Im v] (p,q)^T = (0, 2*pi)^T
    double det = u.real() * v.imag() - v.real() * u.imag();
    if (std::abs(det) < 1e-10 * scale * scale) {
        std::ostringstream msg;
        msg << "filling coefficients are not unique: u = " << u << ", v = " << v
            << " are real-proportional";
        throw NonUniqueCoefficientsError(msg.str());
    }
    double p = -2.0 * kPi * v.real() / det;
    double q = 2.0 * kPi * u.real() / det;
    return std::pair{p, q};
}

PeripheralState involution_on_peripheral(const PeripheralState& state) {
    if (state.M == 0.0)
        throw DegenerateShapeError("peripheral holonomy M vanishes");
    PeripheralState out;
    out.L = std::conj(state.L);
    out.M = 1.0 / std::conj(state.M);
    out.u = std::conj(state.u);
    out.v = -std::conj(state.v);
    if (state.coefficients)
        out.coefficients = std::pair{-state.coefficients->first, state.coefficients->second};
    return out;
}

}  // namespace cuspforge
