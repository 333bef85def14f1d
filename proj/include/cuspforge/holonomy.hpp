#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cuspforge/triangulation.hpp"

namespace cuspforge {

// a log branch could not be continued unambiguously; refine the path
struct BranchJumpError : Error {
    using Error::Error;
};

// filling coefficients are not determined by (u, v)
struct NonUniqueCoefficientsError : Error {
    using Error::Error;
};

// no representation backend for this triangulation
struct UnavailableReportError : Error {
    using Error::Error;
};

// finite filling coefficients (p, q); disengaged marks the unfilled cusp
using DehnPair = std::optional<std::pair<double, double>>;

// Peripheral data of one cusp at one point of a continuation path.  L and M
// are the holonomy derivatives of the two distinguished curves, u and v their
// branch-tracked logarithms.  The default state is the anchor at the complete
// structure: L = M = 1, u = v = 0, unfilled.
struct PeripheralState {
    cx L = 1.0;
    cx M = 1.0;
    cx u = 0.0;
    cx v = 0.0;
    DehnPair coefficients = std::nullopt;
};

// product over the word's factors of the referenced edge invariant, conjugated
// first when flagged, raised to the factor's exponent
cx evaluate_word(const HolonomyWord& word, const std::vector<cx>& shapes);

// Continue a branch of log along a path: given the branch chosen at the
// previous value, pick log(value) on the branch reached by a small step.
// exp of the result equals value to machine precision.
cx track_log(const cx& previous_log, const cx& previous_value, const cx& value);

// advance a cusp state to new holonomy values L, M, continuing both log
// branches and recomputing the filling coefficients
PeripheralState track_logs(const PeripheralState& previous, const cx& L, const cx& M);

// The real pair (p, q) with p*u + q*v = 2*pi*i, when it is unique; the
// unfilled marker when u = v = 0.  Real-proportional nonzero (u, v) admit no
// unique solution and raise NonUniqueCoefficientsError.
DehnPair dehn_coefficients(const cx& u, const cx& v);

// Action of the orientation deck transformation on the peripheral data of a
// cusp lifted from a Klein bottle cusp: (L, M) -> (conj(L), 1/conj(M)),
// (u, v) -> (conj(u), -conj(v)), (p, q) -> (-p, q).
PeripheralState involution_on_peripheral(const PeripheralState& state);

// trace-based cusp coordinate: real for Klein bottle cusps, complex for torus
// cusps, zero exactly at the complete structure
struct CuspInvariant {
    std::string cusp;
    bool klein = false;
    cx value = 0.0;
};

// Per-cusp coordinate values computed from holonomy matrices of distinguished
// peripheral elements.  Matrices are only available for the built-in
// one-tetrahedron triangulation; anything else raises UnavailableReportError.
std::vector<CuspInvariant> coordinate_report(const std::vector<cx>& shapes,
                                             const Triangulation& tri);

}  // namespace cuspforge
