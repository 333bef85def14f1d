#pragma once

#include <map>
#include <vector>

#include "cuspforge/holonomy.hpp"

namespace cuspforge {

struct DivergenceError : Error {
    using Error::Error;
};

struct SingularJacobianError : Error {
    using Error::Error;
};

// a shape left the upper half plane, or would have
struct DegenerationError : Error {
    using Error::Error;
};

// a continuation step failed; insert intermediate targets
struct StepTooLargeError : Error {
    using Error::Error;
};

// one shape per tetrahedron, all in the upper half plane
using ShapeAssignment = std::vector<cx>;

// What to solve for: the complete structure (every cusp unfilled), or a
// filling per cusp keyed by cusp name.  A cusp missing from the map, or
// mapped to the disengaged marker, stays unfilled.  Klein bottle cusps only
// admit fillings with first coefficient zero.
struct SolveTarget {
    bool complete = true;
    std::map<std::string, DehnPair> fillings;

    static SolveTarget complete_structure() { return {}; }
    static SolveTarget dehn_filling(std::map<std::string, DehnPair> f) {
        SolveTarget t;
        t.complete = false;
        t.fillings = std::move(f);
        return t;
    }
};

struct SolveOptions {
    double tolerance = 1e-11;
    int max_iterations = 50;
    int max_backtracks = 20;
};

struct SolveResult {
    ShapeAssignment shapes;
    std::vector<PeripheralState> peripherals;  // one per cusp, in cusp order
    double residual_norm = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;  // accepted iterates, initial first
};

// the regular shape for every tetrahedron; the stock initial guess
ShapeAssignment regular_seed(const Triangulation& tri);

// The residual of the compatibility system, interleaved real and imaginary
// parts: per edge cycle the log form of the gluing equation, then one row per
// cusp (unfilled: log hol'(l) = 0; filled: p*u + q*v - 2*pi*i = 0).  Branch
// anchors fix the logs' sheets; pass an empty vector to anchor at the
// principal branch of the given shapes.
std::vector<double> gluing_residual(const Triangulation& tri, const ShapeAssignment& shapes,
                                    const SolveTarget& target,
                                    const std::vector<PeripheralState>& anchors = {});

// rank of the edge-equation block of the real Jacobian at the given shapes
int edge_jacobian_rank(const Triangulation& tri, const ShapeAssignment& shapes);

// Damped Newton iteration on the real system, least-squares steps, halving
// line search.  Log branches are anchored at the principal branch of the
// initial point unless explicit anchors are supplied.
SolveResult newton_solve(const Triangulation& tri, const ShapeAssignment& initial,
                         const SolveTarget& target, const SolveOptions& options = {});
SolveResult newton_solve(const Triangulation& tri, const ShapeAssignment& initial,
                         const SolveTarget& target, const std::vector<PeripheralState>& anchors,
                         const SolveOptions& options = {});

// Continuation: solve the targets in order, each solution (shapes and branch
// data) seeding the next.  Starts from the regular seed with the complete
// structure anchor, so the first target must be reachable from there.
std::vector<SolveResult> solve_path(const Triangulation& tri,
                                    const std::vector<SolveTarget>& targets,
                                    const SolveOptions& options = {});

}  // namespace cuspforge
