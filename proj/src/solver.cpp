#include "cuspforge/solver.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace cuspforge {

namespace {

constexpr double kDomainFloor = 1e-12;  // minimum Im(z) accepted as geometric

void require_geometric(const ShapeAssignment& shapes) {
    for (const cx& z : shapes)
        if (!(z.imag() > kDomainFloor))
            throw DegenerationError("shape left the upper half plane");
}

// derivative of the log of the class invariant with respect to z
cx dlog_invariant(const cx& z, int edge_class) {
    switch (edge_class) {
        case 0: return 1.0 / z;
        case 1: return 1.0 / (1.0 - z);
        default: return 1.0 / (z * (z - 1.0));
    }
}

// the filling requested for one cusp, disengaged when it stays unfilled
DehnPair filling_for(const CuspLink& cusp, const SolveTarget& target) {
    if (target.complete) return std::nullopt;
    auto it = target.fillings.find(cusp.name);
    return it == target.fillings.end() ? std::nullopt : it->second;
}

void validate_target(const Triangulation& tri, const SolveTarget& target) {
    for (const auto& [name, pq] : target.fillings) {
        const CuspLink* found = nullptr;
        for (const CuspLink& cusp : tri.cusps())
            if (cusp.name == name) found = &cusp;
        if (!found) throw ValidationError("filling names unknown cusp '" + name + "'");
        if (pq && !found->orientable && pq->first != 0.0)
            throw ValidationError("Klein bottle cusp '" + name +
                                  "' only admits fillings with first coefficient 0");
    }
    for (const CuspLink& cusp : tri.cusps())
        if (!cusp.curves.count("l") || !cusp.curves.count("m"))
            throw ValidationError("cusp '" + cusp.name +
                                  "' lacks the distinguished curves 'l' and 'm'");
}

// peripheral data at the given shapes, log branches continued from anchors
std::vector<PeripheralState> advance_states(const Triangulation& tri,
                                            const ShapeAssignment& shapes,
                                            const std::vector<PeripheralState>& anchors) {
    std::vector<PeripheralState> states;
    for (size_t k = 0; k < tri.cusps().size(); ++k) {
        const CuspLink& cusp = tri.cusps()[k];
        PeripheralState s;
        s.L = evaluate_word(cusp.curves.at("l"), shapes);
        s.M = evaluate_word(cusp.curves.at("m"), shapes);
        s.u = track_log(anchors[k].u, anchors[k].L, s.L);
        s.v = track_log(anchors[k].v, anchors[k].M, s.M);
        states.push_back(s);
    }
    return states;
}

std::vector<PeripheralState> principal_states(const Triangulation& tri,
                                              const ShapeAssignment& shapes) {
    std::vector<PeripheralState> states;
    for (const CuspLink& cusp : tri.cusps()) {
        PeripheralState s;
        s.L = evaluate_word(cusp.curves.at("l"), shapes);
        s.M = evaluate_word(cusp.curves.at("m"), shapes);
        s.u = std::log(s.L);
        s.v = std::log(s.M);
        states.push_back(s);
    }
    return states;
}

// complex residual rows: edge cycles first, then one row per cusp
std::vector<cx> complex_rows(const Triangulation& tri, const ShapeAssignment& shapes,
                             const SolveTarget& target,
                             const std::vector<PeripheralState>& states) {
    std::vector<cx> rows;
    const cx two_pi_i(0.0, 2.0 * kPi);
    for (const EdgeCycle& cycle : tri.edge_cycles()) {
        cx sum = -two_pi_i;
        for (const CycleStep& step : cycle.steps) {
            cx ell = std::log(shape_triple(shapes[step.tet])[step.edge_class]);
            sum += step.eps ? ell : -std::conj(ell);
        }
        rows.push_back(sum);
    }
    for (size_t k = 0; k < tri.cusps().size(); ++k) {
        DehnPair pq = filling_for(tri.cusps()[k], target);
        rows.push_back(pq ? pq->first * states[k].u + pq->second * states[k].v - two_pi_i
                          : states[k].u);
    }
    return rows;
}

double norm_of(const std::vector<cx>& rows) {
    double sum = 0.0;
    for (const cx& r : rows) sum += std::norm(r);
    return std::sqrt(sum);
}

// Real Jacobian of the rows with respect to (Re z_i, Im z_i).  Every row is a
// sum of terms lambda*log(f) + mu*conj(log(f)) with real lambda, mu, so
//   d(row)/dRe z = lambda*g + mu*conj(g),    g = dlog_invariant,
//   d(row)/dIm z = i*(lambda*g - mu*conj(g)).
Eigen::MatrixXd real_jacobian(const Triangulation& tri, const ShapeAssignment& shapes,
                              const SolveTarget& target, bool edge_rows_only) {
    const int n = tri.size();
    const int cycles = static_cast<int>(tri.edge_cycles().size());
    const int cusps = static_cast<int>(tri.cusps().size());
    const int rows = edge_rows_only ? cycles : cycles + cusps;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * rows, 2 * n);

    auto add_term = [&](int row, int tet, int edge_class, double lambda, double mu) {
        cx g = dlog_invariant(shapes[tet], edge_class);
        cx d_re = lambda * g + mu * std::conj(g);
        cx d_im = cx(0.0, 1.0) * (lambda * g - mu * std::conj(g));
        jac(2 * row, 2 * tet) += d_re.real();
        jac(2 * row + 1, 2 * tet) += d_re.imag();
        jac(2 * row, 2 * tet + 1) += d_im.real();
        jac(2 * row + 1, 2 * tet + 1) += d_im.imag();
    };

    for (int i = 0; i < cycles; ++i)
        for (const CycleStep& step : tri.edge_cycles()[i].steps)
            add_term(i, step.tet, step.edge_class, step.eps ? 1.0 : 0.0, step.eps ? 0.0 : -1.0);

    if (!edge_rows_only)
        for (int k = 0; k < cusps; ++k) {
            const CuspLink& cusp = tri.cusps()[k];
            DehnPair pq = filling_for(cusp, target);
            auto add_word = [&](const HolonomyWord& word, double weight) {
                for (const WordFactor& f : word) {
                    double coeff = weight * f.exponent;
                    if (f.conjugated)
                        add_term(cycles + k, f.tet, f.edge_class, 0.0, coeff);
                    else
                        add_term(cycles + k, f.tet, f.edge_class, coeff, 0.0);
                }
            };
            if (pq) {
                add_word(cusp.curves.at("l"), pq->first);
                add_word(cusp.curves.at("m"), pq->second);
            } else {
                add_word(cusp.curves.at("l"), 1.0);
            }
        }
    return jac;
}

std::vector<double> interleave(const std::vector<cx>& rows) {
    std::vector<double> out;
    out.reserve(rows.size() * 2);
    for (const cx& r : rows) {
        out.push_back(r.real());
        out.push_back(r.imag());
    }
    return out;
}

}  // namespace

ShapeAssignment regular_seed(const Triangulation& tri) {
    return ShapeAssignment(tri.size(), cx(0.5, std::sqrt(3.0) / 2.0));
}

std::vector<double> gluing_residual(const Triangulation& tri, const ShapeAssignment& shapes,
                                    const SolveTarget& target,
                                    const std::vector<PeripheralState>& anchors) {
    if (static_cast<int>(shapes.size()) != tri.size())
        throw ValidationError("shape count does not match the triangulation");
    validate_target(tri, target);
    if (!anchors.empty() && anchors.size() != tri.cusps().size())
        throw ValidationError("anchor count does not match the cusp count");
    std::vector<PeripheralState> states =
        anchors.empty() ? principal_states(tri, shapes) : advance_states(tri, shapes, anchors);
    return interleave(complex_rows(tri, shapes, target, states));
}

int edge_jacobian_rank(const Triangulation& tri, const ShapeAssignment& shapes) {
    if (static_cast<int>(shapes.size()) != tri.size())
        throw ValidationError("shape count does not match the triangulation");
    Eigen::MatrixXd jac = real_jacobian(tri, shapes, SolveTarget{}, true);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10 * sv(0)) ++rank;
    return rank;
}

SolveResult newton_solve(const Triangulation& tri, const ShapeAssignment& initial,
                         const SolveTarget& target, const SolveOptions& options) {
    if (static_cast<int>(initial.size()) != tri.size())
        throw ValidationError("shape count does not match the triangulation");
    validate_target(tri, target);
    require_geometric(initial);
    return newton_solve(tri, initial, target, principal_states(tri, initial), options);
}

SolveResult newton_solve(const Triangulation& tri, const ShapeAssignment& initial,
                         const SolveTarget& target, const std::vector<PeripheralState>& anchors,
                         const SolveOptions& options) {
    if (static_cast<int>(initial.size()) != tri.size())
        throw ValidationError("shape count does not match the triangulation");
    if (anchors.size() != tri.cusps().size())
        throw ValidationError("anchor count does not match the cusp count");
    validate_target(tri, target);
    require_geometric(initial);

    ShapeAssignment shapes = initial;
    std::vector<PeripheralState> states = advance_states(tri, shapes, anchors);
    std::vector<cx> rows = complex_rows(tri, shapes, target, states);
    double norm = norm_of(rows);

    SolveResult result;
    result.residual_history.push_back(norm);

    const int n = tri.size();
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (norm < options.tolerance) break;

        Eigen::MatrixXd jac = real_jacobian(tri, shapes, target, false);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac,
                                              Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (sv.size() == 0 || sv(0) < 1e-12) {
            std::ostringstream msg;
            msg << "Jacobian is singular (largest singular value "
                << (sv.size() ? sv(0) : 0.0) << ")";
            throw SingularJacobianError(msg.str());
        }
        svd.setThreshold(1e-12);

        Eigen::VectorXd rhs(2 * static_cast<int>(rows.size()));
        for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
            rhs(2 * i) = -rows[i].real();
            rhs(2 * i + 1) = -rows[i].imag();
        }
        Eigen::VectorXd delta = svd.solve(rhs);

        bool accepted = false;
        bool any_geometric = false;
        double alpha = 1.0;
        for (int bt = 0; bt <= options.max_backtracks; ++bt, alpha *= 0.5) {
            ShapeAssignment candidate(n);
            bool geometric = true;
            for (int i = 0; i < n; ++i) {
                candidate[i] = shapes[i] + alpha * cx(delta(2 * i), delta(2 * i + 1));
                if (!(candidate[i].imag() > kDomainFloor)) geometric = false;
            }
            if (!geometric) continue;
            any_geometric = true;

            std::vector<PeripheralState> candidate_states;
            try {
                candidate_states = advance_states(tri, candidate, states);
            } catch (const BranchJumpError&) {
                continue;
            }
            std::vector<cx> candidate_rows = complex_rows(tri, candidate, target, candidate_states);
            double candidate_norm = norm_of(candidate_rows);
            if (candidate_norm < norm) {
                shapes = std::move(candidate);
                states = std::move(candidate_states);
                rows = std::move(candidate_rows);
                norm = candidate_norm;
                result.residual_history.push_back(norm);
                result.iterations = iter + 1;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!any_geometric)
                throw DegenerationError("every damped step leaves the upper half plane");
            std::ostringstream msg;
            msg << "line search stalled at residual norm " << norm;
            throw DivergenceError(msg.str());
        }
    }

    if (!(norm < options.tolerance)) {
        std::ostringstream msg;
        msg << "no convergence after " << options.max_iterations
            << " iterations, residual norm " << norm;
        throw DivergenceError(msg.str());
    }

    for (PeripheralState& s : states) s.coefficients = dehn_coefficients(s.u, s.v);
    result.shapes = std::move(shapes);
    result.peripherals = std::move(states);
    result.residual_norm = norm;
    return result;
}

std::vector<SolveResult> solve_path(const Triangulation& tri,
                                    const std::vector<SolveTarget>& targets,
                                    const SolveOptions& options) {
    std::vector<SolveResult> results;
    ShapeAssignment shapes = regular_seed(tri);
    std::vector<PeripheralState> anchors(tri.cusps().size());
    for (size_t k = 0; k < targets.size(); ++k) {
        SolveResult sample;
        try {
            sample = newton_solve(tri, shapes, targets[k], anchors, options);
        } catch (const ValidationError&) {
            throw;  // a malformed target, not a continuation failure
        } catch (const Error& e) {
            if (k == 0) throw;
            std::ostringstream msg;
            msg << "continuation step " << k - 1 << " -> " << k << " failed (" << e.what()
                << "); insert intermediate targets";
            throw StepTooLargeError(msg.str());
        }
        shapes = sample.shapes;
        anchors = sample.peripherals;
        results.push_back(std::move(sample));
    }
    return results;
}

}  // namespace cuspforge
