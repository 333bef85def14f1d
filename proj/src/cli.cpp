#include "cuspforge/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>

#include "cuspforge/gieseking.hpp"
#include "cuspforge/klein.hpp"
#include "cuspforge/solver.hpp"

namespace cuspforge {

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kSolverFailure = 2;
constexpr int kInconsistent = 3;

// 17 significant digits, locale independent, so identical runs emit identical
// bytes and every double survives a round trip
std::string fmt(double v) {
    char buf[64];
    auto conv = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, conv.ptr);
}

std::string json_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (static_cast<unsigned char>(c) < 0x20) {
            char code[8];
            std::snprintf(code, sizeof code, "\\u%04x", c);
            out += code;
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

std::string json_complex(const cx& z) {
    return "{\"re\": " + fmt(z.real()) + ", \"im\": " + fmt(z.imag()) + "}";
}

// full document in memory first, then temp file plus rename, so a failure at
// any stage leaves no partial output behind
void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream stream(tmp, std::ios::binary | std::ios::trunc);
        if (!stream) throw ValidationError("cannot write " + tmp.string());
        stream << content;
        stream.flush();
        if (!stream) {
            std::error_code ignore;
            fs::remove(tmp, ignore);
            throw ValidationError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ignore;
        fs::remove(tmp, ignore);
        throw ValidationError("cannot move output into place at " + path + ": " + ec.message());
    }
}

struct Tolerances {
    SolveOptions solve;
    double band = 1e-8;  // zero band of the trace classifier
};

Tolerances resolve_tolerances(std::ostream& err) {
    Tolerances tol;
    const char* env = std::getenv("CUSPFORGE_TOL");
    if (env == nullptr || *env == '\0') return tol;
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !std::isfinite(v) || v <= 0.0) {
        err << "warning: CUSPFORGE_TOL=\"" << env << "\" is not a positive number; using defaults\n";
        return tol;
    }
    tol.solve.tolerance = v;
    tol.band = v;
    return tol;
}

double parse_number(const std::string& text, const char* what) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
        throw ValidationError(std::string("cannot parse ") + what + " from \"" + text + "\"");
    return v;
}

std::pair<double, double> parse_number_pair(const std::string& text, const char* what) {
    auto comma = text.find(',');
    if (comma == std::string::npos)
        throw ValidationError(std::string(what) + " wants two comma separated numbers, got \"" +
                              text + "\"");
    return {parse_number(text.substr(0, comma), what),
            parse_number(text.substr(comma + 1), what)};
}

Triangulation load_input(const std::string& tri_path, const std::string& manifold) {
    if (!manifold.empty()) {
        if (manifold != "gieseking")
            throw ValidationError("unknown builtin manifold \"" + manifold + "\"");
        return gieseking_triangulation();
    }
    if (tri_path.empty())
        throw ValidationError("an input is required: --tri PATH or --manifold gieseking");
    std::ifstream in(tri_path);
    if (!in) throw ValidationError("cannot open " + tri_path);
    return load_triangulation(in);
}

SolveTarget parse_target(const std::vector<std::string>& tokens) {
    if (tokens.empty() || tokens[0] == "complete") {
        if (tokens.size() > 1)
            throw ValidationError("--target complete takes no further arguments");
        return SolveTarget::complete_structure();
    }
    if (tokens[0] != "dehn")
        throw ValidationError("--target wants \"complete\" or \"dehn NAME=P,Q ...\"");
    if (tokens.size() < 2)
        throw ValidationError("--target dehn needs at least one NAME=P,Q filling");
    std::map<std::string, DehnPair> fillings;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        auto eq = tokens[i].find('=');
        if (eq == std::string::npos || eq == 0)
            throw ValidationError("filling \"" + tokens[i] + "\" is not of the form NAME=P,Q");
        std::string name = tokens[i].substr(0, eq);
        std::string coeffs = tokens[i].substr(eq + 1);
        if (fillings.count(name)) throw ValidationError("cusp \"" + name + "\" filled twice");
        if (coeffs == "inf")
            fillings[name] = std::nullopt;
        else
            fillings[name] = parse_number_pair(coeffs, "filling coefficients");
    }
    return SolveTarget::dehn_filling(std::move(fillings));
}

bool has_finite_filling(const SolveTarget& target) {
    if (target.complete) return false;
    for (const auto& entry : target.fillings)
        if (entry.second) return true;
    return false;
}

// A filled structure is reached by continuation from the complete one: the
// requested coefficients are approached through a fixed ladder of larger
// ones, which correspond to smaller deformations, so every Newton step starts
// close to its solution.
SolveResult run_solve(const Triangulation& tri, const SolveTarget& target,
                      const SolveOptions& options) {
    if (!has_finite_filling(target))
        return newton_solve(tri, regular_seed(tri), target, options);

    constexpr int kSteps = 12;
    std::vector<SolveTarget> path;
    path.push_back(SolveTarget::complete_structure());
    for (int j = 1; j <= kSteps; ++j) {
        SolveTarget step = target;
        double scale = static_cast<double>(kSteps) / j;
        for (auto& entry : step.fillings) {
            if (!entry.second) continue;
            entry.second->first *= scale;
            entry.second->second *= scale;
        }
        path.push_back(std::move(step));
    }
    return solve_path(tri, path, options).back();
}

void append_coefficients(std::ostringstream& s, const DehnPair& coefficients) {
    if (coefficients) {
        s << "\"p\": " << fmt(coefficients->first) << ", \"q\": " << fmt(coefficients->second)
          << ", \"infinite\": false";
    } else {
        s << "\"p\": null, \"q\": null, \"infinite\": true";
    }
}

std::string render_solve_json(const Triangulation& tri, const SolveTarget& target,
                              const SolveResult& result) {
    std::ostringstream s;
    s << "{\n";
    s << "\"schema_version\": 1,\n";
    s << "\"manifold\": " << json_quote(tri.name()) << ",\n";
    s << "\"tetrahedra\": " << tri.size() << ",\n";
    s << "\"target\": {\"type\": " << (target.complete ? "\"complete\"" : "\"dehn\"")
      << ", \"fillings\": [";
    bool first = true;
    if (!target.complete) {
        for (const auto& entry : target.fillings) {
            if (!first) s << ", ";
            first = false;
            s << "{\"cusp\": " << json_quote(entry.first) << ", ";
            append_coefficients(s, entry.second);
            s << "}";
        }
    }
    s << "]},\n";
    s << "\"shapes\": [";
    for (std::size_t i = 0; i < result.shapes.size(); ++i)
        s << (i ? ", " : "") << json_complex(result.shapes[i]);
    s << "],\n";
    s << "\"cusps\": [";
    for (std::size_t i = 0; i < tri.cusps().size(); ++i) {
        const CuspLink& cusp = tri.cusps()[i];
        const PeripheralState& state = result.peripherals[i];
        s << (i ? ", " : "") << "{\"name\": " << json_quote(cusp.name)
          << ", \"klein\": " << (cusp.orientable ? "false" : "true")
          << ", \"hol_l\": " << json_complex(state.L) << ", \"hol_m\": " << json_complex(state.M)
          << ", \"log_l\": " << json_complex(state.u) << ", \"log_m\": " << json_complex(state.v)
          << ", ";
        append_coefficients(s, state.coefficients);
        s << "}";
    }
    s << "],\n";
    s << "\"residual_norm\": " << fmt(result.residual_norm) << ",\n";
    s << "\"iterations\": " << result.iterations << "\n";
    s << "}\n";
    return s.str();
}

int emit(const std::string& content, const std::string& out_path, std::ostream& out,
         std::ostream& err) {
    if (out_path.empty()) {
        out << content;
        return kOk;
    }
    try {
        atomic_write(out_path, content);
    } catch (const Error& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    }
    return kOk;
}

int cmd_solve(const std::string& tri_path, const std::string& manifold,
              const std::vector<std::string>& target_tokens, const std::string& out_path,
              std::ostream& out, std::ostream& err) {
    std::optional<Triangulation> tri;
    SolveTarget target;
    try {
        tri = load_input(tri_path, manifold);
        target = parse_target(target_tokens);
    } catch (const Error& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    }

    SolveOptions options = resolve_tolerances(err).solve;
    SolveResult result;
    try {
        result = run_solve(*tri, target, options);
    } catch (const ValidationError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const OrientationTypeError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        err << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    }

    return emit(render_solve_json(*tri, target, result), out_path, out, err);
}

const char* type_name(KleinTypeTag tag) {
    switch (tag) {
        case KleinTypeTag::Parabolic: return "parabolic";
        case KleinTypeTag::TypeI: return "typeI";
        case KleinTypeTag::TypeII: return "typeII";
    }
    return "unknown";
}

struct SweepRow {
    double t = 0.0;
    GiesekingPoint point;
    KleinTypeTag tag = KleinTypeTag::Parabolic;
    double cone_angle = 0.0;
    double sing_length = 0.0;
    DehnPair coefficients;
    double residual = 0.0;
    cx solver_w{0.0, 0.0};
};

int cmd_sweep(const std::string& manifold, int samples, const std::string& out_path,
              std::ostream& out, std::ostream& err) {
    if (manifold != "gieseking") {
        err << "input error: only --manifold gieseking supports sweeping\n";
        return kInputError;
    }
    if (samples < 3) {
        err << "input error: --samples must be at least 3\n";
        return kInputError;
    }

    Tolerances tol = resolve_tolerances(err);
    Triangulation tri = gieseking_triangulation();
    const std::string cusp = tri.cusps()[0].name;
    std::vector<SweepRow> rows(samples);

    try {
        // closed-form pass: the curve point and its classification, row by row
        for (int j = 0; j < samples; ++j) {
            SweepRow& row = rows[j];
            row.t = -1.0 + 2.0 * (j + 1) / (samples + 1);
            row.point = deformation_curve(kPi * (1.0 + row.t));
            KleinType type = classify(curve_representation(row.point.w), tol.band);
            row.tag = type.tag;
            if (!type.degenerate && type.tag != KleinTypeTag::Parabolic) {
                CompletionGeometry geometry = completion_geometry(type);
                row.cone_angle = geometry.cone_angle;
                row.sing_length = geometry.length;
            }
        }

        // solver pass: two continuation chains leave the complete structure
        // towards either end, each row reusing the previous one as seed
        SolveResult base =
            newton_solve(tri, regular_seed(tri), SolveTarget::complete_structure(), tol.solve);

        auto solve_row = [&](int index, ShapeAssignment& shapes,
                             std::vector<PeripheralState>& states, auto&& self,
                             double from_t, double to_t, int depth) -> SolveResult {
            SolveTarget target =
                SolveTarget::dehn_filling({{cusp, std::pair{0.0, 1.0 / to_t}}});
            try {
                SolveResult r = newton_solve(tri, shapes, target, states, tol.solve);
                shapes = r.shapes;
                states = r.peripherals;
                if (index >= 0) {
                    rows[index].residual = r.residual_norm;
                    rows[index].coefficients = r.peripherals[0].coefficients;
                    rows[index].solver_w = -1.0 / r.shapes[0];
                }
                return r;
            } catch (const Error&) {
                if (depth == 0) throw;
                double mid = 0.5 * (from_t + to_t);
                self(-1, shapes, states, self, from_t, mid, depth - 1);
                return self(index, shapes, states, self, mid, to_t, depth - 1);
            }
        };

        auto run_chain = [&](std::vector<int> indices) {
            ShapeAssignment shapes = base.shapes;
            std::vector<PeripheralState> states = base.peripherals;
            double previous_t = 0.0;
            for (int index : indices) {
                solve_row(index, shapes, states, solve_row, previous_t, rows[index].t, 10);
                previous_t = rows[index].t;
            }
        };

        std::vector<int> right, left;
        for (int j = 0; j < samples; ++j) {
            if (rows[j].t > 0.0)
                right.push_back(j);
            else if (rows[j].t < 0.0)
                left.push_back(j);
            else {
                rows[j].residual = base.residual_norm;
                rows[j].coefficients = base.peripherals[0].coefficients;
                rows[j].solver_w = -1.0 / base.shapes[0];
            }
        }
        std::sort(left.begin(), left.end(),
                  [&](int a, int b) { return rows[a].t > rows[b].t; });

        auto other = std::async(std::launch::async, run_chain, right);
        run_chain(left);
        other.get();
    } catch (const Error& e) {
        err << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    }

    // every solver shape must land back on the closed-form curve
    double curve_gate = std::max(1e-9, 100.0 * tol.solve.tolerance);
    double agree_gate = std::max(1e-8, 1000.0 * tol.solve.tolerance);
    for (int j = 0; j < samples; ++j) {
        const SweepRow& row = rows[j];
        double off_curve = std::abs(std::abs(row.solver_w * (1.0 + row.solver_w)) - 1.0);
        double disagree = std::abs(row.solver_w - row.point.w);
        if (off_curve > curve_gate || disagree > agree_gate) {
            err << "solver failure: cross-check failed at t = " << fmt(row.t)
                << " (curve residual " << fmt(off_curve) << ", distance to closed form "
                << fmt(disagree) << ")\n";
            return kSolverFailure;
        }
    }

    std::ostringstream csv;
    csv << "t,w_re,w_im,x_re,x_im,tau,type,cone_angle,sing_length,p,q,residual_norm\n";
    for (const SweepRow& row : rows) {
        csv << fmt(row.t) << ',' << fmt(row.point.w.real()) << ',' << fmt(row.point.w.imag())
            << ',' << fmt(row.point.x.real()) << ',' << fmt(row.point.x.imag()) << ','
            << fmt(row.point.tau) << ',' << type_name(row.tag) << ',' << fmt(row.cone_angle)
            << ',' << fmt(row.sing_length) << ',';
        if (row.coefficients)
            csv << fmt(row.coefficients->first) << ',' << fmt(row.coefficients->second);
        else
            csv << "inf,inf";
        csv << ',' << fmt(row.residual) << '\n';
    }
    return emit(csv.str(), out_path, out, err);
}

struct Classification {
    KleinType type;
    std::optional<CompletionGeometry> completion;
    std::optional<double> mirror_alpha;  // second lift, when traces cannot split them
    bool tau_known = true;
};

Classification finish(const KleinType& type) {
    Classification result;
    result.type = type;
    if (!type.degenerate) result.completion = completion_geometry(type);
    return result;
}

// normal-form parameters recovered from the two trace invariants alone
Classification classify_traces(double i_a2, double i_b, double band) {
    KleinTypeTag tag = classify_from_traces(i_a2, i_b, band);
    KleinType type;
    type.tag = tag;
    Classification result;
    switch (tag) {
        case KleinTypeTag::Parabolic:
            // tau is not a function of the invariants; leave it unset
            result = finish(type);
            result.tau_known = false;
            return result;
        case KleinTypeTag::TypeI: {
            if (i_b < -4.0 - band)
                throw InconsistentPatternError("I_b below -4 fits no rotation angle");
            double clamped = std::clamp(std::sqrt(std::max(-i_b, 0.0)) / 2.0, 0.0, 1.0);
            type.l = std::asinh(std::sqrt(std::max(i_a2, 0.0)) / 2.0);
            type.alpha = 2.0 * std::asin(clamped);
            type.degenerate = i_a2 <= band;
            return finish(type);
        }
        case KleinTypeTag::TypeII: {
            if (i_a2 < -4.0 - band)
                throw InconsistentPatternError("I_a2 below -4 fits no rotation angle");
            double clamped = std::clamp(std::sqrt(std::max(-i_a2, 0.0)) / 2.0, 0.0, 1.0);
            type.l = 2.0 * std::asinh(std::sqrt(std::max(i_b, 0.0)) / 2.0);
            type.alpha = std::asin(clamped);
            type.degenerate = std::abs(i_a2) <= band && type.alpha < kPi / 2.0;
            Classification result = finish(type);
            result.mirror_alpha = kPi - type.alpha;
            return result;
        }
    }
    throw InconsistentPatternError("unreachable");
}

void print_classification_text(std::ostream& out, const Classification& c) {
    const KleinType& type = c.type;
    switch (type.tag) {
        case KleinTypeTag::Parabolic: out << "type: parabolic\n"; break;
        case KleinTypeTag::TypeI: out << "type: type I\n"; break;
        case KleinTypeTag::TypeII: out << "type: type II\n"; break;
    }
    out << "degenerate: " << (type.degenerate ? "yes" : "no") << '\n';
    if (type.tag == KleinTypeTag::Parabolic) {
        if (c.tau_known)
            out << "tau = " << fmt(type.tau) << '\n';
        else
            out << "tau: not determined by the trace pair\n";
    } else {
        out << "l = " << fmt(type.l) << '\n';
        out << "alpha = " << fmt(type.alpha) << '\n';
        if (c.mirror_alpha)
            out << "note: the mirror lift alpha = " << fmt(*c.mirror_alpha)
                << " has the same trace pair\n";
    }
    if (!c.completion) {
        out << "completion: none (degenerate limit)\n";
        return;
    }
    switch (c.completion->kind) {
        case GeometryKind::Cusp: out << "completion: cusp\n"; break;
        case GeometryKind::SolidKleinBottle:
            out << "completion: solid Klein bottle with singular soul (cone angle "
                << fmt(c.completion->cone_angle) << ", soul length " << fmt(c.completion->length)
                << ")\n";
            break;
        case GeometryKind::DiscOrbiBundle:
            out << "completion: disc orbifold bundle with singular soul (cone angle "
                << fmt(c.completion->cone_angle) << ", interval length "
                << fmt(c.completion->length) << ")\n";
            break;
    }
}

void print_classification_json(std::ostream& out, const Classification& c,
                               const std::string& input_fields) {
    const KleinType& type = c.type;
    out << "{\n\"schema_version\": 1,\n" << input_fields;
    out << "\"type\": \"" << type_name(type.tag) << "\",\n";
    out << "\"degenerate\": " << (type.degenerate ? "true" : "false") << ",\n";
    if (type.tag == KleinTypeTag::Parabolic && c.tau_known)
        out << "\"tau\": " << fmt(type.tau) << ",\n";
    else
        out << "\"tau\": null,\n";
    if (type.tag == KleinTypeTag::Parabolic) {
        out << "\"l\": null,\n\"alpha\": null,\n";
    } else {
        out << "\"l\": " << fmt(type.l) << ",\n";
        out << "\"alpha\": " << fmt(type.alpha) << ",\n";
    }
    if (c.mirror_alpha)
        out << "\"alpha_mirror\": " << fmt(*c.mirror_alpha) << ",\n";
    else
        out << "\"alpha_mirror\": null,\n";
    if (c.completion) {
        const char* kind = "cusp";
        if (c.completion->kind == GeometryKind::SolidKleinBottle) kind = "solid_klein_bottle";
        if (c.completion->kind == GeometryKind::DiscOrbiBundle) kind = "disc_orbi_bundle";
        out << "\"completion\": {\"kind\": \"" << kind
            << "\", \"cone_angle\": " << fmt(c.completion->cone_angle)
            << ", \"length\": " << fmt(c.completion->length) << "}\n";
    } else {
        out << "\"completion\": null\n";
    }
    out << "}\n";
}

int cmd_classify(const std::string& traces_text, const std::string& x_text, bool json,
                 std::ostream& out, std::ostream& err) {
    if (traces_text.empty() == x_text.empty()) {
        err << "input error: give exactly one of --traces IA2,IB or --x RE,IM\n";
        return kInputError;
    }
    Tolerances tol = resolve_tolerances(err);

    try {
        Classification result;
        std::string input_fields;
        std::ostringstream prelude;

        if (!traces_text.empty()) {
            auto [i_a2, i_b] = parse_number_pair(traces_text, "--traces");
            result = classify_traces(i_a2, i_b, tol.band);
            input_fields =
                "\"i_a2\": " + fmt(i_a2) + ",\n\"i_b\": " + fmt(i_b) + ",\n";
        } else {
            auto [re, im] = parse_number_pair(x_text, "--x");
            cx x(re, im);
            cx offset = x - 1.0;
            if (std::abs(std::abs(offset) - 1.0) > 1e-3)
                throw ValidationError("x is not on the circle |x - 1| = 1");
            // snap onto the circle so truncated command line digits still work
            x = 1.0 + offset / std::abs(offset);
            double tau_b = commutator_trace_from_character(x);
            result = finish(classify(peripheral_representation(x, tol.band), tol.band));
            prelude << "x = " << fmt(x.real()) << " + " << fmt(x.imag()) << "i\n";
            prelude << "commutator trace = " << fmt(tau_b) << '\n';
            input_fields = "\"x\": " + json_complex(x) +
                           ",\n\"commutator_trace\": " + fmt(tau_b) + ",\n";
        }

        if (json) {
            print_classification_json(out, result, input_fields);
        } else {
            out << prelude.str();
            print_classification_text(out, result);
        }
        return kOk;
    } catch (const InconsistentPatternError& e) {
        err << "no consistent classification: " << e.what() << '\n';
        return kInconsistent;
    } catch (const DegenerateShapeError& e) {
        err << "no consistent classification: " << e.what() << '\n';
        return kInconsistent;
    } catch (const DegenerateTypeError& e) {
        err << "no consistent classification: " << e.what() << '\n';
        return kInconsistent;
    } catch (const Error& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    }
}

int cmd_verify(const std::string& tri_path, const std::string& manifold, std::ostream& out,
               std::ostream& err) {
    std::optional<Triangulation> loaded;
    try {
        loaded = load_input(tri_path, manifold);
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        err << "invariant violated: " << e.what() << '\n';
        return kInputError;
    }
    const Triangulation& tri = *loaded;

    out << "name: " << tri.name() << '\n';
    out << "tetrahedra: " << tri.size() << '\n';
    out << "orientable: " << (tri.orientable() ? "yes" : "no") << '\n';
    out << "edge cycles: " << tri.edge_cycles().size() << " (lengths:";
    for (const EdgeCycle& cycle : tri.edge_cycles()) out << ' ' << cycle.steps.size();
    out << ")\n";
    out << "cusps: " << tri.cusps().size() << '\n';
    for (const CuspLink& cusp : tri.cusps()) {
        out << "  " << cusp.name << ": " << (cusp.orientable ? "torus" : "Klein bottle");
        if (!cusp.curves.empty()) {
            out << ", curves:";
            for (const auto& curve : cusp.curves) out << ' ' << curve.first;
        }
        out << '\n';
    }

    if (tri.orientable()) {
        out << "double cover: not needed (already orientable)\n";
        return kOk;
    }
    try {
        OrientationCover cover = orientation_double_cover(tri);
        if (!cover.cover.orientable()) {
            err << "invariant violated: double cover is not orientable\n";
            return kInputError;
        }
        for (int tet = 0; tet < cover.cover.size(); ++tet) {
            for (int face = 0; face < 4; ++face) {
                if (reverses_orientation(cover.cover.gluing(tet, face).vertex_map)) {
                    err << "invariant violated: double cover keeps a reversing face pairing\n";
                    return kInputError;
                }
            }
        }
        int torus = 0;
        for (const CuspLink& cusp : cover.cover.cusps())
            if (cusp.orientable) ++torus;
        out << "double cover: " << cover.cover.size() << " tetrahedra, " << torus
            << (torus == 1 ? " torus cusp" : " torus cusps")
            << ", all face pairings orientation coherent\n";
    } catch (const Error& e) {
        err << "invariant violated: " << e.what() << '\n';
        return kInputError;
    }
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"cusped hyperbolic triangulations: gluing solver, deformation sweep, Klein "
                 "bottle cusp classifier"};
    app.name("cuspforge");
    app.require_subcommand(1);

    std::string solve_tri, solve_manifold, solve_out;
    std::vector<std::string> solve_target;
    CLI::App* solve = app.add_subcommand(
        "solve", "solve the gluing equations for a target structure, emit a JSON report");
    CLI::Option* solve_tri_opt =
        solve->add_option("--tri", solve_tri, "triangulation document to load");
    CLI::Option* solve_manifold_opt =
        solve->add_option("--manifold", solve_manifold, "builtin triangulation (gieseking)");
    solve_tri_opt->excludes(solve_manifold_opt);
    solve_manifold_opt->excludes(solve_tri_opt);
    solve->add_option("--target", solve_target,
                      "\"complete\" (default) or \"dehn NAME=P,Q ...\"; \"inf\" keeps a cusp "
                      "unfilled")
        ->expected(1, -1);
    solve->add_option("--out", solve_out, "output path (stdout when omitted)");

    std::string sweep_manifold = "gieseking", sweep_out;
    int sweep_samples = 101;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "sample the one-parameter deformation curve, emit a CSV table");
    sweep->add_option("--manifold", sweep_manifold, "builtin triangulation (gieseking)");
    sweep->add_option("--samples", sweep_samples, "row count, at least 3 (default 101)");
    sweep->add_option("--out", sweep_out, "output path (stdout when omitted)");

    std::string classify_traces, classify_x;
    bool classify_json = false;
    CLI::App* classify_cmd = app.add_subcommand(
        "classify", "classify a Klein bottle cusp representation from trace data");
    CLI::Option* traces_opt = classify_cmd->add_option(
        "--traces", classify_traces, "trace invariant pair IA2,IB of the generators a^2 and b");
    CLI::Option* x_opt =
        classify_cmd->add_option("--x", classify_x, "character circle point RE,IM");
    traces_opt->excludes(x_opt);
    x_opt->excludes(traces_opt);
    classify_cmd->add_flag("--json", classify_json, "machine readable output");

    std::string verify_tri, verify_manifold;
    CLI::App* verify = app.add_subcommand(
        "verify", "check the structural invariants of a triangulation and print a summary");
    CLI::Option* verify_tri_opt =
        verify->add_option("--tri", verify_tri, "triangulation document to load");
    CLI::Option* verify_manifold_opt =
        verify->add_option("--manifold", verify_manifold, "builtin triangulation (gieseking)");
    verify_tri_opt->excludes(verify_manifold_opt);
    verify_manifold_opt->excludes(verify_tri_opt);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("cuspforge");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    if (solve->parsed())
        return cmd_solve(solve_tri, solve_manifold, solve_target, solve_out, out, err);
    if (sweep->parsed()) return cmd_sweep(sweep_manifold, sweep_samples, sweep_out, out, err);
    if (classify_cmd->parsed())
        return cmd_classify(classify_traces, classify_x, classify_json, out, err);
    if (verify->parsed()) return cmd_verify(verify_tri, verify_manifold, out, err);
    return kInputError;
}

}  // namespace cuspforge
