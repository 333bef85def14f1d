#include "cuspforge/triangulation.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cuspforge {

namespace {

// unordered vertex pairs in a fixed scan order
constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

int pair_index(int a, int b) {
    if (a > b) std::swap(a, b);
    for (int i = 0; i < 6; ++i)
        if (kPairs[i][0] == a && kPairs[i][1] == b) return i;
    throw ValidationError("bad edge pair");
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[a] = b;
    }
};

}  // namespace

int edge_class_of(int v0, int v1) {
    if (v0 == v1 || v0 < 0 || v0 > 3 || v1 < 0 || v1 > 3)
        throw ValidationError("edge endpoints must be two distinct vertex labels");
    int lo = std::min(v0, v1), hi = std::max(v0, v1);
    if ((lo == 0 && hi == 2) || (lo == 1 && hi == 3)) return 0;
    if ((lo == 1 && hi == 2) || (lo == 0 && hi == 3)) return 1;
    return 2;  // {2,3} and {0,1}
}

bool permutation_is_even(const std::array<int, 4>& perm) {
    int inversions = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (perm[i] > perm[j]) ++inversions;
    return inversions % 2 == 0;
}

bool reverses_orientation(const std::array<int, 4>& vertex_map) {
    return permutation_is_even(vertex_map);
}

Triangulation::Triangulation(std::string name, int tetrahedra,
                             std::vector<GluingRecord> records,
                             std::vector<CuspData> cusp_info)
    : name_(std::move(name)), n_(tetrahedra) {
    if (n_ < 1) throw ValidationError("need at least one tetrahedron");

    gluings_.assign(static_cast<size_t>(n_) * 4, FaceGluing{});
    for (const GluingRecord& r : records) {
        if (r.tet < 0 || r.tet >= n_ || r.to_tet < 0 || r.to_tet >= n_ ||
            r.face < 0 || r.face > 3 || r.to_face < 0 || r.to_face > 3)
            throw ValidationError("gluing record indices out of range");
        std::array<bool, 4> hit{};
        for (int v : r.vertex_map) {
            if (v < 0 || v > 3) throw ValidationError("vertex_map entries must be labels 0..3");
            hit[v] = true;
        }
        if (!(hit[0] && hit[1] && hit[2] && hit[3]))
            throw ValidationError("vertex_map must be a permutation of 0..3");
        if (r.vertex_map[r.face] != r.to_face)
            throw ValidationError("vertex_map must carry the glued face to its image face");
        FaceGluing& slot = gluings_[r.tet * 4 + r.face];
        if (slot.to_tet >= 0) throw ValidationError("face glued twice");
        slot.to_tet = r.to_tet;
        slot.to_face = r.to_face;
        slot.vertex_map = r.vertex_map;
    }
    for (int t = 0; t < n_; ++t)
        for (int f = 0; f < 4; ++f)
            if (gluings_[t * 4 + f].to_tet < 0)
                throw ValidationError("unglued face: every face of a cusped triangulation must be paired");

    // involution with inverse vertex bijections
    for (int t = 0; t < n_; ++t)
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = gluings_[t * 4 + f];
            const FaceGluing& back = gluings_[g.to_tet * 4 + g.to_face];
            if (back.to_tet != t || back.to_face != f)
                throw ValidationError("face pairings do not form an involution");
            for (int v = 0; v < 4; ++v)
                if (back.vertex_map[g.vertex_map[v]] != v)
                    throw ValidationError("paired vertex bijections are not mutually inverse");
        }

    compute_edge_cycles();
    compute_orientability();
    compute_cusp_links(std::move(cusp_info));
}

const FaceGluing& Triangulation::gluing(int tet, int face) const {
    if (tet < 0 || tet >= n_ || face < 0 || face > 3)
        throw ValidationError("gluing lookup out of range");
    return gluings_[tet * 4 + face];
}

void Triangulation::compute_edge_cycles() {
    std::vector<bool> seen(static_cast<size_t>(n_) * 6, false);
    for (int t0 = 0; t0 < n_; ++t0) {
        for (int p0 = 0; p0 < 6; ++p0) {
            if (seen[t0 * 6 + p0]) continue;

            EdgeCycle cycle;
            int t = t0, a = kPairs[p0][0], b = kPairs[p0][1];
            int eps = 1;
            int entry = -1;  // face through which we arrived; -1 at the start
            for (;;) {
                cycle.steps.push_back({t, edge_class_of(a, b), eps});
                seen[t * 6 + pair_index(a, b)] = true;

                // the edge {a,b} lies in the two faces labeled by the other
                // two vertices; leave through the one we did not enter by
                int adj[2], k = 0;
                for (int f = 0; f < 4; ++f)
                    if (f != a && f != b) adj[k++] = f;
                int exit = (entry < 0) ? adj[0] : (adj[0] == entry ? adj[1] : adj[0]);

                const FaceGluing& g = gluings_[t * 4 + exit];
                int a2 = g.vertex_map[a], b2 = g.vertex_map[b];
                if (reverses_orientation(g.vertex_map)) eps ^= 1;
                t = g.to_tet;
                entry = g.to_face;
                a = std::min(a2, b2);
                b = std::max(a2, b2);

                if (t == t0 && pair_index(a, b) == p0) {
                    if (eps != 1)
                        throw ValidationError(
                            "edge cycle crosses an odd number of orientation-reversing "
                            "gluings; no hyperbolic structure can close up around it");
                    break;
                }
            }
            cycles_.push_back(std::move(cycle));
        }
    }

    size_t slots = 0;
    for (const EdgeCycle& c : cycles_) slots += c.steps.size();
    if (slots != static_cast<size_t>(n_) * 6)
        throw ValidationError("edge cycles fail to partition the edge slots");
    if (static_cast<int>(cycles_.size()) != n_) {
        std::ostringstream msg;
        msg << "expected " << n_ << " edge cycles for a cusped triangulation, found "
            << cycles_.size();
        throw ValidationError(msg.str());
    }
}

void Triangulation::compute_orientability() {
    // try to 2-color tetrahedra so that colors flip exactly across
    // orientation-reversing gluings
    std::vector<int> color(n_, -1);
    orientable_ = true;
    for (int start = 0; start < n_; ++start) {
        if (color[start] >= 0) continue;
        color[start] = 0;
        std::vector<int> stack{start};
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            for (int f = 0; f < 4; ++f) {
                const FaceGluing& g = gluings_[t * 4 + f];
                int want = color[t] ^ (reverses_orientation(g.vertex_map) ? 1 : 0);
                if (color[g.to_tet] < 0) {
                    color[g.to_tet] = want;
                    stack.push_back(g.to_tet);
                } else if (color[g.to_tet] != want) {
                    orientable_ = false;
                }
            }
        }
    }
}

void Triangulation::compute_cusp_links(std::vector<CuspData> cusp_info) {
    // ideal vertex classes
    UnionFind classes(n_ * 4);
    for (int t = 0; t < n_; ++t)
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = gluings_[t * 4 + f];
            for (int v = 0; v < 4; ++v)
                if (v != f) classes.unite(t * 4 + v, g.to_tet * 4 + g.vertex_map[v]);
        }

    std::map<int, std::vector<std::pair<int, int>>> grouped;
    for (int t = 0; t < n_; ++t)
        for (int v = 0; v < 4; ++v)
            grouped[classes.find(t * 4 + v)].push_back({t, v});

    std::vector<std::vector<std::pair<int, int>>> ordered;
    for (auto& [root, members] : grouped) ordered.push_back(members);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });

    if (!cusp_info.empty() && cusp_info.size() != ordered.size()) {
        std::ostringstream msg;
        msg << "document declares " << cusp_info.size() << " cusps but the triangulation has "
            << ordered.size();
        throw ValidationError(msg.str());
    }

    for (size_t k = 0; k < ordered.size(); ++k) {
        CuspLink link;
        link.corners = ordered[k];

        // orientability of the link: 2-color its triangles (tet, vertex); a
        // side gluing flips the triangle orientation exactly when the ambient
        // face gluing reverses
        std::map<std::pair<int, int>, int> color;
        link.orientable = true;
        for (const auto& start : link.corners) {
            if (color.count(start)) continue;
            color[start] = 0;
            std::vector<std::pair<int, int>> stack{start};
            while (!stack.empty()) {
                auto [t, v] = stack.back();
                stack.pop_back();
                for (int f = 0; f < 4; ++f) {
                    if (f == v) continue;
                    const FaceGluing& g = gluings_[t * 4 + f];
                    std::pair<int, int> next{g.to_tet, g.vertex_map[v]};
                    int want = color[{t, v}] ^ (reverses_orientation(g.vertex_map) ? 1 : 0);
                    auto it = color.find(next);
                    if (it == color.end()) {
                        color[next] = want;
                        stack.push_back(next);
                    } else if (it->second != want) {
                        link.orientable = false;
                    }
                }
            }
        }

        // Euler characteristic: faces are the triangles, each has 3 sides and
        // sides pair up (E = 3F/2); vertices are classes of triangle corners.
        // A corner of triangle (t, v) sits on the tetrahedron edge {v, u} and
        // is carried across the two faces containing that edge.
        std::map<std::tuple<int, int, int>, int> corner_id;
        std::vector<std::tuple<int, int, int>> corner_of;
        for (const auto& [t, v] : link.corners)
            for (int u = 0; u < 4; ++u)
                if (u != v) {
                    corner_id[{t, v, u}] = static_cast<int>(corner_of.size());
                    corner_of.push_back({t, v, u});
                }
        UnionFind corners(static_cast<int>(corner_of.size()));
        for (const auto& [t, v, u] : corner_of)
            for (int f = 0; f < 4; ++f) {
                if (f == v || f == u) continue;
                const FaceGluing& g = gluings_[t * 4 + f];
                auto it = corner_id.find({g.to_tet, g.vertex_map[v], g.vertex_map[u]});
                if (it == corner_id.end())
                    throw ValidationError("cusp link corner maps outside its vertex class");
                corners.unite(corner_id[{t, v, u}], it->second);
            }
        std::set<int> vertex_classes;
        for (size_t i = 0; i < corner_of.size(); ++i)
            vertex_classes.insert(corners.find(static_cast<int>(i)));

        int faces = static_cast<int>(link.corners.size());
        if ((3 * faces) % 2 != 0)
            throw ValidationError("cusp link sides fail to pair up");
        link.euler_characteristic =
            static_cast<int>(vertex_classes.size()) - (3 * faces) / 2 + faces;
        if (link.euler_characteristic != 0) {
            std::ostringstream msg;
            msg << "cusp link " << k << " has Euler characteristic "
                << link.euler_characteristic << "; torus or Klein bottle required";
            throw ValidationError(msg.str());
        }

        if (!cusp_info.empty()) {
            link.name = cusp_info[k].name;
            link.curves = std::move(cusp_info[k].curves);
            for (const auto& [label, word] : link.curves) {
                if (word.empty())
                    throw ValidationError("peripheral word '" + label + "' is empty");
                for (const WordFactor& wf : word)
                    if (wf.tet < 0 || wf.tet >= n_ || wf.edge_class < 0 || wf.edge_class > 2 ||
                        (wf.exponent != 1 && wf.exponent != -1))
                        throw ValidationError("peripheral word '" + label +
                                              "' references invalid data");
            }
        } else {
            link.name = "cusp" + std::to_string(k);
        }
        cusps_.push_back(std::move(link));
    }
}

// ---------------------------------------------------------------------------
// document I/O

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
    return *it;
}

int int_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) throw ParseError(std::string("field '") + key + "' must be an integer");
    return v.get<int>();
}

}  // namespace

Triangulation load_triangulation(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    if (!doc.is_object()) throw ParseError("top level must be an object");
    if (int_field(doc, "format") != 1) throw ParseError("unsupported format version");

    std::string name = field(doc, "name").is_string() ? doc["name"].get<std::string>() : "";
    int n = int_field(doc, "tetrahedra_count");

    std::vector<GluingRecord> records;
    for (const json& g : field(doc, "gluings")) {
        GluingRecord r;
        r.tet = int_field(g, "tet");
        r.face = int_field(g, "face");
        r.to_tet = int_field(g, "to_tet");
        r.to_face = int_field(g, "to_face");
        const json& vm = field(g, "vertex_map");
        if (!vm.is_array() || vm.size() != 4)
            throw ParseError("vertex_map must be an array of 4 labels");
        for (int i = 0; i < 4; ++i) r.vertex_map[i] = vm[i].get<int>();
        records.push_back(r);
    }

    std::vector<CuspData> cusp_info;
    if (doc.contains("cusps")) {
        for (const json& c : doc["cusps"]) {
            CuspData data;
            data.name = field(c, "name").get<std::string>();
            if (c.contains("curves"))
                for (auto it = c["curves"].begin(); it != c["curves"].end(); ++it) {
                    HolonomyWord word;
                    for (const json& f : it.value()) {
                        WordFactor wf;
                        wf.tet = int_field(f, "tet");
                        wf.edge_class = int_field(f, "edge_class");
                        wf.exponent = int_field(f, "exp");
                        wf.conjugated = field(f, "conj").get<bool>();
                        word.push_back(wf);
                    }
                    data.curves[it.key()] = std::move(word);
                }
            cusp_info.push_back(std::move(data));
        }
    }

    return Triangulation(name, n, std::move(records), std::move(cusp_info));
}

Triangulation load_triangulation(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_triangulation(buffer.str());
}

std::string serialize(const Triangulation& tri) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"format\": 1,\n";
    out << "  \"name\": " << nlohmann::json(tri.name()).dump() << ",\n";
    out << "  \"tetrahedra_count\": " << tri.size() << ",\n";
    out << "  \"gluings\": [\n";
    for (int t = 0; t < tri.size(); ++t)
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = tri.gluing(t, f);
            out << "    {\"tet\": " << t << ", \"face\": " << f << ", \"to_tet\": " << g.to_tet
                << ", \"to_face\": " << g.to_face << ", \"vertex_map\": [" << g.vertex_map[0]
                << ", " << g.vertex_map[1] << ", " << g.vertex_map[2] << ", " << g.vertex_map[3]
                << "]}";
            out << ((t == tri.size() - 1 && f == 3) ? "\n" : ",\n");
        }
    out << "  ],\n";
    out << "  \"cusps\": [\n";
    const auto& cusps = tri.cusps();
    for (size_t k = 0; k < cusps.size(); ++k) {
        out << "    {\"name\": " << nlohmann::json(cusps[k].name).dump() << ", \"curves\": {";
        bool first_curve = true;
        for (const auto& [label, word] : cusps[k].curves) {
            if (!first_curve) out << ", ";
            first_curve = false;
            out << nlohmann::json(label).dump() << ": [";
            for (size_t i = 0; i < word.size(); ++i) {
                const WordFactor& wf = word[i];
                out << "{\"tet\": " << wf.tet << ", \"edge_class\": " << wf.edge_class
                    << ", \"exp\": " << wf.exponent << ", \"conj\": "
                    << (wf.conjugated ? "true" : "false") << "}";
                if (i + 1 < word.size()) out << ", ";
            }
            out << "]";
        }
        out << "}}" << (k + 1 < cusps.size() ? ",\n" : "\n");
    }
    out << "  ]\n";
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// orientation double cover

namespace {

// relabeling applied to the mirror-sheet tetrahedra; any transposition works,
// this one swaps vertices 0 and 2
constexpr std::array<int, 4> kMirror = {2, 1, 0, 3};

// edge classes transform under the relabeling: {v0v2, v1v3} is preserved,
// the other two classes swap
constexpr std::array<int, 3> kMirrorClass = {0, 2, 1};

std::array<int, 4> compose_perm(const std::array<int, 4>& p, const std::array<int, 4>& q) {
    std::array<int, 4> r{};
    for (int v = 0; v < 4; ++v) r[v] = p[q[v]];
    return r;
}

HolonomyWord lift_word(const HolonomyWord& word, int n) {
    // A conjugated factor on the base becomes a plain factor on the mirror
    // sheet: with mirror shape w = 1/conj(z), the identities
    //     conj(z)^e         = w^(-e)
    //     conj(1/(1-z))^e   = ((w-1)/w)^(-e)
    //     conj((z-1)/z)^e   = (1/(1-w))^(-e)
    // move each factor to the relabeled class with negated exponent.
    HolonomyWord out;
    for (const WordFactor& f : word) {
        if (!f.conjugated) {
            out.push_back(f);
        } else {
            out.push_back({f.tet + n, kMirrorClass[f.edge_class], -f.exponent, false});
        }
    }
    return out;
}

}  // namespace

OrientationCover orientation_double_cover(const Triangulation& tri) {
    if (tri.orientable())
        throw ValidationError("triangulation is already orientable; it has no orientation double cover");

    const int n = tri.size();
    std::vector<GluingRecord> records;
    for (int t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = tri.gluing(t, f);
            bool rev = reverses_orientation(g.vertex_map);
            for (int sheet = 0; sheet < 2; ++sheet) {
                GluingRecord r;
                if (sheet == 0) {
                    r.tet = t;
                    r.face = f;
                    r.vertex_map = rev ? compose_perm(kMirror, g.vertex_map) : g.vertex_map;
                } else {
                    r.tet = t + n;
                    r.face = kMirror[f];
                    r.vertex_map = rev ? compose_perm(g.vertex_map, kMirror)
                                       : compose_perm(kMirror, compose_perm(g.vertex_map, kMirror));
                }
                int dst_sheet = rev ? (1 - sheet) : sheet;
                r.to_tet = g.to_tet + (dst_sheet == 1 ? n : 0);
                r.to_face = dst_sheet == 1 ? kMirror[g.to_face] : g.to_face;
                records.push_back(r);
            }
        }

    // locate the lifted cusps: vertex (t, v) of the base sits in the cover as
    // (t, v) on sheet 0 and (t + n, mirror(v)) on sheet 1
    Triangulation plain("", n * 2, records);
    auto cover_cusp_of = [&](int t, int v) {
        for (size_t k = 0; k < plain.cusps().size(); ++k)
            for (const auto& corner : plain.cusps()[k].corners)
                if (corner == std::make_pair(t, v)) return static_cast<int>(k);
        throw ValidationError("cover cusp lookup failed");
    };

    std::vector<CuspData> cover_info(plain.cusps().size());
    for (const CuspLink& cusp : tri.cusps()) {
        auto [t, v] = cusp.corners.front();
        if (!cusp.orientable) {
            CuspData& data = cover_info[cover_cusp_of(t, v)];
            data.name = cusp.name;
            for (const auto& [label, word] : cusp.curves) data.curves[label] = lift_word(word, n);
        } else {
            cover_info[cover_cusp_of(t, v)].name = cusp.name + ".0";
            cover_info[cover_cusp_of(t + n, kMirror[v])].name = cusp.name + ".1";
        }
    }

    OrientationCover result{
        Triangulation(tri.name().empty() ? "" : tri.name() + ".cover", n * 2, std::move(records),
                      std::move(cover_info)),
        {}};
    result.partner.resize(static_cast<size_t>(n) * 2);
    for (int i = 0; i < 2 * n; ++i) result.partner[i] = (i + n) % (2 * n);
    return result;
}

std::vector<cx> involution_on_shapes(const std::vector<cx>& shapes,
                                     const std::vector<int>& partner) {
    if (shapes.size() != partner.size())
        throw ValidationError("shape count does not match the cover correspondence");
    std::vector<cx> out(shapes.size());
    for (size_t i = 0; i < shapes.size(); ++i) {
        cx z = shapes[partner[i]];
        if (std::abs(z) == 0.0) throw DegenerateShapeError("cannot invert a zero shape");
        out[i] = 1.0 / std::conj(z);
    }
    return out;
}

}  // namespace cuspforge
