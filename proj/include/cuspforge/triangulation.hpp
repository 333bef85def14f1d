#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cuspforge/geometry.hpp"

namespace cuspforge {

struct ParseError : Error {
    using Error::Error;
};

// One factor of a peripheral holonomy derivative: the edge invariant of the
// given class at the given tetrahedron, conjugated first when flagged, raised
// to +-1.  Edge classes select z, 1/(1-z), (z-1)/z in this order.
struct WordFactor {
    int tet = 0;
    int edge_class = 0;
    int exponent = +1;
    bool conjugated = false;
};

using HolonomyWord = std::vector<WordFactor>;

// as read from a document: one directed half of a face identification
struct GluingRecord {
    int tet = 0;
    int face = 0;
    int to_tet = 0;
    int to_face = 0;
    std::array<int, 4> vertex_map{0, 1, 2, 3};
};

struct FaceGluing {
    int to_tet = -1;
    int to_face = -1;
    std::array<int, 4> vertex_map{};
};

// one slot of an edge cycle; eps == 1 keeps the invariant, eps == 0 means the
// propagated orientation disagrees and the invariant enters conjugated
struct CycleStep {
    int tet;
    int edge_class;
    int eps;
};

struct EdgeCycle {
    std::vector<CycleStep> steps;
};

// peripheral-curve declarations supplied with a document
struct CuspData {
    std::string name;
    std::map<std::string, HolonomyWord> curves;
};

// a cusp cross-section: the link surface triangulated by one triangle per
// tetrahedron-vertex incidence
struct CuspLink {
    std::string name;
    std::vector<std::pair<int, int>> corners;  // (tet, vertex), sorted
    bool orientable = false;
    int euler_characteristic = 0;
    std::map<std::string, HolonomyWord> curves;
};

// The six edges of a tetrahedron fall in three opposite-edge classes.  With
// vertices (v0,v1,v2,v3) placed at (0,1,inf,z), class 0 = {v0v2, v1v3} carries
// the invariant z, class 1 = {v1v2, v0v3} carries 1/(1-z), and class 2 =
// {v2v3, v0v1} carries (z-1)/z.
int edge_class_of(int v0, int v1);

bool permutation_is_even(const std::array<int, 4>& perm);

// A face pairing reverses orientation exactly when its vertex bijection is an
// even permutation of the labels.  (A reflection through a shared face is the
// identity bijection; gluing two coherently oriented tetrahedra needs one
// extra swap on the face, which is odd.)
bool reverses_orientation(const std::array<int, 4>& vertex_map);

class Triangulation {
public:
    // validates all structural invariants and computes the derived data
    // (edge cycles, cusp links, orientability); throws ValidationError
    Triangulation(std::string name, int tetrahedra,
                  std::vector<GluingRecord> records,
                  std::vector<CuspData> cusp_info = {});

    const std::string& name() const { return name_; }
    int size() const { return n_; }
    const FaceGluing& gluing(int tet, int face) const;
    const std::vector<EdgeCycle>& edge_cycles() const { return cycles_; }
    const std::vector<CuspLink>& cusps() const { return cusps_; }
    bool orientable() const { return orientable_; }

private:
    std::string name_;
    int n_ = 0;
    std::vector<FaceGluing> gluings_;  // indexed tet * 4 + face
    std::vector<EdgeCycle> cycles_;
    std::vector<CuspLink> cusps_;
    bool orientable_ = false;

    void compute_edge_cycles();
    void compute_cusp_links(std::vector<CuspData> cusp_info);
    void compute_orientability();
};

Triangulation load_triangulation(std::istream& in);
Triangulation load_triangulation(const std::string& text);

// canonical document form; load followed by serialize is idempotent
std::string serialize(const Triangulation& tri);

struct OrientationCover {
    Triangulation cover;
    std::vector<int> partner;  // deck involution on tetrahedron indices
};

// The orientation double cover: a relabeled mirror copy of every tetrahedron,
// with face pairings rerouted so that all of them preserve orientation.
// Peripheral words of non-orientable cusps are lifted to the single covering
// torus cusp; orientable cusps lift to two cusps without curve data.
OrientationCover orientation_double_cover(const Triangulation& tri);

// deck action on shape assignments of the cover: out[i] = 1/conj(in[partner[i]])
std::vector<cx> involution_on_shapes(const std::vector<cx>& shapes,
                                     const std::vector<int>& partner);

}  // namespace cuspforge
