#pragma once

#include "khovfun/diagram.hpp"

namespace khovfun {

// Position on an arc (t in (0,1) along from->to) or on a loop (cyclic
// parameter increasing in the ccw direction).
struct PtPos {
    Pt pt;
    Rat t = Rat(1, 2);
};

// How an interval of an old edge maps into the new diagram.
struct Piece {
    bool to_loop = false;
    int id = 0;          // new arc or loop id
    Rat src0, src1;      // interval on the old edge
    Rat dst0, dst1;      // image interval (dst0 > dst1 encodes reversal)
};

struct Lineage {
    std::map<int, std::vector<Piece>> arc;
    std::map<int, std::vector<Piece>> loop;
    std::map<int, int> crossing;  // old id -> new id; absent = removed

    static Lineage identity(const Diagram& d);
    Lineage then(const Lineage& next) const;
    Lineage reversed() const;
    PtPos map_pt(const PtPos& p) const;
    std::pair<PtPos, Side> map_pt_side(const PtPos& p, Side s) const;
    // any surviving image edge of an old edge (for circle matching)
    std::vector<Pt> images(const Pt& p) const;
};

struct EditResult {
    Diagram d;
    Lineage lin;
    std::map<std::string, int> made;  // named artifacts: "crossing", "looparc", "loop", ...
};

// R3 bookkeeping: new crossing labels, the six boundary points p1..p6 of the
// modification hexagon and the sides their connecting arcs face.
struct R3Result {
    Diagram d;
    Lineage lin;
    int cx = 0, cy = 0, cz = 0;              // crossings x,y,z (ids preserved)
    bool positive = true;                    // chirality of the source configuration
    std::array<PtPos, 7> p{};                // p[1..6]
    std::array<Side, 7> gamma_side_lo{};     // gamma_i runs from p[i-1] (side) ...
    std::array<Side, 7> gamma_side_hi{};     // ... to p[i] (side)
};

// surgery of index 0: add a circle inside a region
EditResult add_loop(const Diagram& d, const FaceRef& host, bool ccw);
// surgery of index 2: remove a crossing-free circle
EditResult remove_loop(const Diagram& d, int loop);
// surgery of index 1 along a band between two marked sides; relax_orientation
// permits unoriented bands (used when surgering resolved diagrams)
EditResult surgery(const Diagram& d, PtPos a, Side sa, PtPos b, Side sb, bool relax_orientation = false);
// Reidemeister I: create a kink at a point; the loop bulges to `side` of the
// from->to direction; over_first: the pass entering the crossing first (along
// from->to) goes over.
EditResult add_kink(const Diagram& d, PtPos at, Side side, bool over_first);
EditResult remove_kink(const Diagram& d, int crossing, int preferred_looparc = -1);
// Reidemeister II: push strand `over` across strand `under`; the named sides
// must face a common region.
EditResult add_r2(const Diagram& d, PtPos over, Side so, PtPos under, Side su);
EditResult remove_r2(const Diagram& d, int x, int y, int use_arc = -1, int use_arc2 = -1);
// Reidemeister III on the triangle face spanned by the three crossings
R3Result apply_r3(const Diagram& d, int c1, int c2, int c3);
// identify the p/gamma data of a triangle without applying the move
R3Result r3_inspect(const Diagram& d, int c1, int c2, int c3);
// replace a crossing by its sign-smoothing (diagram with one crossing less)
EditResult smooth_crossing(const Diagram& d, int x, int sign);

// Orientation-preserving planar isomorphism search seeded by one arc match.
struct DiagramIso {
    std::map<int, std::pair<int, bool>> arcs;  // a -> (a', same direction?)
    std::map<int, int> crossings;
    std::map<int, int> loops;
};
std::optional<DiagramIso> match_diagrams(const Diagram& a, const Diagram& b, int seed_arc_a,
                                         int seed_arc_b, bool same_dir);

// Region (face refined by loop nesting) of a marked side; throws for unplaced
// queries. Used to validate surgery bands.
struct Region {
    int face = 0;
    std::vector<int> chain;
    auto operator<=>(const Region&) const = default;
};
Region region_of(const Diagram& d, const Pt& p, Side side);

// Trace closure of a braid word on n strands (letters +-i for sigma_i^+-1,
// 1-based); strands run upward, closed around the right. Every strand must
// meet a crossing.
struct BraidResult {
    Diagram d;
    std::vector<int> closure_arc;          // per strand position (1-based offset 0)
    std::vector<int> crossing_of_letter;   // crossing id per braid letter
};
BraidResult braid_closure(int strands, const std::vector<int>& word, const std::string& name = "braid");

Diagram loop_diagram(bool ccw, const std::string& name = "unknot0");
Diagram empty_diagram(const std::string& name = "empty");

}  // namespace khovfun
