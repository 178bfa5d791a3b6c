#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "khovfun/ring.hpp"

namespace khovfun {

struct DiagramError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SyntaxError : DiagramError {
    using DiagramError::DiagramError;
};
struct NonPlanar : DiagramError {
    using DiagramError::DiagramError;
};
struct OrientationMismatch : DiagramError {
    using DiagramError::DiagramError;
};

enum class Side : uint8_t { Left, Right };
inline Side flip(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

// A marked point: on an arc or on a crossing-free loop.
struct Pt {
    bool on_loop = false;
    int id = 0;
    auto operator<=>(const Pt&) const = default;
};

struct CrossingRec {
    std::array<int, 4> half{};  // half-edge ids in counterclockwise rotation order
    int over = 0;               // 0: strand (half[0],half[2]) is over; 1: (half[1],half[3])
};

struct ArcRec {
    int from = 0, to = 0;  // half-edge ids
    int comp = 0;
};

// Host region of a crossing-free loop: a base face given by a witness dart
// (or the outer face), refined by a chain of containing loops.
struct FaceRef {
    bool outer = true;
    int arc = 0;
    Side side = Side::Left;
    std::vector<int> loop_chain;  // containing loops, outermost first
    auto operator<=>(const FaceRef&) const = default;
};

struct LoopRec {
    int comp = 0;
    FaceRef host;
};

struct OrientRec {
    bool is_loop = false;
    int ref = 0;   // arc id or loop id
    bool dir = true;  // arc: traversed from->to; loop: counterclockwise
};

// State on a diagram: bit i set <=> crossing_ids()[i] resolved to -1.
using State = uint32_t;

struct Resolution;

struct Diagram {
    std::string name = "d";
    std::map<int, CrossingRec> crossings;
    std::map<int, ArcRec> arcs;
    std::map<int, LoopRec> loops;
    std::map<int, OrientRec> orient;
    std::optional<std::pair<int, Side>> outer;  // witness dart; required when arcs exist
    int next_id = 1;
    // relaxed embedding mode for internal resolved worlds: only the
    // combinatorial circle structure is meaningful (no windings or signs)
    bool lax = false;

    int fresh_id() { return next_id++; }

    // ---- computed geometry (filled by validate)
    struct Geo {
        std::vector<int> crossing_ids;           // sorted
        std::vector<int> arc_ids;                // sorted
        std::map<int, std::pair<int, int>> half_pos;  // half id -> (crossing id, slot)
        std::map<int, std::pair<int, int>> half_arc;  // half id -> (arc id, end 0=from,1=to)
        std::map<int, bool> arc_forward;         // orientation direction per arc
        std::vector<std::vector<int>> comp_arcs; // arcs per component (cyclic order)
        std::map<int, int> comp_index;           // declared comp id -> index
        std::vector<int> comp_ids;               // declared ids, by index
        std::vector<bool> comp_is_loop;
        std::vector<int> comp_loop;              // loop id when loop component
        // faces of the arc diagram
        int nfaces = 0;
        std::vector<int> face_of_dart;  // dart = 2*arcIndex(arc)+dir
        int outer_face = 0;
        std::vector<int> winding;       // per face, of the oriented diagram
        std::map<int, int> loop_inside_winding;  // per loop: winding just inside it
        std::map<int, int> loop_base_face;       // resolved base face per loop
        std::map<int, int> cross_sign;           // oriented crossing sign
        std::map<int, int> d_sign;               // (-1)^n for the middle winding n near x
        std::map<int, int> writhe_cache;
    } geo;

    int arc_index(int arc) const;
    int dart(int arc, bool dir) const { return 2 * arc_index(arc) + (dir ? 0 : 1); }
    int face_of(int arc, Side side) const;  // side relative to the from->to dart
    int n() const { return int(geo.crossing_ids.size()); }
    int crossing_bit(int crossing) const;

    void validate();  // throws SyntaxError/NonPlanar/OrientationMismatch

    // queries (validated diagram)
    bool oriented_forward(int arc) const { return geo.arc_forward.at(arc); }
    int crossing_sign(int x) const { return geo.cross_sign.at(x); }
    int d_sign_of_crossing(int x) const { return geo.d_sign.at(x); }
    int d_sign_of_point(const Pt& p, Side side) const;
    int winding_left_of(const Pt& p) const;  // winding number of D about a point
                                             // just left of p (w.r.t. orientation)
    int writhe() const;
    int num_components() const { return int(geo.comp_ids.size()); }
    int component_of(const Pt& p) const;

    Resolution resolve(State s) const;
    State oriented_state() const;  // x -> sign(x), the orientation-compatible state

    std::string serialize() const;
    static Diagram parse(const std::string& text);

    bool structurally_equal(const Diagram& o) const;  // same ids and records
};

// One circle of a resolved diagram.
struct Circle {
    bool is_loop = false;
    int loop = 0;
    std::vector<std::pair<int, bool>> arcs;  // (arc, dir of traversal) in trace order
    int min_key() const { return is_loop ? loop : arcs[0].first; }
    bool canonical_lt(const Circle& o) const {
        if (is_loop != o.is_loop) return !is_loop;
        return min_key() < o.min_key();
    }
};

struct Resolution {
    const Diagram* d = nullptr;
    State s = 0;
    std::vector<Circle> circles;                // canonical order
    std::map<int, int> circle_of_arc;           // arc -> circle index
    std::map<int, int> circle_of_loop;
    std::map<int, std::array<int, 4>> pair_at;  // crossing -> smoothing pairing (slot -> slot)

    int circle_of(const Pt& p) const { return p.on_loop ? circle_of_loop.at(p.id) : circle_of_arc.at(p.id); }
    int num_circles() const { return int(circles.size()); }

    // winding number of the whole resolved curve (arcs traversed in trace
    // direction) about a face of the ambient diagram
    std::vector<int> winding_trace() const;
    // winding of one circle about each face; +-1 inside, 0 outside
    std::vector<int> winding_of_circle(int ci) const;
    bool circle_contains(int outer_ci, int inner_ci) const;
    int depth_of(int ci) const;
    bool trace_is_ccw(int ci) const;

    // winding of the resolution about a point just left of circle ci
    // (left w.r.t. the trace direction)
    int winding_left_of_circle(int ci) const;
};

// Whether two states differ by one crossing and the surgery merges or splits.
struct SurgeryInfo {
    bool split = false;
    int src_a = 0, src_b = 0;  // circle indices in the source resolution (equal when split)
    int tgt_a = 0, tgt_b = 0;  // circle indices in the target (equal when merge)
    std::vector<int> match_src_to_tgt;  // untouched-circle correspondence (-1 for touched)
};
SurgeryInfo surgery_info(const Resolution& from, const Resolution& to, int crossing);

}  // namespace khovfun
