#include "khovfun/diagram.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>

namespace khovfun {

int Diagram::arc_index(int arc) const {
    auto it = std::lower_bound(geo.arc_ids.begin(), geo.arc_ids.end(), arc);
    if (it == geo.arc_ids.end() || *it != arc) throw DiagramError("unknown arc " + std::to_string(arc));
    return int(it - geo.arc_ids.begin());
}

int Diagram::crossing_bit(int crossing) const {
    auto it = std::lower_bound(geo.crossing_ids.begin(), geo.crossing_ids.end(), crossing);
    if (it == geo.crossing_ids.end() || *it != crossing) throw DiagramError("unknown crossing");
    return int(it - geo.crossing_ids.begin());
}

int Diagram::face_of(int arc, Side side) const {
    return geo.face_of_dart[dart(arc, side == Side::Left)];
}

void Diagram::validate() {
    geo = Geo{};
    for (auto& [id, c] : crossings) geo.crossing_ids.push_back(id);
    for (auto& [id, a] : arcs) geo.arc_ids.push_back(id);

    // half-edge tables
    for (auto& [cid, c] : crossings)
        for (int k = 0; k < 4; ++k) {
            if (!geo.half_pos.emplace(c.half[k], std::make_pair(cid, k)).second)
                throw SyntaxError("half-edge " + std::to_string(c.half[k]) + " appears twice");
        }
    for (auto& [aid, a] : arcs) {
        for (int end = 0; end < 2; ++end) {
            int h = end ? a.to : a.from;
            if (!geo.half_pos.count(h)) throw SyntaxError("arc endpoint " + std::to_string(h) + " is not a half-edge");
            if (!geo.half_arc.emplace(h, std::make_pair(aid, end)).second)
                throw SyntaxError("half-edge " + std::to_string(h) + " used by two arc ends");
        }
    }
    for (auto& [h, cp] : geo.half_pos)
        if (!geo.half_arc.count(h)) throw SyntaxError("half-edge " + std::to_string(h) + " has no arc");
    if (crossings.empty() && !arcs.empty()) throw SyntaxError("arcs without crossings");

    // components of the arc part: follow strands through crossings
    std::map<int, int> arc_comp_found;  // arc -> cycle index
    std::vector<std::vector<std::pair<int, bool>>> cycles;
    for (auto& [aid0, a0] : arcs) {
        if (arc_comp_found.count(aid0)) continue;
        std::vector<std::pair<int, bool>> cyc;
        int aid = aid0;
        bool dir = true;
        while (true) {
            cyc.push_back({aid, dir});
            arc_comp_found[aid] = int(cycles.size());
            const ArcRec& a = arcs.at(aid);
            int head = dir ? a.to : a.from;
            auto [cid, slot] = geo.half_pos.at(head);
            int h2 = crossings.at(cid).half[(slot + 2) % 4];
            auto [a2, end2] = geo.half_arc.at(h2);
            bool dir2 = (end2 == 0);
            if (a2 == aid0 && dir2) break;
            aid = a2;
            dir = dir2;
            if (cyc.size() > 2 * arcs.size()) throw SyntaxError("strand walk does not close");
        }
        cycles.push_back(std::move(cyc));
    }

    // match declared component ids against computed cycles
    std::map<int, int> declared_to_cycle;
    for (auto& [aid, a] : arcs) {
        int cyc = arc_comp_found.at(aid);
        auto it = declared_to_cycle.find(a.comp);
        if (it == declared_to_cycle.end())
            declared_to_cycle[a.comp] = cyc;
        else if (it->second != cyc)
            throw OrientationMismatch("component " + std::to_string(a.comp) + " is not a single strand cycle");
    }
    {
        std::set<int> used;
        for (auto& [decl, cyc] : declared_to_cycle)
            if (!used.insert(cyc).second) throw OrientationMismatch("two component ids name one cycle");
        if (declared_to_cycle.size() != cycles.size())
            throw OrientationMismatch("component labels do not cover all cycles");
    }
    for (auto& [lid, l] : loops)
        if (declared_to_cycle.count(l.comp)) throw SyntaxError("loop component id reused by arcs");

    // orientation: propagate around each cycle from its orient record
    for (auto& [decl, cyc] : declared_to_cycle) {
        auto it = orient.find(decl);
        if (it == orient.end()) throw OrientationMismatch("component " + std::to_string(decl) + " not oriented");
        const OrientRec& orec = it->second;
        if (orec.is_loop) throw OrientationMismatch("arc component oriented by a loop record");
        auto& cy = cycles[cyc];
        int pos = -1;
        for (int i = 0; i < int(cy.size()); ++i)
            if (cy[i].first == orec.ref) pos = i;
        if (pos < 0) throw OrientationMismatch("orient arc not in component");
        bool agree = (cy[pos].second == orec.dir);
        for (auto& [aid, dd] : cy) geo.arc_forward[aid] = agree ? dd : !dd;
    }
    for (auto& [lid, l] : loops) {
        auto it = orient.find(l.comp);
        if (it == orient.end() || !it->second.is_loop || it->second.ref != lid)
            throw OrientationMismatch("loop " + std::to_string(lid) + " not oriented");
    }

    // component tables, sorted by declared id
    {
        std::vector<std::pair<int, int>> decl;
        for (auto& [dd, cyc] : declared_to_cycle) decl.push_back({dd, cyc});
        for (auto& [lid, l] : loops) decl.push_back({l.comp, -1 - lid});
        std::sort(decl.begin(), decl.end());
        for (int i = 0; i < int(decl.size()); ++i) {
            geo.comp_ids.push_back(decl[i].first);
            geo.comp_index[decl[i].first] = i;
            if (decl[i].second >= 0) {
                geo.comp_is_loop.push_back(false);
                geo.comp_loop.push_back(0);
                std::vector<int> as;
                for (auto& [aid, dd] : cycles[decl[i].second]) as.push_back(aid);
                geo.comp_arcs.push_back(std::move(as));
            } else {
                geo.comp_is_loop.push_back(true);
                geo.comp_loop.push_back(-1 - decl[i].second);
                geo.comp_arcs.push_back({});
            }
        }
    }

    // the crossing graph must be connected; extra components are loops
    if (!crossings.empty() && !lax) {
        std::map<int, int> uf;
        for (auto& [cid, c] : crossings) uf[cid] = cid;
        std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
        for (auto& [aid, a] : arcs) {
            int c1 = geo.half_pos.at(a.from).first, c2 = geo.half_pos.at(a.to).first;
            uf[find(c1)] = find(c2);
        }
        int root = find(crossings.begin()->first);
        for (auto& [cid, c] : crossings)
            if (find(cid) != root)
                throw NonPlanar("crossing graph must be connected (put extra components in loops)");
    }

    // faces of the arc diagram
    int ndarts = 2 * int(geo.arc_ids.size());
    geo.face_of_dart.assign(ndarts, -1);
    auto next_dart = [&](int dartid) {
        int ai = dartid / 2;
        bool dir = (dartid % 2) == 0;
        const ArcRec& a = arcs.at(geo.arc_ids[ai]);
        int head = dir ? a.to : a.from;
        auto [cid, slot] = geo.half_pos.at(head);
        int h2 = crossings.at(cid).half[(slot + 3) % 4];
        auto [a2, end2] = geo.half_arc.at(h2);
        bool dir2 = (end2 == 0);
        return 2 * arc_index(a2) + (dir2 ? 0 : 1);
    };
    for (int d0 = 0; d0 < ndarts; ++d0) {
        if (geo.face_of_dart[d0] >= 0) continue;
        int f = geo.nfaces++;
        int dd = d0;
        do {
            geo.face_of_dart[dd] = f;
            dd = next_dart(dd);
        } while (dd != d0);
    }
    if (!crossings.empty()) {
        long V = long(crossings.size()), E = long(arcs.size()), F = geo.nfaces;
        if (V - E + F != 2 && !lax) throw NonPlanar("Euler check failed: V-E+F = " + std::to_string(V - E + F));
        if (!outer && !lax) throw SyntaxError("missing outer face witness");
        geo.outer_face = outer && arcs.count(outer->first) ? face_of(outer->first, outer->second) : 0;
    } else {
        geo.nfaces = 1;
        geo.outer_face = 0;
    }

    // winding numbers by BFS over face adjacency
    geo.winding.assign(geo.nfaces, INT32_MIN);
    geo.winding[geo.outer_face] = 0;
    {
        std::vector<std::vector<std::pair<int, int>>> adj(geo.nfaces);
        for (int ai = 0; ai < int(geo.arc_ids.size()); ++ai) {
            int aid = geo.arc_ids[ai];
            bool fwd = geo.arc_forward.at(aid);
            int dl = 2 * ai + (fwd ? 0 : 1);
            int dr = 2 * ai + (fwd ? 1 : 0);
            int fl = geo.face_of_dart[dl], fr = geo.face_of_dart[dr];
            adj[fl].push_back({fr, -1});
            adj[fr].push_back({fl, +1});
        }
        std::queue<int> q;
        q.push(geo.outer_face);
        bool bad = false;
        while (!q.empty()) {
            int f = q.front();
            q.pop();
            for (auto& [g, dw] : adj[f]) {
                int w = geo.winding[f] + dw;
                if (geo.winding[g] == INT32_MIN) {
                    geo.winding[g] = w;
                    q.push(g);
                } else if (geo.winding[g] != w) {
                    if (!lax) throw NonPlanar("winding numbers are inconsistent");
                    bad = true;
                }
            }
        }
        for (int f = 0; f < geo.nfaces; ++f)
            if (geo.winding[f] == INT32_MIN) {
                if (!lax) throw NonPlanar("face not reachable in winding BFS");
                geo.winding[f] = 0;
            }
        if (bad) std::fill(geo.winding.begin(), geo.winding.end(), 0);
    }

    // loops: resolve hosts, windings just inside
    for (auto& [lid, l] : loops) {
        int base = 0;
        if (!l.host.outer && !arcs.count(l.host.arc)) {
            if (!lax) throw SyntaxError("loop host references a missing arc");
        } else {
            base = l.host.outer ? geo.outer_face : face_of(l.host.arc, l.host.side);
        }
        geo.loop_base_face[lid] = base;
        int w = geo.winding[base];
        const std::vector<int>& chain = l.host.loop_chain;
        for (size_t i = 0; i < chain.size(); ++i) {
            auto pit = loops.find(chain[i]);
            if (pit == loops.end()) throw SyntaxError("loop chain references unknown loop");
            const LoopRec& pl = pit->second;
            int pbase = pl.host.outer || !arcs.count(pl.host.arc) ? geo.outer_face
                                                                    : face_of(pl.host.arc, pl.host.side);
            if (pbase != base && !lax) throw SyntaxError("loop chain crosses faces");
            std::vector<int> expect(chain.begin(), chain.begin() + i);
            if (pl.host.loop_chain != expect && !lax) throw SyntaxError("inconsistent loop nesting chain");
            bool ccw = orient.at(pl.comp).dir;
            w += ccw ? 1 : -1;
        }
        bool ccw = orient.at(l.comp).dir;
        geo.loop_inside_winding[lid] = w + (ccw ? 1 : -1);
    }

    // crossing signs and D-signs (meaningless in lax mode)
    if (lax) return;
    for (auto& [cid, c] : crossings) {
        auto incoming_at = [&](int slot) {
            auto [aid, end] = geo.half_arc.at(c.half[slot]);
            bool fwd = geo.arc_forward.at(aid);
            return (end == 1) == fwd;  // the oriented arc's head equals this half
        };
        int overExit = -1, underExit = -1;
        for (int k = 0; k < 4; ++k) {
            bool over = (k % 2) == (c.over % 2);
            if (!incoming_at(k)) {
                int& ex = over ? overExit : underExit;
                if (ex >= 0) throw OrientationMismatch("strand has two exits at a crossing");
                ex = k;
            }
        }
        if (overExit < 0 || underExit < 0) throw OrientationMismatch("strand orientation inconsistent at crossing");
        geo.cross_sign[cid] = (underExit == (overExit + 1) % 4) ? +1 : -1;

        int vmin = INT32_MAX, vmax = INT32_MIN;
        for (int k = 0; k < 4; ++k) {
            // quadrant between slots k and k+1 = face left of the dart arriving at slot k+1
            auto [aid, end] = geo.half_arc.at(c.half[(k + 1) % 4]);
            int dartArr = 2 * arc_index(aid) + (end == 1 ? 0 : 1);
            int w = geo.winding[geo.face_of_dart[dartArr]];
            vmin = std::min(vmin, w);
            vmax = std::max(vmax, w);
        }
        if (vmax - vmin != 2) throw NonPlanar("quadrant windings are not n-1,n,n+1 at a crossing");
        int nn = (vmin + vmax) / 2;
        geo.d_sign[cid] = (nn % 2 == 0) ? +1 : -1;
    }
}

int Diagram::d_sign_of_point(const Pt& p, Side side) const {
    int w;
    if (!p.on_loop) {
        w = geo.winding[face_of(p.id, side)];
    } else {
        bool ccw = orient.at(loops.at(p.id).comp).dir;
        bool inside = (side == Side::Left) == ccw;
        int win = geo.loop_inside_winding.at(p.id);
        w = inside ? win : win - (ccw ? 1 : -1);
    }
    return (((w % 2) + 2) % 2 == 0) ? 1 : -1;
}

int Diagram::winding_left_of(const Pt& p) const {
    if (!p.on_loop) {
        bool fwd = geo.arc_forward.at(p.id);
        return geo.winding[face_of(p.id, fwd ? Side::Left : Side::Right)];
    }
    bool ccw = orient.at(loops.at(p.id).comp).dir;
    int win = geo.loop_inside_winding.at(p.id);
    return ccw ? win : win - (ccw ? 1 : -1);
}

int Diagram::writhe() const {
    int w = 0;
    for (auto& [cid, s] : geo.cross_sign) w += s;
    return w;
}

int Diagram::component_of(const Pt& p) const {
    if (p.on_loop) return geo.comp_index.at(loops.at(p.id).comp);
    return geo.comp_index.at(arcs.at(p.id).comp);
}

State Diagram::oriented_state() const {
    // x -> sign(x): s(x) = +1 at positive crossings, -1 at negative ones
    State s = 0;
    for (int i = 0; i < n(); ++i)
        if (crossing_sign(geo.crossing_ids[i]) < 0) s |= (State(1) << i);
    return s;
}

Resolution Diagram::resolve(State s) const {
    Resolution r;
    r.d = this;
    r.s = s;
    for (int i = 0; i < n(); ++i) {
        int cid = geo.crossing_ids[i];
        const CrossingRec& c = crossings.at(cid);
        int o = c.over % 2;
        bool plus = ((s >> i) & 1) == 0;
        std::array<int, 4> pr{};
        auto setpair = [&](int a, int b) {
            pr[a] = b;
            pr[b] = a;
        };
        if (plus) {  // over slots pair with their clockwise neighbors
            setpair(o, (o + 3) % 4);
            setpair((o + 2) % 4, (o + 1) % 4);
        } else {
            setpair(o, (o + 1) % 4);
            setpair((o + 2) % 4, (o + 3) % 4);
        }
        r.pair_at[cid] = pr;
    }
    std::set<int> used;
    for (auto& [aid0, a0] : arcs) {
        if (used.count(aid0)) continue;
        Circle c;
        int aid = aid0;
        bool dir = true;
        while (true) {
            c.arcs.push_back({aid, dir});
            used.insert(aid);
            const ArcRec& a = arcs.at(aid);
            int head = dir ? a.to : a.from;
            auto [cid, slot] = geo.half_pos.at(head);
            int ps = r.pair_at.at(cid)[slot];
            int h2 = crossings.at(cid).half[ps];
            auto [a2, end2] = geo.half_arc.at(h2);
            dir = (end2 == 0);
            aid = a2;
            if (aid == aid0 && dir) break;
            if (c.arcs.size() > arcs.size()) throw DiagramError("resolution trace failed");
        }
        r.circles.push_back(std::move(c));
    }
    for (auto& [lid, l] : loops) {
        Circle c;
        c.is_loop = true;
        c.loop = lid;
        r.circles.push_back(std::move(c));
    }
    std::sort(r.circles.begin(), r.circles.end(), [](const Circle& a, const Circle& b) { return a.canonical_lt(b); });
    for (int i = 0; i < int(r.circles.size()); ++i) {
        if (r.circles[i].is_loop)
            r.circle_of_loop[r.circles[i].loop] = i;
        else
            for (auto& [aid, dd] : r.circles[i].arcs) r.circle_of_arc[aid] = i;
    }
    return r;
}

// ---------------------------------------------------------------- windings

namespace {

// Per-face winding of a set of oriented arcs, outer face = 0. Arcs missing
// from the map contribute nothing.
std::vector<int> face_winding(const Diagram& d, const std::map<int, bool>& arc_dirs) {
    const auto& geo = d.geo;
    std::vector<int> w(std::max(geo.nfaces, 1), 0);
    if (geo.arc_ids.empty()) return w;
    std::fill(w.begin(), w.end(), INT32_MIN);
    w[geo.outer_face] = 0;
    std::vector<std::vector<std::pair<int, int>>> adj(geo.nfaces);
    for (int ai = 0; ai < int(geo.arc_ids.size()); ++ai) {
        int aid = geo.arc_ids[ai];
        int fl = geo.face_of_dart[2 * ai], fr = geo.face_of_dart[2 * ai + 1];
        auto it = arc_dirs.find(aid);
        int delta = 0;
        if (it != arc_dirs.end()) delta = it->second ? 1 : -1;
        // winding is larger by delta on the left of the from->to dart
        adj[fl].push_back({fr, -delta});
        adj[fr].push_back({fl, +delta});
    }
    std::queue<int> q;
    q.push(geo.outer_face);
    while (!q.empty()) {
        int f = q.front();
        q.pop();
        for (auto& [g, dw] : adj[f]) {
            int v = w[f] + dw;
            if (w[g] == INT32_MIN) {
                w[g] = v;
                q.push(g);
            } else if (w[g] != v) {
                throw NonPlanar("winding BFS inconsistent");
            }
        }
    }
    return w;
}

}  // namespace

std::vector<int> Resolution::winding_of_circle(int ci) const {
    const Circle& c = circles[ci];
    std::map<int, bool> dirs;
    if (!c.is_loop)
        for (auto& [aid, dir] : c.arcs) dirs[aid] = dir;
    return face_winding(*d, dirs);
}

bool Resolution::circle_contains(int outer_ci, int inner_ci) const {
    if (outer_ci == inner_ci) return false;
    const Circle& out = circles[outer_ci];
    const Circle& in = circles[inner_ci];
    if (out.is_loop) {
        if (!in.is_loop) return false;
        const auto& chain = d->loops.at(in.loop).host.loop_chain;
        return std::find(chain.begin(), chain.end(), out.loop) != chain.end();
    }
    int sampleFace;
    if (in.is_loop)
        sampleFace = d->geo.loop_base_face.at(in.loop);
    else
        sampleFace = d->geo.face_of_dart[d->dart(in.arcs[0].first, in.arcs[0].second)];
    auto w = winding_of_circle(outer_ci);
    return w[sampleFace] != 0;
}

int Resolution::depth_of(int ci) const {
    int depth = 0;
    for (int j = 0; j < num_circles(); ++j)
        if (j != ci && circle_contains(j, ci)) ++depth;
    return depth;
}

bool Resolution::trace_is_ccw(int ci) const {
    const Circle& c = circles[ci];
    if (c.is_loop) return d->orient.at(d->loops.at(c.loop).comp).dir;
    auto w = winding_of_circle(ci);
    int fl = d->geo.face_of_dart[d->dart(c.arcs[0].first, c.arcs[0].second)];
    int fr = d->geo.face_of_dart[d->dart(c.arcs[0].first, !c.arcs[0].second)];
    if (w[fl] != 0) return w[fl] > 0;
    return w[fr] > 0;
}

std::vector<int> Resolution::winding_trace() const {
    std::map<int, bool> dirs;
    for (auto& c : circles)
        for (auto& [aid, dir] : c.arcs) dirs[aid] = dir;
    return face_winding(*d, dirs);
}

int Resolution::winding_left_of_circle(int ci) const {
    // Uses the diagram orientation; every circle must be traversal-compatible.
    std::map<int, bool> dirs;
    for (int j = 0; j < num_circles(); ++j) {
        const Circle& c = circles[j];
        if (c.is_loop) continue;
        bool agree = (c.arcs[0].second == d->geo.arc_forward.at(c.arcs[0].first));
        for (auto& [aid, dir] : c.arcs) {
            if ((dir == d->geo.arc_forward.at(aid)) != agree)
                throw DiagramError("resolution is not orientation-compatible");
            dirs[aid] = d->geo.arc_forward.at(aid);
        }
    }
    std::vector<int> w = face_winding(*d, dirs);
    const Circle& c = circles[ci];
    if (!c.is_loop) {
        int aid = c.arcs[0].first;
        bool f = d->geo.arc_forward.at(aid);
        return w[d->geo.face_of_dart[d->dart(aid, f)]];
    }
    // loop circle: winding of arcs over its base face plus containing loops,
    // plus itself when its left side is its inside
    int base = w[d->geo.loop_base_face.at(c.loop)];
    for (int anc : d->loops.at(c.loop).host.loop_chain)
        base += d->orient.at(d->loops.at(anc).comp).dir ? 1 : -1;
    bool ccw = d->orient.at(d->loops.at(c.loop).comp).dir;
    // left of a ccw loop is its inside (one extra turn), left of a cw loop is outside
    return base + (ccw ? 1 : 0);
}

SurgeryInfo surgery_info(const Resolution& from, const Resolution& to, int crossing) {
    SurgeryInfo info;
    const Diagram& d = *from.d;
    const CrossingRec& c = d.crossings.at(crossing);
    auto circleAtSlot = [&](const Resolution& r, int slot) {
        auto [aid, end] = d.geo.half_arc.at(c.half[slot]);
        return r.circle_of_arc.at(aid);
    };
    int mate0 = from.pair_at.at(crossing)[0];
    int other = -1;
    for (int k = 1; k < 4; ++k)
        if (k != mate0) {
            other = k;
            break;
        }
    info.src_a = circleAtSlot(from, 0);
    info.src_b = circleAtSlot(from, other);
    info.tgt_a = circleAtSlot(to, 0);
    int to_other = -1;
    for (int k = 1; k < 4; ++k)
        if (k != to.pair_at.at(crossing)[0]) {
            to_other = k;
            break;
        }
    info.tgt_b = circleAtSlot(to, to_other);
    info.split = (info.src_a == info.src_b);
    if (!info.split && info.tgt_a != info.tgt_b) throw DiagramError("surgery did not merge or split");
    if (info.split && info.tgt_a == info.tgt_b) throw DiagramError("split produced one circle");
    info.match_src_to_tgt.assign(from.num_circles(), -1);
    std::map<std::pair<int, int>, int> key_to_tgt;
    for (int j = 0; j < to.num_circles(); ++j) {
        const Circle& tc = to.circles[j];
        key_to_tgt[{tc.is_loop ? 1 : 0, tc.min_key()}] = j;
    }
    for (int i = 0; i < from.num_circles(); ++i) {
        if (i == info.src_a || i == info.src_b) continue;
        const Circle& fc = from.circles[i];
        auto it = key_to_tgt.find({fc.is_loop ? 1 : 0, fc.min_key()});
        if (it == key_to_tgt.end()) throw DiagramError("circle matching failed");
        info.match_src_to_tgt[i] = it->second;
    }
    return info;
}

// ---------------------------------------------------------------- text I/O

namespace {

std::string side_str(Side s) { return s == Side::Left ? "left" : "right"; }
Side parse_side(const std::string& s) {
    if (s == "left") return Side::Left;
    if (s == "right") return Side::Right;
    throw SyntaxError("bad side '" + s + "'");
}

std::string faceref_str(const FaceRef& f) {
    std::ostringstream os;
    if (f.outer)
        os << "outer";
    else
        os << "arc:" << f.arc << ":" << side_str(f.side);
    for (int l : f.loop_chain) os << ",loop:" << l;
    return os.str();
}

FaceRef parse_faceref(const std::string& s) {
    FaceRef f;
    std::stringstream ss(s);
    std::string tok;
    bool first = true;
    while (std::getline(ss, tok, ',')) {
        if (first) {
            first = false;
            if (tok == "outer") {
                f.outer = true;
            } else if (tok.rfind("arc:", 0) == 0) {
                f.outer = false;
                auto rest = tok.substr(4);
                auto colon = rest.find(':');
                if (colon == std::string::npos) throw SyntaxError("bad face ref " + tok);
                f.arc = std::stoi(rest.substr(0, colon));
                f.side = parse_side(rest.substr(colon + 1));
            } else {
                throw SyntaxError("bad face ref " + tok);
            }
        } else {
            if (tok.rfind("loop:", 0) != 0) throw SyntaxError("bad loop chain " + tok);
            f.loop_chain.push_back(std::stoi(tok.substr(5)));
        }
    }
    if (first) throw SyntaxError("empty face ref");
    return f;
}

}  // namespace

std::string Diagram::serialize() const {
    std::ostringstream os;
    os << "diagram " << name << "\n";
    for (auto& [id, c] : crossings)
        os << "crossing " << id << " " << c.half[0] << " " << c.half[1] << " " << c.half[2] << " " << c.half[3]
           << " over=" << c.over << "\n";
    for (auto& [id, a] : arcs)
        os << "arc " << id << " " << a.from << " " << a.to << " component=" << a.comp << "\n";
    for (auto& [id, l] : loops)
        os << "loop " << id << " component=" << l.comp << " inside=" << faceref_str(l.host) << "\n";
    for (auto& [cid, o] : orient) {
        os << "orient " << cid << " " << (o.is_loop ? "loop:" : "arc:") << o.ref << " ";
        if (o.is_loop)
            os << (o.dir ? "ccw" : "cw");
        else
            os << (o.dir ? "fwd" : "rev");
        os << "\n";
    }
    if (outer) os << "outer arc:" << outer->first << " " << side_str(outer->second) << "\n";
    return os.str();
}

Diagram Diagram::parse(const std::string& text) {
    Diagram d;
    std::istringstream in(text);
    std::string line;
    int maxid = 0;
    bool sawName = false;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw SyntaxError("line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw[0] == '#') continue;
        if (kw == "diagram") {
            if (!(ls >> d.name)) fail("diagram needs a name");
            sawName = true;
        } else if (kw == "crossing") {
            int id;
            CrossingRec c;
            std::string overs;
            if (!(ls >> id >> c.half[0] >> c.half[1] >> c.half[2] >> c.half[3] >> overs)) fail("bad crossing line");
            if (overs.rfind("over=", 0) != 0) fail("crossing needs over=");
            c.over = std::stoi(overs.substr(5));
            if (c.over != 0 && c.over != 1) fail("over must be 0 or 1");
            if (!d.crossings.emplace(id, c).second) fail("duplicate crossing id");
            maxid = std::max({maxid, id, c.half[0], c.half[1], c.half[2], c.half[3]});
        } else if (kw == "arc") {
            int id;
            ArcRec a;
            std::string comps;
            if (!(ls >> id >> a.from >> a.to >> comps)) fail("bad arc line");
            if (comps.rfind("component=", 0) != 0) fail("arc needs component=");
            a.comp = std::stoi(comps.substr(10));
            if (!d.arcs.emplace(id, a).second) fail("duplicate arc id");
            maxid = std::max({maxid, id, a.comp});
        } else if (kw == "loop") {
            int id;
            std::string comps, insides;
            if (!(ls >> id >> comps >> insides)) fail("bad loop line");
            if (comps.rfind("component=", 0) != 0) fail("loop needs component=");
            if (insides.rfind("inside=", 0) != 0) fail("loop needs inside=");
            LoopRec l;
            l.comp = std::stoi(comps.substr(10));
            l.host = parse_faceref(insides.substr(7));
            if (!d.loops.emplace(id, l).second) fail("duplicate loop id");
            maxid = std::max({maxid, id, l.comp});
        } else if (kw == "orient") {
            int cid;
            std::string ref, dir;
            if (!(ls >> cid >> ref >> dir)) fail("bad orient line");
            OrientRec o;
            if (ref.rfind("arc:", 0) == 0) {
                o.is_loop = false;
                o.ref = std::stoi(ref.substr(4));
            } else if (ref.rfind("loop:", 0) == 0) {
                o.is_loop = true;
                o.ref = std::stoi(ref.substr(5));
            } else {
                fail("orient needs arc:<id> or loop:<id>");
            }
            if (dir == "fwd" || dir == "ccw")
                o.dir = true;
            else if (dir == "rev" || dir == "cw")
                o.dir = false;
            else
                fail("bad direction '" + dir + "'");
            if (!d.orient.emplace(cid, o).second) fail("duplicate orient for component");
        } else if (kw == "outer") {
            std::string ref, side;
            if (!(ls >> ref >> side)) fail("bad outer line");
            if (ref.rfind("arc:", 0) != 0) fail("outer needs arc:<id>");
            d.outer = {std::stoi(ref.substr(4)), parse_side(side)};
        } else {
            fail("unknown keyword '" + kw + "'");
        }
    }
    if (!sawName) throw SyntaxError("missing 'diagram <name>' header");
    d.next_id = maxid + 1;
    d.validate();
    return d;
}

bool Diagram::structurally_equal(const Diagram& o) const {
    if (crossings.size() != o.crossings.size() || arcs.size() != o.arcs.size() || loops.size() != o.loops.size())
        return false;
    for (auto& [id, c] : crossings) {
        auto it = o.crossings.find(id);
        if (it == o.crossings.end() || it->second.half != c.half || it->second.over != c.over) return false;
    }
    for (auto& [id, a] : arcs) {
        auto it = o.arcs.find(id);
        if (it == o.arcs.end() || it->second.from != a.from || it->second.to != a.to) return false;
    }
    for (auto& [id, l] : loops) {
        auto it = o.loops.find(id);
        if (it == o.loops.end() || it->second.host != l.host) return false;
    }
    return true;
}

}  // namespace khovfun
