#include <sstream>

#include "khovfun/movie.hpp"

namespace khovfun {

namespace {

std::shared_ptr<const Diagram> share(Diagram d) { return std::make_shared<Diagram>(std::move(d)); }

// kink with a prescribed crossing sign at a point, trying both passes
Move kink_with_sign(std::shared_ptr<const Diagram> d, PtPos at, Side side, int e) {
    for (bool of : {false, true}) {
        Move m = mk_r1(d, at, side, of);
        if (m.tgt->crossing_sign(m.x) == e) return m;
    }
    throw MovieError("no kink of the requested sign at this point");
}

// all (side, side) combos whose regions agree
std::vector<std::pair<Side, Side>> facing_sides(const Diagram& d, const Pt& a, const Pt& b) {
    std::vector<std::pair<Side, Side>> out;
    for (Side sa : {Side::Left, Side::Right})
        for (Side sb : {Side::Left, Side::Right}) {
            try {
                if (region_of(d, a, sa) == region_of(d, b, sb)) out.push_back({sa, sb});
            } catch (const DiagramError&) {
            }
        }
    return out;
}

}  // namespace

// --------------------------------------------------------------- MVM 0

MovieMoveInstance mvm0(int variant) {
    MovieMoveInstance inst;
    inst.mvm = 0;
    inst.params = "variant=" + std::to_string(variant);
    auto host = share(loop_diagram(true, "mvm0"));
    int lid = host->loops.begin()->first;
    PtPos p1{Pt{true, lid}, Rat(1, 4)}, p2{Pt{true, lid}, Rat(3, 4)};
    if (variant == 0) {
        // two negative kinks at disjoint points (degrees -1 each after removal
        // conventions; here the creations have degree -1 when the kink sign is -)
        Move f = kink_with_sign(host, p1, Side::Left, -1);
        Move g = kink_with_sign(host, p2, Side::Left, -1);
        // f then g' on f's target; g then f' on g's target
        Move gprime = kink_with_sign(f.tgt, f.lin.map_pt(p2), Side::Left, -1);
        Move fprime = kink_with_sign(g.tgt, g.lin.map_pt(p1), Side::Left, -1);
        inst.phi = MovieSequence::start(host);
        inst.phi.push(f);
        inst.phi.push(gprime);
        inst.psi = MovieSequence::start(host);
        inst.psi.push(g);
        inst.psi.push(fprime);
    } else {
        // a negative kink and a circle creation
        Move f = kink_with_sign(host, p1, Side::Left, -1);
        Move g = mk_surg0(host, FaceRef{}, false);
        Move gprime = mk_surg0(f.tgt, FaceRef{}, false);
        Move fprime = kink_with_sign(g.tgt, g.lin.map_pt(p1), Side::Left, -1);
        inst.phi = MovieSequence::start(host);
        inst.phi.push(f);
        inst.phi.push(gprime);
        inst.psi = MovieSequence::start(host);
        inst.psi.push(g);
        inst.psi.push(fprime);
    }
    inst.crossIso = match_ends_via(inst.phi, inst.psi);
    inst.marks["p"] = p1;
    inst.marks["q"] = p2;
    return inst;
}

// --------------------------------------------------------------- MVM 1

MovieMoveInstance mvm1(int e, int variant) {
    MovieMoveInstance inst;
    inst.mvm = 1;
    std::ostringstream ps;
    ps << "e=" << (e > 0 ? "+" : "-") << " variant=" << variant;
    inst.params = ps.str();
    bool hostccw = variant & 1;
    Side side1 = (variant & 2) ? Side::Right : Side::Left;
    auto host = share(loop_diagram(hostccw, "mvm1"));
    int lid = host->loops.begin()->first;
    PtPos p{Pt{true, lid}, Rat(1, 2)};
    Move m1 = kink_with_sign(host, p, side1, e);
    // second kink of sign -e inside the created loop
    PtPos onLoop{Pt{false, m1.looparc}, Rat(1, 2)};
    for (Side side2 : {Side::Left, Side::Right}) {
        Move m2;
        try {
            m2 = kink_with_sign(m1.tgt, onLoop, side2, -e);
        } catch (const MovieError&) {
            continue;
        }
        // the two crossings must cancel by a Reidemeister II
        try {
            Move m3 = mk_r2_inv(m2.tgt, m1.x, m2.x);
            inst.phi = MovieSequence::start(host);
            inst.phi.push(m1);
            inst.phi.push(m2);
            inst.phi.push(m3);
            inst.type1 = true;
            inst.endIso = match_back_via(inst.phi);
            inst.marks["p"] = p;
            return inst;
        } catch (const DiagramError&) {
        } catch (const MovieError&) {
        }
    }
    throw MovieError("mvm1: no configuration closes up");
}

// --------------------------------------------------------------- MVM 2

MovieMoveInstance mvm2(int e) {
    MovieMoveInstance inst;
    inst.mvm = 2;
    inst.params = std::string("e=") + (e > 0 ? "+" : "-");
    // host: Hopf link; the crossing x has two honest branches
    BraidResult br = braid_closure(2, {1, 1}, "mvm2");
    auto host = share(std::move(br.d));
    int x = br.crossing_of_letter[0];
    const CrossingRec& cx = host->crossings.at(x);
    const Algebra* U = alg_universal();
    // arcs at x grouped by strand: (half0,half2) and (half1,half3)
    std::array<int, 2> strandOver{}, strandUnder{};
    {
        auto arcAt = [&](int k) { return host->geo.half_arc.at(cx.half[k]).first; };
        bool evenOver = (cx.over % 2) == 0;
        strandOver = evenOver ? std::array<int, 2>{arcAt(0), arcAt(2)} : std::array<int, 2>{arcAt(1), arcAt(3)};
        strandUnder = evenOver ? std::array<int, 2>{arcAt(1), arcAt(3)} : std::array<int, 2>{arcAt(0), arcAt(2)};
    }
    // p on the over branch iff e = +
    const auto& pArcs = (e > 0) ? strandOver : strandUnder;
    const auto& qArcs = (e > 0) ? strandUnder : strandOver;
    for (int aP : pArcs)
        for (int aQ : qArcs) {
            PtPos pb{Pt{false, aP}, Rat(1, 2)}, qb{Pt{false, aQ}, Rat(1, 2)};
            for (auto [sa, sb] : facing_sides(*host, pb.pt, qb.pt)) {
                for (bool pOver : {e > 0}) {
                    Move m1;
                    try {
                        m1 = pOver ? mk_r2(host, pb, sa, qb, sb) : mk_r2(host, qb, sb, pb, sa);
                    } catch (const DiagramError&) {
                        continue;
                    }
                    for (int cancel : {m1.x, m1.y}) {
                        try {
                            Move m2 = mk_r2_inv(m1.tgt, x, cancel);
                            MovieSequence phi = MovieSequence::start(host);
                            phi.push(m1);
                            phi.push(m2);
                            DiagramIso iso = match_back_via(phi);
                            // calibrate the marked points against the universal identity
                            ComplexStore cu(U, false);
                            ChainMap f = compose_movie(phi, Level::F0, nullptr, cu);
                            ChainMap io = iso_from_match(cu.of(phi.last()), cu.of(phi.first()), iso);
                            ChainMap lhs = io.compose_after(f);
                            const CubeComplex& hc = cu.of(phi.first());
                            for (int mp : pArcs)
                                for (int mq : qArcs) {
                                    PtPos P{Pt{false, mp}, Rat(1, 2)}, Q{Pt{false, mq}, Rat(1, 2)};
                                    ChainMap cand = Tp(hc, P.pt, U->omega)
                                                        .compose_after(Tp(hc, Q.pt, U->omega.invert()))
                                                        .scaled(U->K->from_int(e));
                                    if (lhs == cand) {
                                        inst.phi = phi;
                                        inst.type1 = true;
                                        inst.endIso = iso;
                                        inst.marks["p"] = P;
                                        inst.marks["q"] = Q;
                                        return inst;
                                    }
                                }
                        } catch (const DiagramError&) {
                        } catch (const MovieError&) {
                        }
                    }
                }
            }
        }
    throw MovieError("mvm2: no configuration closes up");
}

// --------------------------------------------------------------- MVM 6

MovieMoveInstance mvm6(int variant) {
    MovieMoveInstance inst;
    inst.mvm = 6;
    inst.params = "variant=" + std::to_string(variant);
    bool hostccw = variant & 1;
    bool inside = variant & 2;
    auto host = share(loop_diagram(hostccw, "mvm6"));
    int lid = host->loops.begin()->first;
    PtPos p{Pt{true, lid}, Rat(1, 2)};
    FaceRef fr;
    if (inside) fr.loop_chain = {lid};
    for (bool ccw : {true, false}) {
        Move s0;
        try {
            s0 = mk_surg0(host, fr, ccw);
        } catch (const DiagramError&) {
            continue;
        }
        int c = s0.loop;
        for (auto [sa, sb] : facing_sides(*s0.tgt, Pt{true, c}, Pt{true, lid})) {
            try {
                Move s1 = mk_surg1(s0.tgt, PtPos{Pt{true, c}, Rat(1, 2)}, sa,
                                   s0.lin.map_pt(p), sb);
                inst.phi = MovieSequence::start(host);
                inst.phi.push(s0);
                inst.phi.push(s1);
                inst.type1 = true;
                inst.endIso = match_back_via(inst.phi);
                inst.marks["p"] = p;
                return inst;
            } catch (const DiagramError&) {
            } catch (const MovieError&) {
            }
        }
    }
    throw MovieError("mvm6: no configuration closes up");
}

// --------------------------------------------------------------- MVM 7

MovieMoveInstance mvm7(int e) {
    MovieMoveInstance inst;
    inst.mvm = 7;
    inst.params = std::string("e=") + (e > 0 ? "+" : "-");
    auto host = share(empty_diagram("mvm7"));
    Move s0 = mk_surg0(host, FaceRef{}, false);
    int c = s0.loop;
    Move k = kink_with_sign(s0.tgt, PtPos{Pt{true, c}, Rat(1, 2)}, Side::Left, e);
    // remove the other lobe
    int other = -1;
    for (auto& [aid, a] : k.tgt->arcs)
        if (aid != k.looparc) other = aid;
    Move rm = mk_r1_inv(k.tgt, k.x, other);
    inst.phi = MovieSequence::start(host);
    inst.phi.push(s0);
    inst.phi.push(k);
    inst.phi.push(rm);
    bool endccw = false;
    for (auto& [plid, pl] : rm.tgt->loops) endccw = rm.tgt->orient.at(pl.comp).dir;
    Move s0b = mk_surg0(host, FaceRef{}, endccw);
    inst.psi = MovieSequence::start(host);
    inst.psi.push(s0b);
    inst.crossIso = match_ends_via(inst.phi, inst.psi);
    // p: a point in the created circle, on both branches
    inst.marks["p"] = PtPos{Pt{true, c}, Rat(1, 2)};
    return inst;
}

// --------------------------------------------------------------- MVM 8

MovieMoveInstance mvm8(int e) {
    MovieMoveInstance inst;
    inst.mvm = 8;
    inst.params = std::string("e=") + (e > 0 ? "+" : "-");
    auto host = share(loop_diagram(true, "mvm8"));
    int branch = host->loops.begin()->first;
    PtPos q{Pt{true, branch}, Rat(1, 2)};
    // the branch's left region (w.r.t. its orientation = ccw: left is inside)
    for (bool circleccw : {true, false}) {
        // circle on the left of the branch: inside for a ccw loop
        FaceRef leftRegion;
        leftRegion.loop_chain = {branch};
        Move s0;
        try {
            s0 = mk_surg0(host, leftRegion, circleccw);
        } catch (const DiagramError&) {
            continue;
        }
        int c = s0.loop;
        PtPos pc{Pt{true, c}, Rat(1, 2)};
        for (auto [sa, sb] : facing_sides(*s0.tgt, Pt{true, c}, Pt{true, branch})) {
            Move r2m;
            try {
                PtPos qq = s0.lin.map_pt(q);
                r2m = (e > 0) ? mk_r2(s0.tgt, pc, sa, qq, sb) : mk_r2(s0.tgt, qq, sb, pc, sa);
            } catch (const DiagramError&) {
                continue;
            }
            // pop the circle off on the other side: remove the bigon made of
            // the unpushed circle part and the branch piece between the
            // crossings, so the branch survives unchanged
            Pt wrap = r2m.lin.map_pt(PtPos{Pt{true, c}, Rat(1, 100)}).pt;
            for (const Pt& bpiece : r2m.lin.images(Pt{true, branch})) {
                if (bpiece.on_loop) continue;
                try {
                    Move pop = mk_r2_inv(r2m.tgt, r2m.x, r2m.y, wrap.id, bpiece.id);
                    Lineage toEnd = r2m.lin.then(pop.lin);
                    Pt img = toEnd.images(Pt{true, c}).at(0);
                    Pt bimg = toEnd.images(Pt{true, branch}).at(0);
                    if (!img.on_loop || !bimg.on_loop) continue;
                    bool popccw = pop.tgt->orient.at(pop.tgt->loops.at(img.id).comp).dir;
                    bool branchccw = pop.tgt->orient.at(pop.tgt->loops.at(bimg.id).comp).dir;
                    if (branchccw != host->orient.at(host->loops.at(branch).comp).dir) continue;
                    // the popped circle must sit beside the branch, not inside it
                    if (!pop.tgt->loops.at(img.id).host.loop_chain.empty()) continue;
                    Move s0b = mk_surg0(host, FaceRef{}, popccw);
                    inst.phi = MovieSequence::start(host);
                    inst.phi.push(s0);
                    inst.phi.push(r2m);
                    inst.phi.push(pop);
                    inst.psi = MovieSequence::start(host);
                    inst.psi.push(s0b);
                    inst.crossIso = match_ends_via(inst.phi, inst.psi);
                    inst.marks["p"] = pc;  // in the created circle (first frame coordinates)
                    inst.marks["q"] = q;
                    return inst;
                } catch (const DiagramError&) {
                } catch (const MovieError&) {
                } catch (const std::out_of_range&) {
                }
            }
        }
    }
    throw MovieError("mvm8: no configuration closes up");
}

// --------------------------------------------------------------- MVM 9

MovieMoveInstance mvm9(int e) {
    MovieMoveInstance inst;
    inst.mvm = 9;
    inst.params = std::string("e=") + (e > 0 ? "+" : "-");
    // two facing branches of opposite handedness; the band leaves the kink lobe
    Diagram base = loop_diagram(false, "mvm9");
    int c1 = base.loops.begin()->first;
    auto two = add_loop(base, FaceRef{}, true);
    auto host = share(std::move(two.d));
    int c2 = two.made.at("loop");
    PtPos p{Pt{true, c1}, Rat(1, 4)}, q{Pt{true, c2}, Rat(1, 4)};
    auto build_branch = [&](const PtPos& at, const PtPos& far) {
        std::vector<MovieSequence> out;
        for (Side ks : {Side::Left, Side::Right}) {
            Move k1;
            try {
                k1 = kink_with_sign(host, at, ks, e);
            } catch (const MovieError&) {
                continue;
            }
            PtPos a{Pt{false, k1.looparc}, Rat(1, 2)};
            PtPos b;
            try {
                b = k1.lin.map_pt(far);
            } catch (const DiagramError&) {
                continue;
            }
            for (auto [sa, sb] : facing_sides(*k1.tgt, a.pt, b.pt)) {
                try {
                    Move s1 = mk_surg1(k1.tgt, a, sa, b, sb);
                    MovieSequence seq = MovieSequence::start(host);
                    seq.push(k1);
                    seq.push(s1);
                    out.push_back(std::move(seq));
                } catch (const DiagramError&) {
                } catch (const MovieError&) {
                }
            }
        }
        return out;
    };
    auto kinkA = [&](const MovieSequence& s) { return s.moves[0].otype().a; };
    auto kinkH = [&](const MovieSequence& s) { return s.moves[0].otype().h; };
    auto surgT = [&](const MovieSequence& s) { return s.moves[1].otype(); };
    for (MovieSequence& phi : build_branch(p, q)) {
        if (surgT(phi).a != -kinkA(phi) || surgT(phi).h != kinkH(phi)) continue;
        for (MovieSequence& psi : build_branch(q, p)) {
            if (kinkA(psi) != -kinkA(phi) || kinkH(psi) != kinkH(phi)) continue;
            if (surgT(psi).a != kinkA(phi) || surgT(psi).h != kinkH(phi)) continue;
            try {
                inst.phi = phi;
                inst.psi = psi;
                inst.crossIso = match_ends_via(phi, psi);
                inst.marks["p"] = p;
                inst.marks["q"] = q;
                return inst;
            } catch (const MovieError&) {
            }
        }
    }
    throw MovieError("mvm9: no configuration closes up");
}

MovieMoveInstance mvm10(int e) {
    MovieMoveInstance inst;
    inst.mvm = 10;
    inst.params = std::string("e=") + (e > 0 ? "+" : "-");
    // left branch C1 beside the middle circle C2; right branch C3 inside C2
    for (bool hc1 : {true, false})
        for (bool hc2 : {true, false})
            for (bool hc3 : {true, false}) {
                Diagram base = loop_diagram(hc1, "mvm10");
                int c1 = base.loops.begin()->first;
                auto mid = add_loop(base, FaceRef{}, hc2);
                int c2 = mid.made.at("loop");
                auto tri = add_loop(mid.d, FaceRef{true, 0, Side::Left, {c2}}, hc3);
                auto host = share(std::move(tri.d));
                int c3 = tri.made.at("loop");
                PtPos p{Pt{true, c1}, Rat(1, 4)}, q{Pt{true, c3}, Rat(1, 4)}, r{Pt{true, c2}, Rat(1, 2)};
                auto build_branch = [&](const PtPos& at, const PtPos& far) {
                    std::vector<MovieSequence> out;
                    for (auto [sa, sb] : facing_sides(*host, at.pt, r.pt)) {
                        Move m1;
                        try {
                            m1 = (e > 0) ? mk_r2(host, at, sa, r, sb) : mk_r2(host, r, sb, at, sa);
                        } catch (const DiagramError&) {
                            continue;
                        }
                        PtPos fa, fb;
                        try {
                            fa = m1.lin.map_pt(at);
                            fb = m1.lin.map_pt(far);
                        } catch (const DiagramError&) {
                            continue;
                        }
                        for (auto [sc, sd] : facing_sides(*m1.tgt, fa.pt, fb.pt)) {
                            try {
                                Move s1 = mk_surg1(m1.tgt, fa, sc, fb, sd);
                                MovieSequence seq = MovieSequence::start(host);
                                seq.push(m1);
                                seq.push(s1);
                                out.push_back(std::move(seq));
                            } catch (const DiagramError&) {
                            } catch (const MovieError&) {
                            }
                        }
                    }
                    return out;
                };
                auto surgA = [&](const MovieSequence& s) { return s.moves[1].otype().a; };
                auto surgH = [&](const MovieSequence& s) { return s.moves[1].otype().h; };
                for (MovieSequence& phi : build_branch(p, q)) {
                    for (MovieSequence& psi : build_branch(q, p)) {
                        if (surgA(psi) != -surgA(phi)) continue;
                        if (surgH(psi) != -surgH(phi)) continue;
                        try {
                            inst.phi = phi;
                            inst.psi = psi;
                            inst.crossIso = match_ends_via(phi, psi);
                            inst.marks["p"] = p;
                            inst.marks["q"] = q;
                            inst.marks["r"] = r;
                            return inst;
                        } catch (const MovieError&) {
                        }
                    }
                }
            }
    throw MovieError("mvm10: no configuration closes up");
}

// --------------------------------------------------------------- MVM 3

MovieMoveInstance mvm3(int e, int eprime) {
    MovieMoveInstance inst;
    inst.mvm = 3;
    std::ostringstream ps;
    ps << "e=" << (e > 0 ? "+" : "-") << " e'=" << (eprime > 0 ? "+" : "-");
    inst.params = ps.str();
    auto host = share(loop_diagram(true, "mvm3"));
    int lid = host->loops.begin()->first;
    PtPos p{Pt{true, lid}, Rat(1, 4)}, q{Pt{true, lid}, Rat(3, 4)};
    for (Side kinkSide : {Side::Left, Side::Right}) {
        Move m1;
        try {
            m1 = kink_with_sign(host, p, kinkSide, e);
        } catch (const MovieError&) {
            continue;
        }
        PtPos lobe{Pt{false, m1.looparc}, Rat(1, 2)};
        PtPos qq = m1.lin.map_pt(q);
        for (auto [sa, sb] : facing_sides(*m1.tgt, lobe.pt, qq.pt)) {
            Move m2;
            try {
                m2 = (eprime > 0) ? mk_r2(m1.tgt, lobe, sa, qq, sb) : mk_r2(m1.tgt, qq, sb, lobe, sa);
            } catch (const DiagramError&) {
                continue;
            }
            try {
                Move m3 = mk_r3(m2.tgt, m1.x, m2.x, m2.y);
                Move m4 = mk_r1_inv(m3.tgt, m1.x);
                Move m5 = mk_r2_inv(m4.tgt, m2.x, m2.y);
                inst.phi = MovieSequence::start(host);
                inst.phi.push(m1);
                inst.phi.push(m2);
                inst.phi.push(m3);
                inst.phi.push(m4);
                inst.phi.push(m5);
                inst.type1 = true;
                inst.endIso = match_back_via(inst.phi);
                inst.marks["p"] = p;
                inst.marks["q"] = q;
                return inst;
            } catch (const DiagramError&) {
            } catch (const MovieError&) {
            }
        }
    }
    throw MovieError("mvm3: no configuration closes up");
}

// --------------------------------------------------------------- MVM 4

MovieMoveInstance mvm4(int e) {
    MovieMoveInstance inst;
    inst.mvm = 4;
    inst.params = std::string("e=") + (e > 0 ? "+" : (e == 0 ? "0" : "-"));
    std::vector<int> word = e > 0 ? std::vector<int>{1, 2} : e == 0 ? std::vector<int>{1, -2}
                                                                    : std::vector<int>{-1, -2};
    BraidResult br = braid_closure(3, word, "mvm4");
    auto host = share(std::move(br.d));
    int cx = br.crossing_of_letter[0], cy = br.crossing_of_letter[1];
    // the vertical strand passes both crossings; the horizontals are the others
    // find candidate arcs of the two horizontal strands that share a face
    std::vector<int> closureArcs = {br.closure_arc[1], br.closure_arc[2], br.closure_arc[3]};
    for (int aB : closureArcs)
        for (int aC : closureArcs) {
            if (aB == aC) continue;
            PtPos pb{Pt{false, aB}, Rat(1, 2)}, pc{Pt{false, aC}, Rat(1, 2)};
            for (auto [sa, sb] : facing_sides(*host, pb.pt, pc.pt)) {
                for (bool overFirst : {true, false}) {
                    Move m1;
                    try {
                        m1 = overFirst ? mk_r2(host, pb, sa, pc, sb) : mk_r2(host, pc, sb, pb, sa);
                    } catch (const DiagramError&) {
                        continue;
                    }
                    for (int first : {m1.x, m1.y}) {
                        int second = (first == m1.x) ? m1.y : m1.x;
                        try {
                            Move m2 = mk_r3(m1.tgt, cx, cy, first);
                            Move m3 = mk_r3(m2.tgt, cx, cy, second);
                            Move m4 = mk_r2_inv(m3.tgt, m1.x, m1.y);
                            inst.phi = MovieSequence::start(host);
                            inst.phi.push(m1);
                            inst.phi.push(m2);
                            inst.phi.push(m3);
                            inst.phi.push(m4);
                            inst.type1 = true;
                            inst.endIso = match_back_via(inst.phi);
                            inst.marks["p"] = pb;
                            inst.marks["q"] = pc;
                            inst.marks["x"] = PtPos{Pt{false, aB}, Rat(1, 4)};
                            return inst;
                        } catch (const DiagramError&) {
                        } catch (const MovieError&) {
                        }
                    }
                }
            }
        }
    throw MovieError("mvm4: no configuration closes up");
}

// --------------------------------------------------------------- MVM 5

namespace {

// exact line arrangement: lines x = a*y + b, heights give over/under
struct ArrLine {
    Rat a, b;  // x = a y + b
    int height;
};

struct ArrangementFrame {
    Diagram d;
    std::map<std::pair<int, int>, int> crossing_of;  // line pair -> crossing id
};

ArrangementFrame build_arrangement(const std::vector<ArrLine>& lines) {
    int n = int(lines.size());
    Diagram d;
    d.name = "arr";
    struct Cross {
        Rat y;
        int i, j;
        int id = 0;
        std::array<int, 4> half{};
        std::array<int, 4> germline{};  // which line leaves via each slot (up/down)
    };
    std::vector<Cross> crossings;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            // a_i y + b_i = a_j y + b_j
            Rat y = (lines[j].b - lines[i].b) / (lines[i].a - lines[j].a);
            crossings.push_back({y, i, j});
        }
    ArrangementFrame out;
    // build crossing records with exact ccw slot orders
    for (auto& c : crossings) {
        c.id = d.fresh_id();
        // germ directions: (a_i, 1), (a_j, 1) and negatives, angles sorted ccw
        struct Dir {
            Rat dx, dy;
            int line;
            bool up;
        };
        std::vector<Dir> dirs = {{lines[c.i].a, Rat(1), c.i, true},
                                 {lines[c.j].a, Rat(1), c.j, true},
                                 {-lines[c.i].a, Rat(-1), c.i, false},
                                 {-lines[c.j].a, Rat(-1), c.j, false}};
        std::sort(dirs.begin(), dirs.end(), [](const Dir& u, const Dir& v) {
            auto half = [](const Dir& w) { return w.dy > 0 || (w.dy == 0 && w.dx > 0) ? 0 : 1; };
            if (half(u) != half(v)) return half(u) < half(v);
            // ccw within a half plane: u before v iff u x v > 0
            return u.dx * v.dy - u.dy * v.dx > 0;
        });
        CrossingRec rec;
        for (int k = 0; k < 4; ++k) {
            rec.half[k] = d.fresh_id();
        }
        // over parity: strand of the higher line
        int overline = lines[c.i].height > lines[c.j].height ? c.i : c.j;
        rec.over = (dirs[0].line == overline) ? 0 : 1;
        d.crossings[c.id] = rec;
        for (int k = 0; k < 4; ++k) c.germline[k] = dirs[k].line * 2 + (dirs[k].up ? 1 : 0);
        out.crossing_of[{c.i, c.j}] = c.id;
        c.half = rec.half;
    }
    // arcs along each line between consecutive crossings
    std::vector<int> top_half(n, -1), bottom_half(n, -1);
    for (int i = 0; i < n; ++i) {
        std::vector<Cross*> on;
        for (auto& c : crossings)
            if (c.i == i || c.j == i) on.push_back(&c);
        std::sort(on.begin(), on.end(), [](Cross* a, Cross* b) { return a->y < b->y; });
        auto slot_of = [&](Cross* c, bool up) {
            for (int k = 0; k < 4; ++k)
                if (c->germline[k] == i * 2 + (up ? 1 : 0)) return c->half[k];
            throw DiagramError("arrangement slot missing");
        };
        bottom_half[i] = slot_of(on.front(), false);
        top_half[i] = slot_of(on.back(), true);
        for (size_t k = 0; k + 1 < on.size(); ++k) {
            int id = d.fresh_id();
            d.arcs[id] = ArcRec{slot_of(on[k], true), slot_of(on[k + 1], false), 0};
        }
    }
    // trace closure: top position-rank k around the right to bottom rank k
    Rat M(1000000);
    std::vector<int> topRank(n), botRank(n);
    {
        std::vector<std::pair<Rat, int>> tops, bots;
        for (int i = 0; i < n; ++i) {
            tops.push_back({lines[i].a * M + lines[i].b, i});
            bots.push_back({lines[i].a * (-M) + lines[i].b, i});
        }
        std::sort(tops.begin(), tops.end());
        std::sort(bots.begin(), bots.end());
        for (int k = 0; k < n; ++k) {
            topRank[k] = tops[k].second;   // k-th from the left at the top
            botRank[k] = bots[k].second;
        }
    }
    std::vector<int> closure(n, -1);
    for (int k = 0; k < n; ++k) {
        int id = d.fresh_id();
        // from the top end of the line at top-rank k, around the right side,
        // to the bottom end of the line at bottom-rank k; arcs nest rightward
        // as k grows toward the braid (rank n-1 innermost)
        d.arcs[id] = ArcRec{top_half[topRank[k]], bottom_half[botRank[k]], 0};
        closure[k] = id;
    }
    // orientation upward: every arc was built in travel direction
    {
        std::map<int, std::pair<int, int>> half_pos, half_arc;
        for (auto& [cid, c] : d.crossings)
            for (int k = 0; k < 4; ++k) half_pos[c.half[k]] = {cid, k};
        for (auto& [aid, a] : d.arcs) {
            half_arc[a.from] = {aid, 0};
            half_arc[a.to] = {aid, 1};
        }
        std::set<int> seen;
        for (auto& [aid0, a0] : d.arcs) {
            if (seen.count(aid0)) continue;
            int comp = d.fresh_id();
            int aid = aid0;
            bool dir = true;
            while (true) {
                seen.insert(aid);
                d.arcs.at(aid).comp = comp;
                const ArcRec& a = d.arcs.at(aid);
                int head = dir ? a.to : a.from;
                auto [cid, slot] = half_pos.at(head);
                int h2 = d.crossings.at(cid).half[(slot + 2) % 4];
                auto [a2, end2] = half_arc.at(h2);
                dir = (end2 == 0);
                aid = a2;
                if (aid == aid0 && dir) break;
            }
            d.orient[comp] = OrientRec{false, aid0, true};
        }
    }
    // outermost closure arc: leftmost top rank (k = 0): outer face on its left
    d.outer = {closure[0], Side::Left};
    d.validate();
    out.d = std::move(d);
    return out;
}

}  // namespace

MovieMoveInstance mvm5(const std::array<int, 4>& heights) {
    MovieMoveInstance inst;
    inst.mvm = 5;
    std::ostringstream ps;
    ps << "heights=" << heights[0] << heights[1] << heights[2] << heights[3];
    inst.params = ps.str();
    // delta3: x = 0; delta4: x = 3y; z = x12 tours around x34 = origin.
    // delta1 has slope 1, delta2 slope -1 (as functions x = a y + b).
    Rat a1(1), a2(-1), a3(0), a4(3);
    // waypoints of z between the rays of slopes {1,-1,0,3} (8 sectors, by angle)
    // ray angles of (a,1) directions: a=0: 90, a=1: 45, a=3: ~18, a=-1: 135 and
    // antipodes; choose points strictly inside each sector, ccw tour
    std::vector<std::pair<Rat, Rat>> zs = {
        {Rat(2), Rat(1)},    // between 18 and 45
        {Rat(3), Rat(4)},    // between 45 and 90
        {Rat(-1), Rat(4)},   // between 90 and 135
        {Rat(-3), Rat(1)},   // between 135 and 198
        {Rat(-2), Rat(-1)},  // antipodal sectors
        {Rat(-3), Rat(-4)},
        {Rat(1), Rat(-4)},
        {Rat(3), Rat(-1)},
    };
    auto frame_at = [&](const std::pair<Rat, Rat>& z) {
        std::vector<ArrLine> lines(4);
        lines[0] = {a1, z.first - a1 * z.second, heights[0]};
        lines[1] = {a2, z.first - a2 * z.second, heights[1]};
        lines[2] = {a3, Rat(0), heights[2]};
        lines[3] = {a4, Rat(0), heights[3]};
        return build_arrangement(lines);
    };
    // the triple of lines that concur at the transition between waypoints
    // w -> w+1: z crosses a ray of slope a_k: if k in {3,4}: lines {1,2,k};
    // crossing the slope-a1 ray means delta1 sweeps x34: lines {1,3,4};
    // slope-a2 ray: {2,3,4}
    auto ray_of = [&](int w) {
        // the ray crossed between zs[w] and zs[w+1]
        // ray slopes in ccw angular order starting after 18 degrees: 1,0,-1,3,...
        static const int order[8] = {1, 0, -1 - 10, 3, 1, 0, -1 - 10, 3};
        // encode: 1 -> slope a1, 0 -> a3, -11 -> a2, 3 -> a4
        return order[(w + 1) % 8];
    };
    (void)ray_of;
    // transitions: between sector k and k+1 the crossed ray has the slope whose
    // angle separates them: angles sorted ccw: 18(a4), 45(a1), 90(a3), 135(a2),
    // then antipodes. zs[0] sits in (18,45): moving ccw crosses 45 (a1) first.
    static const int rayline[8] = {0, 2, 1, 3, 0, 2, 1, 3};
    // rayline[w]: line index (0-based) whose ray is crossed between w and w+1:
    // a1 -> lines {0,2,3}? no: crossing the slope-a1 ray through the origin
    // means delta1 passes x34: triple {delta1, delta3, delta4} = {0,2,3};
    // crossing delta3 (x=0) means z lies on delta3: triple {0,1,2};
    // crossing delta4: triple {0,1,3}; crossing slope-a2 ray: {1,2,3}
    auto triple_for = [&](int w) -> std::array<int, 3> {
        switch (rayline[w]) {
            case 0: return {0, 2, 3};  // delta1 through x34
            case 1: return {1, 2, 3};  // delta2 through x34
            case 2: return {0, 1, 2};  // z crosses delta3
            default: return {0, 1, 3};  // z crosses delta4
        }
    };
    ArrangementFrame start = frame_at(zs[0]);
    auto cur = share(std::move(start.d));
    std::map<std::pair<int, int>, int> ids = start.crossing_of;
    inst.phi = MovieSequence::start(cur);
    for (int w = 0; w < 8; ++w) {
        auto tri = triple_for(w);
        int cA = ids.at({std::min(tri[0], tri[1]), std::max(tri[0], tri[1])});
        int cB = ids.at({std::min(tri[0], tri[2]), std::max(tri[0], tri[2])});
        int cC = ids.at({std::min(tri[1], tri[2]), std::max(tri[1], tri[2])});
        Move m = mk_r3(inst.phi.frames.back(), cA, cB, cC);
        inst.phi.push(m);
        // sanity: the constructed frame matches the simulated arrangement
        ArrangementFrame next = frame_at(zs[(w + 1) % 8]);
        DiagramIso chk = match_end(*inst.phi.frames.back(), *share(std::move(next.d)));
        (void)chk;
    }
    inst.type1 = true;
    inst.endIso = match_back_via(inst.phi);
    return inst;
}


// ------------------------------------------------------------ verification

namespace {

ChainMap end_iso(const MovieMoveInstance& inst, ComplexStore& cs) {
    if (inst.type1) return iso_from_match(cs.of(inst.phi.last()), cs.of(inst.phi.first()), inst.endIso);
    return iso_from_match(cs.of(inst.phi.last()), cs.of(inst.psi.last()), inst.crossIso);
}

AlgElem omega_conj_ratio(const Algebra* A, int num_sign, int den_sign) {
    // omega^{(num)} / omega^{(den)}
    return A->omega.conj(num_sign) * A->omega.conj(den_sign).invert();
}

}  // namespace

LemmaReport verify_lemma(const MovieMoveInstance& inst, Level level, const KhovanovData* data,
                         const Algebra* alg) {
    LemmaReport rep;
    std::ostringstream nm;
    nm << "MVM" << inst.mvm << "(" << inst.params << ") level="
       << (level == Level::F0 ? "f0" : level == Level::F1 ? "f1" : "fK");
    rep.name = nm.str();
    ComplexStore cs(alg, level != Level::F0);
    ChainMap phi = compose_movie(inst.phi, level, data, cs);
    const CubeComplex& host = cs.of(inst.phi.first());
    ChainMap iota = end_iso(inst, cs);
    ChainMap lhs = iota.compose_after(phi);

    auto exact_vs = [&](const ChainMap& rhs) {
        rep.cert = homotopy_check_exact(lhs, rhs);
        return rep;
    };
    auto Tmark = [&](const CubeComplex& c, const char* mark, const AlgElem& v) {
        return Tp(c, inst.marks.at(mark).pt, v);
    };
    auto Tmark_hat = [&](const CubeComplex& c, const char* mark, const AlgElem& v) {
        return That(c, inst.marks.at(mark).pt, v);
    };
    const AlgElem one = alg->one();
    const AlgElem w = alg->omega;

    switch (inst.mvm) {
        case 0: {
            ChainMap psi = compose_movie(inst.psi, level, data, cs);
            if (level == Level::F0) {
                ComplexStore cs0(alg, false);
                int p = f0(inst.phi.moves[0], cs0).deg;
                int q = f0(inst.psi.moves[0], cs0).deg;
                int sg = (p * q) % 2 ? -1 : 1;
                return exact_vs(psi.scaled(alg->K->from_int(sg)));
            }
            return exact_vs(psi);
        }
        case 1: {
            OrientedType t1 = inst.phi.moves[0].otype();
            int e = t1.e, a = t1.a, h = t1.h;
            if (level == Level::F0 || level == Level::F1) {
                AlgElem val = w * w.conj(e).invert();
                return exact_vs(Tmark(host, "p", val).scaled(alg->K->from_int(-e)));
            }
            AlgElem val = omega_conj_ratio(alg, a * h, e * a * h) * data->getA(e, a, h) *
                          data->getA(-e, -a, h) * data->B0(a, a, h).invert();
            return exact_vs(Tmark_hat(host, "p", val).scaled(alg->K->from_int(-e)));
        }
        case 2: {
            OrientedType t1 = inst.phi.moves[0].otype();
            // II^e(e', a, b, h) relabelling: the lemma's (a,b) come from the
            // p-over convention; t1 carries the top-branch-first order
            int eSign = inst.params.find("e=+") != std::string::npos ? 1 : -1;
            int a = eSign > 0 ? t1.a : t1.b;
            int b = eSign > 0 ? t1.b : t1.a;
            int h = t1.h;
            if (level == Level::F0)
                return exact_vs(
                    Tmark(host, "p", w).compose_after(Tmark(host, "q", w.invert())).scaled(alg->K->from_int(eSign)));
            if (level == Level::F1)
                return exact_vs(Tmark(host, "p", w)
                                    .compose_after(Tmark(host, "q", w.invert()))
                                    .scaled(alg->K->from_int(-a * b)));
            auto Bnum = data->Be(eSign, a, b, h);
            auto Bden = data->Be(eSign, -a, -b, h);
            AlgElem up = w.conj(-b * h) * Bnum[0] * Bden[0].invert();
            AlgElem uq = w.conj(a * h).invert() * Bnum[1] * Bden[1].invert();
            return exact_vs(Tmark_hat(host, "p", up)
                                .compose_after(Tmark_hat(host, "q", uq))
                                .scaled(alg->K->from_int(-a * b)));
        }
        case 3: {
            OrientedType t1 = inst.phi.moves[0].otype();
            int e = t1.e, a = t1.a, h = t1.h;
            int eprime = inst.params.find("e'=+") != std::string::npos ? 1 : -1;
            OrientedType t2 = inst.phi.moves[1].otype();
            int b = eprime > 0 ? t2.b : t2.a;
            if (level == Level::F0) {
                AlgElem val = w * w.conj(e).invert();
                return exact_vs(Tmark(host, "p", val));
            }
            if (level == Level::F1) {
                AlgElem val = w * w.conj(e).invert();
                return exact_vs(Tmark(host, "p", val).scaled(alg->K->from_int(e)));
            }
            AlgElem up = omega_conj_ratio(alg, a * h, e * a * h) * data->getA(e, a, h) *
                         data->getA(e, a, -h).invert();
            auto Bn = data->Be(eprime, a, b, -a * b * h);
            auto Bd = data->Be(eprime, -a, b, a * b * h);
            AlgElem cp, cq;
            if (eprime > 0) {
                auto C = data->getC(e, -a * h, -a * h, b * h);
                cp = (C[0] * C[1]).pow(-h);
                cq = C[2].pow(-h);
            } else {
                auto C = data->getC(e, b * h, -a * h, -a * h);
                cp = (C[2] * C[1]).pow(-h);
                cq = C[0].pow(-h);
            }
            AlgElem tp = up * Bn[0] * Bd[0].invert() * cp;
            AlgElem tq = Bn[1] * Bd[1].invert() * cq;
            return exact_vs(Tmark_hat(host, "p", tp)
                                .compose_after(Tmark_hat(host, "q", tq))
                                .scaled(alg->K->from_int(e)));
        }
        case 4:
        case 5:
        case 9:
        case 10: {
            // homotopy-level statements; exact fast path, otherwise certified
            // on the rational specializations
            ChainMap rhs = inst.type1 ? identity_map(host) : compose_movie(inst.psi, level, data, cs);
            if (inst.mvm == 4 && (level == Level::F0 || level == Level::F1)) {
                int e = inst.params.find("e=+") != std::string::npos ? 1
                        : inst.params.find("e=0") != std::string::npos ? 0
                                                                       : -1;
                int c0 = 1 - 2 * e * e;
                rhs = Tmark(host, "p", w.invert())
                          .compose_after(Tmark(host, "q", w))
                          .scaled(alg->K->from_int(c0));
            }
            Certificate ex = homotopy_check_exact(lhs, rhs);
            if (ex.ok()) {
                rep.cert = ex;
                return rep;
            }
            if (inst.mvm == 5 && level == Level::F0) {
                // the computer check of the idempotency route
                ChainMap sq = lhs.compose_after(lhs);
                if (sq == lhs) {
                    rep.cert.kind = CertKind::ExplicitHomotopy;
                    rep.cert.detail = "phi0 is an exact idempotent, hence homotopic to the identity";
                    return rep;
                }
            }
            MapPairBuilder build = [&](ComplexStore& scs) {
                const KhovanovData* sdata = nullptr;
                KhovanovData local;
                if (level == Level::FK) {
                    local = KhovanovData::classical(scs.alg);
                    sdata = &local;
                }
                ChainMap f = compose_movie(inst.phi, level, sdata, scs);
                ChainMap i2 = end_iso(inst, scs);
                ChainMap l = i2.compose_after(f);
                ChainMap r = inst.type1 ? identity_map(scs.of(inst.phi.first()))
                                        : compose_movie(inst.psi, level, sdata, scs);
                if (inst.mvm == 4 && level != Level::FK) {
                    int e = inst.params.find("e=+") != std::string::npos ? 1
                            : inst.params.find("e=0") != std::string::npos ? 0
                                                                           : -1;
                    int c0 = 1 - 2 * e * e;
                    const CubeComplex& h2 = scs.of(inst.phi.first());
                    r = Tp(h2, inst.marks.at("p").pt, scs.alg->omega.invert())
                            .compose_after(Tp(h2, inst.marks.at("q").pt, scs.alg->omega))
                            .scaled(scs.alg->K->from_int(c0));
                }
                return std::make_pair(l, r);
            };
            rep.cert = homotopy_check_specialize(build, level != Level::F0);
            return rep;
        }
        case 6: {
            ChainMap psi = identity_map(host);  // the second sequence is Id
            if (level != Level::FK) return exact_vs(psi);
            OrientedType t = inst.phi.moves[0].otype();
            AlgElem val = data->getX(t.a, t.h) * data->getY(-t.a, t.h);
            return exact_vs(Tmark_hat(host, "p", val).compose_after(psi));
        }
        case 7: {
            ChainMap psi = compose_movie(inst.psi, level, data, cs);
            OrientedType t0 = inst.phi.moves[0].otype();  // (0,a,h)
            int e = inst.params.find("e=+") != std::string::npos ? 1 : -1;
            int a = t0.a, h = t0.h;
            // the lemma's point sits in the created circle; express the twist on
            // the psi side before identification
            const CubeComplex& target = cs.of(inst.psi.last());
            Pt pcirc{true, inst.psi.moves[0].loop};
            if (level == Level::F0) {
                AlgElem val = w.conj(e) * w.involute().invert();
                ChainMap rhs = Tp(target, pcirc, val).compose_after(psi).scaled(alg->K->from_int(-e));
                return exact_vs(rhs);
            }
            if (level == Level::F1) {
                AlgElem val = omega_conj_ratio(alg, -e * a * h, a * h);
                ChainMap rhs = That(target, pcirc, val).compose_after(psi).scaled(alg->K->from_int(-e));
                return exact_vs(rhs);
            }
            // phi^K = That_p(X(a,h) A(e,-a,h)/A(e,a,h)) phi^1 and psi^K =
            // That_p(X(-a,h)) psi^1; verify the combined identity against psi^K
            ChainMap phi1 = compose_movie(inst.phi, Level::F1, nullptr, cs);
            ChainMap lhs1 = iota.compose_after(phi1);
            AlgElem num = data->getX(a, h) * data->getA(e, -a, h) * data->getA(e, a, h).invert();
            ChainMap rhs = That(target, pcirc, num).compose_after(lhs1);
            // but lhs here is iota . phiK; express both sides on the target
            rep.cert = homotopy_check_exact(lhs, rhs);
            return rep;
        }
        case 8: {
            ChainMap psi = compose_movie(inst.psi, level, data, cs);
            if (level == Level::F0) {
                const CubeComplex& target = cs.of(inst.psi.last());
                Pt pcirc{true, inst.psi.moves[0].loop};
                AlgElem val = w * w.involute().invert();
                return exact_vs(Tp(target, pcirc, val).compose_after(psi));
            }
            if (level == Level::F1) {
                const CubeComplex& target = cs.of(inst.psi.last());
                Pt pcirc{true, inst.psi.moves[0].loop};
                OrientedType t0 = inst.phi.moves[0].otype();
                AlgElem val = omega_conj_ratio(alg, t0.a * t0.h, -t0.a * t0.h);
                return exact_vs(That(target, pcirc, val).compose_after(psi));
            }
            // fK: phi^K = That(X(a,h) (x) Be ratio) phi^1; psi^K = That(X(a,-h)) psi^1
            OrientedType t0 = inst.phi.moves[0].otype();
            OrientedType t1 = inst.phi.moves[1].otype();
            int e = inst.params.find("e=+") != std::string::npos ? 1 : -1;
            int a = t0.a, h = t0.h;
            int b = e > 0 ? t1.b : t1.a;
            ChainMap phi1 = compose_movie(inst.phi, Level::F1, nullptr, cs);
            ChainMap lhs1 = iota.compose_after(phi1);
            auto Bn = data->Be(e, a, b, -a * b * h);
            auto Bd = data->Be(e, a, -b, -a * b * h);
            const CubeComplex& target = cs.of(inst.psi.last());
            Pt pcirc{true, inst.psi.moves[0].loop};
            ChainMap rhs = That(target, pcirc, data->getX(a, h) * Bn[0] * Bd[0].invert())
                               .compose_after(That(target, inst.marks.at("q").pt, Bn[1] * Bd[1].invert()))
                               .compose_after(lhs1);
            rep.cert = homotopy_check_exact(lhs, rhs);
            return rep;
        }
        default:
            break;
    }
    rep.cert.kind = CertKind::Failed;
    rep.cert.detail = "no verifier for this move";
    return rep;
}

VerifyAllReport verify_all(const KhovanovData& data, const Algebra* alg, bool include_mvm5) {
    VerifyAllReport rep;
    auto condition = [&](int i, const MovieMoveInstance& inst) {
        ComplexStore cs(alg, true);
        ChainMap phi = compose_movie(inst.phi, Level::FK, &data, cs);
        ChainMap iota = end_iso(inst, cs);
        ChainMap lhs = iota.compose_after(phi);
        ChainMap rhs = inst.type1 ? identity_map(cs.of(inst.phi.first()))
                                  : compose_movie(inst.psi, Level::FK, &data, cs);
        LemmaReport lr;
        lr.name = "C(" + std::to_string(i) + ") MVM" + std::to_string(inst.mvm) + "(" + inst.params + ")";
        lr.cert = homotopy_check_exact(lhs, rhs);
        if (!lr.cert.ok()) {
            // reversed direction identities hold when the forward ones do; the
            // homotopy-level conditions get certified on specializations when
            // the data has an omega = 1 presentation
            bool scalarData = true;
            for (auto& [k, v] : data.A)
                if (!v.v.is_zero()) scalarData = false;
            if (scalarData && alg->omega == alg->one()) {
                MapPairBuilder build = [&](ComplexStore& scs) {
                    KhovanovData local = KhovanovData::parse(data.serialize(), scs.alg);
                    ChainMap f = compose_movie(inst.phi, Level::FK, &local, scs);
                    ChainMap i2 = end_iso(inst, scs);
                    ChainMap l = i2.compose_after(f);
                    ChainMap r = inst.type1 ? identity_map(scs.of(inst.phi.first()))
                                            : compose_movie(inst.psi, Level::FK, &local, scs);
                    return std::make_pair(l, r);
                };
                lr.cert = homotopy_check_specialize(build, true);
            }
        }
        rep.lemmas.push_back(lr);
        bool& c = rep.condition[i];
        if (!rep.condition.count(i)) c = true;
        rep.condition[i] = rep.condition[i] && lr.cert.ok();
    };
    rep.condition[0] = true;
    condition(0, mvm0(0));
    condition(0, mvm0(1));
    rep.condition[1] = true;
    for (int e : {1, -1})
        for (int v : {0, 1}) condition(1, mvm1(e, v));
    rep.condition[2] = true;
    for (int e : {1, -1}) condition(2, mvm2(e));
    rep.condition[3] = true;
    for (int e : {1, -1})
        for (int ep : {1, -1}) condition(3, mvm3(e, ep));
    rep.condition[4] = true;
    for (int e : {-1, 0, 1}) condition(4, mvm4(e));
    rep.condition[5] = true;
    if (include_mvm5) {
        condition(5, mvm5({1, 2, 3, 4}));
        condition(5, mvm5({4, 3, 2, 1}));
    }
    rep.condition[6] = true;
    for (int v : {0, 1}) condition(6, mvm6(v));
    rep.condition[7] = true;
    for (int e : {1, -1}) condition(7, mvm7(e));
    rep.condition[8] = true;
    for (int e : {1, -1}) condition(8, mvm8(e));
    rep.condition[9] = true;
    for (int e : {1, -1}) condition(9, mvm9(e));
    rep.condition[10] = true;
    for (int e : {1, -1}) condition(10, mvm10(e));
    return rep;
}

}  // namespace khovfun
