#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "khovfun/data.hpp"
#include "khovfun/moves.hpp"

using namespace khovfun;

static std::shared_ptr<const Diagram> share(Diagram d) { return std::make_shared<Diagram>(std::move(d)); }

// hosts: a trefoil with marked arcs, circles, two-strand configurations
static std::shared_ptr<const Diagram> trefoil() { return share(braid_closure(2, {1, 1, 1}).d); }

TEST_CASE("surgery moves f0 are chain maps; surg0 then surg2 gives t") {
    for (auto* A : {alg_classical(), alg_lee(), alg_universal()}) {
        CAPTURE(A->name);
        ComplexStore cs(A, false);
        auto d = trefoil();
        int arc = d->arcs.begin()->first;
        Move m0 = mk_surg0(d, FaceRef{false, arc, Side::Left, {}}, false);
        ChainMap F = f0(m0, cs);
        CHECK(F.commutes_with_d());
        CHECK(F.degree_respected());
        CHECK(F.deg == 0);
        Move m2 = mk_surg2(m0.tgt, m0.loop);
        ChainMap G = f0(m2, cs);
        CHECK(G.commutes_with_d());
        ChainMap comp = G.compose_after(F);
        // the final frame is a distinct (structurally equal) diagram object, so
        // compare the matrices
        Mat tid = Mat::identity(cs.of(d).ngen, A->K).scaled(A->t);
        CHECK(comp.m == tid);
    }
}

TEST_CASE("surg1 f0 is a chain map (split and merge)") {
    const Algebra* A = alg_universal();
    ComplexStore cs(A, false);
    // split a circle beside the trefoil
    auto d0 = trefoil();
    int arc = d0->arcs.begin()->first;
    Move mloop = mk_surg0(d0, FaceRef{false, arc, Side::Left, {}}, false);
    auto d1 = mloop.tgt;
    // surgery inside the created loop splits it
    Move msplit = mk_surg1(d1, PtPos{Pt{true, mloop.loop}, Rat(1, 4)}, Side::Right,
                           PtPos{Pt{true, mloop.loop}, Rat(3, 4)}, Side::Right);
    ChainMap F = f0(msplit, cs);
    CHECK(F.commutes_with_d());
    // merge the two circles back
    std::vector<int> loops;
    for (auto& [lid, l] : msplit.tgt->loops) loops.push_back(lid);
    REQUIRE(loops.size() == 2);
    Move mmerge = mk_surg1(msplit.tgt, PtPos{Pt{true, loops[0]}, Rat(1, 2)}, Side::Left,
                           PtPos{Pt{true, loops[1]}, Rat(1, 2)}, Side::Left);
    ChainMap G = f0(mmerge, cs);
    CHECK(G.commutes_with_d());
}

TEST_CASE("R1 moves: chain maps, left inverse, degrees") {
    for (auto* A : {alg_classical(), alg_universal()}) {
        CAPTURE(A->name);
        ComplexStore cs(A, false);
        auto d = trefoil();
        int arc = d->arcs.begin()->first;
        for (Side s : {Side::Left, Side::Right})
            for (bool of : {false, true}) {
                CAPTURE(int(s));
                CAPTURE(of);
                Move up = mk_r1(d, PtPos{Pt{false, arc}, Rat(1, 2)}, s, of);
                int e = up.tgt->crossing_sign(up.x);
                ChainMap F = f0(up, cs);
                CHECK(F.commutes_with_d());
                CHECK(F.degree_respected());
                // degree bookkeeping: f0 has degree -e for negative kinks
                CHECK(F.deg == (e < 0 ? -1 : 0));
                Move down = inverse(up);
                ChainMap G = f0(down, cs);
                CHECK(G.commutes_with_d());
                CHECK(G.deg == (e < 0 ? +1 : 0));
                ChainMap GF = G.compose_after(F);
                CHECK(GF == identity_map(cs.of(d)));
            }
    }
}

TEST_CASE("R2 moves: chain maps, left inverse, branch independence") {
    for (auto* A : {alg_classical(), alg_universal()}) {
        CAPTURE(A->name);
        ComplexStore cs(A, false);
        // two circles side by side; push one over the other
        Diagram cw = loop_diagram(false, "c");
        int l1 = cw.loops.begin()->first;
        auto two0 = add_loop(cw, FaceRef{}, false);
        int l2 = two0.made.at("loop");
        auto d = share(std::move(two0.d));
        Move up = mk_r2(d, PtPos{Pt{true, l1}, Rat(1, 2)}, Side::Left, PtPos{Pt{true, l2}, Rat(1, 2)}, Side::Left);
        ChainMap F = f0(up, cs);
        CHECK(F.commutes_with_d());
        CHECK(F.deg == -1);  // II^+ has degree -e = -1
        Move down = inverse(up);
        ChainMap G = f0(down, cs);
        CHECK(G.commutes_with_d());
        CHECK(G.deg == +1);
        ChainMap GF = G.compose_after(F);
        CHECK(GF == identity_map(cs.of(d)));
    }
}

TEST_CASE("R2 on strands of a knot host") {
    const Algebra* A = alg_universal();
    ComplexStore cs(A, false);
    auto d = trefoil();
    // two arcs bounding a common face: use a face with two distinct arcs
    int arcA = -1, arcB = -1;
    for (auto& [a1, r1] : d->arcs) {
        for (auto& [a2, r2] : d->arcs) {
            if (a1 >= a2) continue;
            for (Side s1 : {Side::Left, Side::Right})
                for (Side s2 : {Side::Left, Side::Right})
                    if (arcA < 0 && d->face_of(a1, s1) == d->face_of(a2, s2)) {
                        arcA = a1;
                        arcB = a2;
                    }
        }
    }
    REQUIRE(arcA >= 0);
    Side sA = d->face_of(arcA, Side::Left) == d->face_of(arcB, Side::Left) ||
                      d->face_of(arcA, Side::Left) == d->face_of(arcB, Side::Right)
                  ? Side::Left
                  : Side::Right;
    Side sB = d->face_of(arcB, Side::Left) == d->face_of(arcA, sA) ? Side::Left : Side::Right;
    Move up = mk_r2(d, PtPos{Pt{false, arcA}, Rat(1, 2)}, sA, PtPos{Pt{false, arcB}, Rat(1, 2)}, sB);
    ChainMap F = f0(up, cs);
    CHECK(F.commutes_with_d());
    Move down = inverse(up);
    ChainMap G = f0(down, cs);
    CHECK(G.compose_after(F) == identity_map(cs.of(d)));
}

TEST_CASE("R3 f0 is a chain map in both chiralities over the universal ring") {
    const Algebra* A = alg_universal();
    ComplexStore cs(A, false);
    std::set<bool> seen;
    for (auto word : {std::vector<int>{1, 2, 1}, std::vector<int>{2, 1, 2}, std::vector<int>{-1, -2, -1},
                      std::vector<int>{-2, -1, -2}}) {
        BraidResult br = braid_closure(3, word, "host");
        auto d = share(std::move(br.d));
        Move m = mk_r3(d, br.crossing_of_letter[0], br.crossing_of_letter[1], br.crossing_of_letter[2]);
        CAPTURE(m.r3.positive);
        ChainMap F = f0(m, cs);
        CHECK(F.commutes_with_d());
        CHECK(F.deg == 0);
        seen.insert(m.r3.positive);
        // inverse move is also R3 and a chain map
        Move g = inverse(m);
        ChainMap G = f0(g, cs);
        CHECK(G.commutes_with_d());
    }
    CHECK(seen == std::set<bool>{false, true});
}

TEST_CASE("oriented types: kinks cover sign combinations") {
    std::set<std::string> types;
    for (bool hostccw : {true, false})
        for (Side s : {Side::Left, Side::Right})
            for (bool of : {false, true}) {
                Diagram u = loop_diagram(hostccw);
                int lid = u.loops.begin()->first;
                auto d = share(std::move(u));
                Move up = mk_r1(d, PtPos{Pt{true, lid}, Rat(1, 2)}, s, of);
                types.insert(up.otype().str());
            }
    // 8 host configurations, all typed; both crossing signs appear
    bool plus = false, minus = false;
    for (auto& t : types) {
        if (t.substr(0, 4) == "I+(+") plus = true;
        if (t.substr(0, 4) == "I+(-") minus = true;
    }
    CHECK(plus);
    CHECK(minus);
}

TEST_CASE("oriented types: surgery and R2 and R3") {
    // surgery 0: clockwise circle in the outer region is type (0,-,+)
    auto e = share(empty_diagram());
    Move s0 = mk_surg0(e, FaceRef{}, false);
    CHECK(s0.otype().str() == "(0,-,+)");
    // surgery 1 inside it: type (1,-,-)
    Move s1 = mk_surg1(s0.tgt, PtPos{Pt{true, s0.loop}, Rat(1, 4)}, Side::Right,
                       PtPos{Pt{true, s0.loop}, Rat(3, 4)}, Side::Right);
    CHECK(s1.otype().str() == "(1,-,-)");
    // merge back: type (1,+,+)
    std::vector<int> loops;
    for (auto& [lid, l] : s1.tgt->loops) loops.push_back(lid);
    Move s2 = mk_surg1(s1.tgt, PtPos{Pt{true, loops[0]}, Rat(1, 2)}, Side::Left,
                       PtPos{Pt{true, loops[1]}, Rat(1, 2)}, Side::Left);
    CHECK(s2.otype().str() == "(1,+,+)");
    // remove: (2,-,+)
    std::vector<int> l2;
    for (auto& [lid, l] : s2.tgt->loops) l2.push_back(lid);
    REQUIRE(l2.size() == 1);
    Move s3 = mk_surg2(s2.tgt, l2[0]);
    CHECK(s3.otype().str() == "(2,-,+)");

    // R3 inverse typing law: inverse of III(e,a,b,c,h) is III(e,-a,-b,-c,-h)
    BraidResult br = braid_closure(3, {1, 2, 1}, "host");
    auto d = share(std::move(br.d));
    Move m = mk_r3(d, br.crossing_of_letter[0], br.crossing_of_letter[1], br.crossing_of_letter[2]);
    OrientedType t1 = m.otype();
    OrientedType t2 = inverse(m).otype();
    CHECK(t1.e == t2.e);
    CHECK(t1.a == -t2.a);
    CHECK(t1.b == -t2.b);
    CHECK(t1.c == -t2.c);
    CHECK(t1.h == -t2.h);
}

TEST_CASE("f1 level: chain maps and homotopy inverses") {
    const Algebra* A = alg_classical_q();
    ComplexStore cs(A, true);
    auto d = trefoil();
    int arc = d->arcs.begin()->first;
    Move up = mk_r1(d, PtPos{Pt{false, arc}, Rat(1, 2)}, Side::Left, false);
    ChainMap F = f1(up, cs);
    CHECK(F.commutes_with_d());
    CHECK(F.deg == 0);  // f1 always degree 0
    Move down = inverse(up);
    ChainMap G = f1(down, cs);
    CHECK(G.commutes_with_d());
    CHECK(G.deg == 0);
    // mutual homotopy inverses: equality on homology over Q
    ChainMap GF = G.compose_after(F);
    CHECK(homology_maps_equal(GF, identity_map(cs.of(d))));
    ChainMap FG = F.compose_after(G);
    CHECK(homology_maps_equal(FG, identity_map(cs.of(up.tgt))));
}

TEST_CASE("fK with trivial data equals f1") {
    const Algebra* A = alg_classical();
    ComplexStore cs(A, true);
    KhovanovData triv = KhovanovData::trivial(A);
    auto d = trefoil();
    int arc = d->arcs.begin()->first;
    Move up = mk_r1(d, PtPos{Pt{false, arc}, Rat(1, 2)}, Side::Right, true);
    CHECK(fK(up, triv, cs) == f1(up, cs));
    Move s0 = mk_surg0(d, FaceRef{false, arc, Side::Left, {}}, true);
    CHECK(fK(s0, triv, cs) == f1(s0, cs));
}

TEST_CASE("fK with classical data is a chain map") {
    const Algebra* A = alg_classical();
    ComplexStore cs(A, true);
    KhovanovData cd = KhovanovData::classical(A);
    cd.validate_units();
    auto d = trefoil();
    int arc = d->arcs.begin()->first;
    Move up = mk_r1(d, PtPos{Pt{false, arc}, Rat(1, 2)}, Side::Left, true);
    ChainMap F = fK(up, cd, cs);
    CHECK(F.commutes_with_d());
    BraidResult br = braid_closure(3, {1, 2, 1}, "host");
    auto d3 = share(std::move(br.d));
    Move m3 = mk_r3(d3, br.crossing_of_letter[0], br.crossing_of_letter[1], br.crossing_of_letter[2]);
    ChainMap F3 = fK(m3, cd, cs);
    CHECK(F3.commutes_with_d());
}

TEST_CASE("classify_move on a kink") {
    auto d = trefoil();
    int arc = d->arcs.begin()->first;
    Move up = mk_r1(d, PtPos{Pt{false, arc}, Rat(1, 2)}, Side::Left, true);
    Locus loc;
    loc.kind = MoveKind::R1Up;
    loc.arcs = {arc};
    Move found = classify_move(d, up.tgt, loc);
    CHECK(found.kind == MoveKind::R1Up);
    CHECK(found.otype() == up.otype());
    // error path: not elementary
    auto far = trefoil();
    CHECK_THROWS_AS(classify_move(d, far, loc), NotElementary);
}
