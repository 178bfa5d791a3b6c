#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "khovfun/movie.hpp"

using namespace khovfun;

static std::shared_ptr<const Diagram> share(Diagram d) { return std::make_shared<Diagram>(std::move(d)); }

TEST_CASE("composition functoriality and empty movie") {
    const Algebra* A = alg_classical();
    ComplexStore cs(A, false);
    auto host = share(loop_diagram(true));
    MovieSequence empty = MovieSequence::start(host);
    CHECK(compose_movie(empty, Level::F0, nullptr, cs) == identity_map(cs.of(host)));
    // concatenation = composition
    int lid = host->loops.begin()->first;
    Move m1 = mk_surg0(host, FaceRef{}, false);
    Move m2 = mk_surg0(m1.tgt, FaceRef{}, true);
    MovieSequence s1 = MovieSequence::start(host);
    s1.push(m1);
    MovieSequence s2 = MovieSequence::start(m1.tgt);
    s2.push(m2);
    MovieSequence s12 = s1.then(s2);
    ChainMap a = compose_movie(s12, Level::F0, nullptr, cs);
    ChainMap b = compose_movie(s2, Level::F0, nullptr, cs).compose_after(compose_movie(s1, Level::F0, nullptr, cs));
    CHECK(a == b);
    (void)lid;
}

TEST_CASE("surg0 then surg2 composite is multiplication by t") {
    for (auto* A : {alg_classical(), alg_universal()}) {
        ComplexStore cs(A, false);
        auto host = share(loop_diagram(false));
        Move m1 = mk_surg0(host, FaceRef{}, false);
        Move m2 = mk_surg2(m1.tgt, m1.loop);
        MovieSequence s = MovieSequence::start(host);
        s.push(m1);
        s.push(m2);
        ChainMap f = compose_movie(s, Level::F0, nullptr, cs);
        Mat tid = Mat::identity(cs.of(host).ngen, A->K).scaled(A->t);
        CHECK(f.m == tid);
    }
}

TEST_CASE("reversal composes to a homotopy equivalence on specializations") {
    auto host = share(braid_closure(2, {1, 1}).d);
    int arc = host->arcs.begin()->first;
    MovieSequence s = MovieSequence::start(host);
    Move up = mk_r1(host, PtPos{Pt{false, arc}, Rat(1, 2)}, Side::Left, true);
    s.push(up);
    MovieSequence back = s.then(s.reversed());
    MapPairBuilder build = [&](ComplexStore& scs) {
        ChainMap f = compose_movie(back, Level::F1, nullptr, scs);
        return std::make_pair(f, identity_map(scs.of(host)));
    };
    Certificate c = homotopy_check_specialize(build, true);
    CHECK(c.ok());
}

TEST_CASE("MVM instances construct") {
    CHECK_NOTHROW(mvm0(0));
    CHECK_NOTHROW(mvm0(1));
    for (int e : {1, -1}) {
        CAPTURE(e);
        CHECK_NOTHROW(mvm1(e, 0));
        CHECK_NOTHROW(mvm1(e, 1));
        CHECK_NOTHROW(mvm2(e));
        CHECK_NOTHROW(mvm6(0));
        CHECK_NOTHROW(mvm7(e));
        CHECK_NOTHROW(mvm8(e));
        CHECK_NOTHROW(mvm9(e));
        CHECK_NOTHROW(mvm10(e));
    }
    for (int e : {1, -1})
        for (int ep : {1, -1}) {
            CAPTURE(e);
            CAPTURE(ep);
            CHECK_NOTHROW(mvm3(e, ep));
        }
    for (int e : {-1, 0, 1}) {
        CAPTURE(e);
        CHECK_NOTHROW(mvm4(e));
    }
}

TEST_CASE("MVM1 lemma at all levels") {
    const Algebra* A = alg_universal();
    KhovanovData triv = KhovanovData::trivial(A);
    for (int e : {1, -1})
        for (int v : {0, 1, 2, 3}) {
            CAPTURE(e);
            CAPTURE(v);
            MovieMoveInstance inst = mvm1(e, v);
            LemmaReport r0 = verify_lemma(inst, Level::F0, nullptr, A);
            CHECK(r0.cert.kind == CertKind::Exact);
            LemmaReport r1 = verify_lemma(inst, Level::F1, nullptr, A);
            CHECK(r1.cert.kind == CertKind::Exact);
            LemmaReport rk = verify_lemma(inst, Level::FK, &triv, A);
            CHECK(rk.cert.kind == CertKind::Exact);
        }
}

TEST_CASE("MVM0 and MVM2 and MVM3 lemmas at f0/f1") {
    const Algebra* A = alg_universal();
    for (int v : {0, 1}) {
        MovieMoveInstance i0 = mvm0(v);
        CHECK(verify_lemma(i0, Level::F0, nullptr, A).cert.ok());
        CHECK(verify_lemma(i0, Level::F1, nullptr, A).cert.ok());
    }
    for (int e : {1, -1}) {
        CAPTURE(e);
        MovieMoveInstance i2 = mvm2(e);
        CHECK(verify_lemma(i2, Level::F0, nullptr, A).cert.kind == CertKind::Exact);
        CHECK(verify_lemma(i2, Level::F1, nullptr, A).cert.kind == CertKind::Exact);
    }
    for (int e : {1, -1})
        for (int ep : {1, -1}) {
            CAPTURE(e);
            CAPTURE(ep);
            MovieMoveInstance i3 = mvm3(e, ep);
            CHECK(verify_lemma(i3, Level::F0, nullptr, A).cert.kind == CertKind::Exact);
            CHECK(verify_lemma(i3, Level::F1, nullptr, A).cert.kind == CertKind::Exact);
        }
}

TEST_CASE("MVM6..MVM10 lemmas at f0") {
    const Algebra* A = alg_universal();
    CHECK(verify_lemma(mvm6(0), Level::F0, nullptr, A).cert.kind == CertKind::Exact);
    CHECK(verify_lemma(mvm6(1), Level::F0, nullptr, A).cert.kind == CertKind::Exact);
    for (int e : {1, -1}) {
        CAPTURE(e);
        CHECK(verify_lemma(mvm7(e), Level::F0, nullptr, A).cert.kind == CertKind::Exact);
        CHECK(verify_lemma(mvm8(e), Level::F0, nullptr, A).cert.kind == CertKind::Exact);
        CHECK(verify_lemma(mvm9(e), Level::F0, nullptr, A).cert.ok());
        CHECK(verify_lemma(mvm10(e), Level::F0, nullptr, A).cert.ok());
    }
}

TEST_CASE("MVM4 lemma certified") {
    const Algebra* A = alg_classical();
    for (int e : {-1, 0, 1}) {
        CAPTURE(e);
        MovieMoveInstance inst = mvm4(e);
        LemmaReport r = verify_lemma(inst, Level::F0, nullptr, A);
        CHECK(r.cert.ok());
    }
}

TEST_CASE("MVM5 idempotency over classical") {
    MovieMoveInstance inst = mvm5({1, 2, 3, 4});
    const Algebra* A = alg_classical();
    ComplexStore cs(A, false);
    ChainMap phi = compose_movie(inst.phi, Level::F0, nullptr, cs);
    ChainMap iota = iso_from_match(cs.of(inst.phi.last()), cs.of(inst.phi.first()), inst.endIso);
    ChainMap f = iota.compose_after(phi);
    ChainMap sq = f.compose_after(f);
    CHECK(sq == f);
}

TEST_CASE("verify_all with classical data") {
    const Algebra* A = alg_classical();
    KhovanovData cd = KhovanovData::classical(A);
    VerifyAllReport rep = verify_all(cd, A, false);
    for (auto& lr : rep.lemmas) {
        CAPTURE(lr.name);
        CAPTURE(lr.cert.detail);
        CHECK(lr.cert.ok());
    }
    CHECK(rep.all());
}

TEST_CASE("perturbed data fails C(6)") {
    const Algebra* A = alg_classical();
    KhovanovData cd = KhovanovData::classical(A);
    // perturb X(+,+) by -1: X(a,h)Y(-a,h) = 1 breaks
    cd.X[{1, 1}] = -cd.X[{1, 1}];
    MovieMoveInstance i6a = mvm6(0), i6b = mvm6(1);
    bool broke = false;
    for (auto* inst : {&i6a, &i6b}) {
        ComplexStore cs(A, true);
        ChainMap phi = compose_movie(inst->phi, Level::FK, &cd, cs);
        ChainMap iota = iso_from_match(cs.of(inst->phi.last()), cs.of(inst->phi.first()), inst->endIso);
        ChainMap lhs = iota.compose_after(phi);
        ChainMap rhs = identity_map(cs.of(inst->phi.first()));
        if (!homotopy_check_exact(lhs, rhs).ok() && !homology_maps_equal(lhs, rhs)) broke = true;
    }
    CHECK(broke);
}
