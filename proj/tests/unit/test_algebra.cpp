#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "khovfun/algebra.hpp"

using namespace khovfun;

static std::vector<const Algebra*> all_presets() {
    return {alg_classical(), alg_lee(), alg_universal(), alg_special()};
}

TEST_CASE("counit defining identities") {
    for (auto* A : all_presets()) {
        CAPTURE(A->name);
        CHECK(A->counit(A->omega) == A->K->zero());
        CHECK(A->counit(A->omega * A->gen()) == A->K->one());
        CHECK(A->counit(A->one()) == A->t);
    }
    // classical: eps(alpha) = 1 when omega = 1
    CHECK(alg_classical()->counit(alg_classical()->gen()) == ring_Z()->one());
}

TEST_CASE("structural identities t*delta = 1 - theta etc") {
    for (auto* A : all_presets()) {
        CAPTURE(A->name);
        AlgElem theta = A->theta;
        CHECK(A->delta * A->from_K(A->t) == A->one() - theta);
        CHECK(theta * theta.involute() == A->one());
        CHECK(A->delta.involute() == -(theta.invert() * A->delta));
        CHECK(A->from_K(A->t).involute() == A->from_K(A->t));
    }
}

TEST_CASE("coproduct is as stated and cocommutative") {
    for (auto* A : all_presets()) {
        CAPTURE(A->name);
        // Delta(1) = 1 (x) omega*gen - genbar (x) omega
        TensorElem d1 = A->coproduct(A->one());
        TensorElem ref(A, 2);
        AlgElem og = A->omega * A->gen();
        // 1 (x) omega*gen
        ref.add_term(0, og.u);
        ref.add_term(2, og.v);
        // - genbar (x) omega: genbar = s - gen
        // (s - gen) (x) (w0 + w1 g)
        ref.add_term(0, -(A->s * A->omega.u));
        ref.add_term(2, -(A->s * A->omega.v));
        ref.add_term(1, A->omega.u);
        ref.add_term(3, A->omega.v);
        CHECK(d1 == ref);
        // cocommutativity
        CHECK(d1 == d1.permute({1, 0}));
        // (x (x) 1) Delta(1) = Delta(x)
        AlgElem x = A->gen() * A->omega + A->from_int(2);
        TensorElem lhs = d1.mult_factor(0, x);
        CHECK(lhs == A->coproduct(x));
        CHECK(lhs == d1.mult_factor(1, x));
    }
}

TEST_CASE("(alpha (x) 1 - 1 (x) alpha) Delta(1) = 0") {
    for (auto* A : all_presets()) {
        TensorElem d1 = A->coproduct(A->one());
        TensorElem z = d1.mult_factor(0, A->gen()) - d1.mult_factor(1, A->gen());
        CHECK(z.is_zero());
    }
}

TEST_CASE("counit axiom (1 (x) eps) Delta = id") {
    for (auto* A : all_presets()) {
        CAPTURE(A->name);
        for (auto x : {A->one(), A->gen(), A->omega, A->gen() * A->gen() + A->from_int(3)}) {
            TensorElem d = A->coproduct(x);
            TensorElem left = d.counit_slot(1);   // (1 x eps)
            TensorElem right = d.counit_slot(0);  // (eps x 1)
            TensorElem ref(A, 1);
            ref.add_term(0, x.u);
            ref.add_term(1, x.v);
            CHECK(left == ref);
            CHECK(right == ref);
        }
    }
}

TEST_CASE("random Frobenius bimodule checks") {
    unsigned seed = 41;
    auto rnd = [&]() {
        seed = seed * 1664525u + 1013904223u;
        return long(seed >> 27) - 8;
    };
    for (auto* A : all_presets()) {
        for (int k = 0; k < 50; ++k) {
            AlgElem x = A->from_int(rnd()) + A->gen() * A->from_int(rnd());
            TensorElem d1 = A->coproduct(A->one());
            CHECK(d1.mult_factor(0, x) == A->coproduct(x));
        }
    }
}

TEST_CASE("mult . coproduct of 1 equals delta") {
    for (auto* A : all_presets()) {
        TensorElem d1 = A->coproduct(A->one());
        TensorElem m = d1.merge(0, 1);
        TensorElem ref(A, 1);
        ref.add_term(0, A->delta.u);
        ref.add_term(1, A->delta.v);
        CHECK(m == ref);
    }
}

TEST_CASE("closed surface values") {
    // genus 1 classical -> 2; genus 0 classical -> 0; genus 3 lee -> 8
    CHECK(alg_classical()->closed_surface_value(1) == ring_Z()->from_int(2));
    CHECK(alg_classical()->closed_surface_value(0) == ring_Z()->zero());
    CHECK(alg_lee()->closed_surface_value(3) == ring_Z()->from_int(8));
    // lee: eps(delta^p) = 2^p for odd p, 0 for even
    CHECK(alg_lee()->closed_surface_value(5) == ring_Z()->from_int(32));
    CHECK(alg_lee()->closed_surface_value(2) == ring_Z()->zero());
}

TEST_CASE("genus series check") {
    CHECK(alg_classical()->genus_series_check(6));
    CHECK(alg_lee()->genus_series_check(6));
    CHECK(alg_universal()->genus_series_check(6));
    CHECK(alg_special()->genus_series_check(6));
    for (unsigned s : {1u, 2u, 3u}) CHECK(make_rational_specialization(s)->genus_series_check(5));
}

TEST_CASE("pairing") {
    for (auto* A : all_presets()) {
        CHECK(A->pairing(A->one(), A->one()) == A->K->from_int(2));
        CHECK(A->pairing(A->gen(), A->one()) == A->s);
        CHECK(A->pairing(A->gen(), A->gen()) == A->p * A->K->from_int(2));
    }
}

TEST_CASE("twisting element uniqueness at desk scale") {
    // For classical and lee over Z: solve eps(w)=0, eps(w*gen)=1, bimodule identity
    // by brute force over w = w0 + w1 gen with small integer coefficients; the
    // Frobenius structure with counit eps_w and coproduct Delta_w(1)=1(x)w*gen-genbar(x)w
    // must reproduce the preset's (eps, Delta). Uniqueness: exactly one unit w works.
    for (auto* A : {alg_classical(), alg_lee()}) {
        CAPTURE(A->name);
        int found = 0;
        for (int w0 = -3; w0 <= 3; ++w0)
            for (int w1 = -3; w1 <= 3; ++w1) {
                AlgElem w = A->from_int(w0) + A->gen() * A->from_int(w1);
                if (!w.is_unit()) continue;
                // counit for this w: eps(1) = -w1/N, eps(gen) = w0/N over Z needs N | w0, w1
                RingElem N = w.norm();
                // build candidate coproduct and compare with the preset's Delta composed
                // against the preset counit: candidate must satisfy (1 x eps_A) Delta_w = id.
                TensorElem dw(A, 2);
                AlgElem wg = w * A->gen();
                dw.add_term(0, wg.u);
                dw.add_term(2, wg.v);
                dw.add_term(0, -(A->s * w.u));
                dw.add_term(2, -(A->s * w.v));
                dw.add_term(1, w.u);
                dw.add_term(3, w.v);
                TensorElem idlike = dw.counit_slot(1);
                TensorElem ref(A, 1);
                ref.add_term(0, A->K->one());
                bool ok = (idlike == ref) && A->counit(w).is_zero() && A->counit(w * A->gen()) == A->K->one();
                if (ok) {
                    ++found;
                    CHECK(w == A->omega);
                }
                (void)N;
            }
        CHECK(found == 1);
    }
}

TEST_CASE("special algebra is a special pair base") {
    const Algebra* A = alg_special();
    // omega = x^2 with x*xbar = 1
    const Ring* K = A->K;
    RingElem half = K->from_rat(Rat(1, 2));
    AlgElem x = A->from_K((K->unit("x") + K->unit("x", -1)) * half) +
                A->gen() * A->from_K((K->unit("x") - K->unit("x", -1)) * half);
    CHECK(x * x == A->omega);
    CHECK(x * x.involute() == A->one());
    CHECK(A->delta.is_unit());
}
