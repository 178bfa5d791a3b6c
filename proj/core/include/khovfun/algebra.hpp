#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "khovfun/ring.hpp"

namespace khovfun {

struct Algebra;

// Element u + v*gen of a rank-2 algebra K[gen]/(gen^2 - s*gen + p).
struct AlgElem {
    const Algebra* alg = nullptr;
    RingElem u, v;

    AlgElem() = default;
    AlgElem(const Algebra* a, RingElem uu, RingElem vv);

    bool is_zero() const { return u.is_zero() && v.is_zero(); }
    bool operator==(const AlgElem& o) const { return u == o.u && v == o.v; }
    bool operator!=(const AlgElem& o) const { return !(*this == o); }

    AlgElem operator+(const AlgElem& o) const;
    AlgElem operator-(const AlgElem& o) const;
    AlgElem operator-() const;
    AlgElem operator*(const AlgElem& o) const;
    AlgElem operator*(const RingElem& c) const;
    AlgElem pow(int k) const;

    AlgElem involute() const;                      // u+vs - v*gen
    AlgElem conj(int sign) const;                  // u^{(e)}: identity if +, involute if -
    RingElem norm() const;                         // x * xbar, lands in K
    AlgElem invert() const;                        // throws NotAUnit
    bool is_unit() const;

    std::string str() const;
};

// Basis tensor element of R^{\otimes q}: coefficients on gen-exponent bitmasks.
struct TensorElem {
    const Algebra* alg = nullptr;
    int arity = 0;
    std::map<uint32_t, RingElem> coeff;  // no zero entries

    TensorElem() = default;
    TensorElem(const Algebra* a, int q) : alg(a), arity(q) {}

    static TensorElem unit(const Algebra* a, int q);

    bool is_zero() const { return coeff.empty(); }
    bool operator==(const TensorElem& o) const;

    TensorElem operator+(const TensorElem& o) const;
    TensorElem operator-(const TensorElem& o) const;
    TensorElem scale(const RingElem& c) const;

    void add_term(uint32_t mask, const RingElem& c);
    TensorElem mult_factor(int i, const AlgElem& x) const;   // multiply slot i by x
    TensorElem merge(int i, int j) const;                    // product of slots i,j into i; j removed
    TensorElem split(int i) const;                           // coproduct on slot i; new slot appended
    TensorElem counit_slot(int i) const;                     // apply counit to slot i; slot removed
    TensorElem insert_slot(const AlgElem& x) const;          // append a slot carrying x
    TensorElem permute(const std::vector<int>& newFromOld) const;

    std::string str() const;
};

// Rank-2 Frobenius algebra over base ring K with twisting element omega.
struct Algebra {
    std::string name;
    const Ring* K = nullptr;
    RingElem s, p;     // gen + genbar, gen*genbar
    AlgElem omega;     // twisting element, invertible

    // derived
    RingElem t;        // counit(1)
    RingElem eps_gen;  // counit(gen)
    AlgElem delta;     // omega * (gen - genbar)
    AlgElem theta;     // omega / obar
    AlgElem beta;      // gen - genbar
    RingElem cop[2][2];  // coproduct of 1: coefficients on gen^i (x) gen^j

    AlgElem zero() const;
    AlgElem one() const;
    AlgElem gen() const;                        // the K-generator
    AlgElem from_K(const RingElem& c) const;
    AlgElem from_int(long n) const;
    AlgElem obar() const { return omega.involute(); }

    RingElem counit(const AlgElem& x) const;    // eps
    TensorElem coproduct(const AlgElem& x) const;
    RingElem pairing(const AlgElem& x, const AlgElem& y) const;  // x*ybar + y*xbar
    RingElem closed_surface_value(int genus) const;              // eps(delta^genus)
    bool genus_series_check(int n) const;

    AlgElem parse(const std::string& text) const;  // ring-element syntax with 'gen'
    std::string str(const AlgElem& x) const { return x.str(); }
};

// Construct an algebra from (K, s, p, omega). Validates that omega is a unit.
const Algebra* make_algebra(const std::string& name, const Ring* K, RingElem s, RingElem p,
                            RingElem omega_u, RingElem omega_v);

// Presets
const Algebra* alg_classical();    // Z[alpha]/(alpha^2),  omega = 1
const Algebra* alg_classical_q();  // same over Q
const Algebra* alg_lee();          // Z[alpha]/(alpha^2-1), omega = 1
const Algebra* alg_lee_q();
const Algebra* alg_universal();    // R0 as Frobenius algebra over its fixed subring
const Algebra* alg_special();      // over Ksp: s=0, p=-1, omega = x^2 (delta invertible)
const Algebra* algebra_by_name(const std::string& name);  // null when unknown

// Random Q-specialization with invertible omega (seeded, deterministic).
const Algebra* make_rational_specialization(unsigned seed);

}  // namespace khovfun
