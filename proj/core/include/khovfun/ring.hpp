#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace khovfun {

using Int = mpz_class;
using Rat = mpq_class;

struct RingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotAUnit : RingError {
    using RingError::RingError;
};
struct RingMismatch : RingError {
    using RingError::RingError;
};
struct ParseError : RingError {
    using RingError::RingError;
};

constexpr int kMaxVars = 6;

// Exponent vector, lexicographic order with variable 0 most significant.
struct Monomial {
    std::array<int16_t, kMaxVars> e{};

    auto operator<=>(const Monomial& o) const = default;
    Monomial operator*(const Monomial& o) const {
        Monomial r;
        for (int i = 0; i < kMaxVars; ++i) r.e[i] = int16_t(e[i] + o.e[i]);
        return r;
    }
    bool divides(const Monomial& o) const {
        for (int i = 0; i < kMaxVars; ++i)
            if (e[i] > o.e[i]) return false;
        return true;
    }
    Monomial quotient(const Monomial& o) const {  // *this / o
        Monomial r;
        for (int i = 0; i < kMaxVars; ++i) r.e[i] = int16_t(e[i] - o.e[i]);
        return r;
    }
    int total_degree() const {
        int d = 0;
        for (auto x : e) d += x;
        return d;
    }
    bool is_one() const {
        for (auto x : e)
            if (x) return false;
        return true;
    }
};

// Sparse polynomial: terms sorted by descending monomial, no zero coefficients.
struct Poly {
    std::vector<std::pair<Monomial, Rat>> terms;

    bool is_zero() const { return terms.empty(); }
    bool operator==(const Poly& o) const { return terms == o.terms; }

    static Poly zero() { return {}; }
    static Poly constant(const Rat& c);
    static Poly variable(int idx, int pow = 1);

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator-() const;
    Poly raw_mul(const Poly& o) const;  // no quotient reduction

    const Rat* constant_coeff() const;  // coefficient of monomial 1, or null
    bool is_constant() const { return terms.empty() || (terms.size() == 1 && terms[0].first.is_one()); }
    void normalize();  // sort, merge, drop zeros
};

struct Ring;

// Element n / prod(units[i]^den[i]); normalized so no unit divides n.
struct RingElem {
    const Ring* ring = nullptr;
    Poly num;
    std::vector<int32_t> den;  // one entry per distinguished unit

    RingElem() = default;
    RingElem(const Ring* r, Poly n);
    RingElem(const Ring* r, Poly n, std::vector<int32_t> d);

    bool is_zero() const { return num.is_zero(); }
    bool operator==(const RingElem& o) const;
    bool operator!=(const RingElem& o) const { return !(*this == o); }

    RingElem operator+(const RingElem& o) const;
    RingElem operator-(const RingElem& o) const;
    RingElem operator-() const;
    RingElem operator*(const RingElem& o) const;
    RingElem& operator+=(const RingElem& o) { return *this = *this + o; }
    RingElem& operator*=(const RingElem& o) { return *this = *this * o; }
    RingElem pow(int k) const;  // negative k allowed for units

    RingElem involute() const;
    bool is_involution_fixed() const { return involute() == *this; }
    RingElem invert_unit() const;  // throws NotAUnit
    bool is_unit() const;

    // q-degree under the ring's grading; nullopt when inhomogeneous.
    std::optional<int> graded_degree() const;

    std::string str() const;
    void normalize();
};

// Image of a distinguished unit under the involution: sign * prod units^exp.
struct UnitImage {
    int sign = 1;
    std::vector<int32_t> exp;
};

struct Ring {
    std::string name;
    std::vector<std::string> vars;
    std::vector<std::string> unit_names;
    std::vector<Poly> units;
    bool rational_coeffs = false;

    // involution: per-variable image; units map to sign*unit-monomials
    bool trivial_involution = true;
    std::vector<RingElem> var_involutes;
    std::vector<UnitImage> unit_involutes;

    // quotient relations var^2 -> rhs (at most degree-2, monic)
    std::array<int, kMaxVars> quot_degree{};
    std::array<Poly, kMaxVars> quot_rhs{};

    // grading weights (q-degree); all zero when ungraded
    bool graded = false;
    std::array<int, kMaxVars> grade{};

    int nvars() const { return int(vars.size()); }
    int nunits() const { return int(units.size()); }
    int var_index(const std::string& v) const;

    void reduce(Poly& p) const;  // apply quotient relations
    Poly mul(const Poly& a, const Poly& b) const;

    RingElem zero() const { return RingElem(this, Poly::zero()); }
    RingElem one() const { return RingElem(this, Poly::constant(1)); }
    RingElem from_int(long v) const { return RingElem(this, Poly::constant(Rat(v))); }
    RingElem from_rat(const Rat& v) const;
    RingElem var(const std::string& v, int pow = 1) const;
    RingElem unit(const std::string& u, int pow = 1) const;

    RingElem parse(const std::string& text) const;
};

// Ring homomorphism given by images of variables and units.
struct RingHom {
    const Ring* src = nullptr;
    const Ring* dst = nullptr;
    std::vector<RingElem> var_images;
    std::vector<RingElem> unit_images;  // must be invertible in dst

    RingElem apply(const RingElem& x) const;
};

// Built-in rings. Pointers are stable for the process lifetime.
const Ring* ring_Z();
const Ring* ring_Q();
const Ring* ring_R0();      // Z[alpha,abar,a,b] localized at omega, obar
const Ring* ring_A();       // Z[t,del] localized at theta = 1-t*del
const Ring* ring_Zbeta();   // Z[beta], involution beta -> -beta
const Ring* ring_Ksp();     // Q[x,y] localized at x,y (special state-sum base)
const Ring* ring_Zalpha2(); // Z[alpha]/(alpha^2), involution alpha -> -alpha

// Quotient ring K[alpha]/(alpha^2 - s*alpha + p) over Z or Q, for tests.
const Ring* make_quotient_ring(const std::string& name, const Rat& s, const Rat& p, bool rational);

// R0 helpers
RingElem r0_alpha();
RingElem r0_abar();
RingElem r0_a();
RingElem r0_b();
RingElem r0_omega();  // a + b*alpha as an element (unit)
RingElem r0_obar();

// specialization hom R0 -> Z[alpha]/(alpha^2) with a->1, b->0
RingHom hom_R0_to_classical();

}  // namespace khovfun
