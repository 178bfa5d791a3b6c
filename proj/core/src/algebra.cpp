#include "khovfun/algebra.hpp"

#include <deque>
#include <memory>
#include <sstream>

namespace khovfun {

AlgElem::AlgElem(const Algebra* a, RingElem uu, RingElem vv) : alg(a), u(std::move(uu)), v(std::move(vv)) {}

static void check_alg(const AlgElem& a, const AlgElem& b) {
    if (a.alg != b.alg) throw RingMismatch("algebra mismatch");
}

AlgElem AlgElem::operator+(const AlgElem& o) const {
    check_alg(*this, o);
    return AlgElem(alg, u + o.u, v + o.v);
}
AlgElem AlgElem::operator-(const AlgElem& o) const {
    check_alg(*this, o);
    return AlgElem(alg, u - o.u, v - o.v);
}
AlgElem AlgElem::operator-() const { return AlgElem(alg, -u, -v); }

AlgElem AlgElem::operator*(const AlgElem& o) const {
    check_alg(*this, o);
    // (u1+v1 g)(u2+v2 g), g^2 = s g - p
    RingElem uu = u * o.u - alg->p * (v * o.v);
    RingElem vv = u * o.v + v * o.u + alg->s * (v * o.v);
    return AlgElem(alg, std::move(uu), std::move(vv));
}
AlgElem AlgElem::operator*(const RingElem& c) const { return AlgElem(alg, u * c, v * c); }

AlgElem AlgElem::pow(int k) const {
    if (k < 0) return invert().pow(-k);
    AlgElem r = alg->one();
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
}

AlgElem AlgElem::involute() const { return AlgElem(alg, u + v * alg->s, -v); }

AlgElem AlgElem::conj(int sign) const { return sign >= 0 ? *this : involute(); }

RingElem AlgElem::norm() const {
    // (u+vg)(u+vs-vg) = u^2 + uvs + v^2 p
    return u * u + u * v * alg->s + v * v * alg->p;
}

AlgElem AlgElem::invert() const {
    RingElem n = norm();
    RingElem ninv = n.invert_unit();
    AlgElem bar = involute();
    return AlgElem(alg, bar.u * ninv, bar.v * ninv);
}

bool AlgElem::is_unit() const {
    try {
        norm().invert_unit();
        return true;
    } catch (const NotAUnit&) {
        return false;
    }
}

std::string AlgElem::str() const {
    std::ostringstream os;
    if (is_zero()) return "0";
    bool wrote = false;
    if (!u.is_zero()) {
        os << "(" << u.str() << ")";
        wrote = true;
    }
    if (!v.is_zero()) {
        if (wrote) os << " + ";
        os << "(" << v.str() << ")*gen";
    }
    return os.str();
}

// ------------------------------------------------------------------ tensors

TensorElem TensorElem::unit(const Algebra* a, int q) {
    TensorElem t(a, q);
    t.coeff[0] = a->K->one();
    return t;
}

bool TensorElem::operator==(const TensorElem& o) const {
    return alg == o.alg && arity == o.arity && coeff == o.coeff;
}

void TensorElem::add_term(uint32_t mask, const RingElem& c) {
    if (c.is_zero()) return;
    auto it = coeff.find(mask);
    if (it == coeff.end()) {
        coeff.emplace(mask, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) coeff.erase(it);
    }
}

TensorElem TensorElem::operator+(const TensorElem& o) const {
    TensorElem r = *this;
    for (auto& [m, c] : o.coeff) r.add_term(m, c);
    return r;
}
TensorElem TensorElem::operator-(const TensorElem& o) const {
    TensorElem r = *this;
    for (auto& [m, c] : o.coeff) r.add_term(m, -c);
    return r;
}
TensorElem TensorElem::scale(const RingElem& c) const {
    TensorElem r(alg, arity);
    for (auto& [m, k] : coeff) r.add_term(m, k * c);
    return r;
}

TensorElem TensorElem::mult_factor(int i, const AlgElem& x) const {
    TensorElem r(alg, arity);
    uint32_t bit = 1u << i;
    for (auto& [m, c] : coeff) {
        if (!(m & bit)) {
            r.add_term(m, c * x.u);
            r.add_term(m | bit, c * x.v);
        } else {
            // g*(u+vg) = u g + v(s g - p)
            r.add_term(m & ~bit, -(c * x.v * alg->p));
            r.add_term(m, c * x.u + c * x.v * alg->s);
        }
    }
    return r;
}

TensorElem TensorElem::merge(int i, int j) const {
    // multiply slot j into slot i, remove slot j
    TensorElem r(alg, arity - 1);
    uint32_t bi = 1u << i, bj = 1u << j;
    for (auto& [m, c] : coeff) {
        int gi = (m & bi) ? 1 : 0, gj = (m & bj) ? 1 : 0;
        // strip bit j, compact mask
        uint32_t low = m & (bj - 1);
        uint32_t high = (m >> (j + 1)) << j;
        uint32_t base = (low | high);
        int inew = i < j ? i : i - 1;
        uint32_t bni = 1u << inew;
        base &= ~bni;
        // g^gi * g^gj
        if (gi + gj <= 1) {
            r.add_term(gi + gj ? (base | bni) : base, c);
        } else {  // g^2 = s g - p
            r.add_term(base | bni, c * alg->s);
            r.add_term(base, -(c * alg->p));
        }
    }
    return r;
}

TensorElem TensorElem::split(int i) const {
    // coproduct on slot i; the new slot is appended at index arity
    TensorElem r(alg, arity + 1);
    uint32_t bi = 1u << i, bn = 1u << arity;
    for (auto& [m, c] : coeff) {
        int gi = (m & bi) ? 1 : 0;
        uint32_t base = m & ~bi;
        // Delta(g^gi) = (g^gi in slot i) * Delta(1)
        for (int a = 0; a <= 1; ++a)
            for (int b = 0; b <= 1; ++b) {
                const RingElem& k = alg->cop[a][b];
                if (k.is_zero()) continue;
                // slot i gets g^{gi} * g^a, slot new gets g^b
                RingElem cc = c * k;
                int tot = gi + a;
                if (tot <= 1) {
                    uint32_t mm = base | (tot ? bi : 0) | (b ? bn : 0);
                    r.add_term(mm, cc);
                } else {
                    r.add_term(base | bi | (b ? bn : 0), cc * alg->s);
                    r.add_term(base | (b ? bn : 0), -(cc * alg->p));
                }
            }
    }
    return r;
}

TensorElem TensorElem::counit_slot(int i) const {
    TensorElem r(alg, arity - 1);
    uint32_t bi = 1u << i;
    for (auto& [m, c] : coeff) {
        const RingElem& e = (m & bi) ? alg->eps_gen : alg->t;
        uint32_t low = m & (bi - 1);
        uint32_t high = (m >> (i + 1)) << i;
        r.add_term(low | high, c * e);
    }
    return r;
}

TensorElem TensorElem::insert_slot(const AlgElem& x) const {
    TensorElem r(alg, arity + 1);
    uint32_t bn = 1u << arity;
    for (auto& [m, c] : coeff) {
        r.add_term(m, c * x.u);
        r.add_term(m | bn, c * x.v);
    }
    return r;
}

TensorElem TensorElem::permute(const std::vector<int>& newFromOld) const {
    TensorElem r(alg, arity);
    for (auto& [m, c] : coeff) {
        uint32_t mm = 0;
        for (int i = 0; i < arity; ++i)
            if (m & (1u << i)) mm |= 1u << newFromOld[i];
        r.add_term(mm, c);
    }
    return r;
}

std::string TensorElem::str() const {
    if (coeff.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, c] : coeff) {
        if (!first) os << " + ";
        os << "(" << c.str() << ")*[";
        for (int i = 0; i < arity; ++i) os << ((m >> i) & 1);
        os << "]";
        first = false;
    }
    return os.str();
}

// ------------------------------------------------------------------ algebra

AlgElem Algebra::zero() const { return AlgElem(this, K->zero(), K->zero()); }
AlgElem Algebra::one() const { return AlgElem(this, K->one(), K->zero()); }
AlgElem Algebra::gen() const { return AlgElem(this, K->zero(), K->one()); }
AlgElem Algebra::from_K(const RingElem& c) const { return AlgElem(this, c, K->zero()); }
AlgElem Algebra::from_int(long n) const { return from_K(K->from_int(n)); }

RingElem Algebra::counit(const AlgElem& x) const { return x.u * t + x.v * eps_gen; }

TensorElem Algebra::coproduct(const AlgElem& x) const {
    TensorElem start(this, 1);
    start.add_term(0, x.u);
    start.add_term(1, x.v);
    return start.split(0);
}

RingElem Algebra::pairing(const AlgElem& x, const AlgElem& y) const {
    AlgElem r = x * y.involute() + y * x.involute();
    if (!r.v.is_zero()) throw RingError("pairing did not land in K");
    return r.u;
}

RingElem Algebra::closed_surface_value(int genus) const { return counit(delta.pow(genus)); }

bool Algebra::genus_series_check(int n) const {
    // compare sum x^p eps(delta^p) with (t + x(2 - t^2 s))/(1 - x t s + x^2 s), s = delta*deltabar
    AlgElem dd = delta * delta.involute();
    if (!dd.v.is_zero()) throw RingError("delta*deltabar not in K");
    RingElem S = dd.u;
    // numerator coefficients: n0 = t, n1 = 2 - t^2 S, rest 0
    // denominator: 1 - x tS + x^2 S
    std::vector<RingElem> series;
    series.reserve(n);
    RingElem tS = t * S;
    for (int k = 0; k < n; ++k) {
        RingElem num = (k == 0) ? t : (k == 1 ? K->from_int(2) - t * t * S : K->zero());
        RingElem c = num;
        if (k >= 1) c = c + tS * series[k - 1];
        if (k >= 2) c = c - S * series[k - 2];
        series.push_back(c);
    }
    for (int k = 0; k < n; ++k)
        if (!(series[k] == closed_surface_value(k))) return false;
    return true;
}

AlgElem Algebra::parse(const std::string& text) const {
    // syntax: ring-element syntax where 'gen' names the algebra generator.
    // We parse by substituting: treat as polynomial in gen of degree <= 1 after reduction.
    // Simple approach: split on top-level '+'/'-' is fragile; instead parse with an
    // extended ring that has gen as an extra variable is overkill. Accept the forms
    // "<K-elem>", "(<K-elem>)*gen", and sums thereof via a tiny recursive scan.
    // Pragmatically: allow "U ; V" meaning u + v*gen with U,V in K syntax.
    auto semi = text.find(';');
    if (semi == std::string::npos) return from_K(K->parse(text));
    RingElem u = K->parse(text.substr(0, semi));
    RingElem v = K->parse(text.substr(semi + 1));
    return AlgElem(this, u, v);
}

namespace {

std::deque<std::unique_ptr<Algebra>>& areg() {
    static std::deque<std::unique_ptr<Algebra>> r;
    return r;
}

}  // namespace

const Algebra* make_algebra(const std::string& name, const Ring* K, RingElem s, RingElem p,
                            RingElem omega_u, RingElem omega_v) {
    areg().push_back(std::make_unique<Algebra>());
    Algebra* A = areg().back().get();
    A->name = name;
    A->K = K;
    A->s = std::move(s);
    A->p = std::move(p);
    A->omega = AlgElem(A, std::move(omega_u), std::move(omega_v));
    RingElem N = A->omega.norm();
    RingElem Ninv = N.invert_unit();  // throws when omega is not invertible
    // eps(1) = -w1/N, eps(gen) = w0/N  (from eps(omega)=0, eps(omega*gen)=1)
    A->t = -(A->omega.v * Ninv);
    A->eps_gen = A->omega.u * Ninv;
    A->beta = A->gen() - A->gen().involute();
    A->delta = A->omega * A->beta;
    A->theta = A->omega * A->obar().invert();
    // Delta(1) = 1 (x) omega*gen - genbar (x) omega, expanded on the gen-basis
    // = (-w1 p - s w0)(1x1) + w0 (1 x g) + w0 (g x 1) + w1 (g x g)
    const RingElem& w0 = A->omega.u;
    const RingElem& w1 = A->omega.v;
    A->cop[0][0] = -(w1 * A->p) - A->s * w0;
    A->cop[0][1] = w0;
    A->cop[1][0] = w0;
    A->cop[1][1] = w1;
    return A;
}

const Algebra* alg_classical() {
    static const Algebra* a =
        make_algebra("classical", ring_Z(), ring_Z()->zero(), ring_Z()->zero(), ring_Z()->one(), ring_Z()->zero());
    return a;
}
const Algebra* alg_classical_q() {
    static const Algebra* a =
        make_algebra("classical-q", ring_Q(), ring_Q()->zero(), ring_Q()->zero(), ring_Q()->one(), ring_Q()->zero());
    return a;
}
const Algebra* alg_lee() {
    static const Algebra* a =
        make_algebra("lee", ring_Z(), ring_Z()->zero(), ring_Z()->from_int(-1), ring_Z()->one(), ring_Z()->zero());
    return a;
}
const Algebra* alg_lee_q() {
    static const Algebra* a =
        make_algebra("lee-q", ring_Q(), ring_Q()->zero(), ring_Q()->from_int(-1), ring_Q()->one(), ring_Q()->zero());
    return a;
}

const Algebra* alg_universal() {
    static const Algebra* a = [] {
        const Ring* R = ring_R0();
        RingElem s = r0_alpha() + r0_abar();
        RingElem p = r0_alpha() * r0_abar();
        // omega = a + b*gen where gen plays alpha
        return make_algebra("universal", R, s, p, r0_a(), r0_b());
    }();
    return a;
}

const Algebra* alg_special() {
    static const Algebra* a = [] {
        const Ring* R = ring_Ksp();
        // gen^2 = 1: s = 0, p = -1; omega = x^2 with x = (u+u^-1)/2 + (u-u^-1)/2 gen.
        // Writing the base units as x,y: omega = (x^2+x^-2)/2 + ((x^2-x^-2)/2) gen.
        RingElem half = R->from_rat(Rat(1, 2));
        RingElem x2 = R->unit("x", 2), xm2 = R->unit("x", -2);
        RingElem wu = (x2 + xm2) * half;
        RingElem wv = (x2 - xm2) * half;
        return make_algebra("special", R, R->zero(), R->from_int(-1), wu, wv);
    }();
    return a;
}

const Algebra* algebra_by_name(const std::string& name) {
    if (name == "classical") return alg_classical();
    if (name == "classical-q") return alg_classical_q();
    if (name == "lee") return alg_lee();
    if (name == "lee-q") return alg_lee_q();
    if (name == "universal") return alg_universal();
    if (name == "special") return alg_special();
    return nullptr;
}

const Algebra* make_rational_specialization(unsigned seed) {
    // deterministic LCG over small rationals; ensure omega invertible (norm != 0)
    auto next = [&]() {
        seed = seed * 1664525u + 1013904223u;
        return int(seed >> 24) % 7 - 3;
    };
    const Ring* Q = ring_Q();
    for (int tries = 0; tries < 100; ++tries) {
        long sv = next(), pv = next(), w0 = next(), w1 = next();
        Rat N = Rat(w0) * w0 + Rat(w0) * w1 * sv + Rat(w1) * w1 * pv;
        if (N == 0) continue;
        std::ostringstream nm;
        nm << "spec(" << sv << "," << pv << "," << w0 << "," << w1 << ")";
        return make_algebra(nm.str(), Q, Q->from_int(sv), Q->from_int(pv), Q->from_int(w0), Q->from_int(w1));
    }
    throw RingError("could not build rational specialization");
}

}  // namespace khovfun
