#include "khovfun/ring.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <mutex>
#include <sstream>

namespace khovfun {

Poly Poly::constant(const Rat& c) {
    Poly p;
    if (c != 0) p.terms.push_back({Monomial{}, c});
    return p;
}

Poly Poly::variable(int idx, int pow) {
    Poly p;
    if (pow == 0) return constant(1);
    Monomial m;
    m.e[idx] = int16_t(pow);
    p.terms.push_back({m, Rat(1)});
    return p;
}

void Poly::normalize() {
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return b.first < a.first; });
    std::vector<std::pair<Monomial, Rat>> out;
    out.reserve(terms.size());
    for (auto& t : terms) {
        if (!out.empty() && out.back().first == t.first)
            out.back().second += t.second;
        else
            out.push_back(t);
        if (!out.empty() && out.back().second == 0) out.pop_back();
    }
    terms = std::move(out);
}

Poly Poly::operator+(const Poly& o) const {
    Poly r;
    r.terms.reserve(terms.size() + o.terms.size());
    size_t i = 0, j = 0;
    while (i < terms.size() && j < o.terms.size()) {
        if (terms[i].first == o.terms[j].first) {
            Rat c = terms[i].second + o.terms[j].second;
            if (c != 0) r.terms.push_back({terms[i].first, c});
            ++i, ++j;
        } else if (o.terms[j].first < terms[i].first) {
            r.terms.push_back(terms[i++]);
        } else {
            r.terms.push_back(o.terms[j++]);
        }
    }
    while (i < terms.size()) r.terms.push_back(terms[i++]);
    while (j < o.terms.size()) r.terms.push_back(o.terms[j++]);
    return r;
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& t : r.terms) t.second = -t.second;
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::raw_mul(const Poly& o) const {
    Poly r;
    if (is_zero() || o.is_zero()) return r;
    std::map<Monomial, Rat, std::greater<Monomial>> acc;
    for (auto& t1 : terms)
        for (auto& t2 : o.terms) acc[t1.first * t2.first] += t1.second * t2.second;
    r.terms.reserve(acc.size());
    for (auto& [m, c] : acc)
        if (c != 0) r.terms.push_back({m, c});
    return r;
}

const Rat* Poly::constant_coeff() const {
    for (auto& t : terms)
        if (t.first.is_one()) return &t.second;
    return nullptr;
}

int Ring::var_index(const std::string& v) const {
    for (int i = 0; i < nvars(); ++i)
        if (vars[i] == v) return i;
    throw RingError("no variable '" + v + "' in ring " + name);
}

void Ring::reduce(Poly& p) const {
    bool any = false;
    for (int i = 0; i < nvars(); ++i)
        if (quot_degree[i]) any = true;
    if (!any) return;
    bool again = true;
    while (again) {
        again = false;
        Poly out;
        for (auto& [m, c] : p.terms) {
            int v = -1;
            for (int i = 0; i < nvars(); ++i)
                if (quot_degree[i] && m.e[i] >= quot_degree[i]) {
                    v = i;
                    break;
                }
            if (v < 0) {
                out.terms.push_back({m, c});
                continue;
            }
            again = true;
            Monomial rest = m;
            rest.e[v] = int16_t(rest.e[v] - quot_degree[v]);
            Poly part;
            part.terms.push_back({rest, c});
            out = out + part.raw_mul(quot_rhs[v]);
        }
        out.normalize();
        p = std::move(out);
    }
}

Poly Ring::mul(const Poly& a, const Poly& b) const {
    Poly r = a.raw_mul(b);
    reduce(r);
    return r;
}

// exact division attempt: q with a = q*b, nullopt otherwise
static std::optional<Poly> try_divide(const Poly& a, const Poly& b) {
    if (b.is_zero()) return std::nullopt;
    Poly rem = a, q;
    const Monomial& lead = b.terms[0].first;
    const Rat& lc = b.terms[0].second;
    while (!rem.is_zero()) {
        const Monomial& m = rem.terms[0].first;
        if (!lead.divides(m)) return std::nullopt;
        Monomial f = m.quotient(lead);
        Rat c = rem.terms[0].second / lc;
        Poly piece;
        piece.terms.push_back({f, c});
        q = q + piece;
        rem = rem - piece.raw_mul(b);
    }
    return q;
}

RingElem::RingElem(const Ring* r, Poly n) : ring(r), num(std::move(n)) {
    den.assign(r->nunits(), 0);
    normalize();
}
RingElem::RingElem(const Ring* r, Poly n, std::vector<int32_t> d)
    : ring(r), num(std::move(n)), den(std::move(d)) {
    normalize();
}

void RingElem::normalize() {
    if (num.is_zero()) {
        den.assign(ring->nunits(), 0);
        return;
    }
    for (int i = 0; i < ring->nunits(); ++i) {
        while (den[i] > 0) {
            auto q = try_divide(num, ring->units[i]);
            if (!q) break;
            num = std::move(*q);
            --den[i];
        }
        // negative exponents mean the element carries a positive unit power
        while (den[i] < 0) {
            num = ring->mul(num, ring->units[i]);
            ++den[i];
        }
    }
}

bool RingElem::operator==(const RingElem& o) const {
    if (ring != o.ring) throw RingMismatch("comparing elements of different rings");
    return num == o.num && den == o.den;
}

static void check_same(const RingElem& a, const RingElem& b) {
    if (a.ring != b.ring) throw RingMismatch("ring mismatch");
}

RingElem RingElem::operator+(const RingElem& o) const {
    check_same(*this, o);
    std::vector<int32_t> d(ring->nunits());
    Poly a = num, b = o.num;
    for (int i = 0; i < ring->nunits(); ++i) {
        d[i] = std::max(den[i], o.den[i]);
        for (int k = den[i]; k < d[i]; ++k) a = ring->mul(a, ring->units[i]);
        for (int k = o.den[i]; k < d[i]; ++k) b = ring->mul(b, ring->units[i]);
    }
    return RingElem(ring, a + b, std::move(d));
}

RingElem RingElem::operator-() const {
    RingElem r = *this;
    r.num = -r.num;
    return r;
}

RingElem RingElem::operator-(const RingElem& o) const { return *this + (-o); }

RingElem RingElem::operator*(const RingElem& o) const {
    check_same(*this, o);
    std::vector<int32_t> d(ring->nunits());
    for (int i = 0; i < ring->nunits(); ++i) d[i] = den[i] + o.den[i];
    return RingElem(ring, ring->mul(num, o.num), std::move(d));
}

RingElem RingElem::pow(int k) const {
    if (k < 0) return invert_unit().pow(-k);
    RingElem r = ring->one();
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
}

bool RingElem::is_unit() const {
    try {
        invert_unit();
        return true;
    } catch (const NotAUnit&) {
        return false;
    }
}

RingElem RingElem::invert_unit() const {
    if (num.is_zero()) throw NotAUnit("zero is not a unit in " + ring->name);
    Poly n = num;
    std::vector<int32_t> e(ring->nunits(), 0);
    for (int i = 0; i < ring->nunits(); ++i) {
        while (true) {
            auto q = try_divide(n, ring->units[i]);
            if (!q) break;
            n = std::move(*q);
            ++e[i];
        }
    }
    if (!n.is_constant() || n.is_zero()) throw NotAUnit("not a product of distinguished units: " + str());
    Rat c = n.terms[0].second;
    if (!ring->rational_coeffs && c != 1 && c != -1)
        throw NotAUnit("constant factor " + c.get_str() + " is not invertible in " + ring->name);
    // inverse = (1/c) * prod units^{den[i]-e[i]}
    std::vector<int32_t> d(ring->nunits());
    Poly inum = Poly::constant(1 / c);
    for (int i = 0; i < ring->nunits(); ++i) {
        int32_t k = e[i] - den[i];  // exponent of unit i in *this
        d[i] = k;                   // negative handled by normalize()
    }
    return RingElem(ring, std::move(inum), std::move(d));
}

RingElem RingHom::apply(const RingElem& x) const {
    if (x.ring != src) throw RingMismatch("hom applied to wrong ring");
    RingElem out = dst->zero();
    for (auto& [m, c] : x.num.terms) {
        RingElem term = dst->from_rat(c);
        for (int v = 0; v < src->nvars(); ++v)
            for (int k = 0; k < m.e[v]; ++k) term = term * var_images[v];
        out = out + term;
    }
    for (int i = 0; i < src->nunits(); ++i)
        if (x.den[i] != 0) out = out * unit_images[i].invert_unit().pow(x.den[i]);
    return out;
}

RingElem RingElem::involute() const {
    if (ring->trivial_involution) return *this;
    RingElem out = ring->zero();
    for (auto& [m, c] : num.terms) {
        RingElem term = ring->from_rat(c);
        for (int v = 0; v < ring->nvars(); ++v)
            for (int k = 0; k < m.e[v]; ++k) term = term * ring->var_involutes[v];
        out = out + term;
    }
    int sign = 1;
    std::vector<int32_t> d(ring->nunits(), 0);
    for (int i = 0; i < ring->nunits(); ++i) {
        if (den[i] == 0) continue;
        const UnitImage& im = ring->unit_involutes[i];
        if (im.sign < 0 && (den[i] & 1)) sign = -sign;
        for (int j = 0; j < ring->nunits(); ++j) d[j] += den[i] * im.exp[j];
    }
    RingElem dfac(ring, Poly::constant(sign), std::move(d));
    // d may contain negative entries (unit in the numerator): pow(-1) via invert
    return out * dfac;
}

std::optional<int> RingElem::graded_degree() const {
    if (!ring->graded) return std::nullopt;
    if (num.is_zero()) return 0;
    std::optional<int> deg;
    for (auto& [m, c] : num.terms) {
        int d = 0;
        for (int v = 0; v < ring->nvars(); ++v) d += m.e[v] * ring->grade[v];
        if (deg && *deg != d) return std::nullopt;
        deg = d;
    }
    // subtract unit degrees
    for (int i = 0; i < ring->nunits(); ++i) {
        if (!den[i]) continue;
        int ud = 0;
        bool homog = true;
        std::optional<int> u;
        for (auto& [m, c] : ring->units[i].terms) {
            int d = 0;
            for (int v = 0; v < ring->nvars(); ++v) d += m.e[v] * ring->grade[v];
            if (u && *u != d) homog = false;
            u = d;
        }
        if (!homog) return std::nullopt;
        ud = *u;
        deg = *deg - den[i] * ud;
    }
    return deg;
}

RingElem Ring::from_rat(const Rat& v) const {
    if (!rational_coeffs && v.get_den() != 1)
        throw RingError("non-integer constant in integral ring " + name);
    return RingElem(this, Poly::constant(v));
}

RingElem Ring::var(const std::string& v, int pow) const {
    return RingElem(this, Poly::variable(var_index(v), pow));
}

RingElem Ring::unit(const std::string& u, int pow) const {
    for (int i = 0; i < nunits(); ++i)
        if (unit_names[i] == u) {
            std::vector<int32_t> d(nunits(), 0);
            d[i] = -pow;
            return RingElem(this, Poly::constant(1), std::move(d));
        }
    throw RingError("no unit '" + u + "' in ring " + name);
}

// ---------------------------------------------------------------- printing

std::string RingElem::str() const {
    std::ostringstream os;
    if (num.is_zero()) {
        os << "0";
    } else {
        bool first = true;
        for (auto& [m, c] : num.terms) {
            Rat a = c;
            if (first) {
                if (a < 0) {
                    os << "-";
                    a = -a;
                }
            } else {
                if (a < 0) {
                    os << " - ";
                    a = -a;
                } else {
                    os << " + ";
                }
            }
            bool needCoef = (a != 1) || m.is_one();
            bool wrote = false;
            if (needCoef) {
                os << a.get_str();
                wrote = true;
            }
            for (int v = 0; v < ring->nvars(); ++v) {
                if (!m.e[v]) continue;
                if (wrote) os << "*";
                os << ring->vars[v];
                if (m.e[v] != 1) os << "^" << m.e[v];
                wrote = true;
            }
            first = false;
        }
    }
    bool anyDen = false;
    for (auto d : den) anyDen |= (d != 0);
    if (anyDen) {
        os << " / ";
        bool w = false;
        for (int i = 0; i < ring->nunits(); ++i) {
            if (!den[i]) continue;
            if (w) os << "*";
            os << ring->unit_names[i];
            if (den[i] != 1) os << "^" << den[i];
            w = true;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------- parsing

namespace {

struct Lexer {
    const std::string& s;
    size_t i = 0;
    explicit Lexer(const std::string& t) : s(t) {}
    void skip() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    bool eof() {
        skip();
        return i >= s.size();
    }
    char peek() {
        skip();
        return i < s.size() ? s[i] : '\0';
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    std::string ident() {
        skip();
        size_t j = i;
        while (j < s.size() && (std::isalnum((unsigned char)s[j]) || s[j] == '_')) ++j;
        std::string r = s.substr(i, j - i);
        i = j;
        return r;
    }
    Rat number() {
        skip();
        size_t j = i;
        if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
        size_t d0 = j;
        while (j < s.size() && std::isdigit((unsigned char)s[j])) ++j;
        if (j == d0) throw ParseError("expected number at '" + s.substr(i) + "'");
        std::string whole = s.substr(i, j - i);
        i = j;
        if (i < s.size() && s[i] == '/') {
            // only rational syntax a/b when directly adjacent digits follow
            size_t k = i + 1;
            size_t k0 = k;
            while (k < s.size() && std::isdigit((unsigned char)s[k])) ++k;
            if (k > k0) {
                std::string denom = s.substr(i + 1, k - k0);
                i = k;
                Rat r(whole + "/" + denom);
                r.canonicalize();
                return r;
            }
        }
        return Rat(whole);
    }
    int integer() {
        Rat r = number();
        if (r.get_den() != 1) throw ParseError("expected integer exponent");
        return int(r.get_num().get_si());
    }
};

}  // namespace

RingElem Ring::parse(const std::string& text) const {
    Lexer lx(text);
    RingElem acc = zero();
    bool first = true;
    int pendingSign = 1;
    while (true) {
        if (lx.eof()) {
            if (first) throw ParseError("empty ring element");
            break;
        }
        char c = lx.peek();
        if (c == '/') break;
        if (!first) {
            if (lx.eat('+'))
                pendingSign = 1;
            else if (lx.eat('-'))
                pendingSign = -1;
            else
                throw ParseError("expected + or - in '" + text + "'");
        } else if (lx.eat('-')) {
            pendingSign = -1;
        }
        // term = factor ('*' factor)*, factor = number | name[^exp]
        RingElem term = from_rat(Rat(pendingSign));
        pendingSign = 1;
        auto factor = [&]() {
            if (std::isdigit((unsigned char)lx.peek())) {
                term = term * from_rat(lx.number());
                return;
            }
            std::string id = lx.ident();
            if (id.empty()) throw ParseError("expected factor in '" + text + "'");
            int pw = 1;
            if (lx.eat('^')) pw = lx.integer();
            bool isUnit = false;
            for (auto& u : unit_names) isUnit |= (u == id);
            term = term * (isUnit ? unit(id, pw) : var(id, pw));
        };
        factor();
        while (lx.eat('*')) factor();
        acc = acc + term;
        first = false;
    }
    if (lx.eat('/')) {
        while (true) {
            std::string id = lx.ident();
            if (id.empty()) throw ParseError("expected unit name after /");
            int pw = 1;
            if (lx.eat('^')) pw = lx.integer();
            acc = acc * unit(id, -pw);
            if (!lx.eat('*')) break;
        }
    }
    if (!lx.eof()) throw ParseError("trailing input in ring element '" + text + "'");
    return acc;
}

// ---------------------------------------------------------------- builtins

namespace {

std::deque<std::unique_ptr<Ring>>& registry() {
    static std::deque<std::unique_ptr<Ring>> r;
    return r;
}

Ring* fresh() {
    registry().push_back(std::make_unique<Ring>());
    return registry().back().get();
}

void finish_involution(Ring* R) {
    // validate: involution is an order <= 2 ring map
    for (int v = 0; v < R->nvars(); ++v) {
        RingElem img = R->var_involutes[v];
        RingElem back = img.involute();
        if (!(back == R->var(R->vars[v]))) throw RingError("involution on " + R->name + " is not an involution");
    }
}

}  // namespace

const Ring* ring_Z() {
    static const Ring* r = [] {
        Ring* R = fresh();
        R->name = "Z";
        return R;
    }();
    return r;
}

const Ring* ring_Q() {
    static const Ring* r = [] {
        Ring* R = fresh();
        R->name = "Q";
        R->rational_coeffs = true;
        return R;
    }();
    return r;
}

const Ring* ring_R0() {
    static const Ring* r = [] {
        Ring* R = fresh();
        R->name = "R0";
        R->vars = {"alpha", "abar", "a", "b"};
        R->unit_names = {"omega", "obar"};
        Poly omega = Poly::variable(2) + Poly::variable(3).raw_mul(Poly::variable(0));
        Poly obar = Poly::variable(2) + Poly::variable(3).raw_mul(Poly::variable(1));
        omega.normalize();
        obar.normalize();
        R->units = {omega, obar};
        R->trivial_involution = false;
        R->var_involutes = {R->var("abar"), R->var("alpha"), R->var("a"), R->var("b")};
        R->unit_involutes = {UnitImage{1, {0, 1}}, UnitImage{1, {1, 0}}};
        R->graded = true;
        R->grade = {-2, -2, 0, 2, 0, 0};
        finish_involution(R);
        return R;
    }();
    return r;
}

const Ring* ring_A() {
    static const Ring* r = [] {
        Ring* R = fresh();
        R->name = "A";
        R->vars = {"t", "del"};
        R->unit_names = {"theta"};
        Poly theta = Poly::constant(1) - Poly::variable(0).raw_mul(Poly::variable(1));
        theta.normalize();
        R->units = {theta};
        R->trivial_involution = false;
        // tbar = t, delbar = -theta^{-1} del
        RingElem delbar = RingElem(R, -Poly::variable(1), {1});
        R->var_involutes = {R->var("t"), delbar};
        R->unit_involutes = {UnitImage{1, {-1}}};  // thetabar = theta^{-1}
        R->graded = true;
        R->grade = {2, -2, 0, 0, 0, 0};
        finish_involution(R);
        return R;
    }();
    return r;
}

const Ring* ring_Zbeta() {
    static const Ring* r = [] {
        Ring* R = fresh();
        R->name = "Zbeta";
        R->vars = {"beta"};
        R->trivial_involution = false;
        R->var_involutes = {RingElem(R, -Poly::variable(0))};
        R->graded = true;
        R->grade = {-2, 0, 0, 0, 0, 0};
        finish_involution(R);
        return R;
    }();
    return r;
}

const Ring* ring_Ksp() {
    static const Ring* r = [] {
        Ring* R = fresh();
        R->name = "Ksp";
        R->rational_coeffs = true;
        R->vars = {"x", "y"};
        R->unit_names = {"x", "y"};
        R->units = {Poly::variable(0), Poly::variable(1)};
        return R;
    }();
    return r;
}

const Ring* ring_Zalpha2() {
    static const Ring* r = make_quotient_ring("Zalpha2", Rat(0), Rat(0), false);
    return r;
}

const Ring* make_quotient_ring(const std::string& name, const Rat& s, const Rat& p, bool rational) {
    static std::map<std::string, const Ring*> cache;
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    Ring* R = fresh();
    R->name = name;
    R->rational_coeffs = rational;
    R->vars = {"alpha"};
    R->quot_degree[0] = 2;
    Poly rhs = Poly::constant(s).raw_mul(Poly::variable(0)) - Poly::constant(p);
    rhs.normalize();
    R->quot_rhs[0] = rhs;
    R->trivial_involution = false;
    Poly img = Poly::constant(s) - Poly::variable(0);
    img.normalize();
    R->var_involutes = {RingElem(R, img)};
    finish_involution(R);
    cache[name] = R;
    return R;
}

RingElem r0_alpha() { return ring_R0()->var("alpha"); }
RingElem r0_abar() { return ring_R0()->var("abar"); }
RingElem r0_a() { return ring_R0()->var("a"); }
RingElem r0_b() { return ring_R0()->var("b"); }
RingElem r0_omega() { return r0_a() + r0_b() * r0_alpha(); }
RingElem r0_obar() { return r0_a() + r0_b() * r0_abar(); }

RingHom hom_R0_to_classical() {
    RingHom h;
    h.src = ring_R0();
    h.dst = ring_Zalpha2();
    const Ring* C = h.dst;
    RingElem alpha = C->var("alpha");
    h.var_images = {alpha, -alpha, C->one(), C->zero()};
    h.unit_images = {C->one(), C->one()};
    return h;
}

}  // namespace khovfun
