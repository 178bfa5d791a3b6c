#pragma once

#include <memory>

#include "khovfun/algebra.hpp"
#include "khovfun/diagram.hpp"
#include "khovfun/edit.hpp"
#include "khovfun/linalg.hpp"

namespace khovfun {

// The cube complex kh(D) (or KH(D) = kh(D) (x) Lambda^+(X_-)).
// Generators are (state, monomial mask over the resolution circles); the
// maximal exterior powers contribute degree shifts and signs only.
struct CubeComplex {
    std::shared_ptr<const Diagram> dg;
    const Algebra* alg = nullptr;
    bool KH = false;
    int nneg = 0;  // |X_-| (0 unless KH)

    std::vector<Resolution> res;  // per state
    std::vector<int> offset;      // generator base index per state
    int ngen = 0;
    Mat d;  // differential, degree -1

    static CubeComplex build(std::shared_ptr<const Diagram> dg, const Algebra* alg, bool KH);

    int gen_index(State s, uint32_t mask) const { return offset[s] + int(mask); }
    std::pair<State, uint32_t> gen_at(int idx) const;
    int hdeg_state(State s) const;  // homological degree of the state summand
    int hdeg(int idx) const { return hdeg_state(gen_at(idx).first); }
    int min_deg() const;
    int max_deg() const;
    std::vector<int> gens_in_degree(int n) const;
};

struct ChainMap {
    const CubeComplex* src = nullptr;
    const CubeComplex* tgt = nullptr;
    int deg = 0;
    Mat m;

    ChainMap() = default;
    ChainMap(const CubeComplex* s, const CubeComplex* t, int dg) : src(s), tgt(t), deg(dg), m(t->ngen, s->ngen) {}

    bool commutes_with_d() const;  // d tgt . f == (-1)^deg f . d src
    ChainMap compose_after(const ChainMap& first) const;  // this . first
    ChainMap operator+(const ChainMap& o) const;
    ChainMap operator-(const ChainMap& o) const;
    ChainMap scaled(const RingElem& c) const;
    bool operator==(const ChainMap& o) const;
    bool is_zero() const { return m.is_zero(); }
    bool degree_respected() const;  // entries connect hdeg n -> n+deg only
};

ChainMap identity_map(const CubeComplex& c);
ChainMap zero_map(const CubeComplex& src, const CubeComplex& tgt, int deg);

// T_p(a): multiply the tensor factor of the circle through p
ChainMap Tp(const CubeComplex& c, Pt p, const AlgElem& a);
// \hat T_p(a): T_p(a) or T_p(abar) by the parity of the winding left of p
ChainMap That(const CubeComplex& c, Pt p, const AlgElem& a);

// chain isomorphism induced by a planar diagram isomorphism
ChainMap iso_from_match(const CubeComplex& A, const CubeComplex& B, const DiagramIso& iso);

// explicit homotopy k for Prop 2.5: T_p(alpha) - T_q(abar) up to T_q(omega),
// along a path through exactly one crossing x
ChainMap prop25_homotopy(const CubeComplex& c, int x);

// homology of complexes over Z or Q
struct HomologySummary {
    std::map<int, int> rank;
    std::map<int, std::vector<Int>> torsion;  // over Z
    bool over_Z = false;
};
HomologySummary homology_ranks(const CubeComplex& c);

// induced maps on homology over a field (K = Q): equality of H(f), H(g).
// Over a field two chain maps are homotopic iff they agree on homology.
bool homology_maps_equal(const ChainMap& f, const ChainMap& g);
bool is_quasi_iso_onto_zero_diff(const ChainMap& f);  // H(src) -> tgt (zero differential)

}  // namespace khovfun
