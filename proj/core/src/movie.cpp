#include "khovfun/movie.hpp"

#include <sstream>

namespace khovfun {

MovieSequence MovieSequence::start(std::shared_ptr<const Diagram> d) {
    MovieSequence s;
    s.frames.push_back(std::move(d));
    return s;
}

void MovieSequence::push(Move m) {
    if (m.src.get() != frames.back().get()) throw MovieError("movie frames do not chain");
    frames.push_back(m.tgt);
    moves.push_back(std::move(m));
}

MovieSequence MovieSequence::then(const MovieSequence& next) const {
    if (next.frames.front().get() != frames.back().get()) throw MovieError("movie concatenation mismatch");
    MovieSequence s = *this;
    for (const Move& m : next.moves) s.push(m);
    return s;
}

MovieSequence MovieSequence::reversed() const {
    MovieSequence s = MovieSequence::start(frames.back());
    for (auto it = moves.rbegin(); it != moves.rend(); ++it) {
        Move inv = inverse(*it);
        // share the frame objects of this sequence
        inv.src = s.frames.back();
        s.frames.push_back(inv.tgt);
        s.moves.push_back(std::move(inv));
    }
    return s;
}

bool MovieSequence::closed() const {
    return frames.front()->crossings.empty() && frames.front()->arcs.empty() && frames.front()->loops.empty() &&
           frames.back()->crossings.empty() && frames.back()->arcs.empty() && frames.back()->loops.empty();
}

std::array<int, 4> MovieSequence::surgery_counts() const {
    std::array<int, 4> n{0, 0, 0, 0};  // n0, n1+, n1-, n2
    for (const Move& m : moves) {
        if (m.kind == MoveKind::Surg0) ++n[0];
        if (m.kind == MoveKind::Surg2) ++n[3];
        if (m.kind == MoveKind::Surg1) {
            if (m.tgt->num_components() > m.src->num_components())
                ++n[1];
            else
                ++n[2];
        }
    }
    return n;
}

ChainMap compose_movie(const MovieSequence& seq, Level level, const KhovanovData* data, ComplexStore& cs) {
    ChainMap acc = identity_map(cs.of(seq.frames.front()));
    for (const Move& m : seq.moves) {
        ChainMap f = level == Level::F0 ? f0(m, cs) : level == Level::F1 ? f1(m, cs) : fK(m, *data, cs);
        acc = f.compose_after(acc);
    }
    return acc;
}

// ----------------------------------------------------------- certificates

Certificate homotopy_check_exact(const ChainMap& f, const ChainMap& g) {
    Certificate c;
    if (f.src != g.src || f.tgt != g.tgt) {
        c.kind = CertKind::Failed;
        c.detail = "shape mismatch";
        return c;
    }
    if (f.m == g.m) {
        c.kind = CertKind::Exact;
        return c;
    }
    c.kind = CertKind::Failed;
    c.detail = "matrices differ";
    return c;
}

Certificate homotopy_check_explicit(const ChainMap& f, const ChainMap& g, const ChainMap& k) {
    Certificate c;
    Mat lhs = f.m - g.m;
    Mat rhs = f.tgt->d * k.m + k.m * f.src->d;
    if (lhs == rhs) {
        c.kind = CertKind::ExplicitHomotopy;
        return c;
    }
    c.kind = CertKind::Failed;
    c.detail = "supplied homotopy does not certify f - g";
    return c;
}

const std::vector<const Algebra*>& specialization_algebras() {
    static std::vector<const Algebra*> specs = [] {
        std::vector<const Algebra*> v{alg_classical_q(), alg_lee_q()};
        for (unsigned s : {11u, 22u, 33u}) v.push_back(make_rational_specialization(s));
        return v;
    }();
    return specs;
}

Certificate homotopy_check_specialize(const MapPairBuilder& build, bool KH) {
    Certificate c;
    for (const Algebra* alg : specialization_algebras()) {
        ComplexStore cs(alg, KH);
        auto [f, g] = build(cs);
        if (f.m == g.m) continue;
        if (!homology_maps_equal(f, g)) {
            c.kind = CertKind::Failed;
            c.detail = "homotopy system unsolvable over " + alg->name;
            return c;
        }
    }
    c.kind = CertKind::Specialized;
    c.detail = "certified-at-specializations";
    return c;
}

HomotopyTrail::HomotopyTrail(ChainMap start) : current(start), k(start.src, start.tgt, start.deg + 1) {}

void HomotopyTrail::step(const ChainMap& next, const ChainMap& stepk) {
    Mat lhs = current.m - next.m;
    Mat rhs = current.tgt->d * stepk.m + stepk.m * current.src->d;
    if (!(lhs == rhs)) throw MovieError("homotopy step does not certify");
    current = next;
    k.m = k.m + stepk.m;
}

bool HomotopyTrail::verify(const ChainMap& start) const {
    Mat lhs = start.m - current.m;
    Mat rhs = start.tgt->d * k.m + k.m * start.src->d;
    return lhs == rhs;
}

ChainMap partial_surgery_homotopy(const CubeComplex& c, int crossing, State need_mask) {
    const Diagram& dgm = *c.dg;
    int b = dgm.crossing_bit(crossing);
    ChainMap k(&c, &c, 1);
    for (State s = 0; s < State(c.res.size()); ++s) {
        if (!((s >> b) & 1)) continue;
        if ((s & need_mask) != need_mask) continue;
        State s2 = s & ~(State(1) << b);
        SurgeryInfo si = surgery_info(c.res[s], c.res[s2], crossing);
        int below = __builtin_popcount(s2 & ((State(1) << b) - 1));
        RingElem sg = c.alg->K->from_int(below % 2 ? -1 : 1);
        const Resolution& rs = c.res[s];
        int q = rs.num_circles();
        for (uint32_t mask = 0; mask < (1u << q); ++mask) {
            int src = c.gen_index(s, mask);
            uint32_t base = 0;
            for (int i = 0; i < q; ++i)
                if ((mask >> i) & 1 && si.match_src_to_tgt[i] >= 0) base |= 1u << si.match_src_to_tgt[i];
            if (!si.split) {
                int gi = (mask >> si.src_a) & 1, gj = (mask >> si.src_b) & 1;
                uint32_t bt = 1u << si.tgt_a;
                if (gi + gj <= 1) {
                    k.m.add(c.gen_index(s2, base | (gi + gj ? bt : 0)), src, sg);
                } else {
                    k.m.add(c.gen_index(s2, base | bt), src, sg * c.alg->s);
                    k.m.add(c.gen_index(s2, base), src, -(sg * c.alg->p));
                }
            } else {
                int gi = (mask >> si.src_a) & 1;
                uint32_t ba = 1u << si.tgt_a, bb = 1u << si.tgt_b;
                for (int aa = 0; aa <= 1; ++aa)
                    for (int bb2 = 0; bb2 <= 1; ++bb2) {
                        const RingElem& kk = c.alg->cop[aa][bb2];
                        if (kk.is_zero()) continue;
                        RingElem coef = sg * kk;
                        int tot = gi + aa;
                        uint32_t mB = bb2 ? bb : 0;
                        if (tot <= 1) {
                            k.m.add(c.gen_index(s2, base | (tot ? ba : 0) | mB), src, coef);
                        } else {
                            k.m.add(c.gen_index(s2, base | ba | mB), src, coef * c.alg->s);
                            k.m.add(c.gen_index(s2, base | mB), src, -(coef * c.alg->p));
                        }
                    }
            }
        }
    }
    k.m.compress();
    return k;
}

ChainMap point_hop_homotopy(const CubeComplex& c, int crossing, Pt q, const AlgElem& a) {
    // T_p(a) - T_q(abar) = d( T_q(v * omega^{-1}) . k )
    ChainMap k = prop25_homotopy(c, crossing);
    AlgElem coef = c.alg->omega.invert() * a.v;
    ChainMap tw = Tp(c, q, coef);
    ChainMap out = tw.compose_after(k);
    out.deg = 1;
    return out;
}

Lineage MovieSequence::total() const {
    Lineage lin = Lineage::identity(*frames.front());
    for (const Move& mv : moves) lin = lin.then(mv.lin);
    return lin;
}

namespace {

// candidate sample points on the shared start diagram
std::vector<PtPos> host_samples(const Diagram& host) {
    std::vector<PtPos> out;
    for (auto& [aid, a] : host.arcs)
        for (int k = 1; k <= 7; k += 2) out.push_back(PtPos{Pt{false, aid}, Rat(k, 8)});
    for (auto& [lid, l] : host.loops)
        for (int k = 1; k <= 7; k += 2) out.push_back(PtPos{Pt{true, lid}, Rat(k, 8)});
    return out;
}

DiagramIso match_seeded(const Diagram& endA, const Lineage& linA, const Diagram& endB, const Lineage& linB,
                        const Diagram& host) {
    if (endA.arcs.empty() && endB.arcs.empty()) return match_end(endA, endB);
    for (const PtPos& s : host_samples(host)) {
        PtPos pa, pb;
        Side sa, sb;
        try {
            std::tie(pa, sa) = linA.map_pt_side(s, Side::Left);
            std::tie(pb, sb) = linB.map_pt_side(s, Side::Left);
        } catch (const DiagramError&) {
            continue;
        }
        if (pa.pt.on_loop || pb.pt.on_loop) continue;
        auto iso = match_diagrams(endA, endB, pa.pt.id, pb.pt.id, sa == sb);
        if (iso) return *iso;
    }
    // no surviving common point: fall back to the structural search
    return match_end(endA, endB);
}

}  // namespace

DiagramIso match_ends_via(const MovieSequence& a, const MovieSequence& b) {
    return match_seeded(*a.last(), a.total(), *b.last(), b.total(), *a.first());
}

DiagramIso match_back_via(const MovieSequence& a) {
    return match_seeded(*a.last(), a.total(), *a.first(), Lineage::identity(*a.first()), *a.first());
}

DiagramIso match_end(const Diagram& from, const Diagram& to) {
    if (from.arcs.empty() && to.arcs.empty()) {
        // loops only: match by nesting depth and orientation
        DiagramIso out;
        std::set<int> used;
        for (auto& [la, ra] : from.loops) {
            bool ok = false;
            for (auto& [lb, rb] : to.loops) {
                if (used.count(lb)) continue;
                if (from.orient.at(ra.comp).dir != to.orient.at(rb.comp).dir) continue;
                if (ra.host.loop_chain.size() != rb.host.loop_chain.size()) continue;
                out.loops[la] = lb;
                used.insert(lb);
                ok = true;
                break;
            }
            if (!ok) throw MovieError("movie ends do not match");
        }
        if (out.loops.size() != to.loops.size()) throw MovieError("movie ends do not match");
        return out;
    }
    // try seeds over shared arc ids first, then all pairs
    for (auto& [aid, a] : from.arcs) {
        if (!to.arcs.count(aid)) continue;
        for (bool dir : {true, false}) {
            auto iso = match_diagrams(from, to, aid, aid, dir);
            if (iso) return *iso;
        }
    }
    for (auto& [aid, a] : from.arcs)
        for (auto& [bid, b] : to.arcs)
            for (bool dir : {true, false}) {
                auto iso = match_diagrams(from, to, aid, bid, dir);
                if (iso) return *iso;
            }
    throw MovieError("movie ends do not match");
}

}  // namespace khovfun
