#pragma once

#include <functional>

#include "khovfun/data.hpp"
#include "khovfun/moves.hpp"

namespace khovfun {

struct MovieError : MoveError {
    using MoveError::MoveError;
};

struct MovieSequence {
    std::vector<std::shared_ptr<const Diagram>> frames;
    std::vector<Move> moves;

    static MovieSequence start(std::shared_ptr<const Diagram> d);
    void push(Move m);
    MovieSequence then(const MovieSequence& next) const;
    MovieSequence reversed() const;
    bool closed() const;  // empty start and end

    std::shared_ptr<const Diagram> first() const { return frames.front(); }
    std::shared_ptr<const Diagram> last() const { return frames.back(); }
    Lineage total() const;  // composite lineage first -> last
    // surgery counts: n0, n1+ (splitting), n1- (merging), n2
    std::array<int, 4> surgery_counts() const;
};

enum class Level { F0, F1, FK };

ChainMap compose_movie(const MovieSequence& seq, Level level, const KhovanovData* data, ComplexStore& cs);

// ----------------------------------------------------------- certificates

enum class CertKind { Exact, ExplicitHomotopy, Specialized, Failed };

struct Certificate {
    CertKind kind = CertKind::Failed;
    std::string detail;
    bool ok() const { return kind != CertKind::Failed; }
};

// exact equality
Certificate homotopy_check_exact(const ChainMap& f, const ChainMap& g);
// verify f - g = dk + kd for a supplied homotopy
Certificate homotopy_check_explicit(const ChainMap& f, const ChainMap& g, const ChainMap& k);
// certify f ~ g by comparing induced maps on homology over the configured
// field specializations (over a field this is equivalent to the solvability
// of f - g = dk + kd)
using MapPairBuilder = std::function<std::pair<ChainMap, ChainMap>(ComplexStore&)>;
Certificate homotopy_check_specialize(const MapPairBuilder& build, bool KH = true);
const std::vector<const Algebra*>& specialization_algebras();

// incremental explicit-homotopy bookkeeping: target ~ current via k
struct HomotopyTrail {
    ChainMap current;
    ChainMap k;  // degree +1 with start - current = dk + kd
    explicit HomotopyTrail(ChainMap start);
    // replace current by next, where current - next = d(step) + (step)d
    void step(const ChainMap& next, const ChainMap& stepk);
    bool verify(const ChainMap& start) const;
};

// homotopy k with d(k) = T_q(omega)(T_p(alpha) - T_q(abar)) restricted to
// summands carrying all crossings of `need`
ChainMap partial_surgery_homotopy(const CubeComplex& c, int crossing, State need_mask);

// the explicit homotopy for a point hop across one crossing:
// T_p(a) - T_q(abar) = d( v * T_q(omega^{-1}) k )  for a = u + v*gen
ChainMap point_hop_homotopy(const CubeComplex& c, int crossing, Pt q, const AlgElem& a);

// --------------------------------------------------------------- MVM moves

struct MovieMoveInstance {
    int mvm = 0;                       // 0..10
    std::string params;                // human-readable parameter tag
    MovieSequence phi, psi;            // psi empty for type-I movie moves
    bool type1 = false;                // phi is a loop D -> D (up to iso)
    DiagramIso endIso;                 // identification last(phi) ~ first (type 1)
    DiagramIso crossIso;               // identification last(phi) ~ last(psi) (type 2)
    std::map<std::string, PtPos> marks;  // p, q, r ... on the host
};

// catalog builders; host choices are minimal diagrams admitting the move
MovieMoveInstance mvm0(int variant);
MovieMoveInstance mvm1(int e, int variant);
MovieMoveInstance mvm2(int e);
MovieMoveInstance mvm3(int e, int eprime);
MovieMoveInstance mvm4(int e);
MovieMoveInstance mvm5(const std::array<int, 4>& heights);
MovieMoveInstance mvm6(int variant);
MovieMoveInstance mvm7(int e);
MovieMoveInstance mvm8(int e);
MovieMoveInstance mvm9(int e);
MovieMoveInstance mvm10(int e);

struct LemmaReport {
    std::string name;
    Certificate cert;
};

// verify the displayed identity for one instance at one level
LemmaReport verify_lemma(const MovieMoveInstance& inst, Level level, const KhovanovData* data,
                         const Algebra* alg);

struct VerifyAllReport {
    std::map<int, bool> condition;            // C(i) pass/fail
    std::vector<LemmaReport> lemmas;
    bool all() const {
        for (auto& [i, ok] : condition)
            if (!ok) return false;
        return true;
    }
};

// run the whole catalog against a Khovanov data (conditions C(0)..C(10))
VerifyAllReport verify_all(const KhovanovData& data, const Algebra* alg, bool include_mvm5 = false);

// identification of the ends of a movie branch with a reference diagram
DiagramIso match_end(const Diagram& from, const Diagram& to);
// identification seeded through the two branches' lineages (fixes the
// isotopy class relative to the untouched part of the host)
DiagramIso match_ends_via(const MovieSequence& a, const MovieSequence& b);
DiagramIso match_back_via(const MovieSequence& a);  // last ~ first

}  // namespace khovfun
