#pragma once

#include "khovfun/complex.hpp"

namespace khovfun {

struct MoveError : DiagramError {
    using DiagramError::DiagramError;
};
struct LocusMismatch : MoveError {
    using MoveError::MoveError;
};
struct NotElementary : MoveError {
    using MoveError::MoveError;
};
struct PathNotSimple : MoveError {
    using MoveError::MoveError;
};

enum class MoveKind { R1Up, R1Down, R2Up, R2Down, R3, Surg0, Surg1, Surg2 };
std::string kind_str(MoveKind k);

// Oriented move type per the sign conventions of elementary moves:
// I^e(e',a,h) stored as kind R1Up/R1Down + (e=crossing sign, a, h);
// II^+-(a,b,h); III(e,a,b,c,h); surgery (index, a, h).
struct OrientedType {
    MoveKind kind;
    int e = 0, a = 0, b = 0, c = 0, h = 0;
    std::string str() const;
    bool operator==(const OrientedType&) const = default;
};

struct Move {
    MoveKind kind;
    std::shared_ptr<const Diagram> src, tgt;
    Lineage lin;  // src -> tgt

    int x = 0, y = 0;   // created/removed crossings (in whichever diagram has them)
    int loop = 0;       // surgery 0/2 circle
    int looparc = 0;    // R1 kink loop arc (in the kinked diagram)
    int amid = 0, bmid = 0;  // R2 bigon arcs (in the 2-crossing diagram)
    PtPos pa, pb;       // marked construction points
    Side sa = Side::Left, sb = Side::Left;
    R3Result r3;        // R3 inspection data on the source

    OrientedType otype() const;
};

Move mk_surg0(std::shared_ptr<const Diagram> d, const FaceRef& host, bool ccw);
Move mk_surg1(std::shared_ptr<const Diagram> d, PtPos a, Side sa, PtPos b, Side sb);
Move mk_surg2(std::shared_ptr<const Diagram> d, int loop);
Move mk_r1(std::shared_ptr<const Diagram> d, PtPos at, Side side, bool over_first);
Move mk_r1_inv(std::shared_ptr<const Diagram> d, int crossing, int preferred_looparc = -1);
Move mk_r2(std::shared_ptr<const Diagram> d, PtPos over, Side so, PtPos under, Side su);
Move mk_r2_inv(std::shared_ptr<const Diagram> d, int x, int y, int use_arc = -1, int use_arc2 = -1);
Move mk_r3(std::shared_ptr<const Diagram> d, int c1, int c2, int c3);
Move inverse(const Move& m);

// classify (source, target, locus): reconstructs the unique elementary move at
// the locus whose result matches `target`; throws NotElementary otherwise
struct Locus {
    MoveKind kind;
    std::vector<int> crossings;
    std::vector<int> arcs;
};
Move classify_move(std::shared_ptr<const Diagram> src, std::shared_ptr<const Diagram> tgt, const Locus& locus);

// Complex cache; all chain maps built against complexes owned here.
struct ComplexStore {
    const Algebra* alg;
    bool KH;
    ComplexStore(const Algebra* a, bool kh) : alg(a), KH(kh) {}
    const CubeComplex& of(const std::shared_ptr<const Diagram>& d);

  private:
    std::map<const Diagram*, std::unique_ptr<CubeComplex>> store;
    std::vector<std::shared_ptr<const Diagram>> keep;
};

struct KhovanovData;  // data.hpp

ChainMap f0(const Move& m, ComplexStore& cs);
ChainMap f1(const Move& m, ComplexStore& cs);  // requires cs.KH
ChainMap fK(const Move& m, const KhovanovData& data, ComplexStore& cs);

}  // namespace khovfun
