#pragma once

#include "khovfun/algebra.hpp"

namespace khovfun {

struct DataError : RingError {
    using RingError::RingError;
};
struct InvalidParametrization : DataError {
    using DataError::DataError;
};
struct NotFunctorializable : DataError {
    using DataError::DataError;
};

// Khovanov data (A,B,C,X,Y,Z): unit twists per oriented move type. Tensor
// entries are stored as pure tensors of unit algebra elements.
struct KhovanovData {
    const Algebra* alg = nullptr;

    std::map<std::array<int, 3>, AlgElem> A;                    // (e,a,h)
    std::map<std::array<int, 3>, std::array<AlgElem, 2>> B;     // (a,b,h)
    std::map<std::array<int, 4>, std::array<AlgElem, 3>> C;     // (e,a,b,c)
    std::map<std::array<int, 2>, AlgElem> X, Y, Z;              // (a,h)

    static KhovanovData trivial(const Algebra* alg);
    static KhovanovData classical(const Algebra* alg);  // Remark 5.6 table; needs omega = 1

    void validate_units() const;  // every entry invertible

    const AlgElem& getA(int e, int a, int h) const { return A.at({e, a, h}); }
    std::array<AlgElem, 2> getB(int a, int b, int h) const { return B.at({a, b, h}); }
    std::array<AlgElem, 3> getC(int e, int a, int b, int c) const { return C.at({e, a, b, c}); }
    const AlgElem& getX(int a, int h) const { return X.at({a, h}); }
    const AlgElem& getY(int a, int h) const { return Y.at({a, h}); }
    const AlgElem& getZ(int a, int h) const { return Z.at({a, h}); }

    // B^e of the movie-move conventions: B^+(a,b,h) = B(a,b,h); B^-(a,b,h) is
    // B(b,a,h) with its factors swapped; B^0 = product of the factors.
    std::array<AlgElem, 2> Be(int e, int a, int b, int h) const;
    AlgElem B0(int a, int b, int h) const;
    // componentwise power of a tensor (h = +-1)
    static std::array<AlgElem, 3> tensor_pow(const std::array<AlgElem, 3>& t, int h);

    std::string serialize() const;
    static KhovanovData parse(const std::string& text, const Algebra* alg);
};

// The (sigma, E, F, W) parametrization of Theorem-style functor data.
struct Parametrization {
    const Algebra* alg = nullptr;
    std::map<int, RingElem> sigma;              // h -> unit of K
    std::map<std::array<int, 2>, AlgElem> E;    // (e,h)
    std::map<int, AlgElem> F;                   // a
    std::map<int, std::array<AlgElem, 2>> W;    // h -> U(h) (x) V(h)

    void validate() const;  // sigma(+)sigma(-) = omega*obar etc.
    AlgElem weight() const;  // -omega F(+)F(-)/sigma(-)

    static Parametrization classical(const Algebra* alg);  // sigma=1,E=1,F=1,W=1
    static Parametrization special_state_sum();            // the x,y parametrization on alg_special()
    static Parametrization random_valid(const Algebra* alg, unsigned seed);

    std::string serialize() const;
    static Parametrization parse(const std::string& text, const Algebra* alg);
};

bool tensor2_equal(const std::array<AlgElem, 2>& a, const std::array<AlgElem, 2>& b);
bool tensor3_equal(const std::array<AlgElem, 3>& a, const std::array<AlgElem, 3>& b);

KhovanovData data_from_parametrization(const Parametrization& p);
Parametrization extract_parametrization(const KhovanovData& data);

}  // namespace khovfun
