#pragma once

#include <vector>

#include "khovfun/ring.hpp"

namespace khovfun {

// Column-sparse matrix over a ring.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<std::vector<std::pair<int, RingElem>>> col;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), col(c) {}

    void add(int r, int c, const RingElem& v);
    void set(int r, int c, RingElem v) { col[c].push_back({r, std::move(v)}); }
    void compress();  // merge duplicate rows, drop zeros
    bool is_zero() const;
    bool operator==(const Mat& o) const;

    static Mat identity(int n, const Ring* R);
    Mat operator*(const Mat& o) const;
    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    Mat scaled(const RingElem& c) const;
    size_t nnz() const;
};

// Dense rational linear algebra (fields only).
struct QMat {
    int rows = 0, cols = 0;
    std::vector<std::vector<Rat>> a;  // row major
    QMat() = default;
    QMat(int r, int c) : rows(r), cols(c), a(r, std::vector<Rat>(c, Rat(0))) {}
    static QMat from(const Mat& m);  // ring elements must be rational constants
};

int qrank(QMat m);
// solve A x = b; returns false when inconsistent
bool qsolve(QMat a, std::vector<Rat> b, std::vector<Rat>& x);
// basis of the null space (as columns)
std::vector<std::vector<Rat>> qnull(QMat a);

// Smith normal form diagnostics over Z: rank and nontrivial elementary divisors
struct SmithSummary {
    int rank = 0;
    std::vector<Int> divisors;  // entries > 1 only
};
SmithSummary smith(const Mat& m);  // entries must be integer constants

}  // namespace khovfun
