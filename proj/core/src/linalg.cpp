#include "khovfun/linalg.hpp"

#include <algorithm>
#include <map>

namespace khovfun {

void Mat::add(int r, int c, const RingElem& v) {
    if (v.is_zero()) return;
    col[c].push_back({r, v});
}

void Mat::compress() {
    for (auto& cc : col) {
        std::sort(cc.begin(), cc.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::pair<int, RingElem>> out;
        for (auto& [r, v] : cc) {
            if (!out.empty() && out.back().first == r)
                out.back().second = out.back().second + v;
            else
                out.push_back({r, v});
            if (!out.empty() && out.back().second.is_zero()) out.pop_back();
        }
        cc = std::move(out);
    }
}

bool Mat::is_zero() const {
    for (auto& cc : col)
        for (auto& [r, v] : cc)
            if (!v.is_zero()) return false;
    return true;
}

bool Mat::operator==(const Mat& o) const {
    if (rows != o.rows || cols != o.cols) return false;
    Mat a = *this, b = o;
    a.compress();
    b.compress();
    for (int c = 0; c < cols; ++c)
        if (a.col[c] != b.col[c]) return false;
    return true;
}

Mat Mat::identity(int n, const Ring* R) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, R->one());
    return m;
}

Mat Mat::operator*(const Mat& o) const {
    if (cols != o.rows) throw RingError("matrix shape mismatch in product");
    Mat r(rows, o.cols);
    for (int c = 0; c < o.cols; ++c) {
        std::map<int, RingElem> acc;
        for (auto& [k, v] : o.col[c]) {
            for (auto& [i, w] : col[k]) {
                auto it = acc.find(i);
                if (it == acc.end())
                    acc.emplace(i, w * v);
                else
                    it->second = it->second + w * v;
            }
        }
        for (auto& [i, v] : acc)
            if (!v.is_zero()) r.col[c].push_back({i, v});
    }
    return r;
}

Mat Mat::operator+(const Mat& o) const {
    if (rows != o.rows || cols != o.cols) throw RingError("matrix shape mismatch in sum");
    Mat r = *this;
    for (int c = 0; c < cols; ++c)
        for (auto& e : o.col[c]) r.col[c].push_back(e);
    r.compress();
    return r;
}

Mat Mat::operator-(const Mat& o) const {
    Mat r = *this;
    for (int c = 0; c < cols; ++c)
        for (auto& [i, v] : o.col[c]) r.col[c].push_back({i, -v});
    r.compress();
    return r;
}

Mat Mat::scaled(const RingElem& c) const {
    Mat r = *this;
    for (auto& cc : r.col)
        for (auto& [i, v] : cc) v = v * c;
    r.compress();
    return r;
}

size_t Mat::nnz() const {
    size_t n = 0;
    for (auto& cc : col) n += cc.size();
    return n;
}

QMat QMat::from(const Mat& m) {
    QMat q(m.rows, m.cols);
    for (int c = 0; c < m.cols; ++c)
        for (auto& [r, v] : m.col[c]) {
            if (!v.num.is_constant()) throw RingError("QMat: non-constant entry");
            for (auto d : v.den)
                if (d != 0) throw RingError("QMat: entry has denominators");
            const Rat* cc = v.num.constant_coeff();
            q.a[r][c] += cc ? *cc : Rat(0);
        }
    return q;
}

int qrank(QMat m) {
    int rank = 0;
    for (int c = 0; c < m.cols && rank < m.rows; ++c) {
        int piv = -1;
        for (int r = rank; r < m.rows; ++r)
            if (m.a[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(m.a[rank], m.a[piv]);
        Rat inv = 1 / m.a[rank][c];
        for (int cc = c; cc < m.cols; ++cc) m.a[rank][cc] *= inv;
        for (int r = 0; r < m.rows; ++r) {
            if (r == rank || m.a[r][c] == 0) continue;
            Rat f = m.a[r][c];
            for (int cc = c; cc < m.cols; ++cc) m.a[r][cc] -= f * m.a[rank][cc];
        }
        ++rank;
    }
    return rank;
}

bool qsolve(QMat a, std::vector<Rat> b, std::vector<Rat>& x) {
    int rank = 0;
    std::vector<int> pivcol;
    for (int c = 0; c < a.cols && rank < a.rows; ++c) {
        int piv = -1;
        for (int r = rank; r < a.rows; ++r)
            if (a.a[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(a.a[rank], a.a[piv]);
        std::swap(b[rank], b[piv]);
        Rat inv = 1 / a.a[rank][c];
        for (int cc = c; cc < a.cols; ++cc) a.a[rank][cc] *= inv;
        b[rank] *= inv;
        for (int r = 0; r < a.rows; ++r) {
            if (r == rank || a.a[r][c] == 0) continue;
            Rat f = a.a[r][c];
            for (int cc = c; cc < a.cols; ++cc) a.a[r][cc] -= f * a.a[rank][cc];
            b[r] -= f * b[rank];
        }
        pivcol.push_back(c);
        ++rank;
    }
    for (int r = rank; r < a.rows; ++r)
        if (b[r] != 0) return false;
    x.assign(a.cols, Rat(0));
    for (int i = 0; i < rank; ++i) x[pivcol[i]] = b[i];
    return true;
}

std::vector<std::vector<Rat>> qnull(QMat a) {
    int rank = 0;
    std::vector<int> pivcol(a.cols, -1);
    std::vector<int> pivs;
    for (int c = 0; c < a.cols && rank < a.rows; ++c) {
        int piv = -1;
        for (int r = rank; r < a.rows; ++r)
            if (a.a[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(a.a[rank], a.a[piv]);
        Rat inv = 1 / a.a[rank][c];
        for (int cc = c; cc < a.cols; ++cc) a.a[rank][cc] *= inv;
        for (int r = 0; r < a.rows; ++r) {
            if (r == rank || a.a[r][c] == 0) continue;
            Rat f = a.a[r][c];
            for (int cc = c; cc < a.cols; ++cc) a.a[r][cc] -= f * a.a[rank][cc];
        }
        pivcol[c] = rank;
        pivs.push_back(c);
        ++rank;
    }
    std::vector<std::vector<Rat>> basis;
    for (int c = 0; c < a.cols; ++c) {
        if (pivcol[c] >= 0) continue;
        std::vector<Rat> v(a.cols, Rat(0));
        v[c] = 1;
        for (int j = 0; j < int(pivs.size()); ++j) v[pivs[j]] = -a.a[j][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

SmithSummary smith(const Mat& m) {
    // dense integer SNF; fine at desk scale
    std::vector<std::vector<Int>> a(m.rows, std::vector<Int>(m.cols, 0));
    for (int c = 0; c < m.cols; ++c)
        for (auto& [r, v] : m.col[c]) {
            if (!v.num.is_constant()) throw RingError("smith: non-constant entry");
            for (auto d : v.den)
                if (d != 0) throw RingError("smith: entry has denominators");
            const Rat* cc = v.num.constant_coeff();
            if (cc) {
                if (cc->get_den() != 1) throw RingError("smith: non-integer entry");
                a[r][c] += cc->get_num();
            }
        }
    SmithSummary out;
    int top = 0;
    int R = m.rows, C = m.cols;
    while (top < R && top < C) {
        // find a nonzero pivot
        int pr = -1, pc = -1;
        for (int r = top; r < R && pr < 0; ++r)
            for (int c = top; c < C; ++c)
                if (a[r][c] != 0) {
                    pr = r;
                    pc = c;
                    break;
                }
        if (pr < 0) break;
        std::swap(a[top], a[pr]);
        for (int r = 0; r < R; ++r) std::swap(a[r][top], a[r][pc]);
        // reduce until pivot divides its row and column
        bool again = true;
        while (again) {
            again = false;
            for (int r = top + 1; r < R; ++r) {
                while (a[r][top] != 0) {
                    Int q = a[r][top] / a[top][top];
                    for (int c = top; c < C; ++c) a[r][c] -= q * a[top][c];
                    if (a[r][top] != 0) {
                        std::swap(a[r], a[top]);
                        again = true;
                    }
                }
            }
            for (int c = top + 1; c < C; ++c) {
                while (a[top][c] != 0) {
                    Int q = a[top][c] / a[top][top];
                    for (int r = top; r < R; ++r) a[r][c] -= q * a[r][top];
                    if (a[top][c] != 0) {
                        for (int r = top; r < R; ++r) std::swap(a[r][c], a[r][top]);
                        again = true;
                    }
                }
            }
        }
        ++top;
    }
    // enforce the divisibility chain d_i | d_{i+1}
    std::vector<Int> diag;
    for (int i = 0; i < top; ++i) diag.push_back(abs(a[i][i]));
    for (size_t i = 0; i < diag.size(); ++i)
        for (size_t j = i + 1; j < diag.size(); ++j) {
            Int g = gcd(diag[i], diag[j]);
            if (g == diag[i]) continue;
            Int l = diag[i] / g * diag[j];
            diag[i] = g;
            diag[j] = l;
        }
    for (Int& dv : diag) {
        ++out.rank;
        if (dv > 1) out.divisors.push_back(dv);
    }
    std::sort(out.divisors.begin(), out.divisors.end());
    return out;
}

}  // namespace khovfun
