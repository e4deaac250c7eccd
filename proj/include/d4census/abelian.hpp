#pragma once

// Structure computation for a finite abelian group given by an explicit
// element list and composition law: greedy generators, discrete logs from a
// Cayley-graph BFS, relation lattice in Hermite form, then Smith normal form
// with column-transform tracking so elements get canonical coordinates in
// Z/d_1 x ... x Z/d_r with d_1 | d_2 | ... | d_r.

#include <map>
#include <stdexcept>
#include <vector>

#include "arith.hpp"

namespace d4census {

namespace detail {

using Mat = std::vector<std::vector<Int>>;

// Smith normal form of a square matrix; fills V with the accumulated column
// transform so that row-space(M) as a lattice equals row-space(D * V^-1), i.e.
// x -> x*V maps Z^m / rowspace(M) onto (+) Z/d_j.
inline std::vector<Int> smith_normal_form(Mat M, Mat& V) {
    const std::size_t m = M.size();
    V.assign(m, std::vector<Int>(m, 0));
    for (std::size_t i = 0; i < m; ++i) V[i][i] = 1;
    auto col_add = [&](std::size_t dst, std::size_t src, const Int& q) {
        for (std::size_t i = 0; i < m; ++i) M[i][dst] += q * M[i][src];
        for (std::size_t i = 0; i < m; ++i) V[i][dst] += q * V[i][src];
    };
    auto col_swap = [&](std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < m; ++i) std::swap(M[i][a], M[i][b]);
        for (std::size_t i = 0; i < m; ++i) std::swap(V[i][a], V[i][b]);
    };
    auto col_neg = [&](std::size_t c) {
        for (std::size_t i = 0; i < m; ++i) M[i][c] = -M[i][c];
        for (std::size_t i = 0; i < m; ++i) V[i][c] = -V[i][c];
    };
    auto row_add = [&](std::size_t dst, std::size_t src, const Int& q) {
        for (std::size_t j = 0; j < m; ++j) M[dst][j] += q * M[src][j];
    };
    for (std::size_t k = 0; k < m; ++k) {
        while (true) {
            // bring a nonzero entry to (k,k)
            std::size_t pi = m, pj = m;
            for (std::size_t i = k; i < m && pi == m; ++i)
                for (std::size_t j = k; j < m; ++j)
                    if (M[i][j] != 0) { pi = i; pj = j; break; }
            if (pi == m) break;  // zero block
            if (pi != k) std::swap(M[pi], M[k]);
            if (pj != k) col_swap(pj, k);
            if (M[k][k] < 0) col_neg(k);
            // clear row k and column k
            bool dirty = false;
            for (std::size_t i = k + 1; i < m; ++i) {
                if (M[i][k] == 0) continue;
                Int q = M[i][k] / M[k][k];
                row_add(i, k, -q);
                if (M[i][k] != 0) { std::swap(M[i], M[k]); dirty = true; break; }
            }
            if (dirty) continue;
            for (std::size_t j = k + 1; j < m; ++j) {
                if (M[k][j] == 0) continue;
                Int q = M[k][j] / M[k][k];
                col_add(j, k, -q);
                if (M[k][j] != 0) { col_swap(j, k); dirty = true; break; }
            }
            if (dirty) continue;
            // pivot must divide the remaining block
            bool fixed = true;
            for (std::size_t i = k + 1; i < m && fixed; ++i)
                for (std::size_t j = k + 1; j < m; ++j)
                    if (M[i][j] % M[k][k] != 0) {
                        row_add(k, i, 1);
                        fixed = false;
                        break;
                    }
            if (fixed) break;
        }
    }
    std::vector<Int> d(m);
    for (std::size_t k = 0; k < m; ++k) d[k] = M[k][k];
    return d;
}

}  // namespace detail

template <class T>
class AbelianStructure {
  public:
    template <class Op>
    AbelianStructure(const std::vector<T>& elements, Op op, const T& identity) {
        std::map<T, std::vector<Int>> dlog;  // exponent vector w.r.t. generators
        dlog[identity] = {};
        std::vector<T> gens;
        for (const T& e : elements) {
            if (dlog.count(e)) continue;
            gens.push_back(e);
            std::size_t j = gens.size() - 1;
            std::vector<std::pair<T, std::vector<Int>>> base(dlog.begin(), dlog.end());
            T p = identity;
            for (Int t = 1;; ++t) {
                p = op(p, e);
                if (dlog.count(p)) break;
                for (auto& [x, r] : base) {
                    T y = op(x, p);
                    if (dlog.count(y)) continue;
                    std::vector<Int> v = r;
                    v.resize(j + 1, 0);
                    v[j] = t;
                    dlog.emplace(std::move(y), std::move(v));
                }
            }
        }
        const std::size_t m = gens.size();
        if (dlog.size() != elements.size())
            throw std::logic_error("AbelianStructure: closure misses elements");
        for (auto& [x, r] : dlog) r.resize(m, 0);

        if (m == 0) {
            order_ = 1;
            for (auto& [x, r] : dlog) coords_.emplace(x, std::vector<Int>{});
            return;
        }

        // relation lattice from Cayley-graph cycles, kept in row-echelon form
        detail::Mat R;
        std::vector<std::size_t> pivot_col;
        auto insert_row = [&](std::vector<Int> row) {
            for (std::size_t c = 0; c < m; ++c) {
                if (row[c] == 0) continue;
                std::size_t ri = m;
                for (std::size_t i = 0; i < R.size(); ++i)
                    if (pivot_col[i] == c) ri = i;
                if (ri == m) {
                    if (row[c] < 0)
                        for (auto& v : row) v = -v;
                    R.push_back(row);
                    pivot_col.push_back(c);
                    return;
                }
                // combine with existing pivot row via extended gcd
                Int a = R[ri][c], b = row[c];
                Int old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
                while (r != 0) {
                    Int q = old_r / r;
                    old_r -= q * r; std::swap(old_r, r);
                    old_s -= q * s; std::swap(old_s, s);
                    old_t -= q * t; std::swap(old_t, t);
                }
                Int g = old_r, u = old_s, v = old_t;  // u*a + v*b = g
                std::vector<Int> combo(m), rem(m);
                for (std::size_t x = 0; x < m; ++x) {
                    combo[x] = u * R[ri][x] + v * row[x];
                    rem[x] = (a / g) * row[x] - (b / g) * R[ri][x];
                }
                R[ri] = std::move(combo);
                row = std::move(rem);
            }
        };
        for (auto& [x, r] : dlog) {
            for (std::size_t j = 0; j < m; ++j) {
                const auto& rg = dlog.at(op(x, gens[j]));
                std::vector<Int> row(m);
                for (std::size_t c = 0; c < m; ++c) row[c] = r[c] - rg[c];
                row[j] += 1;
                insert_row(std::move(row));
            }
        }
        if (R.size() != m) throw std::logic_error("AbelianStructure: relation rank deficit");
        // square up in generator-column order
        detail::Mat Rs(m, std::vector<Int>(m, 0));
        for (std::size_t i = 0; i < m; ++i) Rs[pivot_col[i]] = R[i];

        detail::Mat V;
        std::vector<Int> d = detail::smith_normal_form(std::move(Rs), V);
        order_ = 1;
        for (std::size_t j = 0; j < m; ++j) {
            Int dj = abs(d[j]);
            if (dj == 0) throw std::logic_error("AbelianStructure: infinite quotient");
            if (dj == 1) continue;
            divisors_.push_back(dj);
            kept_cols_.push_back(j);
            order_ *= dj;
        }
        if (order_ != Int(elements.size()))
            throw std::logic_error("AbelianStructure: order mismatch");
        // sorted ascending by the divisibility chain already; keep V columns
        V_ = std::move(V);
        for (auto& [x, r] : dlog) {
            std::vector<Int> c(divisors_.size());
            for (std::size_t t = 0; t < divisors_.size(); ++t) {
                Int s = 0;
                for (std::size_t i = 0; i < m; ++i) s += r[i] * V_[i][kept_cols_[t]];
                s %= divisors_[t];
                if (s < 0) s += divisors_[t];
                c[t] = s;
            }
            coords_.emplace(x, std::move(c));
        }
    }

    const std::vector<Int>& divisors() const { return divisors_; }
    const Int& order() const { return order_; }

    const std::vector<Int>& coords(const T& x) const {
        auto it = coords_.find(x);
        if (it == coords_.end()) throw std::invalid_argument("AbelianStructure: unknown element");
        return it->second;
    }

    bool contains(const T& x) const { return coords_.count(x) != 0; }

    // number of even elementary divisors = F2-rank of G/G^2
    unsigned two_rank() const {
        unsigned r = 0;
        for (auto& d : divisors_)
            if (d % 2 == 0) ++r;
        return r;
    }

    // x in G^2 iff each coordinate at an even divisor is even
    bool in_square_subgroup(const T& x) const {
        const auto& c = coords(x);
        for (std::size_t j = 0; j < divisors_.size(); ++j)
            if (divisors_[j] % 2 == 0 && c[j] % 2 != 0) return false;
        return true;
    }

    // solve 2*y = c componentwise; empty if x is not a square
    std::optional<std::vector<Int>> halve(const T& x) const {
        const auto& c = coords(x);
        std::vector<Int> h(c.size());
        for (std::size_t j = 0; j < c.size(); ++j) {
            const Int& d = divisors_[j];
            if (d % 2 != 0) {
                // 2 invertible mod d
                Int inv2 = (d + 1) / 2;
                h[j] = (c[j] * inv2) % d;
            } else {
                if (c[j] % 2 != 0) return std::nullopt;
                h[j] = c[j] / 2;
            }
        }
        return h;
    }

  private:
    std::vector<Int> divisors_;
    Int order_ = 1;
    std::map<T, std::vector<Int>> coords_;
    detail::Mat V_;
    std::vector<std::size_t> kept_cols_;
};

}  // namespace d4census
