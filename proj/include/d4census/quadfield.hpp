#pragma once

// Arithmetic of a quadratic field k = Q(sqrt(d)): elements in the
// (1, omega) integral basis with omega = (Delta + sqrt(Delta))/2, ideals in
// canonical two-parameter form content*(a, (b+sqrt(Delta))/2), prime
// splitting, enumeration by norm, fundamental units, and small residue rings.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "arith.hpp"

namespace d4census {

enum class SplitType { split, inert, ramified };

struct QuadField {
    Int delta;  // fundamental discriminant
    int r1 = 0, r2 = 0;

    QuadField() = default;
    explicit QuadField(const Int& d) : delta(d) {
        if (!is_fundamental_discriminant(d))
            throw std::invalid_argument("QuadField: not a fundamental discriminant");
        if (d < 0) { r1 = 0; r2 = 1; } else { r1 = 2; r2 = 0; }
    }

    // omega^2 = delta*omega - delta*(delta-1)/4
    Int omega_sq_lin() const { return delta; }
    Int omega_sq_const() const { return -delta * (delta - 1) / 4; }

    bool operator==(const QuadField& o) const { return delta == o.delta; }
};

inline SplitType splitting_type(const QuadField& k, const Int& p) {
    int s = kronecker(k.delta, p);
    return s == 1 ? SplitType::split : (s == -1 ? SplitType::inert : SplitType::ramified);
}

// ---------------------------------------------------------------------------
// Field elements: x + y*omega with rational x, y.

struct FieldElement {
    Rat x, y;

    FieldElement() : x(0), y(0) {}
    FieldElement(Rat x_, Rat y_) : x(std::move(x_)), y(std::move(y_)) {}

    static FieldElement from_int(const Int& n) { return {Rat(n), Rat(0)}; }
    // value (X + Y*sqrt(Delta))/2
    static FieldElement from_sqrt_basis(const QuadField& k, const Rat& X, const Rat& Y) {
        return {(X - Y * k.delta) / 2, Y};
    }

    bool is_zero() const { return x == 0 && y == 0; }
    bool is_integral() const { return denominator(x) == 1 && denominator(y) == 1; }
    bool operator==(const FieldElement& o) const { return x == o.x && y == o.y; }
};

inline FieldElement add(const FieldElement& a, const FieldElement& b) {
    return {a.x + b.x, a.y + b.y};
}

inline FieldElement neg(const FieldElement& a) { return {-a.x, -a.y}; }

inline FieldElement mul(const QuadField& k, const FieldElement& a, const FieldElement& b) {
    Rat cross = a.y * b.y;
    return {a.x * b.x + cross * k.omega_sq_const(),
            a.x * b.y + a.y * b.x + cross * k.omega_sq_lin()};
}

inline FieldElement conj(const QuadField& k, const FieldElement& a) {
    // conj(omega) = Delta - omega
    return {a.x + a.y * k.delta, -a.y};
}

inline Rat norm(const QuadField& k, const FieldElement& a) {
    return a.x * a.x + a.x * a.y * k.delta + a.y * a.y * (k.delta * k.delta - k.delta) / 4;
}

inline Rat trace(const QuadField& k, const FieldElement& a) { return 2 * a.x + a.y * k.delta; }

inline FieldElement inv(const QuadField& k, const FieldElement& a) {
    Rat n = norm(k, a);
    if (n == 0) throw std::invalid_argument("inv of zero element");
    FieldElement c = conj(k, a);
    return {c.x / n, c.y / n};
}

// Solve y^2 = x in k exactly; returns the root if one exists.
inline std::optional<FieldElement> sqrt_in_k(const QuadField& k, const FieldElement& v) {
    if (v.is_zero()) return FieldElement();
    // value = e + f*sqrt(Delta), e = x + y*Delta/2, f = y/2
    Rat e = v.x + v.y * Rat(k.delta) / 2;
    Rat f = v.y / 2;
    auto check = [&](const FieldElement& r) -> std::optional<FieldElement> {
        if (mul(k, r, r) == v) return r;
        return std::nullopt;
    };
    auto rat_sqrt = [](const Rat& q) -> std::optional<Rat> {
        if (q < 0) return std::nullopt;
        Int n = numerator(q), d = denominator(q);
        Int rn = isqrt(n), rd = isqrt(d);
        if (rn * rn == n && rd * rd == d) return Rat(rn, rd);
        return std::nullopt;
    };
    if (f == 0) {
        // rational value e: sqrt in k iff e or e*Delta is a rational square
        if (auto r = rat_sqrt(e)) return check(FieldElement::from_sqrt_basis(k, 2 * *r, 0));
        if (auto r = rat_sqrt(e / k.delta))
            if (auto res = check(FieldElement::from_sqrt_basis(k, 0, 2 * *r))) return res;
        return std::nullopt;
    }
    // root u + w*sqrt(Delta): u^2 + w^2*Delta = e, 2uw = f; u^2 is a root of
    // t^2 - e t + Delta f^2/4 = 0 with discriminant N(v) = e^2 - Delta f^2.
    Rat nv = e * e - k.delta * f * f;
    auto w0 = rat_sqrt(nv);
    if (!w0) return std::nullopt;
    for (int sgn : {+1, -1}) {
        Rat t = (e + sgn * *w0) / 2;
        if (auto u = rat_sqrt(t)) {
            if (*u == 0) continue;
            Rat w = f / (2 * *u);
            if (auto res = check(FieldElement::from_sqrt_basis(k, 2 * *u, 2 * w))) return res;
        }
    }
    return std::nullopt;
}

inline bool is_square_in_k(const QuadField& k, const FieldElement& v) {
    if (v.is_zero()) throw std::invalid_argument("is_square_in_k: zero element");
    return sqrt_in_k(k, v).has_value();
}

// ---------------------------------------------------------------------------
// Integral ideals in canonical form content*(a, (b+sqrt(Delta))/2),
// b^2 = Delta mod 4a, -a < b <= a. Norm = content^2 * a.

struct QuadIdeal {
    Int content = 1;
    Int a = 1;
    Int b = 0;

    QuadIdeal() = default;
    QuadIdeal(const QuadField& k, Int content_, Int a_, Int b_)
        : content(std::move(content_)), a(std::move(a_)), b(std::move(b_)) {
        normalize();
        if (content < 1 || a < 1) throw std::invalid_argument("QuadIdeal: bad parameters");
        if ((b * b - k.delta) % (4 * a) != 0)
            throw std::invalid_argument("QuadIdeal: b^2 != Delta mod 4a");
    }

    void normalize() {
        Int m = 2 * a;
        b %= m;
        if (b < 0) b += m;
        if (b > a) b -= m;  // now -a < b <= a
    }

    Int norm() const { return content * content * a; }
    bool is_unit_ideal() const { return content == 1 && a == 1; }

    auto key() const { return std::tie(content, a, b); }
    bool operator==(const QuadIdeal& o) const { return key() == o.key(); }
    bool operator<(const QuadIdeal& o) const { return key() < o.key(); }
};

inline QuadIdeal unit_ideal(const QuadField& k) {
    return QuadIdeal(k, 1, 1, k.delta % 2 == 0 ? Int(0) : Int(1));
}

inline QuadIdeal rational_ideal(const QuadField& k, const Int& n) {
    if (n < 1) throw std::invalid_argument("rational_ideal: n must be positive");
    return QuadIdeal(k, n, 1, k.delta % 2 == 0 ? Int(0) : Int(1));
}

// Build the ideal from Z-module generators given as pairs (X, Y) encoding
// (X + Y*sqrt(Delta))/2. The generators must span the ideal as a Z-module.
inline QuadIdeal ideal_from_module(const QuadField& k, std::vector<std::pair<Int, Int>> gens) {
    // second basis vector (T, g) with g = gcd of Y-components
    Int g = 0, T = 0;
    for (auto& [X, Y] : gens) {
        if (Y == 0) continue;
        // extended gcd(g, Y) to combine the current second basis vector with
        // this generator
        Int old_r = g, r = Y, old_s = 1, s = 0, old_t = 0, t = 1;
        while (r != 0) {
            Int q = old_r / r;
            old_r -= q * r; std::swap(old_r, r);
            old_s -= q * s; std::swap(old_s, s);
            old_t -= q * t; std::swap(old_t, t);
        }
        if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
        T = old_s * T + old_t * X;
        g = old_r;
    }
    if (g == 0) throw std::invalid_argument("ideal_from_module: rank-deficient generators");
    Int m = 0;
    for (auto& [X, Y] : gens) {
        Int Xr = X - (Y / g) * T;
        m = boost::multiprecision::gcd(m, abs(Xr));
    }
    if (m == 0 || m % (2 * g) != 0)
        throw std::logic_error("ideal_from_module: inconsistent module");
    Int A = m / (2 * g);
    if (T % g != 0) throw std::logic_error("ideal_from_module: content does not divide b");
    return QuadIdeal(k, g, A, T / g);
}

inline QuadIdeal mul(const QuadField& k, const QuadIdeal& I, const QuadIdeal& J) {
    // primitive parts: generators a_i and alpha_i = (b_i + sqrt(Delta))/2
    const Int &a1 = I.a, &b1 = I.b, &a2 = J.a, &b2 = J.b;
    std::vector<std::pair<Int, Int>> gens;
    gens.emplace_back(2 * a1 * a2, 0);
    gens.emplace_back(a1 * b2, a1);
    gens.emplace_back(a2 * b1, a2);
    gens.emplace_back((b1 * b2 + k.delta) / 2, (b1 + b2) / 2);
    QuadIdeal P = ideal_from_module(k, std::move(gens));
    P.content *= I.content * J.content;
    return P;
}

inline QuadIdeal conj(const QuadField& k, const QuadIdeal& I) {
    return QuadIdeal(k, I.content, I.a, -I.b);
}

inline QuadIdeal pow(const QuadField& k, const QuadIdeal& I, unsigned e) {
    QuadIdeal r = unit_ideal(k);
    for (unsigned i = 0; i < e; ++i) r = mul(k, r, I);
    return r;
}

inline QuadIdeal divide_exact(const QuadField& k, const QuadIdeal& I, const QuadIdeal& J) {
    QuadIdeal K = mul(k, I, conj(k, J));
    Int n = J.norm();
    if (K.content % n != 0) throw std::invalid_argument("divide_exact: J does not divide I");
    K.content /= n;
    return K;
}

// The principal ideal generated by a nonzero integral element.
inline QuadIdeal element_to_ideal(const QuadField& k, const FieldElement& g) {
    if (!g.is_integral() || g.is_zero())
        throw std::invalid_argument("element_to_ideal: need nonzero integral element");
    Int x = numerator(g.x), y = numerator(g.y);
    // g = x + y*omega encodes as (2x + y*Delta, y); g*omega likewise
    FieldElement gw = mul(k, g, FieldElement(0, 1));
    Int wx = numerator(gw.x), wy = numerator(gw.y);
    std::vector<std::pair<Int, Int>> gens;
    gens.emplace_back(2 * x + y * k.delta, y);
    gens.emplace_back(2 * wx + wy * k.delta, wy);
    return ideal_from_module(k, std::move(gens));
}

inline bool ideal_contains(const QuadField& k, const QuadIdeal& I, const FieldElement& g) {
    if (!g.is_integral()) return false;
    Int x = numerator(g.x), y = numerator(g.y);
    if (y % I.content != 0) return false;
    Int q = y / I.content;
    // subtract q * content*((b-Delta)/2 + omega)
    Int xr = x - q * I.content * (I.b - k.delta) / 2;
    return xr % (I.content * I.a) == 0;
}

// ---------------------------------------------------------------------------
// Prime ideals.

inline std::uint64_t sqrt_mod_prime(std::uint64_t n, std::uint64_t p) {
    n %= p;
    if (p == 2 || n == 0) return n;
    if (powmod_u64(n, (p - 1) / 2, p) != 1)
        throw std::invalid_argument("sqrt_mod_prime: non-residue");
    if (p % 4 == 3) return powmod_u64(n, (p + 1) / 4, p);
    // Tonelli-Shanks
    std::uint64_t q = p - 1;
    int s = 0;
    while ((q & 1) == 0) { q >>= 1; ++s; }
    std::uint64_t z = 2;
    while (powmod_u64(z, (p - 1) / 2, p) != p - 1) ++z;
    std::uint64_t m = s, c = powmod_u64(z, q, p), t = powmod_u64(n, q, p),
                  r = powmod_u64(n, (q + 1) / 2, p);
    while (t != 1) {
        std::uint64_t tt = t;
        std::uint64_t i = 0;
        while (tt != 1) { tt = mulmod_u64(tt, tt, p); ++i; }
        std::uint64_t be = powmod_u64(c, 1ull << (m - i - 1), p);
        m = i;
        c = mulmod_u64(be, be, p);
        t = mulmod_u64(t, c, p);
        r = mulmod_u64(r, be, p);
    }
    return r;
}

struct PrimeIdeal {
    Int p;
    SplitType type = SplitType::inert;
    int which = 0;  // 0 = first, 1 = second (split primes only)
    QuadIdeal ideal;

    Int norm() const { return type == SplitType::inert ? p * p : p; }
    Int ramification() const { return type == SplitType::ramified ? 2 : 1; }
};

inline std::vector<PrimeIdeal> primes_above(const QuadField& k, const Int& p) {
    SplitType t = splitting_type(k, p);
    std::vector<PrimeIdeal> out;
    if (t == SplitType::inert) {
        out.push_back({p, t, 0, rational_ideal(k, p)});
        return out;
    }
    Int B;
    if (t == SplitType::ramified) {
        if (p == 2) {
            Int m8 = k.delta % 8;
            if (m8 < 0) m8 += 8;
            B = (m8 == 0) ? 0 : 2;
        } else {
            B = (k.delta % 2 != 0) ? p : Int(0);
        }
        out.push_back({p, t, 0, QuadIdeal(k, 1, p, B)});
        return out;
    }
    if (p == 2) {
        B = 1;
    } else {
        Int r = Int(sqrt_mod_prime((((k.delta % p) + p) % p).convert_to<std::uint64_t>(),
                                   p.convert_to<std::uint64_t>()));
        B = (r - k.delta) % 2 == 0 ? r : r + p;
    }
    QuadIdeal P1(k, 1, p, B), P2(k, 1, p, -B);
    if (P2 < P1) std::swap(P1, P2);
    out.push_back({p, t, 0, P1});
    out.push_back({p, t, 1, P2});
    return out;
}

// Exact division J / P for a prime ideal P dividing J.
inline QuadIdeal divide_by_prime(const QuadField& k, const QuadIdeal& J, const PrimeIdeal& P) {
    QuadIdeal K = mul(k, J, conj(k, P.ideal));
    Int n = P.norm();
    if (K.content % n != 0) throw std::invalid_argument("divide_by_prime: P does not divide J");
    K.content /= n;
    return K;
}

inline bool prime_divides(const QuadField& k, const PrimeIdeal& P, const QuadIdeal& J) {
    if (P.type == SplitType::inert) return J.content % P.p == 0;
    if (J.norm() % P.p != 0) return false;
    QuadIdeal K = mul(k, J, conj(k, P.ideal));
    return K.content % P.p == 0;
}

inline unsigned valuation(const QuadField& k, QuadIdeal J, const PrimeIdeal& P) {
    unsigned e = 0;
    while (prime_divides(k, P, J)) {
        J = divide_by_prime(k, J, P);
        ++e;
    }
    return e;
}

struct IdealFactorization {
    std::vector<std::pair<PrimeIdeal, unsigned>> factors;

    bool squarefree() const {
        for (auto& [P, e] : factors)
            if (e > 1) return false;
        return true;
    }
};

inline IdealFactorization factor_ideal(const QuadField& k, const QuadIdeal& I) {
    IdealFactorization f;
    Factorization nf = factorize(I.norm());
    for (auto& [p, e] : nf.factors) {
        for (auto& P : primes_above(k, p)) {
            unsigned v = valuation(k, I, P);
            if (v > 0) f.factors.emplace_back(P, v);
            if (P.type != SplitType::split) break;
        }
    }
    return f;
}

inline bool is_squarefree_ideal(const QuadField& k, const QuadIdeal& I) {
    return factor_ideal(k, I).squarefree();
}

inline bool coprime(const QuadField& k, const QuadIdeal& I, const QuadIdeal& J) {
    Int g = boost::multiprecision::gcd(I.norm(), J.norm());
    if (g == 1) return true;
    for (auto& [p, e] : factorize(g).factors) {
        for (auto& P : primes_above(k, p)) {
            if (prime_divides(k, P, I) && prime_divides(k, P, J)) return false;
            if (P.type != SplitType::split) break;
        }
    }
    return true;
}

// Moebius function of an integral ideal.
inline int moebius_ideal(const QuadField& k, const QuadIdeal& I) {
    IdealFactorization f = factor_ideal(k, I);
    if (!f.squarefree()) return 0;
    return f.factors.size() % 2 == 0 ? 1 : -1;
}

// Phi(m) = |(O/m)*| and tau(m) = number of integral ideal divisors.
inline Int euler_phi_ideal(const QuadField& k, const QuadIdeal& m) {
    Int phi = 1;
    for (auto& [P, e] : factor_ideal(k, m).factors) {
        Int n = P.norm();
        Int pe = 1;
        for (unsigned i = 1; i < e; ++i) pe *= n;
        phi *= pe * (n - 1);
    }
    return phi;
}

inline Int tau_ideal(const QuadField& k, const QuadIdeal& m) {
    Int t = 1;
    for (auto& [P, e] : factor_ideal(k, m).factors) t *= e + 1;
    return t;
}

// All integral ideal divisors of m, deterministically ordered.
inline std::vector<QuadIdeal> ideal_divisors(const QuadField& k, const QuadIdeal& m) {
    std::vector<QuadIdeal> out{unit_ideal(k)};
    for (auto& [P, e] : factor_ideal(k, m).factors) {
        std::vector<QuadIdeal> next;
        QuadIdeal pe = unit_ideal(k);
        for (unsigned i = 0; i <= e; ++i) {
            for (auto& d : out) next.push_back(mul(k, d, pe));
            if (i < e) pe = mul(k, pe, P.ideal);
        }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Enumeration by norm.

inline std::vector<QuadIdeal> ideals_of_norm(const QuadField& k, const Int& m) {
    if (m < 1) throw std::invalid_argument("ideals_of_norm: m must be positive");
    std::vector<QuadIdeal> out{unit_ideal(k)};
    for (auto& [p, e] : factorize(m).factors) {
        std::vector<QuadIdeal> locals;
        auto ps = primes_above(k, p);
        if (ps[0].type == SplitType::inert) {
            if (e % 2 != 0) return {};
            locals.push_back(rational_ideal(k, boost::multiprecision::pow(p, e / 2)));
        } else if (ps[0].type == SplitType::ramified) {
            locals.push_back(pow(k, ps[0].ideal, e));
        } else {
            for (unsigned i = 0; i <= e; ++i)
                locals.push_back(mul(k, pow(k, ps[0].ideal, i), pow(k, ps[1].ideal, e - i)));
        }
        std::vector<QuadIdeal> next;
        for (auto& d : out)
            for (auto& l : locals) next.push_back(mul(k, d, l));
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Number of ideals of norm m: the m-th Dedekind zeta coefficient
// sum_{e | m} kronecker(Delta, e).
inline Int zeta_coefficient(const QuadField& k, const Int& m) {
    Int r = 0;
    std::vector<Int> divs{1};
    for (auto& [p, e] : factorize(m).factors) {
        std::vector<Int> next;
        Int pe = 1;
        for (unsigned i = 0; i <= e; ++i) {
            for (auto& d : divs) next.push_back(d * pe);
            pe *= p;
        }
        divs = std::move(next);
    }
    for (auto& d : divs) r += kronecker(k.delta, d);
    return r;
}

// Sieve of zeta coefficients r(1..X).
inline std::vector<std::int64_t> zeta_coefficient_sieve(const QuadField& k, std::uint64_t X) {
    std::vector<std::int64_t> r(X + 1, 0);
    for (std::uint64_t e = 1; e <= X; ++e) {
        int c = kronecker(k.delta, Int(e));
        if (c == 0) continue;
        for (std::uint64_t m = e; m <= X; m += e) r[m] += c;
    }
    return r;
}

inline Int count_ideals_upto(const QuadField& k, double X) {
    if (X < 1) throw std::invalid_argument("count_ideals_upto: X must be >= 1");
    Int Xi = Int(static_cast<std::uint64_t>(X));
    Int total = 0;
    for (Int e = 1; e <= Xi; ++e) {
        int c = kronecker(k.delta, e);
        if (c != 0) total += c * (Xi / e);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Fundamental unit (d > 0) via the continued fraction of (b0 + sqrt(Delta))/2.

struct FundamentalUnit {
    FieldElement value;  // the unit, > 1 in the real embedding
    int norm_sign = 1;   // +1 or -1
    unsigned period = 0;
};

inline FundamentalUnit fundamental_unit(const QuadField& k) {
    if (k.delta < 0) throw std::invalid_argument("fundamental_unit: requires d > 0");
    const Int D = k.delta;
    const Int s = isqrt(D);
    Int P = (D % 2 == 0) ? Int(0) : Int(1), Q = 2;
    std::map<std::pair<Int, Int>, unsigned> seen;
    std::vector<std::pair<Int, Int>> states;  // complete quotients (P_i + sqrt(D))/Q_i
    unsigned idx = 0;
    unsigned start = 0;
    while (true) {
        auto it = seen.find({P, Q});
        if (it != seen.end()) { start = it->second; break; }
        seen[{P, Q}] = idx++;
        states.emplace_back(P, Q);
        Int a = (P + s) / Q;  // floor((P + sqrt(D))/Q), Q > 0 in this expansion
        if (Q < 0) throw std::logic_error("fundamental_unit: negative denominator");
        Int P2 = a * Q - P;
        Int Q2 = (D - P2 * P2) / Q;
        P = P2;
        Q = Q2;
    }
    // unit = product of complete quotients over one period, as (x + y sqrt D)/den
    Int x = 2, y = 0, den = 2;
    unsigned period = 0;
    for (unsigned i = start; i < states.size(); ++i, ++period) {
        auto& [Pi, Qi] = states[i];
        Int nx = x * Pi + y * D;
        Int ny = x + y * Pi;
        x = nx;
        y = ny;
        den *= Qi;
        Int g = boost::multiprecision::gcd(boost::multiprecision::gcd(abs(x), abs(y)), den);
        x /= g; y /= g; den /= g;
    }
    if (den == 1) { x *= 2; y *= 2; den = 2; }
    if (den != 2) throw std::logic_error("fundamental_unit: unexpected denominator");
    Int n4 = x * x - D * y * y;  // = 4 * norm
    if (n4 != 4 && n4 != -4) throw std::logic_error("fundamental_unit: product is not a unit");
    FundamentalUnit u;
    u.value = FieldElement::from_sqrt_basis(k, Rat(x), Rat(y));
    u.norm_sign = n4 == 4 ? 1 : -1;
    u.period = period;
    if (u.norm_sign != ((period % 2 == 0) ? 1 : -1))
        throw std::logic_error("fundamental_unit: norm/period mismatch");
    return u;
}

// ---------------------------------------------------------------------------
// Residue ring O/m for small moduli (used with m | 4).

struct ResidueRing {
    QuadField k;
    QuadIdeal m;
    Int xmod, ymod;  // residues (x mod xmod, y mod ymod)

    explicit ResidueRing(const QuadField& k_, const QuadIdeal& m_) : k(k_), m(m_) {
        ymod = m.content;
        xmod = m.content * m.a;
        if (size() > 4096) throw std::invalid_argument("ResidueRing: modulus too large");
    }

    std::uint64_t size() const { return (xmod * ymod).convert_to<std::uint64_t>(); }

    // residue index = y * xmod + x
    std::uint64_t index(Int x, Int y) const {
        // reduce y mod content, tracking the basis correction on x
        Int q = y / ymod;
        Int yr = y - q * ymod;
        if (yr < 0) { yr += ymod; q -= 1; }
        Int xr = x - q * m.content * (m.b - k.delta) / 2;
        xr %= xmod;
        if (xr < 0) xr += xmod;
        return (yr * xmod + xr).convert_to<std::uint64_t>();
    }

    std::uint64_t reduce(const FieldElement& g) const {
        if (!g.is_integral()) throw std::invalid_argument("ResidueRing: non-integral element");
        return index(numerator(g.x), numerator(g.y));
    }

    std::pair<Int, Int> coords(std::uint64_t idx) const {
        Int xm = xmod;
        return {Int(idx) % xm, Int(idx) / xm};
    }

    std::uint64_t one() const { return index(1, 0); }

    std::uint64_t mul_idx(std::uint64_t i, std::uint64_t j) const {
        auto [x1, y1] = coords(i);
        auto [x2, y2] = coords(j);
        Int cross = y1 * y2;
        Int x = x1 * x2 + cross * k.omega_sq_const();
        Int y = x1 * y2 + y1 * x2 + cross * k.omega_sq_lin();
        return index(x, y);
    }

    bool is_unit(std::uint64_t i) const {
        std::uint64_t n = size();
        for (std::uint64_t j = 0; j < n; ++j)
            if (mul_idx(i, j) == one()) return true;
        return false;
    }

    std::vector<std::uint64_t> units() const {
        std::vector<std::uint64_t> out;
        for (std::uint64_t i = 0; i < size(); ++i)
            if (is_unit(i)) out.push_back(i);
        return out;
    }

    std::set<std::uint64_t> unit_squares() const {
        std::set<std::uint64_t> out;
        for (auto u : units()) out.insert(mul_idx(u, u));
        return out;
    }
};

inline std::vector<std::uint64_t> primes_upto(std::uint64_t n) {
    std::vector<char> comp(n + 1, 0);
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = 1;
    }
    return out;
}

}  // namespace d4census
