#pragma once

// Exact integer arithmetic utilities: factorization, Kronecker symbol,
// fundamental discriminants, multiplicative functions.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace d4census {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

inline Int isqrt(const Int& n) {
    if (n < 0) throw std::invalid_argument("isqrt of negative integer");
    return boost::multiprecision::sqrt(n);
}

inline bool is_perfect_square(const Int& n) {
    if (n < 0) return false;
    Int r = isqrt(n);
    return r * r == n;
}

// Rational square test: numerator and denominator both perfect squares
// (in lowest terms, which mpq_rational maintains).
inline bool is_rational_square(const Rat& q) {
    if (q < 0) return false;
    return is_perfect_square(numerator(q)) && is_perfect_square(denominator(q));
}

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((__uint128_t)a * b % m);
}

inline std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin for 64-bit inputs; the base set below is a
// known-complete witness set for n < 2^64.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i < s - 1; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    if (n <= Int(std::uint64_t(-1))) return is_prime_u64(n.convert_to<std::uint64_t>());
    // desk-scale inputs stay below 2^64; fall back to GMP for anything larger
    return mpz_probab_prime_p(n.backend().data(), 40) != 0;
}

struct Factorization {
    Int value = 1;
    std::vector<std::pair<Int, unsigned>> factors;  // (prime, exponent), primes increasing

    bool squarefree() const {
        for (auto& [p, e] : factors)
            if (e > 1) return false;
        return true;
    }
};

namespace detail {

inline std::uint64_t pollard_rho_u64(std::uint64_t n) {
    if (n % 2 == 0) return 2;
    std::uint64_t x = 2, y = 2, c = 1, d = 1;
    while (true) {
        x = 2; y = 2; d = 1;
        while (d == 1) {
            x = (mulmod_u64(x, x, n) + c) % n;
            y = (mulmod_u64(y, y, n) + c) % n;
            y = (mulmod_u64(y, y, n) + c) % n;
            std::uint64_t diff = x > y ? x - y : y - x;
            if (diff == 0) break;
            d = std::gcd(diff, n);
        }
        if (d != 1 && d != n) return d;
        ++c;
    }
}

inline void factor_rec(Int n, std::vector<Int>& out) {
    if (n == 1) return;
    if (is_prime(n)) { out.push_back(n); return; }
    if (n > Int(std::uint64_t(-1)))
        throw std::invalid_argument("factorize: input beyond supported range");
    std::uint64_t d = pollard_rho_u64(n.convert_to<std::uint64_t>());
    factor_rec(Int(d), out);
    factor_rec(n / d, out);
}

}  // namespace detail

inline Factorization factorize(Int n) {
    if (n < 1) throw std::invalid_argument("factorize: n must be positive");
    Factorization f;
    f.value = n;
    std::vector<Int> primes;
    for (std::uint64_t p = 2; p <= 1000000 && Int(p) * p <= n; p == 2 ? p = 3 : p += 2) {
        while (n % p == 0) { primes.emplace_back(p); n /= p; }
    }
    if (n > 1) detail::factor_rec(n, primes);
    std::sort(primes.begin(), primes.end());
    for (size_t i = 0; i < primes.size();) {
        size_t j = i;
        while (j < primes.size() && primes[j] == primes[i]) ++j;
        f.factors.emplace_back(primes[i], static_cast<unsigned>(j - i));
        i = j;
    }
    return f;
}

inline unsigned omega(const Int& n) {
    return static_cast<unsigned>(factorize(abs(n)).factors.size());
}

// Moebius function of a positive integer; 0 if not squarefree.
inline int moebius(const Int& n) {
    Factorization f = factorize(n);
    if (!f.squarefree()) return 0;
    return f.factors.size() % 2 == 0 ? 1 : -1;
}

inline Int squarefree_kernel(const Int& n) {
    if (n == 0) throw std::invalid_argument("squarefree_kernel of zero");
    Factorization f = factorize(abs(n));
    Int k = n < 0 ? -1 : 1;
    for (auto& [p, e] : f.factors)
        if (e % 2 == 1) k *= p;
    return k;
}

// Kronecker symbol (a|n), fully general.
inline int kronecker(const Int& a, const Int& n) {
    if (a == 0 && n == 0) throw std::invalid_argument("kronecker(0, 0) undefined");
    return mpz_kronecker(a.backend().data(), n.backend().data());
}

inline bool is_fundamental_discriminant(const Int& d) {
    if (d == 1 || d == 0) return false;
    Int m = d % 4;
    if (m < 0) m += 4;
    if (m == 1) return factorize(abs(d)).squarefree();
    if (m != 0) return false;
    Int q = d / 4;
    Int r = q % 4;
    if (r < 0) r += 4;
    if (r != 2 && r != 3) return false;
    return factorize(abs(q)).squarefree();
}

// The fundamental discriminant of Q(sqrt(n)) for non-square n.
inline Int fundamental_discriminant_of(const Int& n) {
    Int m = squarefree_kernel(n);
    if (m == 1) throw std::invalid_argument("fundamental_discriminant_of: square input");
    Int r = m % 4;
    if (r < 0) r += 4;
    return r == 1 ? m : 4 * m;
}

// All fundamental discriminants with |d| <= bound, sorted by |d| with the
// negative one first on (impossible) ties. Deterministic.
inline std::vector<Int> fundamental_discriminants(const Int& bound) {
    if (bound < 1) throw std::invalid_argument("fundamental_discriminants: bound must be >= 1");
    std::uint64_t b = bound.convert_to<std::uint64_t>();
    // squarefree sieve up to b
    std::vector<char> sqf(b + 1, 1);
    for (std::uint64_t p = 2; p * p <= b; ++p)
        for (std::uint64_t q = p * p; q <= b; q += p * p) sqf[q] = 0;
    std::vector<Int> out;
    for (std::uint64_t t = 3; t <= b; ++t) {
        for (int sign : {-1, +1}) {
            std::int64_t d = sign * static_cast<std::int64_t>(t);
            std::int64_t m = ((d % 4) + 4) % 4;
            bool fund = false;
            if (m == 1) {
                fund = sqf[t] != 0;
            } else if (m == 0) {
                std::int64_t q = d / 4;
                std::int64_t r = ((q % 4) + 4) % 4;
                fund = (r == 2 || r == 3) && sqf[t / 4] != 0;
            }
            if (fund) out.emplace_back(d);
        }
    }
    return out;
}

}  // namespace d4census
