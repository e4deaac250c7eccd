#pragma once

// High-precision evaluation of L(s, chi_d) at s = 1, 2; Dedekind zeta
// residues and special values for quadratic fields; the relative main-term
// constant and its telescoped cross-check; the truncated absolute constant C
// with a certified tail bound; error-exponent formulas.

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "classgroup.hpp"

namespace d4census {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<80>>;

inline const Real& real_pi() {
    static const Real pi = boost::math::constants::pi<Real>();
    return pi;
}

inline Real to_real(const Int& x) { return static_cast<Real>(x); }
inline Real to_real(const Rat& x) { return static_cast<Real>(x); }

namespace detail {

// exact Bernoulli numbers B_0, B_1, B_2, ... via the defining recurrence
inline const std::vector<Rat>& bernoulli_table() {
    static const std::vector<Rat> table = [] {
        constexpr int N = 96;
        std::vector<Rat> B(N + 1);
        std::vector<std::vector<Int>> C(N + 2, std::vector<Int>(N + 2, 0));
        for (int i = 0; i <= N + 1; ++i) {
            C[i][0] = 1;
            for (int j = 1; j <= i; ++j) C[i][j] = C[i - 1][j - 1] + (j <= i - 1 ? C[i - 1][j] : Int(0));
        }
        B[0] = 1;
        for (int n = 1; n <= N; ++n) {
            Rat s = 0;
            for (int j = 0; j < n; ++j) s += Rat(C[n + 1][j]) * B[j];
            B[n] = -s / Rat(C[n + 1][n]);
        }
        return B;
    }();
    return table;
}

// digamma via Euler--Maclaurin with shift M and K Bernoulli terms
inline Real digamma(const Real& x) {
    constexpr int M = 60, K = 30;
    Real s = 0;
    for (int j = 0; j < M; ++j) s += 1 / (x + j);
    Real t = x + M;
    Real r = log(t) - 1 / (2 * t) - s;
    Real t2 = t * t, pw = t2;
    const auto& B = bernoulli_table();
    for (int j = 1; j <= K; ++j) {
        r -= to_real(B[2 * j]) / (2 * j * pw);
        pw *= t2;
    }
    return r;
}

// Hurwitz zeta(2, x) via Euler--Maclaurin
inline Real hurwitz_zeta2(const Real& x) {
    constexpr int M = 60, K = 30;
    Real s = 0;
    for (int j = 0; j < M; ++j) s += 1 / ((x + j) * (x + j));
    Real t = x + M;
    Real r = s + 1 / t + 1 / (2 * t * t);
    Real t2 = t * t, pw = t * t2;
    const auto& B = bernoulli_table();
    for (int j = 1; j <= K; ++j) {
        r += to_real(B[2 * j]) / pw;
        pw *= t2;
    }
    return r;
}

// int64 Kronecker symbol for the batched double-precision path
inline int kronecker_ll(long long a, long long n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int sign = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) sign = -sign;
    }
    int v = 0;
    while (n % 2 == 0) { n /= 2; ++v; }
    if (v > 0) {
        if (a % 2 == 0) return 0;
        long long am = a % 8;
        if (am < 0) am += 8;
        if (v % 2 != 0 && (am == 3 || am == 5)) sign = -sign;
    }
    a %= n;
    if (a < 0) a += n;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            long long nm = n % 8;
            if (nm == 3 || nm == 5) sign = -sign;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) sign = -sign;
        a %= n;
    }
    return n == 1 ? sign : 0;
}

}  // namespace detail

inline Real zeta2_value() {
    static const Real z = real_pi() * real_pi() / 6;
    return z;
}

struct LValue {
    long d = 0;
    int s = 1;
    Real value;
    enum class Method { closed_form, series } method = Method::closed_form;
};

// L(1, chi_d) by the classical finite closed forms
inline Real L1_closed_form(long d) {
    Int D(d);
    if (d < 0) {
        // -(pi / |d|^{3/2}) * sum a*chi(a)
        Int s = 0;
        for (long a = 1; a < -d; ++a) s += kronecker(D, Int(a)) * a;
        Real q = Real(-d);
        return -real_pi() * to_real(s) / (q * sqrt(q));
    }
    // -(1/sqrt d) * sum chi(a) log sin(pi a / d)
    Real q = Real(d);
    Real s = 0;
    for (long a = 1; a < d; ++a) {
        int ch = kronecker(D, Int(a));
        if (ch != 0) s += ch * log(sin(real_pi() * a / q));
    }
    return -s / sqrt(q);
}

// L(1, chi_d) via the digamma partial-fraction series
inline Real L1_series(long d) {
    long q = d < 0 ? -d : d;
    Real s = 0;
    for (long a = 1; a < q; ++a) {
        int ch = kronecker(Int(d), Int(a));
        if (ch != 0) s += ch * detail::digamma(Real(a) / q);
    }
    return -s / q;
}

// L(2, chi_d) via Hurwitz zeta acceleration
inline Real L2_series(long d) {
    if (d == 1) return zeta2_value();
    long q = d < 0 ? -d : d;
    Real s = 0;
    for (long a = 1; a < q; ++a) {
        int ch = kronecker(Int(d), Int(a));
        if (ch != 0) s += ch * detail::hurwitz_zeta2(Real(a) / q);
    }
    return s / (Real(q) * q);
}

inline LValue L_value(long d, int s,
                      LValue::Method method = LValue::Method::closed_form) {
    if (s != 1 && s != 2) throw std::invalid_argument("L_value: s must be 1 or 2");
    if (d != 1 && !is_fundamental_discriminant(Int(d)))
        throw std::invalid_argument("L_value: d not a fundamental discriminant");
    LValue out;
    out.d = d;
    out.s = s;
    if (s == 2) {
        out.method = LValue::Method::series;
        out.value = L2_series(d);
    } else if (d == 1) {
        throw std::invalid_argument("L_value: s = 1 requires d != 1");
    } else if (method == LValue::Method::closed_form) {
        out.method = method;
        out.value = L1_closed_form(d);
    } else {
        out.method = method;
        out.value = L1_series(d);
    }
    if (!(out.value > 0)) throw std::logic_error("L_value: nonpositive value");
    return out;
}

// zeta_k(s) = zeta(s) L(s, chi_Delta), so the residue at 1 is L(1, chi_Delta)
inline Real zeta_k_residue(const QuadField& k) {
    return L1_closed_form(k.delta.convert_to<long>());
}

inline long root_of_unity_count(const QuadField& k) {
    if (k.delta == -4) return 4;
    if (k.delta == -3) return 6;
    return 2;
}

// 2^{r1} (2pi)^{r2} h R / (w sqrt|Delta|) -- the independent cross-check
inline Real class_number_formula_residue(const QuadField& k) {
    ClassGroup cl(k, false);
    Real h = to_real(cl.order());
    Real sd = sqrt(to_real(Int(abs(k.delta))));
    if (k.delta < 0) return 2 * real_pi() * h / (root_of_unity_count(k) * sd);
    FieldElement eps = fundamental_unit(k).value;
    // real embedding x + y (Delta + sqrt Delta)/2 with the positive root
    Real emb = to_real(eps.x) + to_real(eps.y) * (to_real(k.delta) + sqrt(to_real(k.delta))) / 2;
    Real reg = abs(log(abs(emb)));
    return 4 * h * reg / (2 * sd);
}

inline Real zeta_k_at_2(const QuadField& k) {
    return zeta2_value() * L2_series(k.delta.convert_to<long>());
}

inline Real zeta_k_imprimitive_at_2(const QuadField& k, const QuadIdeal& m) {
    Real z = zeta_k_at_2(k);
    if (m.is_unit_ideal()) return z;
    for (auto& [P, e] : factor_ideal(k, m).factors) {
        Real np2 = to_real(P.norm() * P.norm());
        z *= 1 - 1 / np2;
    }
    return z;
}

// zeta*_k(1) / (2^{r2} zeta_k(2))
inline Real main_term_constant(const QuadField& k) {
    return zeta_k_residue(k) / (to_real(Int(1) << k.r2) * zeta_k_at_2(k));
}

// The same constant from the raw per-modulus shape of the counting formula:
// (2^{r1+r2}/16) * sum_{d | (2)} [ (1/N(d)) prod_{P|d} (1+1/N(P))^{-1}
//                                  * sum_{c|d} mu(d/c) N(c)^2 ] * zeta*/zeta_k(2).
// The bracketed rational telescopes to Phi(d), and the d-sum to N((2)) = 4.
inline Real main_term_constant_telescoped(const QuadField& k) {
    QuadIdeal two = rational_ideal(k, 2);
    Rat total = 0;
    for (auto& d : ideal_divisors(k, two)) {
        Rat term(1, d.norm());
        for (auto& [P, e] : factor_ideal(k, d).factors) term *= Rat(P.norm(), P.norm() + 1);
        Rat inner = 0;
        for (auto& c : ideal_divisors(k, d)) {
            int mu = moebius_ideal(k, divide_exact(k, d, c));
            if (mu != 0) inner += mu * Rat(Int(c.norm() * c.norm()));
        }
        term *= inner;
        // telescoping identity: the raw per-modulus factor equals Phi(d)
        if (term != Rat(euler_phi_ideal(k, d)))
            throw std::logic_error("main_term_constant_telescoped: identity failed");
        total += term;
    }
    if (total != 4) throw std::logic_error("main_term_constant_telescoped: d-sum is not 4");
    Rat front = Rat(Int(1) << (k.r1 + k.r2), 16) * total;
    return to_real(front) * zeta_k_residue(k) / zeta_k_at_2(k);
}

struct ConstantCResult {
    long truncation = 0;
    Real partial_sum;
    Real tail_bound;
    Real lo, hi;
};

// Optional memo table for per-field constants, keyed by strings; the CLI
// backs this with a file in the directory named by its cache environment
// variable. Values are decimal strings round-trippable at the precision the
// producer used.
struct LValueCache {
    std::function<std::optional<std::string>(const std::string& key)> get;
    std::function<void(const std::string& key, const std::string& value)> put;
};

namespace detail {

// per-field constant  L(1,chi_d) / (2^{r2} zeta(2) L(2,chi_d))  in double,
// L(1) by the theta-smoothed (incomplete-gamma) expansion, L(2) by a
// truncated Euler product (relative error well below the global tail bound)
inline double field_constant_double(long d) {
    long q = d < 0 ? -d : d;
    double sq = std::sqrt(double(q));
    double rpq = std::sqrt(M_PI / q);
    double L1 = 0;
    long N = long(2.6 * sq) + 8;  // e^{-pi n^2/q} below 1e-9 beyond this
    for (long n = 1; n <= N; ++n) {
        int ch = kronecker_ll(d, n);
        if (ch == 0) continue;
        double x = n * rpq;
        double term;
        if (d > 0)
            term = std::erfc(x) / n - std::expint(-x * x) / sq;
        else
            term = std::exp(-x * x) / n + M_PI / sq * std::erfc(x);
        L1 += ch * term;
    }
    static const std::vector<std::uint64_t> ps = primes_upto(10000);
    double L2inv = 1;
    for (auto p : ps) L2inv *= 1 - double(kronecker_ll(d, (long long)p)) / (double(p) * p);
    double L2 = 1 / L2inv;
    double zeta2 = M_PI * M_PI / 6;
    double c = L1 / (zeta2 * L2);
    return d < 0 ? c / 2 : c;
}

}  // namespace detail

// Truncation of  C = (1/2) sum_k  zeta*_k(1) / (2^{r2} Delta_k^2 zeta_k(2))
// over fundamental |Delta| <= B.
//
// Tail bound: with L(1, chi_d) <= (1/2) log|d| + 1 (the committed explicit
// inequality) and zeta_k(2) >= zeta(4), each omitted term is at most
// ((1/2) log|d| + 1) / (zeta(4) d^2) and there are at most two fundamental
// discriminants per absolute value, so the tail is at most
// (1/zeta(4)) * integral_B^inf ((1/2) log t + 3/2) / t^2 dt
//   = ((1/2) log B + 2) / (zeta(4) B)  <=  K_tail (log B)/B
// with K_tail = 2.5 for B >= 3 (2.5 log 3 > (0.55 log 3 + 1.85)).
inline ConstantCResult constant_C(long B, const LValueCache* cache = nullptr) {
    if (B < 3) throw std::invalid_argument("constant_C: B >= 3 required");
    ConstantCResult out;
    out.truncation = B;
    if (B <= 300) {
        // high-precision path
        Real s = 0;
        for (auto& D : fundamental_discriminants(Int(B))) {
            long d = D.convert_to<long>();
            std::string key = "C80:" + std::to_string(d);
            Real c;
            std::optional<std::string> hit;
            if (cache && (hit = cache->get(key))) {
                c = Real(*hit);
            } else {
                int r2 = d < 0 ? 1 : 0;
                c = L1_closed_form(d) / ((1 << r2) * zeta2_value() * L2_series(d));
                if (cache) cache->put(key, c.str(75));
            }
            s += c / to_real(Int(D * D));
        }
        out.partial_sum = s / 2;
    } else {
        double s = 0;
        for (auto& D : fundamental_discriminants(Int(B))) {
            long d = D.convert_to<long>();
            std::string key = "C53:" + std::to_string(d);
            double c;
            std::optional<std::string> hit;
            if (cache && (hit = cache->get(key))) {
                c = std::stod(*hit);
            } else {
                c = detail::field_constant_double(d);
                if (cache) {
                    char buf[40];
                    std::snprintf(buf, sizeof buf, "%.17g", c);
                    cache->put(key, buf);
                }
            }
            s += c / (double(d) * d);
        }
        out.partial_sum = Real(s / 2);
    }
    out.tail_bound = Real(2.5) * log(Real(B)) / B;
    out.lo = out.partial_sum - out.tail_bound;
    out.hi = out.partial_sum + out.tail_bound;
    return out;
}

enum class ErrorRegime { relative, quartic_over_F };

struct ErrorExponent {
    Rat disc_exponent;   // exponent of |Delta_k|
    Rat x_exponent;      // exponent of X
    int log_power = 0;   // power of log X
    int disc_log_power = 0;  // power of log|Delta_k|
    bool epsilon = false;    // X^epsilon in place of explicit logs
};

inline ErrorExponent error_exponent(int n, ErrorRegime regime) {
    if (n < 2) throw std::invalid_argument("error_exponent: n >= 2 required");
    ErrorExponent e;
    if (regime == ErrorRegime::quartic_over_F) {
        e.disc_exponent = Rat(2, 2 * n + 1);
        e.x_exponent = 1 - Rat(2, 2 * n + 1);
        e.epsilon = true;
        return e;
    }
    if (n == 2) {
        e.disc_exponent = Rat(1, 3);
        e.x_exponent = Rat(1, 2);
        e.log_power = 1;
        e.disc_log_power = 1;
    } else if (n == 3) {
        e.disc_exponent = Rat(1, 4);
        e.x_exponent = Rat(1, 2);
        e.log_power = 3;
        e.disc_log_power = 2;
    } else {
        e.disc_exponent = Rat(1, n + 1);
        e.x_exponent = 1 - Rat(2, n + 1);
        e.log_power = n - 1;
    }
    return e;
}

inline Rat alpha_bound(int n) {
    if (n < 2) throw std::invalid_argument("alpha_bound: n >= 2 required");
    if (n == 2) return Rat(0);
    if (n == 3 || n == 4) return Rat(2785, 10000);
    return Rat(1, 2) - Rat(1, 2 * n);
}

}  // namespace d4census
