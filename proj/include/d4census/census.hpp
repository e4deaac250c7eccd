#pragma once

// The quartic census: aggregates relative counts over all quadratic base
// fields, audits the multiplicity structure of the D4 bucket, cross-checks
// the V4 bucket against an independent triple enumeration, and carries the
// error-term scans, the Z-split experiment, and the secondary-term fit.

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <utility>

#include "analytic.hpp"
#include "counting.hpp"

namespace d4census {

struct FieldBreakdown {
    Int delta;           // base-field discriminant
    Int relative_bound;  // floor(X / delta^2)
    Int total = 0;       // relative extensions of that field within the bound
    Int raw_d4 = 0, raw_c4 = 0, raw_v4 = 0;  // descriptor counts, with multiplicity
};

struct CensusResult {
    Int X;
    Int total_quad_over_quad = 0;
    // Deduplicated quartic-field counts: every D4 quartic field appears as
    // exactly two relative extensions, every C4 as one, every V4 as three.
    Int n_d4 = 0, n_c4 = 0, n_v4 = 0;
    std::vector<FieldBreakdown> per_field;

    bool identity_holds() const {
        return total_quad_over_quad == 2 * n_d4 + n_c4 + 3 * n_v4;
    }
};

namespace detail {

// Run fn(i) for i in [0, n) on `threads` workers. Output slots are indexed,
// so the result is independent of scheduling.
template <typename Fn>
inline void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// Verify that sigma-conjugation is a fixed-point-free involution on the D4
// descriptors of one base field, pairing them off exactly.
inline void audit_d4_involution(const Parametrization& ctx,
                                const std::vector<ExtensionDescriptor>& descs) {
    std::set<std::pair<QuadIdeal, std::size_t>> d4;
    for (auto& d : descs)
        if (d.galois_type == GaloisType::D4) d4.insert({d.a, d.u_index});
    for (auto& [a, u] : d4) {
        auto partner = ctx.conjugate_pair(a, u);
        if (partner == std::make_pair(a, u))
            throw std::logic_error("d4 audit: conjugation fixed point");
        if (!d4.count(partner))
            throw std::logic_error("d4 audit: unpaired descriptor");
        if (ctx.conjugate_pair(partner.first, partner.second) != std::make_pair(a, u))
            throw std::logic_error("d4 audit: conjugation is not an involution");
    }
}

}  // namespace detail

// Total count of quadratic extensions K/k with |disc(K)| <= X, over all
// quadratic base fields k, bucketed by the Galois closure of the quartic.
// When audit is set, the D4 pairing involution is verified per field.
inline CensusResult quad_over_quad_total(const Int& X, unsigned threads = 1,
                                         bool audit = true) {
    if (X < 1) throw std::invalid_argument("quad_over_quad_total: X must be >= 1");
    CensusResult res;
    res.X = X;
    std::vector<Int> deltas;
    if (X >= 9)
        for (auto& d : fundamental_discriminants(isqrt(X)))
            if (d * d <= X) deltas.push_back(d);
    std::vector<std::optional<FieldBreakdown>> slots(deltas.size());

    detail::parallel_for(deltas.size(), threads, [&](std::size_t i) {
        QuadField k(deltas[i]);
        Int Y = X / (deltas[i] * deltas[i]);
        FieldBreakdown fb;
        fb.delta = deltas[i];
        fb.relative_bound = Y;
        if (Y >= 1) {
            Parametrization ctx(k);
            auto rc = count_relative_direct(ctx, Y.convert_to<double>(), audit);
            fb.total = rc.total;
            fb.raw_d4 = rc.by_type.at(GaloisType::D4);
            fb.raw_c4 = rc.by_type.at(GaloisType::C4);
            fb.raw_v4 = rc.by_type.at(GaloisType::V4);
            if (audit) detail::audit_d4_involution(ctx, rc.descriptors);
        }
        slots[i] = std::move(fb);
    });

    Int raw_d4 = 0, raw_v4 = 0;
    for (auto& s : slots) {
        res.per_field.push_back(*s);
        res.total_quad_over_quad += s->total;
        raw_d4 += s->raw_d4;
        res.n_c4 += s->raw_c4;
        raw_v4 += s->raw_v4;
    }
    if (raw_d4 % 2 != 0) throw std::logic_error("census: odd D4 descriptor count");
    if (raw_v4 % 3 != 0)
        throw std::logic_error("census: V4 descriptor count not divisible by 3");
    res.n_d4 = raw_d4 / 2;
    res.n_v4 = raw_v4 / 3;
    if (!res.identity_holds()) throw std::logic_error("census: identity failed");
    return res;
}

// Exact number of D4 quartic fields with |disc| <= X, with the multiplicity-2
// audit always on.
inline Int d4_exact(const Int& X, unsigned threads = 1) {
    return quad_over_quad_total(X, threads, true).n_d4;
}

// Independent V4 count: a V4 quartic field is an unordered triple
// {d1, d2, d3} of distinct fundamental discriminants, closed under
// d3 = fundamental discriminant of Q(sqrt(d1 d2)), and its discriminant is
// the product d1 d2 d3 (conductor-discriminant). Counts triples with
// |d1 d2 d3| <= X; every triple arises from each of its three sub-pairs, so
// the pair count is exactly divisible by 3.
inline Int v4_independent(const Int& X, unsigned threads = 1) {
    if (X < 1) throw std::invalid_argument("v4_independent: X must be >= 1");
    if (X < 27) return 0;  // the smallest triple product is 144
    // |di| >= 3 for all three, so each pair has |d1 d2| <= X / 3.
    std::vector<Int> ds = fundamental_discriminants(X / 9);
    // smallest-prime-factor sieve so the per-pair squarefree kernel is cheap
    const std::uint64_t N = (X / 3).convert_to<std::uint64_t>();
    std::vector<std::uint32_t> spf(N + 1, 0);
    for (std::uint64_t i = 2; i <= N; ++i)
        if (spf[i] == 0)
            for (std::uint64_t j = i; j <= N; j += i)
                if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
    auto fund_of = [&](std::int64_t m) -> std::int64_t {
        std::int64_t sign = m < 0 ? -1 : 1;
        std::uint64_t n = static_cast<std::uint64_t>(sign * m);
        std::int64_t ker = sign;
        while (n > 1) {
            std::uint64_t p = spf[n];
            bool odd = false;
            while (n % p == 0) { n /= p; odd = !odd; }
            if (odd) ker *= static_cast<std::int64_t>(p);
        }
        std::int64_t r = ker % 4;
        if (r < 0) r += 4;
        return r == 1 ? ker : 4 * ker;
    };
    // canonical order: by (|d|, d)
    auto less = [](const Int& a, const Int& b) {
        Int aa = abs(a), ab = abs(b);
        return aa != ab ? aa < ab : a < b;
    };
    std::sort(ds.begin(), ds.end(), less);
    std::vector<Int> partial(ds.size(), Int(0));
    detail::parallel_for(ds.size(), threads, [&](std::size_t i) {
        Int cnt = 0;
        for (std::size_t j = i + 1; j < ds.size(); ++j) {
            Int prod = ds[i] * ds[j];
            if (abs(prod) > X / 3) break;  // ds is sorted by |d|
            Int d3 = Int(fund_of(prod.convert_to<std::int64_t>()));
            if (d3 == ds[i] || d3 == ds[j]) continue;
            if (abs(prod * d3) <= X) cnt += 1;
        }
        partial[i] = cnt;
    });
    Int pairs = 0;
    for (auto& c : partial) pairs += c;
    if (pairs % 3 != 0) throw std::logic_error("v4_independent: pair count not divisible by 3");
    return pairs / 3;
}

struct ErrorScanPoint {
    Int Y;
    Int count;        // N_k(Y)
    Real main_term;   // c_k * Y
    Real error;       // N_k(Y) - c_k * Y
    Real ratio;       // |error| / (|delta|^{1/3} Y^{1/2} (1 + log Y))
};

struct ErrorScan {
    QuadField field;
    std::vector<ErrorScanPoint> grid;
    Real sup_ratio = 0;
};

// Exact N_k(Y) along a grid, with the error term against the main term
// c_k Y and the normalized ratio whose sup the error envelope controls.
inline ErrorScan error_scan(const QuadField& k, const std::vector<Int>& grid) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw std::invalid_argument("error_scan: grid must be strictly increasing");
    ErrorScan out;
    out.field = k;
    CharacterEngine engine(k);
    Real ck = main_term_constant(k);
    Real cube = cbrt(to_real(Int(abs(k.delta))));
    for (auto& Y : grid) {
        ErrorScanPoint p;
        p.Y = Y;
        p.count = Y >= 1 ? engine.count(Y.convert_to<double>()) : Int(0);
        p.main_term = ck * to_real(Y);
        p.error = to_real(p.count) - p.main_term;
        Real y = to_real(Y);
        p.ratio = abs(p.error) / (cube * sqrt(y) * (1 + log(y)));
        out.sup_ratio = std::max(out.sup_ratio, p.ratio);
        out.grid.push_back(std::move(p));
    }
    return out;
}

struct ZSplitRow {
    Real Z;
    Real head;   // sum over |delta| <= Z of |E_k(X / delta^2)|
    Real tail;   // sum over Z < |delta| <= sqrt(X) of N_k(X / delta^2)
    Real total;  // head + tail
};

struct ZSplitReport {
    Int X;
    std::vector<ZSplitRow> rows;  // at Z = X^{1/4}, X^{3/8}, X^{1/2}
    std::size_t best_index = 0;   // argmin of total
    Real far_tail_bound;          // certified bound on sum_{|delta| > sqrt X} c_k / delta^2
    Real far_tail_shape;          // K X^{-1/2} (1 + log X) with K = 2.5
};

// Splits the census error at a cutoff Z between base fields whose error
// terms are measured exactly and base fields whose whole counts are charged
// to the error, then reports which of the three candidate cutoffs minimizes
// the measured total.
inline ZSplitReport z_split_experiment(const Int& X, unsigned threads = 1) {
    if (X < 16) throw std::invalid_argument("z_split_experiment: X must be >= 16");
    ZSplitReport rep;
    rep.X = X;
    std::vector<Int> deltas;
    for (auto& d : fundamental_discriminants(isqrt(X)))
        if (d * d <= X) deltas.push_back(d);
    // per-field exact counts and errors, computed once
    std::vector<Int> counts(deltas.size(), Int(0));
    std::vector<Real> errors(deltas.size(), Real(0));
    detail::parallel_for(deltas.size(), threads, [&](std::size_t i) {
        QuadField k(deltas[i]);
        Int Y = X / (deltas[i] * deltas[i]);
        Int n = Y >= 1 ? CharacterEngine(k).count(Y.convert_to<double>()) : Int(0);
        counts[i] = n;
        errors[i] = to_real(n) - main_term_constant(k) * to_real(Y);
    });
    Real lx = log(to_real(X));
    for (Rat e : {Rat(1, 4), Rat(3, 8), Rat(1, 2)}) {
        ZSplitRow row;
        row.Z = exp(lx * to_real(e));
        row.head = 0;
        row.tail = 0;
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            if (to_real(Int(abs(deltas[i]))) <= row.Z)
                row.head += abs(errors[i]);
            else
                row.tail += to_real(counts[i]);
        }
        row.total = row.head + row.tail;
        rep.rows.push_back(row);
    }
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (rep.rows[i].total < rep.rows[rep.best_index].total) rep.best_index = i;
    Int B = isqrt(X);
    rep.far_tail_bound = B >= 3 ? constant_C(B.convert_to<long>()).tail_bound
                                : Real(2.5) * Real(std::log(3.0)) / 3;
    rep.far_tail_shape = Real(2.5) * (1 + lx) / sqrt(to_real(X));
    return rep;
}

struct SecondaryFit {
    std::vector<Int> grid;
    std::vector<Int> counts;
    double fitted_D = 0;
    std::vector<double> residuals;           // count - D * x^{1/2} (log x)^2
    std::vector<double> relative_residuals;  // residual / (x^{1/2} (log x)^2)
};

// Least-squares fit of given counts to the model D * x^{1/2} (log x)^2.
inline SecondaryFit secondary_fit_from(const std::vector<Int>& grid,
                                       const std::vector<Int>& counts) {
    if (grid.size() != counts.size() || grid.size() < 2)
        throw std::invalid_argument("secondary_fit: need at least two grid points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw std::invalid_argument("secondary_fit: grid must be strictly increasing");
    if (grid.front() < 2 || grid.back() < 100 * grid.front())
        throw std::invalid_argument("secondary_fit: grid must span two decades");
    SecondaryFit out;
    out.grid = grid;
    out.counts = counts;
    double sgg = 0, sng = 0;
    std::vector<double> g(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double x = grid[i].convert_to<double>();
        g[i] = std::sqrt(x) * std::log(x) * std::log(x);
        sgg += g[i] * g[i];
        sng += counts[i].convert_to<double>() * g[i];
    }
    out.fitted_D = sng / sgg;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double r = counts[i].convert_to<double>() - out.fitted_D * g[i];
        out.residuals.push_back(r);
        out.relative_residuals.push_back(r / g[i]);
    }
    return out;
}

// Fit against the independent V4 enumeration.
inline SecondaryFit secondary_fit(const std::vector<Int>& grid, unsigned threads = 1) {
    std::vector<Int> counts;
    for (auto& x : grid) counts.push_back(v4_independent(x, threads));
    return secondary_fit_from(grid, counts);
}

}  // namespace d4census
