// Acceptance gate: ten criteria, one pass/fail line each. The program exits
// nonzero if any criterion fails. argv[1] must point at the CLI binary (used
// by the determinism criterion).

#include <array>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <d4census/census.hpp>

using namespace d4census;

namespace {

int failures = 0;

void report(int n, const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion-" << n << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++failures;
}

template <typename Fn>
void criterion(int n, const std::string& name, Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    try {
        std::string detail;
        bool ok = fn(detail);
        auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1fs", dt.count());
        report(n, name, ok, detail.empty() ? std::string(buf) : detail + ", " + buf);
    } catch (const std::exception& e) {
        report(n, name, false, std::string("exception: ") + e.what());
    }
}

bool agree_digits(const Real& a, const Real& b, int digits) {
    Real scale = std::max(Real(1), std::max(Real(abs(a)), Real(abs(b))));
    return abs(a - b) <= scale * pow(Real(10), -digits);
}

std::string run_capture(const std::string& cmd) {
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) throw std::runtime_error("popen failed: " + cmd);
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    if (pclose(p) != 0) throw std::runtime_error("command failed: " + cmd);
    return out;
}

// Frozen first-run sup ratios for the 20 smallest base fields (fundamental
// |disc| <= 31, in the library's deterministic order) over the grid
// Y in {10^2, 10^3, 10^4, 10^5}; regression guard allows at most +1%.
// A zero entry switches that field to print mode so the fixture can be
// (re)frozen deliberately.
constexpr std::array<double, 20> kFrozenSup = {
    0.006454535609716,  // disc -3
    0.003439452537072,  // disc -4
    0.030769431153467,  // disc 5
    0.034202426527707,  // disc -7
    0.038275434620416,  // disc -8
    0.012766739029711,  // disc 8
    0.018804854100796,  // disc -11
    0.049315517233915,  // disc 12
    0.008838410134465,  // disc 13
    0.050410362842254,  // disc -15
    0.001269725808686,  // disc 17
    0.016674122903955,  // disc -19
    0.018786055736402,  // disc -20
    0.007700138163587,  // disc 21
    0.016122758806930,  // disc -23
    0.073319716385920,  // disc -24
    0.126905686446176,  // disc 24
    0.020916930569590,  // disc 28
    0.011379847282637,  // disc 29
    0.017404653907407,  // disc -31
};

}  // namespace

int main(int argc, char** argv) {
    std::string cli = argc > 1 ? argv[1] : "";
    std::map<long, CensusResult> census;  // shared by criteria 3, 4, 8

    criterion(1, "engine equivalence on |disc| <= 200, Y = 2^j, j <= 12",
              [&](std::string&) {
        for (auto& D : fundamental_discriminants(Int(200))) {
            QuadField k(D);
            Parametrization ctx(k);
            CharacterEngine eng(k);
            // one enumeration at the top bound serves every smaller bound
            auto rc = count_relative_direct(ctx, 4096.0, true);
            for (int j = 0; j <= 12; ++j) {
                Int bound = Int(1) << j;
                Int direct = 0;
                for (auto& d : rc.descriptors)
                    if (d.rel_disc_norm <= bound) direct += 1;
                if (direct != eng.count(std::ldexp(1.0, j))) return false;
            }
        }
        return true;
    });

    criterion(2, "solvability-count closed form on |disc| <= 100, N(a) <= 200",
              [&](std::string&) {
        for (auto& D : fundamental_discriminants(Int(100))) {
            QuadField k(D);
            Parametrization ctx(k);
            auto primes = prime_ideals_upto(k, Int(200));
            std::vector<QuadIdeal> cs = ideal_divisors(k, rational_ideal(k, 2));
            bool ok = true;
            auto visit = [&](const QuadIdeal& a) {
                bool square_class = ctx.class_group().in_square_subgroup(a);
                for (auto& c : cs) {
                    if (!coprime(k, a, c)) continue;
                    Int closed = selmer_solvability_closed_form(k, a, c);
                    if (!square_class) {
                        // no alpha0 exists; the closed form must report zero
                        if (closed != 0) ok = false;
                        continue;
                    }
                    if (selmer_solvability_count(ctx, a, c) != closed) ok = false;
                }
            };
            auto dfs = [&](auto&& self, std::size_t i, const QuadIdeal& a,
                           const Int& n) -> void {
                visit(a);
                for (std::size_t j = i; j < primes.size() && ok; ++j) {
                    Int nn = n * primes[j].norm();
                    if (nn > 200) break;
                    self(self, j + 1, mul(k, a, primes[j].ideal), nn);
                }
            };
            dfs(dfs, 0, unit_ideal(k), 1);
            if (!ok) return false;
        }
        return true;
    });

    criterion(3, "census identity and D4 audit at X = 10^2..10^6",
              [&](std::string& detail) {
        for (long X : {100L, 1000L, 10000L, 100000L, 1000000L}) {
            census.emplace(X, quad_over_quad_total(Int(X), 4, true));
            if (!census.at(X).identity_holds()) return false;
        }
        std::ostringstream os;
        os << "n_d4(10^6) = " << census.at(1000000).n_d4;
        detail = os.str();
        return true;
    });

    criterion(4, "V4 cross-oracle on the same grid", [&](std::string&) {
        for (auto& [X, r] : census)
            if (v4_independent(Int(X), 4) != r.n_v4) return false;
        return !census.empty();
    });

    criterion(5, "L(1) dual-method and class number formula, 30 digits, |d| <= 500",
              [&](std::string&) {
        for (auto& D : fundamental_discriminants(Int(500))) {
            long d = D.convert_to<long>();
            Real a = L1_closed_form(d);
            Real b = L1_series(d);
            if (!agree_digits(a, b, 30)) return false;
            QuadField k(D);
            if (!agree_digits(a, class_number_formula_residue(k), 30)) return false;
        }
        return true;
    });

    criterion(6, "telescoped main-term constant, 40 digits, |disc| <= 300",
              [&](std::string&) {
        for (auto& D : fundamental_discriminants(Int(300))) {
            QuadField k(D);
            if (!agree_digits(main_term_constant(k), main_term_constant_telescoped(k), 40))
                return false;
        }
        return true;
    });

    criterion(7, "genus bound |Cl[2]| <= 2^(omega-1), |disc| <= 5000",
              [&](std::string&) {
        for (auto& D : fundamental_discriminants(Int(5000))) {
            QuadField k(D);
            ClassGroup cl(k, false);
            if (cl.two_rank() + 1 > omega(abs(D))) return false;
        }
        return true;
    });

    criterion(8, "n_d4(10^6)/10^6 within the frozen envelope of C",
              [&](std::string& detail) {
        if (!census.count(1000000)) return false;
        auto cb = constant_C(100000);
        Real ratio = to_real(census.at(1000000).n_d4) / 1000000;
        Real dev = abs(ratio - cb.partial_sum);
        Real envelope = cb.tail_bound + 8 * pow(Real(1000000), Real(-3) / 8);
        std::ostringstream os;
        os << "dev " << dev.str(6) << " vs envelope " << envelope.str(6);
        detail = os.str();
        return dev <= envelope;
    });

    criterion(9, "error-envelope sup ratios within 1% of frozen values",
              [&](std::string&) {
        std::vector<Int> grid{Int(100), Int(1000), Int(10000), Int(100000)};
        auto fields = fundamental_discriminants(Int(31));
        if (fields.size() != kFrozenSup.size()) return false;
        bool frozen_complete = true;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            QuadField k(fields[i]);
            double sup = error_scan(k, grid).sup_ratio.convert_to<double>();
            if (kFrozenSup[i] == 0) {
                std::printf("    %.15f,  // disc %s\n", sup, fields[i].str().c_str());
                frozen_complete = false;
                continue;
            }
            if (!(sup > 0) || sup > kFrozenSup[i] * 1.01) return false;
        }
        return frozen_complete;
    });

    criterion(10, "byte-identical CLI output across threads 1, 4, 8",
              [&](std::string&) {
        if (cli.empty()) return false;
        std::string cen1, rel1;
        for (int t : {1, 4, 8}) {
            std::string ts = std::to_string(t);
            std::string cen = run_capture(cli + " census --bound 100000 --breakdown --threads " + ts);
            std::string rel = run_capture(cli + " count-relative --disc -4 --bound 4096 --engine both --format json --threads " + ts);
            if (t == 1) {
                cen1 = cen;
                rel1 = rel;
            } else if (cen != cen1 || rel != rel1) {
                return false;
            }
        }
        return true;
    });

    std::cout << (failures ? "ACCEPTANCE: FAILED" : "ACCEPTANCE: PASSED") << std::endl;
    return failures ? 1 : 0;
}
