#pragma once

// The two counting engines for relative quadratic extensions: direct
// enumeration through the (a, u) parametrization, and the ray-class character
// formula. Also the raw and squarefree character sums they consume.

#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "rayclass.hpp"
#include "selmer.hpp"

namespace d4census {

inline Int floor_to_int(double X) {
    if (!(X >= 0)) throw std::invalid_argument("floor_to_int: negative bound");
    return Int(static_cast<std::uint64_t>(std::floor(X)));
}

// prime ideals of norm <= X, ordered by (norm, canonical form)
inline std::vector<PrimeIdeal> prime_ideals_upto(const QuadField& k, const Int& X) {
    std::vector<PrimeIdeal> out;
    if (X < 2) return out;
    for (auto p : primes_upto(X.convert_to<std::uint64_t>())) {
        auto ps = primes_above(k, Int(p));
        for (auto& P : ps)
            if (P.norm() <= X) out.push_back(P);
    }
    std::sort(out.begin(), out.end(), [](const PrimeIdeal& A, const PrimeIdeal& B) {
        return A.norm() != B.norm() ? A.norm() < B.norm() : A.ideal < B.ideal;
    });
    return out;
}

struct RelativeCountResult {
    QuadField field;
    double bound = 0;
    Int total = 0;
    std::map<GaloisType, Int> by_type;
    std::vector<ExtensionDescriptor> descriptors;
};

inline RelativeCountResult count_relative_direct(const Parametrization& ctx, double Y,
                                                 bool keep_descriptors) {
    if (Y < 1) throw std::invalid_argument("count_relative_direct: Y must be >= 1");
    const QuadField& k = ctx.field();
    RelativeCountResult res;
    res.field = k;
    res.bound = Y;
    res.by_type[GaloisType::C4] = 0;
    res.by_type[GaloisType::V4] = 0;
    res.by_type[GaloisType::D4] = 0;
    Int Yi = floor_to_int(Y);
    auto primes = prime_ideals_upto(k, Yi);
    const auto& cl = ctx.class_group();
    const auto& sel = ctx.selmer();

    auto process = [&](const QuadIdeal& a) {
        if (!cl.in_square_subgroup(a)) return;
        for (std::size_t u = 0; u < sel.size(); ++u) {
            auto d = ctx.describe(a, u);
            if (!d) continue;  // trivial pair
            if (d->rel_disc_norm > Yi) continue;
            res.total += 1;
            res.by_type[d->galois_type] += 1;
            if (keep_descriptors) res.descriptors.push_back(*d);
        }
    };

    // squarefree ideals = products of distinct prime ideals
    std::vector<std::pair<std::size_t, QuadIdeal>> stack;
    auto dfs = [&](auto&& self, std::size_t idx, const QuadIdeal& a, const Int& n) -> void {
        process(a);
        for (std::size_t i = idx; i < primes.size(); ++i) {
            Int nn = n * primes[i].norm();
            if (nn > Yi) break;
            self(self, i + 1, mul(k, a, primes[i].ideal), nn);
        }
    };
    dfs(dfs, 0, unit_ideal(k), 1);
    return res;
}

// Sum of chi over all integral ideals of norm <= X.
inline Int char_sum(const RayCharacter& chi, double X) {
    if (X < 1) throw std::invalid_argument("char_sum: X must be >= 1");
    const QuadField& k = chi.group->field();
    Int Xi = floor_to_int(X);
    auto primes = prime_ideals_upto(k, Xi);
    std::vector<int> chival(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) chival[i] = chi.evaluate(primes[i].ideal);
    auto dfs = [&](auto&& self, std::size_t idx, const Int& bound, int sign) -> Int {
        Int s = sign;
        for (std::size_t i = idx; i < primes.size(); ++i) {
            if (primes[i].norm() > bound) break;
            if (chival[i] == 0) continue;
            Int b = bound;
            int sg = sign;
            while (b >= primes[i].norm()) {
                b /= primes[i].norm();
                sg *= chival[i];
                s += self(self, i + 1, b, sg);
            }
        }
        return s;
    };
    return dfs(dfs, 0, Xi, 1);
}

// Sum of chi over squarefree ideals of norm <= X, computed both directly and
// through the Moebius identity; the two must agree.
inline Int char_sum_squarefree(const RayCharacter& chi, double X) {
    if (X < 1) throw std::invalid_argument("char_sum_squarefree: X must be >= 1");
    const QuadField& k = chi.group->field();
    Int Xi = floor_to_int(X);
    auto primes = prime_ideals_upto(k, Xi);
    std::vector<int> chival(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) chival[i] = chi.evaluate(primes[i].ideal);
    auto dfs = [&](auto&& self, std::size_t idx, const Int& bound, int sign) -> Int {
        Int s = sign;
        for (std::size_t i = idx; i < primes.size(); ++i) {
            if (primes[i].norm() > bound) break;
            if (chival[i] == 0) continue;
            s += self(self, i + 1, Int(bound / primes[i].norm()), sign * chival[i]);
        }
        return s;
    };
    Int direct = dfs(dfs, 0, Xi, 1);

    // Moebius path: sum over squarefree d with N(d)^2 <= X of mu(d) chi(d^2) S(X/N(d)^2)
    Int via_moebius = 0;
    auto dfs2 = [&](auto&& self, std::size_t idx, const Int& nrm, int mu, int chisq) -> void {
        via_moebius += mu * chisq * char_sum(chi, (Xi / (nrm * nrm)).convert_to<double>());
        for (std::size_t i = idx; i < primes.size(); ++i) {
            Int nn = nrm * primes[i].norm();
            if (nn * nn > Xi) break;
            // chi(d^2) = chi(d)^2 = 1 on coprime d, 0 otherwise
            self(self, i + 1, nn, -mu, chival[i] == 0 ? 0 : chisq);
        }
    };
    dfs2(dfs2, 0, Int(1), 1, 1);
    if (direct != via_moebius)
        throw std::logic_error("char_sum_squarefree: direct and Moebius paths disagree");
    return direct;
}

// The character-formula engine (exact rational accumulation; must produce an
// integer equal to the direct engine's total). Holds the ray class groups for
// every d | (2) so repeated bounds are cheap.
class CharacterEngine {
  public:
    explicit CharacterEngine(const QuadField& k) : k_(k) {
        for (auto& d : ideal_divisors(k, rational_ideal(k, 2))) {
            groups_.push_back(std::make_unique<RayClassGroup>(k, d));
            Level& lv = levels_.emplace_back();
            lv.d = d;
            lv.chars = quadratic_characters(*groups_.back());
            for (auto& c : ideal_divisors(k, d)) {
                int mu = moebius_ideal(k, divide_exact(k, d, c));
                if (mu != 0) lv.subterms.emplace_back(mu, c.norm() * c.norm());
            }
        }
    }

    Int count(double Y) const {
        if (Y < 1) throw std::invalid_argument("CharacterEngine: Y must be >= 1");
        Int Yi = floor_to_int(Y);
        Rat total = -1;
        Int pw = Int(1) << (k_.r1 + k_.r2);
        for (auto& lv : levels_) {
            Rat dsum = 0;
            for (auto& chi : lv.chars)
                for (auto& [mu, nc2] : lv.subterms) {
                    Int bound = nc2 * Yi / 16;
                    if (bound < 1) continue;
                    dsum += mu * char_sum_squarefree(chi, bound.convert_to<double>());
                }
            total += Rat(pw) * dsum / lv.d.norm();
        }
        if (denominator(total) != 1)
            throw std::logic_error("CharacterEngine: non-integral total");
        Int r = numerator(total);
        if (r < 0) throw std::logic_error("CharacterEngine: negative total");
        return r;
    }

  private:
    struct Level {
        QuadIdeal d;
        std::vector<RayCharacter> chars;
        std::vector<std::pair<int, Int>> subterms;  // (mu(d/c), N(c)^2)
    };
    QuadField k_;
    std::vector<std::unique_ptr<RayClassGroup>> groups_;
    std::vector<Level> levels_;
};

inline Int count_relative_characters(const QuadField& k, double Y) {
    return CharacterEngine(k).count(Y);
}

// |{u in S(k) : x^2 = alpha0*u mod c^2 solvable in units}| by exhaustive loop.
inline Int selmer_solvability_count(const Parametrization& ctx, const QuadIdeal& a,
                                    const QuadIdeal& c) {
    const QuadField& k = ctx.field();
    if (!coprime(k, a, c)) throw std::invalid_argument("selmer_solvability_count: (a,c) != 1");
    auto [alpha0, q] = ctx.alpha0_for(a);
    QuadIdeal c2 = mul(k, c, c);
    ResidueRing ring(k, c2);
    auto squares = ring.unit_squares();
    Int count = 0;
    for (std::size_t u = 0; u < ctx.selmer().size(); ++u) {
        FieldElement delta = mul(k, alpha0, ctx.selmer().element(u));
        if (c.is_unit_ideal() || squares.count(ring.reduce(delta))) count += 1;
    }
    return count;
}

// The closed form 2^{r1+r2} |Cl_{c^2}(k)[2]| / N(c) when the class of a is a
// square in the ray class group, else 0.
inline Int selmer_solvability_closed_form(const QuadField& k, const QuadIdeal& a,
                                          const QuadIdeal& c) {
    RayClassGroup G(k, c);
    Int two_tors = Int(1) << G.two_rank();
    if (!G.is_coprime(a))
        throw std::invalid_argument("selmer_solvability_closed_form: a not coprime to c^2");
    auto v = G.dlog(a);
    bool square_class = true;
    for (std::size_t j = 0; j < v.size(); ++j)
        if (G.divisors()[j] % 2 == 0 && v[j] % 2 != 0) square_class = false;
    if (!square_class) return 0;
    Int num = (Int(1) << (k.r1 + k.r2)) * two_tors;
    if (num % c.norm() != 0)
        throw std::logic_error("selmer_solvability_closed_form: non-integral value");
    return num / c.norm();
}

}  // namespace d4census
