#pragma once

// The 2-Selmer group S(k) = V(k)/(k*)^2 with coprime-to-2 representatives,
// and the parametrization (a, u) -> K/k: alpha0 extraction, the conductor
// ideal c(a, u), the relative discriminant 4a/c^2, and Galois classification
// of the resulting quartic.

#include <map>
#include <optional>
#include <vector>

#include "classgroup.hpp"

namespace d4census {

enum class GaloisType { C4, V4, D4 };

inline const char* to_string(GaloisType t) {
    switch (t) {
        case GaloisType::C4: return "C4";
        case GaloisType::V4: return "V4";
        default: return "D4";
    }
}

class SelmerGroup {
  public:
    SelmerGroup(const QuadField& k, const ClassGroup& wide_cl) : k_(k) {
        std::vector<FieldElement> candidates;
        candidates.emplace_back(Rat(-1), Rat(0));
        if (k.delta == -4 || k.delta == -3) candidates.emplace_back(Rat(2), Rat(1));  // i / zeta6
        if (k.delta > 0) candidates.push_back(fundamental_unit(k).value);
        // one generator of P^2 per 2-torsion generator class of the class group
        const auto& st = wide_cl.structure();
        for (std::size_t j = 0; j < st.divisors().size(); ++j) {
            if (st.divisors()[j] % 2 != 0) continue;
            std::vector<Int> c(st.divisors().size(), 0);
            c[j] = st.divisors()[j] / 2;
            QuadIdeal P = wide_cl.odd_representative(wide_cl.rep_with_coords(c), 2 * abs(k.delta));
            auto g = principal_generator(k, mul(k, P, P));
            if (!g) throw std::logic_error("SelmerGroup: 2-torsion square not principal");
            candidates.push_back(*g);
        }
        for (auto& x : candidates)
            if (!in_span(x)) basis_.push_back(x);
        unsigned expect = (k.r1 + k.r2) + wide_cl.two_rank();
        if (basis_.size() != expect) throw std::logic_error("SelmerGroup: rank mismatch");
        elems_.resize(std::size_t(1) << basis_.size());
        elems_[0] = FieldElement(1, 0);
        for (std::size_t m = 1; m < elems_.size(); ++m) {
            std::size_t low = m & (m - 1);
            std::size_t bit = 0;
            while (!((m ^ low) >> bit & 1)) ++bit;
            elems_[m] = mul(k_, elems_[low], basis_[bit]);
        }
    }

    const QuadField& field() const { return k_; }
    std::size_t size() const { return elems_.size(); }
    const std::vector<FieldElement>& basis() const { return basis_; }
    const FieldElement& element(std::size_t i) const { return elems_.at(i); }

    // class of an arbitrary element of V(k)
    std::size_t index_of(const FieldElement& x) const {
        for (std::size_t m = 0; m < elems_.size(); ++m)
            if (is_square_in_k(k_, mul(k_, x, elems_[m]))) return m;
        throw std::invalid_argument("SelmerGroup: element not in V(k)");
    }

    std::size_t conj_index(std::size_t i) const { return index_of(conj(k_, elems_.at(i))); }

  private:
    bool in_span(const FieldElement& x) const {
        for (std::size_t m = 0; m < (std::size_t(1) << basis_.size()); ++m) {
            FieldElement p = x;
            for (std::size_t b = 0; b < basis_.size(); ++b)
                if (m >> b & 1) p = mul(k_, p, basis_[b]);
            if (is_square_in_k(k_, p)) return true;
        }
        return false;
    }

    QuadField k_;
    std::vector<FieldElement> basis_;
    std::vector<FieldElement> elems_;
};

struct ExtensionDescriptor {
    QuadIdeal a;
    std::size_t u_index = 0;
    FieldElement alpha0;
    QuadIdeal c;
    QuadIdeal rel_disc;
    Int rel_disc_norm;
    Int abs_disc;
    GaloisType galois_type = GaloisType::D4;
};

// Shared context for the parametrization: wide class group, Selmer group,
// residue rings at the finitely many conductor candidates.
class Parametrization {
  public:
    explicit Parametrization(const QuadField& k)
        : k_(k), cl_(k, false), sel_(k, cl_) {
        for (auto& P : primes_above(k_, 2)) {
            unsigned vmax = P.type == SplitType::ramified ? 2 : 1;
            for (unsigned e = 1; e <= vmax; ++e) {
                Local l;
                l.prime = P.ideal;
                l.exponent = e;
                l.power = pow(k_, P.ideal, e);
                QuadIdeal sq = pow(k_, P.ideal, 2 * e);
                l.ring.emplace(k_, sq);
                l.squares = l.ring->unit_squares();
                locals_.push_back(std::move(l));
            }
        }
        // one odd representative per class, fixed once
        for (auto& f : cl_.reps())
            odd_rep_.emplace(f, cl_.odd_representative(f, 2 * abs(k_.delta)));
    }

    const QuadField& field() const { return k_; }
    const ClassGroup& class_group() const { return cl_; }
    const SelmerGroup& selmer() const { return sel_; }

    std::pair<FieldElement, QuadIdeal> alpha0_for(const QuadIdeal& a) const {
        if (a.is_unit_ideal()) return {FieldElement(Rat(1), Rat(0)), unit_ideal(k_)};
        auto half = cl_.structure().halve(cl_.rep_with_coords(inverse_label(a)));
        if (!half) throw std::invalid_argument("alpha0_for: class of a is not a square");
        QuadIdeal q = odd_rep_.at(cl_.rep_with_coords(*half));
        auto g = principal_generator(k_, mul(k_, a, mul(k_, q, q)));
        if (!g) throw std::logic_error("alpha0_for: a*q^2 not principal");
        return {*g, q};
    }

    // largest c | 2 with (c, a) = 1 and alpha0*u a unit square mod c^2
    QuadIdeal conductor_ideal(const QuadIdeal& a, const FieldElement& delta) const {
        QuadIdeal c = unit_ideal(k_);
        // per prime above 2: the largest admissible exponent (CRT-compatible)
        const QuadIdeal* prev = nullptr;
        QuadIdeal best_power = unit_ideal(k_);
        unsigned best_e = 0;
        auto flush = [&]() {
            if (prev && best_e > 0) c = mul(k_, c, best_power);
        };
        for (auto& l : locals_) {
            if (!prev || !(*prev == l.prime)) {
                flush();
                prev = &l.prime;
                best_e = 0;
                best_power = unit_ideal(k_);
            }
            if (a.norm() % 2 == 0 && prime_in(l.prime, a)) continue;
            if (l.squares.count(l.ring->reduce(delta))) {
                best_e = l.exponent;
                best_power = l.power;
            }
        }
        flush();
        return c;
    }

    std::optional<ExtensionDescriptor> describe(const QuadIdeal& a, std::size_t u_index) const {
        ExtensionDescriptor d;
        d.a = a;
        d.u_index = u_index;
        auto [alpha0, q] = alpha0_for(a);
        d.alpha0 = alpha0;
        FieldElement delta = mul(k_, alpha0, sel_.element(u_index));
        // delta square <=> the trivial extension; only possible for a = (1)
        if (a.is_unit_ideal() && is_square_in_k(k_, delta)) return std::nullopt;
        d.c = conductor_ideal(a, delta);
        d.rel_disc = divide_exact(k_, mul(k_, rational_ideal(k_, 4), a), mul(k_, d.c, d.c));
        d.rel_disc_norm = d.rel_disc.norm();
        d.abs_disc = d.rel_disc_norm * k_.delta * k_.delta;
        d.galois_type = classify_galois_delta(delta);
        return d;
    }

    GaloisType classify_galois_delta(const FieldElement& delta) const {
        Rat N = norm(k_, delta);
        if (is_rational_square(N)) return GaloisType::V4;
        if (is_rational_square(N * k_.delta)) return GaloisType::C4;
        return GaloisType::D4;
    }

    // the sigma-conjugate pair: (conj a, u') with alpha0(conj a) * u' in the
    // square class of conj(delta). (alpha0 of the conjugate is only
    // determined up to a Selmer element, so u' must be solved for.)
    std::pair<QuadIdeal, std::size_t> conjugate_pair(const QuadIdeal& a, std::size_t u) const {
        QuadIdeal ca = conj(k_, a);
        auto [alpha0, q] = alpha0_for(a);
        FieldElement delta = mul(k_, alpha0, sel_.element(u));
        auto [calpha0, cq] = alpha0_for(ca);
        // conj(delta)/calpha0 and conj(delta)*calpha0 share a square class
        std::size_t cu = sel_.index_of(mul(k_, conj(k_, delta), calpha0));
        return {ca, cu};
    }

  private:
    std::vector<Int> inverse_label(const QuadIdeal& a) const {
        auto v = cl_.coords(a);
        const auto& dv = cl_.divisors();
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = v[j] == 0 ? Int(0) : Int(dv[j] - v[j]);
        return v;
    }

    bool prime_in(const QuadIdeal& P, const QuadIdeal& a) const {
        // P prime above 2; test P | a
        QuadIdeal K = mul(k_, a, conj(k_, P));
        return K.content % 2 == 0;
    }

    struct Local {
        QuadIdeal prime;
        unsigned exponent;
        QuadIdeal power;
        std::optional<ResidueRing> ring;  // modulus prime^(2*exponent)
        std::set<std::uint64_t> squares;
    };

    QuadField k_;
    ClassGroup cl_;
    SelmerGroup sel_;
    std::vector<Local> locals_;
    std::map<Form, QuadIdeal> odd_rep_;
};

// Convenience free functions matching the module interface; heavier callers
// hold a Parametrization.
inline SelmerGroup selmer_group(const QuadField& k) {
    ClassGroup cl(k, false);
    return SelmerGroup(k, cl);
}

inline QuadIdeal relative_discriminant(const Parametrization& ctx, const QuadIdeal& a,
                                       std::size_t u_index) {
    auto d = ctx.describe(a, u_index);
    if (!d) throw std::invalid_argument("relative_discriminant: trivial pair");
    return d->rel_disc;
}

inline GaloisType classify_galois(const Parametrization& ctx, const QuadIdeal& a,
                                  std::size_t u_index) {
    auto d = ctx.describe(a, u_index);
    if (!d) throw std::invalid_argument("classify_galois: trivial pair");
    return d->galois_type;
}

}  // namespace d4census
