#pragma once

// Ray class groups Cl_{d^2}(k) for d | 2 with finite modulus, their quadratic
// characters, evaluation on ideals, and character conductors.
//
// Built from the exact sequence  (O/m)*/im(units) -> Cl_m(k) -> Cl(k) -> 1:
// generators are odd-ideal lifts of class-group generators plus generators of
// the unit quotient Q; relations are the lifted class-group orders (with
// their Q-corrections) and the Q orders. Smith normal form turns the
// presentation into canonical coordinates.

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "abelian.hpp"
#include "classgroup.hpp"

namespace d4census {

class RayClassGroup {
  public:
    RayClassGroup(const QuadField& k, const QuadIdeal& d)
        : k_(k), d_(d), m_(mul(k, d, d)), cl_(k, false), ring_(k, m_) {
        if (rational_ideal(k, 2).norm() % d.norm() != 0 || !divides_two(d))
            throw std::invalid_argument("RayClassGroup: d must divide (2)");
        build_unit_quotient();
        build_presentation();
    }

    const QuadField& field() const { return k_; }
    const QuadIdeal& modulus() const { return m_; }
    const ClassGroup& class_group() const { return cl_; }
    const std::vector<Int>& divisors() const { return divisors_; }
    const Int& order() const { return order_; }

    unsigned two_rank() const {
        unsigned r = 0;
        for (auto& dv : divisors_)
            if (dv % 2 == 0) ++r;
        return r;
    }

    bool is_coprime(const QuadIdeal& a) const {
        return m_.is_unit_ideal() || coprime(k_, a, m_);
    }

    // coordinates of the ray class of an ideal coprime to the modulus
    std::vector<Int> dlog(const QuadIdeal& a) const {
        if (!is_coprime(a)) throw std::invalid_argument("RayClassGroup: ideal not coprime");
        std::vector<Int> v = cl_.coords(a);
        QuadIdeal J = a;
        for (std::size_t i = 0; i < v.size(); ++i)
            for (Int t = 0; t < v[i]; ++t) J = mul(k_, J, conj(k_, h_gens_[i]));
        auto g = principal_generator(k_, J);
        if (!g) throw std::logic_error("RayClassGroup: dlog residual not principal");
        // residue of gamma / prod N(P_i)^{v_i} in (O/m)*
        std::uint64_t r = ring_.reduce(*g);
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::uint64_t np_inv = inverse_residue(ring_.reduce(FieldElement(Rat(h_gens_[i].norm()), 0)));
            for (Int t = 0; t < v[i]; ++t) r = ring_.mul_idx(r, np_inv);
        }
        std::vector<Int> w = Q_->coords(coset_rep(r));
        // assemble full generator-exponent vector and map through V
        std::vector<Int> full(ngen_, 0);
        for (std::size_t i = 0; i < v.size(); ++i) full[i] = v[i];
        for (std::size_t j = 0; j < w.size(); ++j) full[v.size() + j] = w[j];
        return project(full);
    }

    // ray class of the principal ideal generated by an element coprime to m
    std::vector<Int> dlog_principal(const FieldElement& g) const {
        std::vector<Int> full(ngen_, 0);
        std::vector<Int> w = Q_->coords(coset_rep(ring_.reduce(g)));
        for (std::size_t j = 0; j < w.size(); ++j) full[cl_divcount_ + j] = w[j];
        return project(full);
    }

    // subgroup of residues in (O/m)* congruent to 1 mod f, as ray coordinates
    std::vector<std::vector<Int>> ray_kernel_of(const QuadIdeal& f) const {
        std::vector<std::vector<Int>> out;
        for (auto u : ring_.units()) {
            auto [x, y] = ring_.coords(u);
            if (!ideal_contains(k_, f, FieldElement(Rat(x - 1), Rat(y)))) continue;
            std::vector<Int> full(ngen_, 0);
            std::vector<Int> w = Q_->coords(coset_rep(u));
            for (std::size_t j = 0; j < w.size(); ++j) full[cl_divcount_ + j] = w[j];
            out.push_back(project(full));
        }
        return out;
    }

  private:
    bool divides_two(const QuadIdeal& d) const {
        if (d.is_unit_ideal()) return true;
        QuadIdeal two = rational_ideal(k_, 2);
        QuadIdeal K = mul(k_, two, conj(k_, d));
        return K.content % d.norm() == 0;
    }

    std::uint64_t inverse_residue(std::uint64_t r) const {
        for (std::uint64_t s = 0; s < ring_.size(); ++s)
            if (ring_.mul_idx(r, s) == ring_.one()) return s;
        throw std::invalid_argument("RayClassGroup: residue not a unit");
    }

    std::uint64_t coset_rep(std::uint64_t u) const {
        auto it = coset_.find(u);
        if (it == coset_.end()) throw std::invalid_argument("RayClassGroup: not a unit residue");
        return it->second;
    }

    void build_unit_quotient() {
        // image of the global units in (O/m)*
        std::vector<std::uint64_t> gen_res;
        gen_res.push_back(ring_.reduce(FieldElement(Rat(-1), Rat(0))));
        if (k_.delta == -4 || k_.delta == -3)
            gen_res.push_back(ring_.reduce(FieldElement(Rat(2), Rat(1))));
        if (k_.delta > 0) gen_res.push_back(ring_.reduce(fundamental_unit(k_).value));
        std::set<std::uint64_t> U{ring_.one()};
        bool grew = true;
        while (grew) {
            grew = false;
            for (auto g : gen_res)
                for (auto u : std::vector<std::uint64_t>(U.begin(), U.end())) {
                    std::uint64_t v = ring_.mul_idx(u, g);
                    if (U.insert(v).second) grew = true;
                }
        }
        for (auto u : ring_.units()) {
            std::uint64_t rep = u;
            for (auto v : U) rep = std::min(rep, ring_.mul_idx(u, v));
            coset_[u] = rep;
        }
        std::set<std::uint64_t> reps;
        for (auto& [u, r] : coset_) reps.insert(r);
        std::vector<std::uint64_t> elems(reps.begin(), reps.end());
        auto op = [this](std::uint64_t a, std::uint64_t b) {
            return coset_rep(ring_.mul_idx(a, b));
        };
        Q_.emplace(elems, op, coset_rep(ring_.one()));
        // a Q-element per SNF coordinate
        for (std::size_t j = 0; j < Q_->divisors().size(); ++j) {
            std::vector<Int> want(Q_->divisors().size(), 0);
            want[j] = 1;
            bool found = false;
            for (auto e : elems)
                if (Q_->coords(e) == want) { q_gens_.push_back(e); found = true; break; }
            if (!found) throw std::logic_error("RayClassGroup: missing Q generator");
        }
    }

    void build_presentation() {
        const auto& cdiv = cl_.divisors();
        cl_divcount_ = cdiv.size();
        const auto& qdiv = Q_->divisors();
        ngen_ = cl_divcount_ + qdiv.size();
        // lifts of class-group generators: odd prime-power-free representatives
        for (std::size_t i = 0; i < cl_divcount_; ++i) {
            std::vector<Int> c(cl_divcount_, 0);
            c[i] = 1;
            h_gens_.push_back(cl_.odd_representative(cl_.rep_with_coords(c), 2 * abs(k_.delta)));
        }
        if (ngen_ == 0) {
            order_ = 1;
            return;
        }
        detail::Mat R(ngen_, std::vector<Int>(ngen_, 0));
        for (std::size_t i = 0; i < cl_divcount_; ++i) {
            QuadIdeal Pd = pow(k_, h_gens_[i], unsigned(cdiv[i].convert_to<std::uint64_t>()));
            auto g = principal_generator(k_, Pd);
            if (!g) throw std::logic_error("RayClassGroup: lifted relation not principal");
            std::vector<Int> w = Q_->coords(coset_rep(ring_.reduce(*g)));
            R[i][i] = cdiv[i];
            for (std::size_t j = 0; j < w.size(); ++j) R[i][cl_divcount_ + j] = -w[j];
        }
        for (std::size_t j = 0; j < qdiv.size(); ++j)
            R[cl_divcount_ + j][cl_divcount_ + j] = qdiv[j];
        std::vector<Int> dvec = detail::smith_normal_form(std::move(R), V_);
        order_ = 1;
        for (std::size_t j = 0; j < ngen_; ++j) {
            Int dj = abs(dvec[j]);
            if (dj == 0) throw std::logic_error("RayClassGroup: infinite quotient");
            if (dj == 1) continue;
            divisors_.push_back(dj);
            kept_cols_.push_back(j);
            order_ *= dj;
        }
        if (order_ != cl_.order() * Q_->order())
            throw std::logic_error("RayClassGroup: order mismatch");
    }

    std::vector<Int> project(const std::vector<Int>& full) const {
        std::vector<Int> out(divisors_.size());
        for (std::size_t t = 0; t < divisors_.size(); ++t) {
            Int s = 0;
            for (std::size_t i = 0; i < ngen_; ++i) s += full[i] * V_[i][kept_cols_[t]];
            s %= divisors_[t];
            if (s < 0) s += divisors_[t];
            out[t] = s;
        }
        return out;
    }

    QuadField k_;
    QuadIdeal d_, m_;
    ClassGroup cl_;
    ResidueRing ring_;
    std::map<std::uint64_t, std::uint64_t> coset_;
    std::optional<AbelianStructure<std::uint64_t>> Q_;
    std::vector<std::uint64_t> q_gens_;
    std::vector<QuadIdeal> h_gens_;
    std::size_t cl_divcount_ = 0;
    std::size_t ngen_ = 0;
    std::vector<Int> divisors_;
    std::vector<std::size_t> kept_cols_;
    detail::Mat V_;
    Int order_ = 1;
};

struct RayCharacter {
    const RayClassGroup* group = nullptr;
    std::vector<Int> exponents;  // 0 or d_j/2, nonzero only at even divisors
    bool is_principal = true;

    int evaluate(const QuadIdeal& a) const {
        if (!group->is_coprime(a)) return 0;
        if (is_principal) return 1;
        return sign_of(group->dlog(a));
    }

    int sign_of(const std::vector<Int>& coords) const {
        Int par = 0;
        for (std::size_t j = 0; j < exponents.size(); ++j)
            if (exponents[j] != 0) par += coords[j];
        return par % 2 == 0 ? 1 : -1;
    }
};

inline std::vector<RayCharacter> quadratic_characters(const RayClassGroup& G) {
    std::vector<std::size_t> even_pos;
    for (std::size_t j = 0; j < G.divisors().size(); ++j)
        if (G.divisors()[j] % 2 == 0) even_pos.push_back(j);
    std::vector<RayCharacter> out;
    for (std::size_t mask = 0; mask < (std::size_t(1) << even_pos.size()); ++mask) {
        RayCharacter chi;
        chi.group = &G;
        chi.exponents.assign(G.divisors().size(), 0);
        for (std::size_t b = 0; b < even_pos.size(); ++b)
            if (mask >> b & 1) chi.exponents[even_pos[b]] = G.divisors()[even_pos[b]] / 2;
        chi.is_principal = mask == 0;
        out.push_back(std::move(chi));
    }
    return out;
}

// smallest f | modulus through which chi factors
inline QuadIdeal conductor(const RayCharacter& chi) {
    const RayClassGroup& G = *chi.group;
    const QuadField& k = G.field();
    if (chi.is_principal) return unit_ideal(k);
    auto divs = ideal_divisors(k, G.modulus());
    std::sort(divs.begin(), divs.end(),
              [](const QuadIdeal& a, const QuadIdeal& b) {
                  return a.norm() != b.norm() ? a.norm() < b.norm() : a < b;
              });
    for (auto& f : divs) {
        bool factors = true;
        for (auto& kercoords : G.ray_kernel_of(f))
            if (chi.sign_of(kercoords) != 1) { factors = false; break; }
        if (factors) return f;
    }
    throw std::logic_error("conductor: no admissible modulus");  // unreachable: f = m works
}

}  // namespace d4census
