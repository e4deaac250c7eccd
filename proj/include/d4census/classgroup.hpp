#pragma once

// Class groups of quadratic fields through binary quadratic forms.
//
// An ideal content*(a, (b+sqrt(Delta))/2) corresponds to the form
// (a, b, (b^2-Delta)/4a). Definite forms reduce to a unique representative;
// indefinite reduced forms fall into rho-cycles, one per narrow class. The
// wide class group is the narrow group modulo the class of a norm -1 form.
// SL2 transforms are tracked through reduction so principal ideals yield an
// explicit generator.

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "abelian.hpp"
#include "quadfield.hpp"

namespace d4census {

struct Form {
    Int a, b, c;

    auto key() const { return std::tie(a, b, c); }
    bool operator==(const Form& o) const { return key() == o.key(); }
    bool operator<(const Form& o) const { return key() < o.key(); }
};

inline Int form_disc(const Form& f) { return f.b * f.b - 4 * f.a * f.c; }

namespace detail {

inline Int floordiv(const Int& a, const Int& b) {
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

// 2x2 transform; applying T to f means f'(x,y) = f(T00 x + T01 y, T10 x + T11 y)
struct Transform {
    Int m[2][2] = {{1, 0}, {0, 1}};

    void rmul(const Int& a00, const Int& a01, const Int& a10, const Int& a11) {
        Int n00 = m[0][0] * a00 + m[0][1] * a10;
        Int n01 = m[0][0] * a01 + m[0][1] * a11;
        Int n10 = m[1][0] * a00 + m[1][1] * a10;
        Int n11 = m[1][0] * a01 + m[1][1] * a11;
        m[0][0] = n00; m[0][1] = n01; m[1][0] = n10; m[1][1] = n11;
    }
};

}  // namespace detail

inline bool is_reduced_definite(const Form& f) {
    if (f.a < 1 || f.a > f.c) return false;
    if (f.b > f.a || f.b <= -f.a) return false;
    if (f.b < 0 && (f.a == f.c || f.b == -f.a)) return false;  // unreachable b==-a guard
    if (f.a == f.c && f.b < 0) return false;
    return true;
}

inline Form reduce_definite(Form f, detail::Transform* tr = nullptr) {
    if (form_disc(f) >= 0) throw std::invalid_argument("reduce_definite: need negative disc");
    const Int D = form_disc(f);
    while (true) {
        if (f.b > f.a || f.b <= -f.a) {
            Int t = detail::floordiv(f.a - f.b, 2 * f.a);
            f.b += 2 * f.a * t;
            f.c = (f.b * f.b - D) / (4 * f.a);
            if (tr) tr->rmul(1, t, 0, 1);
        }
        if (f.a > f.c) {
            std::swap(f.a, f.c);
            f.b = -f.b;
            if (tr) tr->rmul(0, -1, 1, 0);
            continue;
        }
        if (f.a == f.c && f.b < 0) {
            f.b = -f.b;
            if (tr) tr->rmul(0, -1, 1, 0);
        }
        return f;
    }
}

inline bool is_reduced_indefinite(const QuadField& k, const Form& f) {
    // |sqrt(D) - 2|a|| < b < sqrt(D)
    if (f.b < 1 || f.b * f.b >= k.delta) return false;
    Int t = 2 * abs(f.a);
    if ((t + f.b) * (t + f.b) <= k.delta) return false;
    if (t > f.b && (t - f.b) * (t - f.b) >= k.delta) return false;
    return true;
}

// one rho step: (a,b,c) -> (c,b',c') with b' = -b mod 2|c| in the normalized
// window; tracks the transform when given
inline Form rho_step(const QuadField& k, const Form& f, detail::Transform* tr = nullptr) {
    const Int s = isqrt(k.delta);
    Int cc = abs(f.c);
    Int b2;
    if (cc > s) {
        b2 = (-f.b) % (2 * cc);
        if (b2 < 0) b2 += 2 * cc;
        if (b2 > cc) b2 -= 2 * cc;  // (-|c|, |c|]
    } else {
        b2 = s - ((s + f.b) % (2 * cc) + 2 * cc) % (2 * cc);  // (s - 2|c|, s]
    }
    Int t = (f.b + b2) / (2 * f.c);
    if ((f.b + b2) % (2 * f.c) != 0) throw std::logic_error("rho_step: bad normalization");
    if (tr) tr->rmul(0, -1, 1, t);
    return {f.c, b2, (b2 * b2 - k.delta) / (4 * f.c)};
}

inline Form reduce_indefinite(const QuadField& k, Form f, detail::Transform* tr = nullptr) {
    for (int guard = 0; guard < 100000; ++guard) {
        if (is_reduced_indefinite(k, f)) return f;
        f = rho_step(k, f, tr);
    }
    throw std::logic_error("reduce_indefinite: no convergence");
}

// the full rho-cycle through a reduced indefinite form
inline std::vector<Form> form_cycle(const QuadField& k, const Form& f0) {
    std::vector<Form> cyc{f0};
    Form f = rho_step(k, f0);
    while (!(f == f0)) {
        cyc.push_back(f);
        f = rho_step(k, f);
    }
    return cyc;
}

// canonical label of the class of an (unreduced) form
inline Form class_label(const QuadField& k, const Form& f) {
    if (k.delta < 0) return reduce_definite(f);
    Form r = reduce_indefinite(k, f);
    Form best = r;
    for (auto& g : form_cycle(k, r))
        if (g < best) best = g;
    return best;
}

inline Form principal_form(const QuadField& k) {
    Int b0 = (k.delta % 2 == 0) ? Int(0) : Int(1);
    return {1, b0, (b0 * b0 - k.delta) / 4};
}

inline Form ideal_to_form(const QuadField& k, const QuadIdeal& I) {
    return {I.a, I.b, (I.b * I.b - k.delta) / (4 * I.a)};
}

// a primitive ideal whose class (narrow class for d > 0) is that of f
inline QuadIdeal form_to_ideal(const QuadField& k, Form f) {
    if (f.a < 0) {
        // the rho-neighbor has positive first coefficient (signs alternate)
        f = rho_step(k, f);
        if (f.a < 0) throw std::logic_error("form_to_ideal: sign did not flip");
    }
    return QuadIdeal(k, 1, f.a, f.b);
}

// all reduced positive definite forms of discriminant Delta < 0
inline std::vector<Form> reduced_definite_forms(const Int& Delta) {
    std::vector<Form> out;
    for (Int a = 1; 3 * a * a <= -Delta; ++a) {
        for (Int b = -a + 1; b <= a; ++b) {
            if ((b * b - Delta) % (4 * a) != 0) continue;
            Int c = (b * b - Delta) / (4 * a);
            if (c < a) continue;
            if (a == c && b < 0) continue;
            out.push_back({a, b, c});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// all reduced indefinite forms of discriminant Delta > 0 (non-square)
inline std::vector<Form> reduced_indefinite_forms(const QuadField& k) {
    std::vector<Form> out;
    const Int D = k.delta;
    for (Int b = (D % 2 == 0) ? 2 : 1; b * b < D; b += 2) {
        Int n = (D - b * b) / 4;  // = -a*c > 0
        for (Int a = 1; a * a <= n; ++a) {
            if (n % a != 0) continue;
            for (Int aa : {Int(a), Int(n / a)}) {
                Form f{aa, b, -(n / aa)};
                if (is_reduced_indefinite(k, f)) out.push_back(f);
                f = {-aa, b, n / aa};
                if (is_reduced_indefinite(k, f)) out.push_back(f);
                if (a * a == n) break;
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Generator of a principal ideal (wide sense). Returns nullopt when the ideal
// is not principal.
inline std::optional<FieldElement> principal_generator(const QuadField& k, const QuadIdeal& I) {
    Form f = ideal_to_form(k, I);
    auto extract = [&](const detail::Transform& tr) {
        // form value 1 at (m00, m10): beta = m00*a + m10*(b+sqrt(D))/2
        FieldElement beta = FieldElement::from_sqrt_basis(
            k, 2 * tr.m[0][0] * I.a + tr.m[1][0] * I.b, Rat(tr.m[1][0]));
        return FieldElement(beta.x * I.content, beta.y * I.content);
    };
    if (k.delta < 0) {
        detail::Transform tr;
        Form r = reduce_definite(f, &tr);
        if (!(r == principal_form(k))) return std::nullopt;
        FieldElement g = extract(tr);
        if (element_to_ideal(k, g) != I) throw std::logic_error("principal_generator: bad witness");
        return g;
    }
    detail::Transform tr;
    Form r = reduce_indefinite(k, f, &tr);
    Form start = r;
    for (int guard = 0;; ++guard) {
        if (abs(r.a) == 1) {
            // one more rho lands first coefficient +-1 in position; evaluate at (1,0)
            if (r.a == 1) {
                FieldElement g = extract(tr);
                if (element_to_ideal(k, g) != I)
                    throw std::logic_error("principal_generator: bad witness");
                return g;
            }
            // a == -1: the generator has norm -N(I); still a generator
            FieldElement g = extract(tr);
            if (element_to_ideal(k, g) != I)
                throw std::logic_error("principal_generator: bad witness");
            return g;
        }
        r = rho_step(k, r, &tr);
        if (r == start || guard > 200000) return std::nullopt;
    }
}

inline bool is_principal(const QuadField& k, const QuadIdeal& I) {
    return principal_generator(k, I).has_value();
}

// ---------------------------------------------------------------------------

class ClassGroup {
  public:
    ClassGroup(const QuadField& k, bool narrow) : k_(k), narrow_(narrow) {
        if (k.delta < 0) narrow_ = false;  // coincide; store canonical flag
        std::vector<Form> labels;
        if (k.delta < 0) {
            labels = reduced_definite_forms(k.delta);
        } else {
            // narrow classes = rho-cycles of reduced forms
            auto all = reduced_indefinite_forms(k);
            std::set<Form> seen;
            std::vector<Form> narrow_labels;
            for (auto& f : all) {
                if (seen.count(f)) continue;
                auto cyc = form_cycle(k_, f);
                Form best = cyc[0];
                for (auto& g : cyc) {
                    seen.insert(g);
                    if (g < best) best = g;
                }
                narrow_labels.push_back(best);
            }
            if (narrow_) {
                labels = narrow_labels;
            } else {
                // wide = narrow modulo the class of a first-coefficient -1 form
                Form sgn = sign_class();
                std::set<Form> wide;
                for (auto& f : narrow_labels) wide.insert(wide_label_from_narrow(f, sgn));
                labels.assign(wide.begin(), wide.end());
            }
        }
        std::sort(labels.begin(), labels.end());
        reps_ = labels;
        auto op = [this](const Form& x, const Form& y) { return compose(x, y); };
        structure_.emplace(reps_, op, label_of_ideal(unit_ideal(k_)));
        for (auto& f : reps_) by_coords_[structure_->coords(f)] = f;
    }

    const QuadField& field() const { return k_; }
    bool narrow() const { return narrow_; }
    Int order() const { return Int(reps_.size()); }
    const std::vector<Form>& reps() const { return reps_; }
    const AbelianStructure<Form>& structure() const { return *structure_; }
    const std::vector<Int>& divisors() const { return structure_->divisors(); }

    Form label_of_ideal(const QuadIdeal& I) const {
        Form lab = class_label(k_, ideal_to_form(k_, I));
        if (k_.delta > 0 && !narrow_) lab = wide_label_from_narrow(lab, sign_class());
        return lab;
    }

    std::vector<Int> coords(const QuadIdeal& I) const {
        return structure_->coords(label_of_ideal(I));
    }

    Form compose(const Form& x, const Form& y) const {
        QuadIdeal p = mul(k_, form_to_ideal(k_, x), form_to_ideal(k_, y));
        p.content = 1;
        return label_of_ideal(p);
    }

    Form rep_with_coords(const std::vector<Int>& c) const {
        auto it = by_coords_.find(c);
        if (it == by_coords_.end()) throw std::invalid_argument("rep_with_coords: no such class");
        return it->second;
    }

    bool in_square_subgroup(const QuadIdeal& I) const {
        return structure_->in_square_subgroup(label_of_ideal(I));
    }

    unsigned two_rank() const { return structure_->two_rank(); }

    // an ideal of odd norm, coprime to coprime_to, in the class of f
    QuadIdeal odd_representative(const Form& f, const Int& coprime_to) const {
        for (Int n = 1;; n += 2) {
            if (boost::multiprecision::gcd(n, coprime_to) != 1) continue;
            for (auto& I : ideals_of_norm(k_, n))
                if (label_of_ideal(I) == f) return I;
            if (n > 100000) throw std::logic_error("odd_representative: search exhausted");
        }
    }

  private:
    // narrow class of a reduced form with first coefficient -1
    Form sign_class() const {
        Int s = isqrt(k_.delta);
        Int b1 = s;
        while ((b1 - k_.delta) % 2 != 0) --b1;
        Form f{-1, b1, (k_.delta - b1 * b1) / 4};
        if (!is_reduced_indefinite(k_, f)) throw std::logic_error("sign_class: not reduced");
        return class_label(k_, f);
    }

    Form wide_label_from_narrow(const Form& f, const Form& sgn) const {
        // multiply by the sign class via ideals and take the smaller label
        QuadIdeal p = mul(k_, form_to_ideal(k_, f), form_to_ideal(k_, sgn));
        p.content = 1;
        Form other = class_label(k_, ideal_to_form(k_, p));
        return std::min(f, other);
    }

    QuadField k_;
    bool narrow_;
    std::vector<Form> reps_;
    std::optional<AbelianStructure<Form>> structure_;
    std::map<std::vector<Int>, Form> by_coords_;
};

}  // namespace d4census
