#ifndef CMTBX_NUMBERFIELD_HPP
#define CMTBX_NUMBERFIELD_HPP

#include "cmtbx/poly.hpp"

#include <memory>

namespace cmtbx {

// K = Q[t]/(minpoly), minpoly monic irreducible. minpoly = t encodes K = Q.
class NumberField {
  public:
    explicit NumberField(QPoly minpoly) : minpoly_(std::move(minpoly)) {}
    static NumberField rationals() { return NumberField(QPoly::x()); }

    int degree() const { return minpoly_.degree(); }
    const QPoly& minpoly() const { return minpoly_; }
    bool is_rationals() const { return degree() == 1; }

  private:
    QPoly minpoly_;
};

// Element of a number field: residue polynomial in the generator. The owning
// field is passed by pointer; all arithmetic requires matching fields.
struct NFElem {
    const NumberField* K = nullptr;
    QPoly v;

    NFElem() = default;
    NFElem(const NumberField* field, QPoly val) : K(field), v(val.mod(field->minpoly())) {}
    static NFElem from_rat(const NumberField* field, const Rat& r) {
        return NFElem(field, QPoly(r));
    }
    static NFElem gen(const NumberField* field) { return NFElem(field, QPoly::x()); }

    bool is_zero() const { return v.is_zero(); }
    bool is_rational() const { return v.degree() <= 0; }
    Rat rational_value() const { return v[0]; }

    NFElem operator+(const NFElem& o) const { return NFElem(K, v + o.v); }
    NFElem operator-(const NFElem& o) const { return NFElem(K, v - o.v); }
    NFElem operator-() const { return NFElem(K, -v); }
    NFElem operator*(const NFElem& o) const { return NFElem(K, v * o.v); }
    NFElem operator*(const Rat& c) const { return NFElem(K, v * c); }
    NFElem inverse() const;
    NFElem operator/(const NFElem& o) const { return *this * o.inverse(); }
    bool operator==(const NFElem& o) const { return v == o.v; }
    bool operator!=(const NFElem& o) const { return !(v == o.v); }

    std::string str() const { return v.str("t"); }
};

// Polynomial with NFElem coefficients (index = power).
struct NFPoly {
    const NumberField* K = nullptr;
    std::vector<NFElem> c;

    NFPoly() = default;
    explicit NFPoly(const NumberField* field) : K(field) {}
    NFPoly(const NumberField* field, std::vector<NFElem> cs) : K(field), c(std::move(cs)) { trim(); }
    static NFPoly from_qpoly(const NumberField* field, const QPoly& f);

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    NFElem lc() const { return c.empty() ? NFElem::from_rat(K, Rat(0)) : c.back(); }
    NFElem coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(c.size())) ? c[k] : NFElem::from_rat(K, Rat(0));
    }
    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }

    NFPoly operator+(const NFPoly& o) const;
    NFPoly operator-(const NFPoly& o) const;
    NFPoly operator*(const NFPoly& o) const;
    NFPoly monic() const;
    std::pair<NFPoly, NFPoly> divrem(const NFPoly& o) const;
    NFPoly derivative() const;
    NFElem eval(const NFElem& x) const;
};

NFPoly gcd_poly(NFPoly a, NFPoly b);

// Irreducible monic factors of a squarefree monic f over K (Trager).
std::vector<NFPoly> factor_over_field(const NFPoly& f);

// Roots in K of f (with f's coefficients in K).
std::vector<NFElem> roots_in_field(const NFPoly& f);

// Splitting field of a squarefree monic integral polynomial over Q, with the
// roots and the Galois action. Fields are held by shared_ptr so NFElem
// back-pointers stay valid.
struct SplittingField {
    std::shared_ptr<NumberField> N;
    std::vector<NFElem> roots;            // all roots of f in N, deterministic order
    // Galois group as permutations of `roots`; automorphisms[g] maps
    // roots[i] -> roots[perm[g][i]]. automorphism_images[g] is the image of
    // the generator of N.
    std::vector<std::vector<int>> perms;
    std::vector<NFElem> automorphism_images;

    NFElem apply(int g, const NFElem& x) const;  // apply automorphism g
};

SplittingField splitting_field(const QPoly& f, int degree_cap = 40320);

struct degree_bound_exceeded : error {
    explicit degree_bound_exceeded(const std::string& m) : error("DegreeBoundExceeded: " + m) {}
};

}  // namespace cmtbx

#endif
