#ifndef CMTBX_PADIC_HPP
#define CMTBX_PADIC_HPP

#include "cmtbx/zfactor.hpp"

namespace cmtbx {

// Exact p-adic scalar: p^val * unit with the unit known mod p^prec. All
// operations track precision and refuse to answer below the floor.
class ZpElem {
  public:
    ZpElem(Int p, long val, Int unit, int prec);
    static ZpElem from_rat(const Int& p, const Rat& x, int prec);

    const Int& p() const { return p_; }
    long val() const { return val_; }
    const Int& unit() const { return unit_; }  // mod p^prec, unit
    int prec() const { return prec_; }
    Int residue() const { return mod_pos(unit_, p_); }

    ZpElem operator*(const ZpElem& o) const;
    ZpElem operator/(const ZpElem& o) const;
    ZpElem operator+(const ZpElem& o) const;  // may lose precision; throws below floor

    static int precision_floor;  // default floor for add-cancellation

  private:
    Int p_;
    long val_;
    Int unit_;
    int prec_;
};

// Unramified extension of Q_p presented by a monic factor lifted to Z/p^N:
// O = Z_p[t]/(g), residue field F_q = F_p[t]/(g mod p), q = p^deg(g).
// Elements are coefficient vectors reduced mod p^N.
class UnramifiedRing {
  public:
    UnramifiedRing(Int p, int N, modp::P lifted_factor);

    const Int& p() const { return p_; }
    int N() const { return N_; }
    int f() const { return modp::deg(g_); }
    const Int& pN() const { return pN_; }
    const modp::P& modulus() const { return g_; }
    const Fq& residue_field() const { return *Fq_; }

    using E = modp::P;
    E zero() const { return {}; }
    E one() const { return {Int(1)}; }
    E reduce(const E& a) const { return modp::divrem(modp::reduce(a, pN_), g_, pN_).second; }
    E add(const E& a, const E& b) const { return modp::add(a, b, pN_); }
    E sub(const E& a, const E& b) const { return modp::sub(a, b, pN_); }
    E mul(const E& a, const E& b) const { return reduce(modp::mul(a, b, pN_)); }
    E inv(const E& a) const;  // a must be a unit
    bool is_unit(const E& a) const;
    // Valuation: min p-valuation of the coordinates; throws precision_exhausted
    // if indistinguishable from 0 at this precision.
    long val(const E& a) const;
    E unit_part(const E& a) const;         // a / p^val(a)
    Fq::E residue(const E& a) const;       // image of a (must be integral) in F_q
    E from_int(const Int& a) const { return reduce({a}); }
    // Image of a rational with p-unit denominator.
    E from_rat(const Rat& a) const;
    // Norm to Q_p as determinant of multiplication matrix, exact mod p^N.
    Int norm_to_qp(const E& a) const;

  private:
    Int p_, pN_;
    int N_;
    modp::P g_;
    std::shared_ptr<Fq> Fq_;
};

// Classical quadratic Hilbert symbol (a,b)_2 over Q_2; a,b nonzero rationals.
int hilbert_symbol_2(const Rat& a, const Rat& b);

// Hilbert symbol (a,b)_p over Q_p for odd p (tame formula).
int hilbert_symbol_odd(const Rat& a, const Rat& b, const Int& p);

// Is x a square in the unramified 2-adic ring K (x given as ring element)?
bool is_square_unramified_2adic(const UnramifiedRing& K, const UnramifiedRing::E& x);

}  // namespace cmtbx

#endif
