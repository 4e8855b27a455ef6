#ifndef CMTBX_MODPOLY_HPP
#define CMTBX_MODPOLY_HPP

#include "cmtbx/basic.hpp"

namespace cmtbx {

// Polynomials over Z/m as coefficient vectors (index = power), reduced into
// [0, m) and trimmed. For gcd/factorization m must be prime.
namespace modp {

using P = std::vector<Int>;

P trim(P a);
P reduce(P a, const Int& m);
int deg(const P& a);
P add(const P& a, const P& b, const Int& m);
P sub(const P& a, const P& b, const Int& m);
P mul(const P& a, const P& b, const Int& m);
P scal(const P& a, const Int& c, const Int& m);
// Division by b with invertible leading coefficient.
std::pair<P, P> divrem(const P& a, const P& b, const Int& m);
P monic(const P& a, const Int& p);
P gcd(P a, P b, const Int& p);
P powmod(const P& a, Int e, const P& mod, const Int& p);
P deriv(const P& a, const Int& m);
Int eval(const P& a, const Int& x, const Int& m);
P from_qpoly_int(const class std::vector<Rat>&) = delete;

// Distinct factors of squarefree f over F_p, each irreducible, sorted
// deterministically (by degree, then lexicographically by coefficients).
std::vector<P> factor_squarefree_mod_p(const P& f, const Int& p, uint64_t seed = 1);

// Full factorization with multiplicities.
std::vector<std::pair<P, int>> factor_mod_p(const P& f, const Int& p);

bool is_irreducible_mod_p(const P& f, const Int& p);

// A monic irreducible polynomial of degree f over F_p (deterministic search).
P find_irreducible(const Int& p, int f);

}  // namespace modp

// F_q = F_p[z]/(h) with h monic irreducible. Elements: coefficient vectors of
// degree < deg h, reduced mod p.
class Fq {
  public:
    Fq(Int p, modp::P h) : p_(std::move(p)), h_(std::move(h)) {}
    const Int& p() const { return p_; }
    int f() const { return modp::deg(h_); }
    Int q() const { return pow_int(p_, static_cast<unsigned long>(f())); }
    const modp::P& modulus() const { return h_; }

    using E = modp::P;
    E zero() const { return {}; }
    E one() const { return {Int(1)}; }
    E from_int(const Int& a) const { return modp::reduce({a}, p_); }
    E add(const E& a, const E& b) const { return modp::add(a, b, p_); }
    E sub(const E& a, const E& b) const { return modp::sub(a, b, p_); }
    E neg(const E& a) const { return modp::sub({}, a, p_); }
    E mul(const E& a, const E& b) const { return modp::divrem(modp::mul(a, b, p_), h_, p_).second; }
    E pow(E a, Int e) const;
    E inv(const E& a) const;
    bool is_zero(const E& a) const { return a.empty(); }
    bool eq(const E& a, const E& b) const { return a == b; }
    bool is_square(const E& a) const;  // q odd
    // Evaluate an F_p[x] polynomial at an element of F_q.
    E eval_poly(const modp::P& g, const E& x) const;
    std::vector<E> all_elements() const;
    // Roots in F_q of an F_p[x] polynomial.
    std::vector<E> roots_of(const modp::P& g) const;

  private:
    Int p_;
    modp::P h_;
};

}  // namespace cmtbx

#endif
