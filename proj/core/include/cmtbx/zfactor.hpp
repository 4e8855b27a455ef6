#ifndef CMTBX_ZFACTOR_HPP
#define CMTBX_ZFACTOR_HPP

#include "cmtbx/modpoly.hpp"
#include "cmtbx/poly.hpp"

namespace cmtbx {

// Irreducible factorization over Q (monic factors, multiplicities).
std::vector<std::pair<QPoly, int>> factor_over_Q(const QPoly& f);
bool is_irreducible_over_Q(const QPoly& f);

// Hensel machinery over Z/p^N.
namespace hensel {

// Lift a coprime factorization f = g*h (mod p, g monic) to mod p^N.
// f must be monic mod p^N. Returns (g, h) mod p^N with g monic.
std::pair<modp::P, modp::P> lift_pair(const modp::P& f, modp::P g, modp::P h,
                                      const Int& p, int N);

// f monic with squarefree reduction mod p: lift the full mod-p factorization
// to mod p^N. Deterministic factor order.
std::vector<modp::P> lift_factorization(const QPoly& f, const Int& p, int N);

}  // namespace hensel

QPoly qpoly_from_modp(const modp::P& a);
modp::P modp_from_qpoly(const QPoly& f, const Int& m);

}  // namespace cmtbx

#endif
