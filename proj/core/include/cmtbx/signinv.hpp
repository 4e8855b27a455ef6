#ifndef CMTBX_SIGNINV_HPP
#define CMTBX_SIGNINV_HPP

#include "cmtbx/cmtypes.hpp"

namespace cmtbx {
namespace signinv {

// Hom-module invariant at a non-split place: the class of
// (-1)^(n(n-1)/2) * det(H) * u0^(-n), all entered as eta-values.
// u0 is the rank-one form value, H the rank-n form.
int hom_invariant(int n, int eta_detH, int eta_u0, int eta_minus_one);

// sgn(r_{nu,v}) = (-1)^(sum of r over the Phi-half of the block).
int sgn_r(const std::vector<int>& r_on_phi_block);

enum class Convention { Phi, PhiBar };

// inv^r = sgn * inv away from nothing; at residue characteristic != char the
// correction is omitted.
int adjusted_invariant(int inv_natural, int sgn, bool away_from_residue_char);

// mu_sharp = sum_{phi in Xi} (n*r0_phi - r_phi) mod 2 for a half-system Xi of
// the labels {0..2k-1} with involution conj. r0/r indexed by label.
int mu_sharp(const std::vector<int>& Xi, const std::vector<int>& conj,
             const std::vector<int>& r0, const std::vector<int>& r, int n);

// The canonical r0 of a CM half-choice: 0 on the given Phi-half, 1 elsewhere.
std::vector<int> canonical_r0(int num_labels, const std::vector<int>& phi_half);

}  // namespace signinv
}  // namespace cmtbx

#endif
