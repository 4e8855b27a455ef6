#include "cmtbx/signinv.hpp"

#include <set>

namespace cmtbx {
namespace signinv {

int hom_invariant(int n, int eta_detH, int eta_u0, int eta_minus_one) {
    int det_part = eta_detH * ((n % 2) ? eta_u0 : 1);  // u0^{-n} is a norm for even n
    return hasse_invariant(det_part, n, eta_minus_one);
}

int sgn_r(const std::vector<int>& r_on_phi_block) {
    long s = 0;
    for (int r : r_on_phi_block) s += r;
    return (s % 2) ? -1 : 1;
}

int adjusted_invariant(int inv_natural, int sgn, bool away_from_residue_char) {
    return away_from_residue_char ? inv_natural : sgn * inv_natural;
}

int mu_sharp(const std::vector<int>& Xi, const std::vector<int>& conj,
             const std::vector<int>& r0, const std::vector<int>& r, int n) {
    std::set<int> seen;
    for (int l : Xi) {
        if (l < 0 || l >= static_cast<int>(conj.size()))
            throw not_half_system("label out of range");
        seen.insert(l);
    }
    if (2 * Xi.size() != conj.size()) throw not_half_system("wrong size");
    for (int l : Xi)
        if (seen.count(conj[l])) throw not_half_system("contains a conjugate pair");
    long s = 0;
    for (int l : Xi) s += static_cast<long>(n) * r0[l] - r[l];
    return static_cast<int>(((s % 2) + 2) % 2);
}

std::vector<int> canonical_r0(int num_labels, const std::vector<int>& phi_half) {
    std::vector<int> r0(num_labels, 1);
    for (int l : phi_half) r0[l] = 0;
    return r0;
}

}  // namespace signinv
}  // namespace cmtbx
