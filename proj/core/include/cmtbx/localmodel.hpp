#ifndef CMTBX_LOCALMODEL_HPP
#define CMTBX_LOCALMODEL_HPP

#include "cmtbx/modpoly.hpp"
#include "cmtbx/numberfield.hpp"

namespace cmtbx {
namespace localmodel {

struct search_budget_exceeded : error {
    explicit search_budget_exceeded(const std::string& m) : error("SearchBudgetExceeded: " + m) {}
};
struct condition_failure : error {
    explicit condition_failure(const std::string& m) : error("ConditionFailure: " + m) {}
};
struct even_residue_char : error {
    explicit even_residue_char(const std::string& m) : error("EvenResidueChar: " + m) {}
};

// L over K = Q_p: unramified part of degree f presented by a monic lift h of
// an irreducible polynomial mod p, then L = L^t(pi) with pi^e = eis_unit * p.
struct LocalExtSpec {
    Int p;
    int f = 1;
    int e = 1;
    Int eis_unit = 1;  // must be a p-unit (integer at desk scale)
};

// Banal signature: r[psi][j] in {0, n} over the labels (psi < f, j < e).
struct BanalSignature {
    int n = 1;
    std::vector<std::vector<int>> r;
    int dim_over(int psi) const {
        int s = 0;
        for (int x : r[psi]) s += x;
        return s;
    }
};

enum class RingKind { Fq, Opi2 };

// Q_{A_psi} and Q_{B_psi} expanded exactly over Q(zeta_e), with the pi-power
// grading recorded (coefficient of T^k is homogeneous of pi-degree |A|-k).
struct EisensteinPair {
    struct Poly {
        // coefficient of T^k: element of Q(zeta_e) times pihat^(deg - k)
        std::vector<NFElem> coeff;
    };
    std::shared_ptr<NumberField> cyclotomic;  // Q(zeta_e)
    std::vector<Poly> QA, QB;                 // per psi
};

EisensteinPair eisenstein_polys(const LocalExtSpec& ext, const BanalSignature& r,
                                int precision = 20);

struct QuotientPoint {
    // Per psi: the kernel of X_psi ->> P_psi listed as explicit elements of
    // the (small) module, plus the rank of P_psi.
    struct Component {
        int rank;
        long kernel_size;
        std::vector<std::vector<Int>> kernel_elems;  // flattened ring coords
    };
    std::vector<Component> comps;
    bool kottwitz_ok = true, eisenstein_ok = true;
};

QuotientPoint canonical_point(const LocalExtSpec& ext, const BanalSignature& r, RingKind ring);

struct SearchOptions {
    bool use_kottwitz = true;
    bool use_eisenstein = true;
    long budget = 2'000'000;
};

// Exhaustive count of chain-compatible locally free quotients satisfying the
// switched-on conditions, over the probe ring.
long uniqueness_bruteforce(const LocalExtSpec& ext, const BanalSignature& r, RingKind ring,
                           const SearchOptions& opts = {});

// Unitary wrapper: L/L0/K with r_phi + r_phibar = n, self-dual standard chain,
// duality condition from the traced pairing. Returns the count and reports
// whether the duality condition cut anything (it must not).
struct UnitaryResult {
    long count = 0;
    long count_without_duality = 0;
    bool duality_redundant = true;
};
UnitaryResult unitary_wrapper(const LocalExtSpec& ext, const BanalSignature& r, RingKind ring,
                              const SearchOptions& opts = {});

// The conjugation on labels for the unitary case: psi-fibers are swapped by
// Frobenius when f is even (L0 = the index-2 unramified subfield), and the
// pi-roots are negated when e is even (L0 = L^t). Throws for unsupported
// shapes.
std::pair<int, int> conj_label(const LocalExtSpec& ext, int psi, int j);

}  // namespace localmodel
}  // namespace cmtbx

#endif
