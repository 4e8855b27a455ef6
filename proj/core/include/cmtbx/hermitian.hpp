#ifndef CMTBX_HERMITIAN_HPP
#define CMTBX_HERMITIAN_HPP

#include "cmtbx/fields.hpp"

#include <optional>

namespace cmtbx {

struct split_place_error : error {
    explicit split_place_error(const std::string& m) : error("SplitPlace: " + m) {}
};
struct isotropic_vector : error {
    explicit isotropic_vector(const std::string& m) : error("IsotropicVector: " + m) {}
};
struct arch_signature_underflow : error {
    explicit arch_signature_underflow(const std::string& m) : error("ArchSignatureUnderflow: " + m) {}
};

// Per-place combinatorial context for lattice classification. chi_* values
// are only meaningful at ramified places (odd residue characteristic).
struct LatticeCtx {
    SplittingType st = SplittingType::Inert;
    int chi_minus_one = 1;   // chi(-1) in the residue field
    int eta_uniformizer = 1; // eta_v(varpi_v), ramified places
};

// inv_v at an archimedean place from the signature (r,s), r+s=n.
inline int arch_inv(int n, int s) { return (((n * (n - 1)) / 2 + s) % 2) ? -1 : 1; }

// Hasse-type invariant at a finite non-split place from the class of det and
// the dimension: inv = eta((-1)^(n(n-1)/2)) * det_class.
// det_class and the return value are +-1 via eta; eta_minus_one = eta_v(-1).
int hasse_invariant(int det_class, int n, int eta_minus_one);

struct LocalHermitianSpace {
    Place v;
    int n = 0;
    // Exactly one of the following is active, per the place kind.
    bool split = false;
    std::optional<int> inv;               // finite non-split
    std::optional<std::pair<int, int>> sig;  // archimedean (r,s)
};

struct GlobalHermitianSpace {
    int n = 0;
    // Finite non-split places with inv = -1 (default +1 elsewhere).
    std::vector<Place> finite_exceptions;
    // One signature per archimedean place of F0, indexed by root_index.
    std::vector<std::pair<int, int>> signatures;

    int inv_at(const Place& v) const;  // finite places
    int arch_inv_at(int root_index) const;
};

struct LandherrReport {
    bool ok = false;
    int product = 1;  // the global product of invariants
    std::vector<std::pair<std::string, int>> contributions;  // place key -> inv
};

LandherrReport landherr_check(const GlobalHermitianSpace& W);

// The special vector u: per-place valuation of (u,u) and eta-classes, plus
// the archimedean signs.
struct SpecialVector {
    struct LocalNorm {
        Place v;
        long ord = 0;  // val_v((u,u))
        int eta = 1;   // eta_v((u,u))
    };
    std::vector<LocalNorm> norms;  // finite non-split places where data matters
    bool totally_negative = true;

    const LocalNorm* find(const Place& v) const;
};

// W^flat = orthogonal complement of u in W. eta_minus_one maps place keys to
// eta_v(-1) (only ramified places can carry -1).
GlobalHermitianSpace orthocomplement(const GlobalHermitianSpace& W, const SpecialVector& u,
                                     const std::map<std::string, int>& eta_minus_one = {});

GlobalHermitianSpace negate_space(const GlobalHermitianSpace& W,
                                  const std::vector<Place>& nonsplit_places,
                                  const std::map<std::string, int>& eta_minus_one);

// --- Jordan lattices over non-split local places ---

struct JordanBlock {
    int scale = 0;      // pi_v-valuation of the block (even at ramified for rank-odd blocks)
    int rank = 0;
    int det_class = 1;  // eta_v of the full block determinant
};

struct JordanLattice {
    LatticeCtx ctx;
    int n = 0;
    std::vector<JordanBlock> blocks;  // scales strictly increasing

    // Throws on an inconsistent block profile for the place kind.
    static JordanLattice make(LatticeCtx ctx, std::vector<JordanBlock> blocks);

    int inv_of_span() const;  // invariant of the ambient hermitian space
    int det_class() const;    // eta_v(det)
};

JordanLattice dual_lattice(const JordanLattice& L);

// Vertex type after normalizing the homothety class; nullopt = NotVertex.
std::optional<int> lattice_type(const JordanLattice& L);

enum class ATType { Hyperspecial, AT1, AT2, AT3, AT4, Other };
ATType classify_AT(const JordanLattice& L);
std::string at_type_name(ATType t);

// The two colength-one containments pi(L^flat + Ou)^dual c1 L c1 L^flat + Ou
// at a ramified place with n even and (u,u) a unit, decided on invariants.
bool check_chain_relation(const JordanLattice& Lflat, const SpecialVector::LocalNorm& u_norm,
                          const JordanLattice& L);

// Does the local space with invariant inv contain a vertex lattice of type t?
// Decision table per place kind; cross-checked by the enumeration oracle in
// the test suite.
bool vertex_exists(const LatticeCtx& ctx, int inv, int n, int t);

// Forced det_class of a block, where the place kind forces it; nullopt = free.
std::optional<int> forced_block_det_class(const LatticeCtx& ctx, int scale, int rank);

}  // namespace cmtbx

#endif
