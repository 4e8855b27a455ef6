#ifndef CMTBX_ORBITS_HPP
#define CMTBX_ORBITS_HPP

#include "cmtbx/fields.hpp"
#include "cmtbx/laurent.hpp"
#include "cmtbx/numberfield.hpp"

#include <functional>

namespace cmtbx {

struct not_regular_semisimple : error {
    explicit not_regular_semisimple(const std::string& m) : error("NotRegularSemisimple: " + m) {}
};
struct infinite_support : error {
    explicit infinite_support(const std::string& m) : error("InfiniteSupport: " + m) {}
};

// The CM field F = F0(sqrt(delta)) as a plain number field Q[y]/(fF) with the
// F/F0-conjugation and the F0-subfield structure.
struct CMFieldData {
    std::shared_ptr<NumberField> F;
    const FieldTower* tower = nullptr;
    long shift_c = 0;   // theta = sqrt(delta) + c * x0
    QPoly X;            // F0 generator inside F
    QPoly sqrt_delta;   // sqrt(delta) inside F
    QPoly conj_gen;     // conjugation image of the generator: 2c X - y

    NFElem conj(const NFElem& z) const;
    NFElem from_f0(const QPoly& x0_poly) const;  // embed an F0 element
    bool is_f0_rational(const NFElem& z) const { return conj(z) == z; }
    // Express a conjugation-fixed element in F0 coordinates (poly in the F0 gen).
    QPoly to_f0(const NFElem& z) const;
};

CMFieldData build_cm_field(const FieldTower& tower);

// Small dense matrix over F.
struct NFMat {
    const NumberField* K = nullptr;
    int n = 0;
    std::vector<NFElem> a;  // row-major

    NFMat() = default;
    NFMat(const NumberField* field, int size);
    static NFMat identity(const NumberField* field, int size);
    NFElem& at(int i, int j) { return a[i * n + j]; }
    const NFElem& at(int i, int j) const { return a[i * n + j]; }

    NFMat operator*(const NFMat& o) const;
    NFMat inverse() const;
    NFElem det() const;
    NFMat conj(const CMFieldData& Fd) const;
    bool operator==(const NFMat& o) const { return a == o.a; }
};

// Characteristic polynomial (monic), coefficients c[0..n] with c[n] = 1.
std::vector<NFElem> charpoly(const NFMat& m);

// gamma = (gamma1, gamma2) in GL_{n-1}(F) x GL_n(F).
struct OrbitPair {
    CMFieldData Fd;
    NFMat gamma1, gamma2;

    int n() const { return gamma2.n; }
    NFMat contraction() const;  // iota(gamma1)^{-1} gamma2
    NFMat reduced() const;      // s = c * conj(c)^{-1}
};

struct OrbitInvariants {
    std::vector<NFElem> charpoly;  // degree-n monic, coefficients 0..n
    std::vector<NFElem> moments;   // b_0..b_{n-1}, e = last basis vector
    NFElem delta;                  // det of the moment matrix (b_{i+j})
    bool regular_semisimple = false;

    bool same_orbit_data(const OrbitInvariants& o) const {
        return charpoly == o.charpoly && moments == o.moments;
    }
};

// Moment/charpoly invariants of (s, e_n); works for the reduced linear element
// and (with the form-normalized moments) for the unitary side.
OrbitInvariants invariants_of_matrix(const CMFieldData& Fd, const NFMat& s);
OrbitInvariants invariants_linear(const OrbitPair& g);

// rs test on a plain matrix: Delta = det((e* g^{i+j} e)) != 0.
std::pair<bool, NFElem> rs_test(const CMFieldData& Fd, const NFMat& g);

// g = (g1, g2) in U(W^flat) x U(W) with Gram matrices over F; the special
// vector is the last basis vector of W and W = W^flat + F u.
struct UnitaryPair {
    CMFieldData Fd;
    NFMat g1, g2;
    NFMat J;  // Gram of W (hermitian); J's upper-left block is Gram of W^flat

    int n() const { return g2.n; }
    NFMat contraction() const;
    bool is_unitary() const;  // checks g_i* J g_i = J blockwise
};

OrbitInvariants invariants_unitary(const UnitaryPair& g);

bool match(const OrbitPair& gamma, const UnitaryPair& g);

// Transfer factor omega_v(gamma) = eta_v of a fixed F0-rational invariant of
// gamma (see transfer_factor_argument); satisfies the eta-invariance axiom by
// construction and the product formula because the argument is global.
QPoly transfer_factor_argument(const OrbitPair& gamma);
int transfer_factor(const OrbitPair& gamma, const Place& v);

// Discriminant in F0 deciding which hermitian space's orbits match gamma:
// returns eta_v-style +-1 = inv of the matching W_v.
QPoly matching_discriminant(const CMFieldData& Fd, const OrbitInvariants& inv);
int which_space(const CMFieldData& Fd, const OrbitInvariants& inv, const Place& v);

// Unitary realization of regular semisimple invariants: the hermitian space
// carried by the cyclic frame (Gram G_{ij} = (u,u) b_{j-i}), with the special
// vector as last basis vector and g = (1, frame matrix of the action). The
// invariants must come from an actual reduced element (b_0 = 1, conjugation
// symmetry); uu_f0 is the chosen value of (u,u) in F0.
UnitaryPair unitary_section(const CMFieldData& Fd, const OrbitInvariants& inv, const QPoly& uu_f0);

// --- Local orbital integrals (enumeration; F0 = Q, F imaginary quadratic) ---

struct LevelSpec {
    bool hyperspecial = true;
    int m = 0;  // principal congruence level when !hyperspecial
};

struct EnumerationCertificate {
    int stable_bound = 0;   // agreed at stable_bound and stable_bound+1
    long cosets_visited = 0;
};

// Orb(gamma, f'_v, s) as an exact Laurent polynomial in X = q^{-s}.
LaurentValue orb_linear(const OrbitPair& gamma, const Place& v, const LevelSpec& level,
                        EnumerationCertificate* cert = nullptr, int max_bound = 24);

// Unitary-side orbital integral (volume-normalized exact count) at a
// non-split place; f is the characteristic function of the stabilizer of the
// lattice spanned by the columns of lattice_basis (n x n over F), whose last
// column must span the special line.
Rat orb_unitary(const UnitaryPair& g, const Place& v, const NFMat& lattice_basis,
                EnumerationCertificate* cert = nullptr, int max_bound = 24);

// Split-place unitary orbital in GL-coordinates: g = (g1, g2) rational.
Rat orb_unitary_split_gl(const CMFieldData& Fd, const NFMat& g1, const NFMat& g2, const Int& p,
                         EnumerationCertificate* cert = nullptr, int max_bound = 24);

inline Rat d_orb(const LaurentValue& orb) { return orb.dlog_coeff(); }

// --- Orbit-sum assembly (J and dJ_v) ---

struct OrbitTable {
    std::vector<std::string> place_keys;
    struct Row {
        std::string orbit_name;
        std::map<std::string, Rat> orb;    // per-place Orb(gamma, f'_v)
        std::map<std::string, Rat> dorb;   // per-place dOrb(gamma, f'_v)
    };
    std::vector<Row> rows;
    std::string regular_place;  // declared place with regular support
};

struct AssembleResult {
    Rat J;
    std::map<std::string, Rat> dJ;  // per place v
    Rat dJ_total;
};

AssembleResult assemble_J(const OrbitTable& table);

}  // namespace cmtbx

#endif
