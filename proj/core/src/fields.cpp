#include "cmtbx/fields.hpp"

#include <algorithm>
#include <sstream>

namespace cmtbx {

std::string Place::key() const {
    std::ostringstream os;
    if (archimedean) os << "arch" << root_index;
    else os << "p" << p.get_str() << "." << factor_index;
    return os.str();
}

// ---------------------------------------------------------------------------
// Completions
// ---------------------------------------------------------------------------

struct FieldTower::CompletionBase {
    virtual ~CompletionBase() = default;
    // Valuation of nonzero x (element of F0 as polynomial in the generator).
    virtual long val(const QPoly& x) const = 0;
    // Quadratic-residue character of the unit part of x (odd p).
    virtual int chi_unit(const QPoly& x) const = 0;
    virtual int chi_minus_one() const = 0;
    virtual Int residue_card() const = 0;
    virtual int ramification() const = 0;
    // Norm to Q_p of x, as an exact rational of the form p^k * (unit mod p^N).
    virtual ZpElem norm_to_qp(const QPoly& x) const { throw unsupported("norm_to_qp"); }
    // 2-adic square test (unramified completions over 2 only).
    virtual bool is_square_2adic(const QPoly& x) const { throw unsupported("is_square_2adic"); }
};

namespace {

// Split a QPoly with rational coefficients into (integer polynomial, integer
// denominator).
std::pair<modp::P, Int> clear_denominators(const QPoly& x) {
    Int den(1);
    for (int i = 0; i <= x.degree(); ++i)
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x[i].get_den().get_mpz_t());
    modp::P num(x.degree() + 1);
    for (int i = 0; i <= x.degree(); ++i) {
        Rat c = x[i] * Rat(den);
        num[i] = c.get_num();
    }
    return {modp::trim(std::move(num)), den};
}

}  // namespace

// Unramified completion F_{0,v} = Q_p[t]/(g), g a Hensel-lifted factor of f0.
struct FieldTower::UnramComp : FieldTower::CompletionBase {
    UnramComp(Int p, int N, modp::P lifted) : ring(std::move(p), N, std::move(lifted)) {}
    UnramifiedRing ring;

    struct ValUnit {
        long v;
        UnramifiedRing::E unit;
    };
    ValUnit val_unit(const QPoly& x) const {
        auto [num, den] = clear_denominators(x);
        if (num.empty()) throw zero_argument("local valuation of zero");
        UnramifiedRing::E img = ring.reduce(num);
        long vnum = ring.val(img);
        long vden = (den == 1) ? 0 : p_valuation(den, ring.p());
        UnramifiedRing::E unit = ring.unit_part(img);
        if (vden > 0) {
            Int d = den / pow_int(ring.p(), static_cast<unsigned long>(vden));
            unit = ring.mul(unit, ring.inv(ring.from_int(d)));
        } else if (den != 1) {
            unit = ring.mul(unit, ring.inv(ring.from_int(den)));
        }
        return {vnum - vden, unit};
    }

    long val(const QPoly& x) const override { return val_unit(x).v; }
    int chi_unit(const QPoly& x) const override {
        auto vu = val_unit(x);
        return ring.residue_field().is_square(ring.residue(vu.unit)) ? 1 : -1;
    }
    int chi_minus_one() const override {
        Int q = ring.residue_field().q();
        return (mod_pos(q, Int(4)) == 1) ? 1 : -1;
    }
    Int residue_card() const override { return ring.residue_field().q(); }
    int ramification() const override { return 1; }
    ZpElem norm_to_qp(const QPoly& x) const override {
        auto vu = val_unit(x);
        Int nu = ring.norm_to_qp(vu.unit);
        return ZpElem(ring.p(), vu.v * ring.f(), nu, ring.N() - 1);
    }
    bool is_square_2adic(const QPoly& x) const override {
        auto vu = val_unit(x);
        if (vu.v % 2) return false;
        return is_square_unramified_2adic(ring, vu.unit);
    }
};

// Ramified quadratic completion (p odd): F_{0,v} = Q_p(pi), pi^2 = c0 with
// val_p(c0) = 1, obtained from a lifted quadratic factor of f0.
struct FieldTower::RamQuadComp : FieldTower::CompletionBase {
    Int p, pN;
    int N;
    modp::P g;     // lifted quadratic factor mod p^N, monic
    Int s;         // center: g(t) = (t-s)^2 - c0
    Int c0;        // pi^2; val_p(c0) = 1
    Int u0;        // c0 / p, unit

    RamQuadComp(Int p_, int N_, modp::P g_) : p(std::move(p_)), N(N_), g(std::move(g_)) {
        pN = pow_int(p, N);
        if (modp::deg(g) != 2) throw invalid_argument_error("RamQuadComp: factor not quadratic");
        Int two_inv;
        mpz_invert(two_inv.get_mpz_t(), Int(2).get_mpz_t(), pN.get_mpz_t());
        s = mod_pos(-g[1] * two_inv, pN);
        c0 = mod_pos(s * s - g[0], pN);
        if (c0 == 0 || p_valuation(c0, p) != 1)
            throw unsupported("ramified completion: factor not Eisenstein after centering");
        u0 = c0 / p;
    }

    struct ValUnit {
        long v;        // pi-adic valuation
        Int residue;   // residue of the unit part in F_p
    };
    ValUnit val_unit(const QPoly& x) const {
        auto [num, den] = clear_denominators(x);
        if (num.empty()) throw zero_argument("local valuation of zero");
        // Reduce num mod (g, p^N): linear a + b t, then rewrite at pi = t - s.
        modp::P r = modp::divrem(modp::reduce(num, pN), g, pN).second;
        Int a = r.size() > 0 ? r[0] : Int(0);
        Int b = r.size() > 1 ? r[1] : Int(0);
        Int A = mod_pos(a + b * s, pN);  // x = A + B*pi
        Int B = mod_pos(b, pN);
        long vA = (A == 0) ? 2 * N : 2 * p_valuation(A, p);
        long vB = (B == 0) ? 2 * N : 2 * p_valuation(B, p) + 1;
        long v = std::min(vA, vB);
        if (v >= N) throw precision_exhausted("ramified completion: valuation saturates precision");
        Int res, u0res = mod_pos(u0, p);
        Int u0inv;
        mpz_invert(u0inv.get_mpz_t(), u0res.get_mpz_t(), p.get_mpz_t());
        if (v % 2 == 0) {
            long k = v / 2;
            Int Au = A / pow_int(p, static_cast<unsigned long>(k));
            res = mod_pos(Au * powmod(u0inv, Int(k), p), p);
        } else {
            long k = (v - 1) / 2;
            Int Bu = B / pow_int(p, static_cast<unsigned long>(k));
            res = mod_pos(Bu * powmod(u0inv, Int(k), p), p);
        }
        long vden = (den == 1) ? 0 : 2 * p_valuation(den, p);
        if (vden != 0) {
            Int d = den / pow_int(p, static_cast<unsigned long>(vden / 2));
            Int dinv;
            mpz_invert(dinv.get_mpz_t(), mod_pos(d, p).get_mpz_t(), p.get_mpz_t());
            res = mod_pos(res * dinv, p);
        } else if (den != 1) {
            Int dinv;
            mpz_invert(dinv.get_mpz_t(), mod_pos(den, p).get_mpz_t(), p.get_mpz_t());
            res = mod_pos(res * dinv, p);
        }
        return {v - vden, res};
    }

    long val(const QPoly& x) const override { return val_unit(x).v; }
    int chi_unit(const QPoly& x) const override { return legendre(val_unit(x).residue, p); }
    int chi_minus_one() const override { return legendre(Int(-1), p); }
    Int residue_card() const override { return p; }
    int ramification() const override { return 2; }
};

// ---------------------------------------------------------------------------
// FieldTower
// ---------------------------------------------------------------------------

FieldTower::FieldTower(QPoly f0_poly, QPoly delta, int initial_precision)
    : f0_(std::move(f0_poly)), delta_(std::move(delta)), prec0_(initial_precision) {
    if (f0_.degree() < 1 || f0_.lc() != 1 || !f0_.is_integral())
        throw invalid_argument_error("f0_poly must be monic integral of degree >= 1");
    if (f0_.degree() > 1 && !is_irreducible_over_Q(f0_))
        throw invalid_argument_error("Irreducibility: f0_poly reducible over Q");
    real_roots_ = isolate_real_roots(f0_);
    if (static_cast<int>(real_roots_.size()) != f0_.degree())
        throw not_totally_real("f0_poly does not have d distinct real roots");
    delta_ = delta_.mod(f0_);
    if (delta_.is_zero()) throw not_totally_negative("delta is zero");
    for (size_t i = 0; i < real_roots_.size(); ++i)
        if (sign_at_root(f0_, real_roots_[i], delta_) >= 0)
            throw not_totally_negative("delta not negative at real embedding " + std::to_string(i));
}

std::vector<Place> FieldTower::enumerate_places(const Int& p) const {
    std::string ck = "p" + p.get_str();
    auto it = place_cache_.find(ck);
    if (it != place_cache_.end()) return it->second;
    using namespace modp;
    P f = modp_from_qpoly(f0_, p);
    if (deg(f) != f0_.degree()) throw error("enumerate_places: leading coefficient vanished");
    auto factors = factor_mod_p(f, p);
    std::sort(factors.begin(), factors.end(), [](const auto& a, const auto& b) {
        if (deg(a.first) != deg(b.first)) return deg(a.first) < deg(b.first);
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    // Dedekind's criterion: with fbar = prod g_i^{e_i}, set gstar = prod g_i,
    // hstar = fbar / gstar; maximal at p iff gcd((g*h - f)/p, g*, h*) = 1.
    P gstar = {Int(1)};
    for (auto& [g, e] : factors) gstar = mul(gstar, g, p);
    P hstar = divrem(f, gstar, p).first;
    // Lift g*, h* to Z[x] with coefficients in [0,p) and form T = (gh - f)/p.
    QPoly gz = qpoly_from_modp(gstar), hz = qpoly_from_modp(hstar);
    QPoly T = (gz * hz - f0_) * Rat(1, 1);
    std::vector<Rat> tc(T.degree() + 1);
    for (int i = 0; i <= T.degree(); ++i) tc[i] = T[i] / Rat(p);
    QPoly Tp(std::move(tc));
    if (!Tp.is_integral()) throw error("Dedekind: internal lift mismatch");
    P Tbar = modp_from_qpoly(Tp, p);
    P g1 = gcd(Tbar, gstar, p);
    P g2 = gcd(g1, hstar, p);
    if (deg(g2) > 0)
        throw non_maximal_order("Z[x]/(f0) is not maximal at p = " + p.get_str());
    std::vector<Place> out;
    int idx = 0;
    for (auto& [g, e] : factors) {
        Place v;
        v.archimedean = false;
        v.p = p;
        v.factor_index = idx++;
        v.e = e;
        v.f = deg(g);
        out.push_back(v);
    }
    place_cache_[ck] = out;
    return out;
}

std::vector<Place> FieldTower::archimedean_places() const {
    std::vector<Place> out;
    for (size_t i = 0; i < real_roots_.size(); ++i) {
        Place v;
        v.archimedean = true;
        v.root_index = static_cast<int>(i);
        out.push_back(v);
    }
    return out;
}

const FieldTower::CompletionBase& FieldTower::completion(const Place& v) const {
    if (v.archimedean) throw invalid_argument_error("completion of archimedean place");
    std::string k = v.key();
    auto it = completions_.find(k);
    if (it != completions_.end()) return *it->second;
    // Recover the factor for this place.
    auto places = enumerate_places(v.p);
    if (v.factor_index >= static_cast<int>(places.size()))
        throw invalid_argument_error("place index out of range");
    using namespace modp;
    P f = modp_from_qpoly(f0_, v.p);
    auto factors = factor_mod_p(f, v.p);
    std::sort(factors.begin(), factors.end(), [](const auto& a, const auto& b) {
        if (deg(a.first) != deg(b.first)) return deg(a.first) < deg(b.first);
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    auto [gbar, e] = factors[v.factor_index];
    int N = std::max(prec0_, 8);
    std::shared_ptr<CompletionBase> comp;
    if (e == 1) {
        // Hensel-lift gbar against its cofactor.
        P cof = divrem(f, gbar, v.p).first;
        if (deg(gcd(gbar, cof, v.p)) > 0)
            throw unsupported("completion: unramified factor not coprime to cofactor");
        P fN = modp_from_qpoly(f0_, pow_int(v.p, N));
        auto [g, h] = hensel::lift_pair(fN, gbar, cof, v.p, N);
        (void)h;
        comp = std::make_shared<UnramComp>(v.p, N, g);
    } else if (e == 2 && deg(gbar) == 1 && v.p != 2) {
        // Lift the square of the linear factor against its cofactor.
        P gsq = mul(gbar, gbar, v.p);
        P cof = divrem(f, gsq, v.p).first;
        if (deg(gcd(gbar, cof, v.p)) > 0)
            throw unsupported("completion: ramified factor not coprime to cofactor");
        P fN = modp_from_qpoly(f0_, pow_int(v.p, N));
        auto [g, h] = hensel::lift_pair(fN, gsq, cof, v.p, N);
        (void)h;
        comp = std::make_shared<RamQuadComp>(v.p, N, g);
    } else {
        throw unsupported("completion at " + k + ": ramification shape e=" + std::to_string(e) +
                          ", f=" + std::to_string(deg(gbar)) + " not supported at this desk scale");
    }
    completions_[k] = comp;
    return *comp;
}

SplittingType FieldTower::splitting_in_F(const Place& v) const {
    if (v.archimedean) throw invalid_argument_error("splitting_in_F: finite places only");
    const auto& C = completion(v);
    if (v.p == 2) {
        if (C.ramification() != 1)
            throw unsupported("2-adic ramified base completion");
        if (C.is_square_2adic(delta_)) return SplittingType::Split;
        throw two_adic_nonsplit("delta is not a 2-adic square at " + v.key());
    }
    long m = C.val(delta_);
    if (m % 2) return SplittingType::Ramified;
    return C.chi_unit(delta_) == 1 ? SplittingType::Split : SplittingType::Inert;
}

int FieldTower::eta(const Place& v, const QPoly& x) const {
    QPoly xr = x.mod(f0_);
    if (xr.is_zero()) throw zero_argument("eta of zero");
    if (v.archimedean) {
        // F_phi/R = C/R: norms are the positive reals.
        return sign_at(v.root_index, xr);
    }
    if (v.p == 2) {
        const auto& C = completion(v);
        if (C.ramification() != 1) throw unsupported("eta at 2-adic ramified base place");
        if (C.is_square_2adic(delta_)) return 1;  // split
        if (degree() == 1) {
            return hilbert_symbol_2(xr[0], delta_[0]);
        }
        if (delta_is_rational()) {
            // Norm functoriality: (x, delta)_K = (Nm x, delta)_{Q_2}.
            ZpElem nm = C.norm_to_qp(xr);
            Int u8 = mod_pos(nm.unit(), Int(8));
            Rat nm_rat = Rat(pow_int(Int(2), static_cast<unsigned long>(std::abs(nm.val())))) * Rat(u8);
            if (nm.val() < 0) nm_rat = Rat(u8) / Rat(pow_int(Int(2), static_cast<unsigned long>(-nm.val())));
            return hilbert_symbol_2(nm_rat, delta_[0]);
        }
        throw unsupported("eta at p=2 with non-rational delta over an extension");
    }
    SplittingType st = splitting_in_F(v);
    const auto& C = completion(v);
    switch (st) {
        case SplittingType::Split:
            return 1;
        case SplittingType::Inert:
            return (C.val(xr) % 2) ? -1 : 1;
        case SplittingType::Ramified: {
            // eta(varpi^a u) = chi(u) * chi(-delta_unit)^a.
            long a = C.val(xr);
            int chi_u = C.chi_unit(xr);
            int chi_md = eta_uniformizer(v);
            return (a % 2) ? chi_u * chi_md : chi_u;
        }
    }
    throw error("unreachable");
}

Int FieldTower::residue_card(const Place& v) const { return completion(v).residue_card(); }

long FieldTower::val(const Place& v, const QPoly& x) const { return completion(v).val(x.mod(f0_)); }

int FieldTower::chi_unit(const Place& v, const QPoly& x) const {
    return completion(v).chi_unit(x.mod(f0_));
}

int FieldTower::chi_minus_one(const Place& v) const { return completion(v).chi_minus_one(); }

int FieldTower::eta_uniformizer(const Place& v) const {
    if (splitting_in_F(v) != SplittingType::Ramified)
        throw invalid_argument_error("eta_uniformizer: place not ramified in F");
    const auto& C = completion(v);
    // delta = varpi^(2k+1) * delta_u; eta(varpi) = chi(-delta_u).
    QPoly minus_delta = -delta_;
    return C.chi_unit(minus_delta);
}

int FieldTower::sign_at(int root_index, const QPoly& x) const {
    if (root_index < 0 || root_index >= static_cast<int>(real_roots_.size()))
        throw invalid_argument_error("sign_at: bad root index");
    int s = sign_at_root(f0_, real_roots_[root_index], x.mod(f0_));
    if (s == 0) throw zero_argument("sign_at: x vanishes at the embedding");
    return s;
}

std::vector<Place> FieldTower::finite_places_up_to(long bound) const {
    std::vector<Place> out;
    for (const auto& p : small_primes(bound))
        for (const auto& v : enumerate_places(p)) out.push_back(v);
    return out;
}

}  // namespace cmtbx
