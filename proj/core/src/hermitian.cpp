#include "cmtbx/hermitian.hpp"

#include <algorithm>

namespace cmtbx {

int hasse_invariant(int det_class, int n, int eta_minus_one) {
    int sign_part = ((n * (n - 1) / 2) % 2) ? eta_minus_one : 1;
    return sign_part * det_class;
}

int GlobalHermitianSpace::inv_at(const Place& v) const {
    for (const auto& w : finite_exceptions)
        if (w == v) return -1;
    return 1;
}

int GlobalHermitianSpace::arch_inv_at(int root_index) const {
    const auto& rs = signatures.at(root_index);
    if (rs.first + rs.second != n) throw invalid_argument_error("signature does not sum to n");
    return arch_inv(n, rs.second);
}

LandherrReport landherr_check(const GlobalHermitianSpace& W) {
    LandherrReport rep;
    rep.product = 1;
    for (const auto& v : W.finite_exceptions) {
        rep.contributions.emplace_back(v.key(), -1);
        rep.product = -rep.product;
    }
    for (size_t i = 0; i < W.signatures.size(); ++i) {
        int iv = W.arch_inv_at(static_cast<int>(i));
        rep.contributions.emplace_back("arch" + std::to_string(i), iv);
        rep.product *= iv;
    }
    rep.ok = (rep.product == 1);
    return rep;
}

const SpecialVector::LocalNorm* SpecialVector::find(const Place& v) const {
    for (const auto& nrm : norms)
        if (nrm.v == v) return &nrm;
    return nullptr;
}

GlobalHermitianSpace orthocomplement(const GlobalHermitianSpace& W, const SpecialVector& u,
                                     const std::map<std::string, int>& eta_minus_one) {
    if (!u.totally_negative)
        throw invalid_argument_error("orthocomplement: special vector must be totally negative");
    GlobalHermitianSpace Wf;
    Wf.n = W.n - 1;
    if (Wf.n < 1) throw invalid_argument_error("orthocomplement: n must be >= 2");
    // Archimedean: drop one negative entry everywhere.
    for (const auto& [r, s] : W.signatures) {
        if (s == 0) throw arch_signature_underflow("no negative direction for u");
        Wf.signatures.emplace_back(r, s - 1);
    }
    // Finite non-split places: det(W_v) = det(Wf_v) * (u,u)_v, hence
    // inv(Wf_v) = inv(W_v) * eta_v((u,u)) * eta_v(-1)^(n-1).
    std::vector<Place> support;
    for (const auto& v : W.finite_exceptions) support.push_back(v);
    for (const auto& nrm : u.norms)
        if (std::find(support.begin(), support.end(), nrm.v) == support.end())
            support.push_back(nrm.v);
    for (const auto& v : support) {
        int invW = W.inv_at(v);
        const auto* nrm = u.find(v);
        int eta_uu = nrm ? nrm->eta : 1;
        int em1 = 1;
        auto it = eta_minus_one.find(v.key());
        if (it != eta_minus_one.end()) em1 = it->second;
        int invWf = invW * eta_uu * (((W.n - 1) % 2) ? em1 : 1);
        if (invWf == -1) Wf.finite_exceptions.push_back(v);
    }
    return Wf;
}

GlobalHermitianSpace negate_space(const GlobalHermitianSpace& W,
                                  const std::vector<Place>& nonsplit_places,
                                  const std::map<std::string, int>& eta_minus_one) {
    GlobalHermitianSpace out;
    out.n = W.n;
    for (const auto& [r, s] : W.signatures) out.signatures.emplace_back(s, r);
    // det multiplies by (-1)^n: inv flips by eta_v(-1)^n.
    for (const auto& v : nonsplit_places) {
        int em1 = 1;
        auto it = eta_minus_one.find(v.key());
        if (it != eta_minus_one.end()) em1 = it->second;
        int mult = (W.n % 2) ? em1 : 1;
        int inv_new = W.inv_at(v) * mult;
        if (inv_new == -1) out.finite_exceptions.push_back(v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Jordan lattices
// ---------------------------------------------------------------------------

std::optional<int> forced_block_det_class(const LatticeCtx& ctx, int scale, int rank) {
    if (ctx.st == SplittingType::Inert) {
        // Unit determinants are norms; the scale contributes eta(varpi)^{s*r}
        // = (-1)^{s*r}.
        return ((scale * rank) % 2) ? -1 : 1;
    }
    if (ctx.st == SplittingType::Ramified) {
        if (scale % 2) {
            // pi^odd-modular components have even rank and determinant class
            // eta((delta varpi)^(s*r/2)) = chi(-1)^(s*r/2).
            long e = (static_cast<long>(scale) * rank) / 2;
            return (e % 2) ? ctx.chi_minus_one : 1;
        }
        return std::nullopt;  // even scale: both unit classes occur (rank >= 1)
    }
    throw split_place_error("Jordan lattices live at non-split places");
}

JordanLattice JordanLattice::make(LatticeCtx ctx, std::vector<JordanBlock> blocks) {
    if (ctx.st == SplittingType::Split)
        throw split_place_error("JordanLattice::make at split place");
    std::sort(blocks.begin(), blocks.end(),
              [](const JordanBlock& a, const JordanBlock& b) { return a.scale < b.scale; });
    JordanLattice L;
    L.ctx = ctx;
    L.blocks = blocks;
    int n = 0;
    int prev_scale = 0;
    bool first = true;
    for (const auto& b : blocks) {
        if (b.rank <= 0) throw invalid_argument_error("JordanLattice: nonpositive rank");
        if (!first && b.scale == prev_scale) throw invalid_argument_error("JordanLattice: repeated scale");
        prev_scale = b.scale;
        first = false;
        if (b.det_class != 1 && b.det_class != -1)
            throw invalid_argument_error("JordanLattice: det class must be +-1");
        if (ctx.st == SplittingType::Ramified && (b.scale % 2) && (b.rank % 2))
            throw invalid_argument_error("JordanLattice: odd-scale ramified block needs even rank");
        auto forced = forced_block_det_class(ctx, b.scale, b.rank);
        if (forced && *forced != b.det_class)
            throw invalid_argument_error("JordanLattice: det class inconsistent with block profile");
        n += b.rank;
    }
    L.n = n;
    return L;
}

int JordanLattice::det_class() const {
    int d = 1;
    for (const auto& b : blocks) d *= b.det_class;
    return d;
}

int JordanLattice::inv_of_span() const {
    int em1 = (ctx.st == SplittingType::Ramified) ? ctx.chi_minus_one : 1;
    return hasse_invariant(det_class(), n, em1);
}

JordanLattice dual_lattice(const JordanLattice& L) {
    std::vector<JordanBlock> blocks;
    for (const auto& b : L.blocks) blocks.push_back({-b.scale, b.rank, b.det_class});
    return JordanLattice::make(L.ctx, std::move(blocks));
}

std::optional<int> lattice_type(const JordanLattice& L) {
    if (L.blocks.empty()) return std::nullopt;
    // Normalize the homothety class by even scale shifts (Gram of pi*L scales
    // by Nm(pi), i.e. +2 in the pi-valuation, at both inert and ramified v).
    int mn = L.blocks.front().scale;
    int shift = 2 * (mn >= 0 ? mn / 2 : -((-mn + 1) / 2));
    int t = 0;
    for (const auto& b : L.blocks) {
        int s = b.scale - shift;
        if (s < 0 || s > 1) return std::nullopt;
        if (s == 1) t += b.rank;
    }
    return t;
}

ATType classify_AT(const JordanLattice& L) {
    auto t = lattice_type(L);
    if (!t) return ATType::Other;
    if (L.ctx.st == SplittingType::Inert) {
        if (*t == 0) return ATType::Hyperspecial;
        if (*t == 1) return ATType::AT1;
        return ATType::Other;
    }
    // Ramified.
    if (L.n % 2 == 0 && *t == L.n) return ATType::AT2;        // pi-modular
    if (L.n % 2 == 1 && *t == L.n - 1) return ATType::AT3;    // almost pi-modular
    if (L.n == 2 && *t == 0) return ATType::AT4;              // self-dual, n = 2
    return ATType::Other;
}

std::string at_type_name(ATType t) {
    switch (t) {
        case ATType::Hyperspecial: return "Hyperspecial";
        case ATType::AT1: return "AT1";
        case ATType::AT2: return "AT2";
        case ATType::AT3: return "AT3";
        case ATType::AT4: return "AT4";
        case ATType::Other: return "Other";
    }
    return "?";
}

bool check_chain_relation(const JordanLattice& Lflat, const SpecialVector::LocalNorm& u_norm,
                          const JordanLattice& L) {
    if (Lflat.n + 1 != L.n) throw invalid_argument_error("chain relation: dimension mismatch");
    if (L.ctx.st != SplittingType::Ramified || Lflat.ctx.st != SplittingType::Ramified)
        return false;
    if (L.n % 2 != 0) return false;
    if (u_norm.ord != 0) return false;
    // Lflat almost pi-modular in odd dimension n-1.
    if (classify_AT(Lflat) != ATType::AT3) return false;
    // L pi-modular.
    if (classify_AT(L) != ATType::AT2) return false;
    // Colength bookkeeping: val(det L) - val(det(Lflat + Ou)) = 2.
    long vL = 0;
    for (const auto& b : L.blocks) vL += static_cast<long>(b.scale) * b.rank;
    long vS = 0;
    for (const auto& b : Lflat.blocks) vS += static_cast<long>(b.scale) * b.rank;
    // (u,u) unit contributes scale 0.
    if (vL - vS != 2) return false;
    // The pi-modular class is the one distinguished by the ambient space:
    // span of L must equal span of Lflat + Ou.
    int inv_sum = hasse_invariant(Lflat.det_class() * u_norm.eta, L.n, L.ctx.chi_minus_one);
    return inv_sum == L.inv_of_span();
}

bool vertex_exists(const LatticeCtx& ctx, int inv, int n, int t) {
    if (t < 0 || t > n) return false;
    if (ctx.st == SplittingType::Split) return true;
    if (ctx.st == SplittingType::Inert) {
        // det class of a vertex of type t is (-1)^t; inv = det class at inert
        // places (eta(-1) = 1 there).
        return ((t % 2) ? -1 : 1) == inv;
    }
    // Ramified: odd-scale parts have even rank, so t is even; for t < n both
    // det classes occur; t = n (pi-modular) pins the distinguished class.
    if (t % 2) return false;
    if (t < n) return true;
    if (n % 2) return false;  // t = n odd impossible: odd rank at odd scale
    int det_forced = ((static_cast<long>(n) / 2) % 2) ? ctx.chi_minus_one : 1;
    return hasse_invariant(det_forced, n, ctx.chi_minus_one) == inv;
}

}  // namespace cmtbx
