#include "cmtbx/planner.hpp"

#include <algorithm>
#include <set>

namespace cmtbx {
namespace planner {

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::HyperspecialSmooth: return "HyperspecialSmooth";
        case Regime::SplitSmooth: return "SplitSmooth";
        case Regime::DrinfeldRegular: return "DrinfeldRegular";
        case Regime::AT1SemiStable: return "AT1SemiStable";
        case Regime::AT2Smooth: return "AT2Smooth";
        case Regime::AT3Smooth: return "AT3Smooth";
        case Regime::AT4Excluded: return "AT4Excluded";
        case Regime::Unsupported: return "Unsupported";
    }
    return "?";
}

const EmbeddingModel& ModelConfig::embedding_model() const {
    if (!model) throw error("ModelConfig: embedding model not constructed");
    return *model;
}

LatticeCtx ModelConfig::lattice_ctx(const Place& v) const {
    LatticeCtx ctx;
    ctx.st = tower->splitting_in_F(v);
    if (ctx.st == SplittingType::Ramified) {
        ctx.chi_minus_one = tower->chi_minus_one(v);
        ctx.eta_uniformizer = tower->eta_uniformizer(v);
    }
    return ctx;
}

const JordanLattice* ModelConfig::lattice_at(const Place& v, bool flat) const {
    const auto& m = flat ? lattice_Wflat : lattice_W;
    auto it = m.find(v.key());
    return it == m.end() ? nullptr : &it->second;
}

namespace {

// Lattice relation Lambda_v = Lambda^flat_v + O_F u on Jordan invariants:
// merge the (ord,(u,u)-class) line into the flat blocks and compare.
bool lattice_sum_relation(const JordanLattice& Lflat, const SpecialVector::LocalNorm& nu,
                          const JordanLattice& L) {
    std::map<int, std::pair<int, int>> blocks;  // scale -> (rank, det)
    for (const auto& b : Lflat.blocks) blocks[b.scale] = {b.rank, b.det_class};
    auto [it, fresh] = blocks.emplace(static_cast<int>(nu.ord), std::make_pair(1, nu.eta));
    if (!fresh) {
        it->second.first += 1;
        it->second.second *= nu.eta;
    }
    if (blocks.size() != L.blocks.size()) return false;
    for (const auto& b : L.blocks) {
        auto jt = blocks.find(b.scale);
        if (jt == blocks.end()) return false;
        if (jt->second.first != b.rank || jt->second.second != b.det_class) return false;
    }
    return true;
}

bool degree_one(const Place& v) { return v.e == 1 && v.f == 1; }

// Places of residue characteristic p (for the "p != 2 if some v in V_p is
// non-split" style checks).
bool any_nonsplit_above(const FieldTower& T, const Int& p) {
    for (const auto& v : T.enumerate_places(p)) {
        try {
            if (T.splitting_in_F(v) != SplittingType::Split) return true;
        } catch (const two_adic_nonsplit&) {
            return true;
        }
    }
    return false;
}

}  // namespace

PlaceVerdict validate_hyperspecial(const ModelConfig& cfg, const Place& v0) {
    PlaceVerdict out;
    out.v = v0;
    const FieldTower& T = *cfg.tower;
    bool ok = true;
    if (v0.e != 1) {
        out.notes.push_back("v0 ramified over Q");
        ok = false;
    }
    SplittingType st;
    try {
        st = T.splitting_in_F(v0);
    } catch (const two_adic_nonsplit&) {
        out.notes.push_back("2-adic non-split place");
        out.regime = Regime::Unsupported;
        return out;
    }
    if (st == SplittingType::Ramified) {
        out.notes.push_back("v0 ramifies in F");
        ok = false;
    }
    if (st == SplittingType::Inert && cfg.W.inv_at(v0) != 1) {
        out.notes.push_back("inert v0 with non-split W_v0");
        ok = false;
    }
    if (v0.p == 2 && any_nonsplit_above(T, v0.p)) {
        out.notes.push_back("p = 2 with a non-split place above p");
        ok = false;
    }
    // Lattice conditions at every v over p: self-dual at v0, the direct-sum
    // relation, and (u,u) a p-unit.
    for (const auto& v : T.enumerate_places(v0.p)) {
        SplittingType stv;
        try {
            stv = T.splitting_in_F(v);
        } catch (const two_adic_nonsplit&) {
            out.notes.push_back("2-adic non-split companion place " + v.key());
            ok = false;
            continue;
        }
        const auto* nu = cfg.u.find(v);
        long ord = nu ? nu->ord : 0;
        if (ord != 0) {
            out.notes.push_back("(u,u) not a unit at " + v.key());
            ok = false;
        }
        if (stv == SplittingType::Split) continue;  // trivial lattice side
        const auto* L = cfg.lattice_at(v, false);
        const auto* Lf = cfg.lattice_at(v, true);
        if (!L || !Lf) {
            out.notes.push_back("missing lattice data at " + v.key());
            ok = false;
            continue;
        }
        if (v == v0) {
            auto t = lattice_type(*L);
            if (!t || *t != 0) {
                out.notes.push_back("Lambda_v0 not self-dual");
                ok = false;
            }
        }
        SpecialVector::LocalNorm dflt{v, 0, 1};
        if (!lattice_sum_relation(*Lf, nu ? *nu : dflt, *L)) {
            out.notes.push_back("lattice relation Lambda = Lambda^flat + O_F u fails at " + v.key());
            ok = false;
        }
    }
    out.regime = ok ? ((st == SplittingType::Split && v0.e == 1) || st == SplittingType::Inert
                           ? Regime::HyperspecialSmooth
                           : Regime::SplitSmooth)
                    : Regime::Unsupported;
    if (ok && st == SplittingType::Split && v0.e != 1) out.regime = Regime::SplitSmooth;
    out.embedding_defined = ok;
    return out;
}

PlaceVerdict validate_drinfeld(const ModelConfig& cfg, const Place& v0, int m) {
    PlaceVerdict out;
    out.v = v0;
    const FieldTower& T = *cfg.tower;
    SplittingType st;
    try {
        st = T.splitting_in_F(v0);
    } catch (const two_adic_nonsplit&) {
        out.notes.push_back("2-adic non-split place");
        out.regime = Regime::Unsupported;
        return out;
    }
    if (st != SplittingType::Split) {
        out.notes.push_back("Drinfeld level needs v0 split in F");
        out.regime = Regime::Unsupported;
        return out;
    }
    // Matching condition: every labeling whose phi0-block lies over v0 has
    // that block inside Phi. Degree-one places match automatically.
    bool matched = false;
    if (degree_one(v0)) {
        matched = true;
        out.notes.push_back("degree one over Q: matching automatic");
    } else {
        try {
            const auto& M = cfg.embedding_model();
            auto pps = M.all_place_partitions(v0.p);
            matched = true;
            for (const auto& pp : pps) {
                for (size_t b = 0; b < pp.blocks.size(); ++b) {
                    const auto& blk = pp.blocks[b];
                    if (std::find(blk.begin(), blk.end(), cfg.phi0) == blk.end()) continue;
                    if (!(pp.f0_place_of_block[b] == v0)) continue;
                    if (!EmbeddingModel::matching_condition(pp, static_cast<int>(b), cfg.Phi))
                        matched = false;
                }
            }
        } catch (const unsupported& e) {
            out.notes.push_back(std::string("matching condition undecidable: ") + e.what());
            out.regime = Regime::Unsupported;
            return out;
        }
    }
    if (!matched) {
        out.notes.push_back("matching condition fails (phi0-block straddles Phi)");
        out.regime = Regime::Unsupported;
        return out;
    }
    // The base hyperspecial/split-level conditions away from the level.
    PlaceVerdict base = validate_hyperspecial(cfg, v0);
    if (base.regime == Regime::Unsupported) {
        out.notes.insert(out.notes.end(), base.notes.begin(), base.notes.end());
        out.regime = Regime::Unsupported;
        return out;
    }
    out.regime = Regime::DrinfeldRegular;
    out.embedding_defined = true;
    if (m > 0)
        out.notes.push_back("product model with m > 0 is not regular (fibered product caveat)");
    return out;
}

PlaceVerdict validate_AT(const ModelConfig& cfg, const Place& v0) {
    PlaceVerdict out;
    out.v = v0;
    const FieldTower& T = *cfg.tower;
    SplittingType st;
    try {
        st = T.splitting_in_F(v0);
    } catch (const two_adic_nonsplit&) {
        out.notes.push_back("2-adic non-split place");
        out.regime = Regime::Unsupported;
        return out;
    }
    if (st == SplittingType::Split) {
        out.notes.push_back("AT level needs v0 non-split");
        out.regime = Regime::Unsupported;
        return out;
    }
    if (v0.p == 2) {
        out.notes.push_back("p = 2 excluded for AT level");
        out.regime = Regime::Unsupported;
        return out;
    }
    if (!degree_one(v0)) {
        out.notes.push_back("v0 must have relative degree one over Q");
        out.regime = Regime::Unsupported;
        return out;
    }
    const auto* L = cfg.lattice_at(v0, false);
    const auto* Lf = cfg.lattice_at(v0, true);
    if (!L) {
        out.notes.push_back("missing lattice at v0");
        out.regime = Regime::Unsupported;
        return out;
    }
    const auto* nu = cfg.u.find(v0);
    SpecialVector::LocalNorm dflt{v0, 0, 1};
    const auto& un = nu ? *nu : dflt;
    switch (classify_AT(*L)) {
        case ATType::AT1: {
            if (un.ord != 1) {
                out.notes.push_back("AT type (1) requires ord_v0(u,u) = 1");
                out.regime = Regime::Unsupported;
                return out;
            }
            out.regime = Regime::AT1SemiStable;
            if (cfg.tower->degree() == 1) {
                out.notes.push_back("E_nu unramified over Q_p (imaginary quadratic case)");
            } else {
                out.conditional = "semi-stability conditional on E_nu unramified over Q_p";
            }
            if (Lf) {
                SpecialVector::LocalNorm u1 = un;
                out.embedding_defined = lattice_sum_relation(*Lf, u1, *L);
            }
            return out;
        }
        case ATType::AT2: {
            if (!Lf) {
                out.notes.push_back("missing flat lattice for the chain relation");
                out.regime = Regime::Unsupported;
                return out;
            }
            if (!check_chain_relation(*Lf, un, *L)) {
                out.notes.push_back("chain relation fails at AT type (2)");
                out.regime = Regime::Unsupported;
                return out;
            }
            out.regime = Regime::AT2Smooth;
            out.embedding_defined = false;  // needs the auxiliary correspondence
            out.notes.push_back("embedding via the auxiliary two-step correspondence");
            return out;
        }
        case ATType::AT3: {
            if (un.ord != 0) {
                out.notes.push_back("AT type (3) requires (u,u) a unit");
                out.regime = Regime::Unsupported;
                return out;
            }
            out.regime = Regime::AT3Smooth;
            if (Lf) out.embedding_defined = lattice_sum_relation(*Lf, un, *L);
            return out;
        }
        case ATType::AT4: {
            out.regime = Regime::AT4Excluded;
            out.notes.push_back("AT type (4) excluded for arithmetic intersections");
            out.embedding_defined = true;
            return out;
        }
        case ATType::Hyperspecial:
            out.notes.push_back("lattice is self-dual: hyperspecial regime applies");
            out.regime = Regime::Unsupported;
            return out;
        default:
            out.notes.push_back("lattice is not of any AT type");
            out.regime = Regime::Unsupported;
            return out;
    }
}

GlobalReport validate_global(const ModelConfig& cfg) {
    GlobalReport rep;
    const FieldTower& T = *cfg.tower;
    // Support primes: everything declared plus 2 plus ramified-in-F primes
    // visible from delta and the field discriminant.
    std::set<std::string> vat;
    std::vector<Place> support;
    std::set<std::string> seen;
    auto add_place = [&](const Place& v) {
        if (seen.insert(v.key()).second) support.push_back(v);
    };
    {
        std::set<Int> primes;
        primes.insert(2);
        // discriminant support of f0 and delta's norm
        Rat disc = discriminant(T.f0());
        for (auto& [p, e] : factor_integer(disc.get_num())) primes.insert(p);
        // norm of delta: resultant of f0 and delta
        Rat nd = resultant(T.f0(), T.delta());
        if (nd != 0)
            for (auto& [p, e] : factor_integer(nd.get_num())) primes.insert(p);
        for (const auto& v : cfg.W.finite_exceptions) primes.insert(v.p);
        for (const auto& nu : cfg.u.norms)
            if (!nu.v.archimedean) primes.insert(nu.v.p);
        for (const auto& [k, L] : cfg.lattice_W) (void)k;
        for (const auto& p : primes) {
            try {
                for (const auto& v : T.enumerate_places(p)) add_place(v);
            } catch (const non_maximal_order&) {
                rep.violations.push_back("non-maximal order at p = " + p.get_str());
                rep.ok = false;
            }
        }
    }
    // V_AT^W and assumption checks.
    for (const auto& v : support) {
        SplittingType st;
        try {
            st = T.splitting_in_F(v);
        } catch (const two_adic_nonsplit&) {
            rep.assumption1_ok = false;
            rep.violations.push_back("assumption (1): place over 2 not split: " + v.key());
            continue;
        }
        if (v.p == 2 && st != SplittingType::Split) {
            rep.assumption1_ok = false;
            rep.violations.push_back("assumption (1): 2-adic place not split: " + v.key());
        }
        if (v.e > 1 && st != SplittingType::Split) {
            rep.assumption1_ok = false;
            rep.violations.push_back("assumption (1): ramified-over-Q place not split: " + v.key());
        }
        bool in_vat = (st == SplittingType::Ramified) ||
                      (st == SplittingType::Inert && cfg.W.inv_at(v) == -1);
        if (in_vat) {
            vat.insert(v.key());
            rep.v_AT.push_back(v.key());
            if (!degree_one(v)) {
                rep.assumption2_ok = false;
                rep.violations.push_back("assumption (2): V_AT place not degree one: " + v.key());
            }
            const auto* L = cfg.lattice_at(v, false);
            if (!L) {
                rep.assumption2_ok = false;
                rep.violations.push_back("assumption (2): missing lattice at " + v.key());
            } else {
                ATType t = classify_AT(*L);
                if (t != ATType::AT1 && t != ATType::AT2 && t != ATType::AT3 && t != ATType::AT4) {
                    rep.assumption2_ok = false;
                    rep.violations.push_back("assumption (2): lattice not of AT type at " + v.key());
                }
            }
        } else if (st != SplittingType::Split) {
            // Vertex chain condition: self-dual away from V_AT.
            const auto* L = cfg.lattice_at(v, false);
            if (L) {
                auto t = lattice_type(*L);
                if (!t || *t != 0) {
                    rep.vertex_chain_ok = false;
                    rep.violations.push_back("vertex chain: lattice not self-dual off V_AT at " +
                                             v.key());
                }
            }
        }
        // Flat-lattice prescriptions.
        if (st == SplittingType::Inert) {
            const auto* Lf = cfg.lattice_at(v, true);
            if (Lf) {
                auto t = lattice_type(*Lf);
                if (!t || *t != 0) {
                    rep.flat_lattice_prescription_ok = false;
                    rep.violations.push_back("Lambda^flat not self-dual at inert " + v.key());
                }
            }
        }
        if (st == SplittingType::Ramified) {
            const auto* Lf = cfg.lattice_at(v, true);
            const auto* L = cfg.lattice_at(v, false);
            if (Lf && L) {
                ATType tf = classify_AT(*Lf), tl = classify_AT(*L);
                bool pi_modular_pair =
                    (tf == ATType::AT2 || tf == ATType::AT3) && (tl == ATType::AT2 || tl == ATType::AT3);
                if (!pi_modular_pair || tf == ATType::AT4 || tl == ATType::AT4) {
                    rep.flat_lattice_prescription_ok = false;
                    rep.violations.push_back("(almost-)pi-modular prescription fails at " + v.key());
                }
            }
        }
    }
    // Landherr consistency of the declared spaces.
    auto lw = landherr_check(cfg.W);
    if (!lw.ok) {
        rep.ok = false;
        rep.violations.push_back("W violates the product formula");
    }
    auto lwf = landherr_check(cfg.Wflat);
    if (!lwf.ok) {
        rep.ok = false;
        rep.violations.push_back("W^flat violates the product formula");
    }
    // Congruence when the prescriptions force W^flat split at all finite
    // places (odd n: always under the prescriptions; even n: same for W).
    int d = T.degree();
    if (cfg.n % 2 == 1) {
        bool wflat_split_finite = cfg.Wflat.finite_exceptions.empty();
        rep.congruence_applicable = wflat_split_finite;
        if (wflat_split_finite) {
            int m = (cfg.n - 1) / 2;
            rep.congruence_ok = ((static_cast<long>(d) * m) % 2 == 1);
            if (!rep.congruence_ok)
                rep.violations.push_back(
                    "congruence dm = 1 mod 2 fails (inv_phi(W^flat) = (-1)^(m-1) at phi0, "
                    "(-1)^m elsewhere)");
        }
    } else {
        bool w_split_finite = cfg.W.finite_exceptions.empty();
        rep.congruence_applicable = w_split_finite;
        if (w_split_finite) {
            int m = cfg.n / 2;
            rep.congruence_ok = ((static_cast<long>(d) * m) % 2 == 1);
            if (!rep.congruence_ok) rep.violations.push_back("congruence dm = 1 mod 2 fails");
        }
    }
    // Everywhere-good-reduction recipe.
    {
        bool recipe = rep.assumption1_ok && rep.assumption2_ok && rep.congruence_ok &&
                      rep.flat_lattice_prescription_ok && rep.vertex_chain_ok;
        // Ramified-in-F places must carry the (almost-)pi-modular pair; inert
        // non-split W is excluded for odd n by the recipe.
        if (cfg.n % 2 == 1) {
            for (const auto& v : cfg.W.finite_exceptions) {
                SplittingType st = T.splitting_in_F(v);
                if (st == SplittingType::Inert) {
                    recipe = false;
                    rep.violations.push_back("recipe: W must be split at inert places (odd n)");
                }
            }
            if (!cfg.Wflat.finite_exceptions.empty()) recipe = false;
        } else {
            if (!cfg.W.finite_exceptions.empty()) recipe = false;
        }
        rep.good_reduction_recipe = recipe;
    }
    rep.ok = rep.ok && rep.assumption1_ok && rep.assumption2_ok && rep.vertex_chain_ok &&
             rep.congruence_ok && rep.flat_lattice_prescription_ok;
    return rep;
}

PlanReport plan_report(const ModelConfig& cfg) {
    PlanReport out;
    const FieldTower& T = *cfg.tower;
    for (const auto& p : small_primes(cfg.prime_bound)) {
        std::vector<Place> places;
        try {
            places = T.enumerate_places(p);
        } catch (const non_maximal_order& e) {
            out.notes.push_back(e.what());
            continue;
        }
        for (const auto& v : places) {
            auto itm = cfg.drinfeld_m.find(v.key());
            if (itm != cfg.drinfeld_m.end()) {
                out.verdicts.push_back(validate_drinfeld(cfg, v, itm->second));
                continue;
            }
            SplittingType st;
            try {
                st = T.splitting_in_F(v);
            } catch (const two_adic_nonsplit&) {
                PlaceVerdict pv;
                pv.v = v;
                pv.regime = Regime::Unsupported;
                pv.notes.push_back("2-adic non-split place (standing hypothesis violated)");
                out.verdicts.push_back(pv);
                continue;
            }
            if (st == SplittingType::Split) {
                PlaceVerdict dv = validate_drinfeld(cfg, v, 0);
                if (dv.regime == Regime::Unsupported) {
                    // Split level without Drinfeld structure is still smooth
                    // when the base conditions hold.
                    PlaceVerdict sv = validate_hyperspecial(cfg, v);
                    if (sv.regime != Regime::Unsupported) {
                        sv.regime = Regime::SplitSmooth;
                        sv.notes.insert(sv.notes.end(), dv.notes.begin(), dv.notes.end());
                        out.verdicts.push_back(sv);
                        continue;
                    }
                }
                out.verdicts.push_back(dv);
                continue;
            }
            const auto* L = cfg.lattice_at(v, false);
            if (L && classify_AT(*L) != ATType::Hyperspecial) {
                out.verdicts.push_back(validate_AT(cfg, v));
            } else {
                out.verdicts.push_back(validate_hyperspecial(cfg, v));
            }
        }
    }
    out.global = validate_global(cfg);
    for (const auto& [key, m] : cfg.drinfeld_m)
        if (m > 0) out.N_of_m.emplace_back(key, m);
    out.notes.push_back("Hecke functions with regular support must sit over supp(m)");
    bool any_unsupported = false;
    for (const auto& pv : out.verdicts)
        if (pv.regime == Regime::Unsupported) any_unsupported = true;
    out.exit_code = (any_unsupported || !out.global.ok) ? 2 : 0;
    return out;
}

}  // namespace planner
}  // namespace cmtbx
