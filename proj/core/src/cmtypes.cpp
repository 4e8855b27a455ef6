#include "cmtbx/cmtypes.hpp"

#include <algorithm>
#include <set>

namespace cmtbx {

bool CMType::contains(int l) const {
    return std::binary_search(labels.begin(), labels.end(), l);
}

namespace {

// Minimal polynomial of theta = sqrt(delta) + c*x over Q via the resultant
// Res_x(f0(x), (y - c x)^2 - delta(x)), computed by evaluation/interpolation.
QPoly theta_min_poly(const QPoly& f0, const QPoly& delta, long c) {
    int D = 2 * f0.degree();
    auto eval_at = [&](const Rat& y0) {
        // g(x) = (y0 - c x)^2 - delta(x)
        QPoly lin(std::vector<Rat>{y0, Rat(-c)});
        QPoly g = lin * lin - delta;
        return resultant(f0, g);
    };
    std::vector<Rat> xs(D + 1), ys(D + 1);
    for (int i = 0; i <= D; ++i) {
        xs[i] = Rat(i);
        ys[i] = eval_at(xs[i]);
    }
    QPoly result;
    for (int i = 0; i <= D; ++i) {
        QPoly li(Rat(1));
        Rat denom(1);
        for (int j = 0; j <= D; ++j) {
            if (j == i) continue;
            li = li * QPoly(std::vector<Rat>{-xs[j], Rat(1)});
            denom *= xs[i] - xs[j];
        }
        result = result + li * (ys[i] / denom);
    }
    return result.monic();
}

}  // namespace

EmbeddingModel::EmbeddingModel(const FieldTower& tower, int degree_cap) : tower_(&tower) {
    const QPoly& f0 = tower.f0();
    const QPoly& delta = tower.delta();
    // Find a shift making theta = sqrt(delta) + c*x a primitive element.
    for (long c = 0;; ++c) {
        if (c > 50) throw error("EmbeddingModel: no primitive shift found");
        QPoly N = theta_min_poly(f0, delta, c);
        if (N.degree() != 2 * f0.degree()) continue;
        if (gcd_poly(N, N.derivative()).degree() != 0) continue;
        fF_ = N;
        shift_c_ = c;
        break;
    }
    // X = image of the F0 generator inside F = Q[y]/(fF): the unique common
    // root of f0(x) and (ybar - c x)^2 - delta(x) over F.
    auto Ffield = std::make_shared<NumberField>(fF_);
    {
        const NumberField* F = Ffield.get();
        NFElem ybar = NFElem::gen(F);
        NFPoly f0_F = NFPoly::from_qpoly(F, f0);
        // g(x) = (ybar - c x)^2 - delta(x) with coefficients in F.
        NFPoly lin(F, {ybar, NFElem::from_rat(F, Rat(-shift_c_))});
        NFPoly g = lin * lin - NFPoly::from_qpoly(F, delta);
        NFPoly h = gcd_poly(f0_F, g);
        if (h.degree() != 1) throw error("EmbeddingModel: generator recovery failed");
        NFElem X = -(h.coeff(0) * h.coeff(1).inverse());
        X_ = X.v;
    }
    split_ = splitting_field(fF_, degree_cap);
    int m = num_embeddings();
    if (static_cast<int>(split_.roots.size()) != m)
        throw error("EmbeddingModel: root count mismatch");
    // Restriction: alpha_j = X(r_j); group labels by equal alpha.
    const NumberField* N = split_.N.get();
    std::vector<NFElem> alphas;
    for (int j = 0; j < m; ++j) {
        NFElem a = NFElem::from_rat(N, Rat(0));
        for (int k = X_.degree(); k >= 0; --k) a = a * split_.roots[j] + NFElem::from_rat(N, X_[k]);
        alphas.push_back(a);
    }
    std::vector<QPoly> cls;  // distinct alpha values, lex order by coefficients
    for (const auto& a : alphas) {
        bool seen = false;
        for (const auto& c : cls)
            if (c == a.v) { seen = true; break; }
        if (!seen) cls.push_back(a.v);
    }
    std::sort(cls.begin(), cls.end(), [](const QPoly& a, const QPoly& b) {
        return a.coeffs() < b.coeffs();
    });
    if (static_cast<int>(cls.size()) != d())
        throw error("EmbeddingModel: restriction classes != d");
    restr_.assign(m, -1);
    conj_.assign(m, -1);
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < d(); ++k)
            if (cls[k] == alphas[j].v) { restr_[j] = k; break; }
    }
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) {
            if (k == j) continue;
            if (alphas[k].v == alphas[j].v) { conj_[j] = k; break; }
        }
        if (conj_[j] < 0) throw error("EmbeddingModel: conjugation pairing failed");
    }
}

std::pair<int, int> EmbeddingModel::labels_over_arch(int root_index) const {
    int a = -1, b = -1;
    for (int j = 0; j < num_embeddings(); ++j)
        if (restr_[j] == root_index) (a < 0 ? a : b) = j;
    if (a < 0 || b < 0) throw invalid_argument_error("labels_over_arch: bad index");
    return {a, b};
}

CMType EmbeddingModel::default_cm_type() const {
    CMType Phi;
    for (int j = 0; j < num_embeddings(); ++j)
        if (j < conj_[j]) Phi.labels.push_back(j);
    return Phi;
}

CMType EmbeddingModel::conjugate_type(const CMType& Phi) const {
    CMType out;
    for (int l : Phi.labels) out.labels.push_back(conj_[l]);
    std::sort(out.labels.begin(), out.labels.end());
    return out;
}

bool EmbeddingModel::is_cm_type(const CMType& Phi) const {
    if (static_cast<int>(Phi.labels.size()) != d()) return false;
    std::set<int> seen(Phi.labels.begin(), Phi.labels.end());
    if (static_cast<int>(seen.size()) != d()) return false;
    for (int l : Phi.labels)
        if (seen.count(conj_[l])) return false;
    return true;
}

std::vector<CMType> EmbeddingModel::all_cm_types() const {
    std::vector<int> reps;
    for (int j = 0; j < num_embeddings(); ++j)
        if (j < conj_[j]) reps.push_back(j);
    std::vector<CMType> out;
    for (unsigned mask = 0; mask < (1u << reps.size()); ++mask) {
        CMType Phi;
        for (size_t i = 0; i < reps.size(); ++i)
            Phi.labels.push_back((mask >> i) & 1 ? conj_[reps[i]] : reps[i]);
        std::sort(Phi.labels.begin(), Phi.labels.end());
        out.push_back(std::move(Phi));
    }
    return out;
}

CMType EmbeddingModel::apply_group(int g, const CMType& Phi) const {
    CMType out;
    for (int l : Phi.labels) out.labels.push_back(split_.perms[g][l]);
    std::sort(out.labels.begin(), out.labels.end());
    return out;
}

SignatureFunction EmbeddingModel::default_r(const CMType& Phi, int phi0, int n) const {
    if (!Phi.contains(phi0)) throw phi0_not_in_phi("phi0 must lie in Phi");
    SignatureFunction sf;
    sf.phi0 = phi0;
    sf.r.assign(num_embeddings(), -1);
    for (int l : Phi.labels) sf.r[l] = (l == phi0) ? 1 : 0;
    for (int j = 0; j < num_embeddings(); ++j)
        if (sf.r[j] < 0) sf.r[j] = n - sf.r[conj_[j]];
    return sf;
}

EmbeddingModel::ReflexResult EmbeddingModel::reflex_degree(const CMType& Phi,
                                                           const SignatureFunction& r,
                                                           ReflexSemantics semantics) const {
    ReflexResult out;
    for (int g = 0; g < group_order(); ++g) {
        const auto& pm = split_.perms[g];
        // sigma o Phi = Phi?
        bool ok = true;
        for (int l : Phi.labels)
            if (!Phi.contains(pm[l])) { ok = false; break; }
        if (!ok) continue;
        if (semantics == ReflexSemantics::DefE) {
            if (pm[r.phi0] != r.phi0) continue;
        } else {
            for (int l : Phi.labels)
                if (r.r[pm[l]] != r.r[l]) { ok = false; break; }
            if (!ok) continue;
        }
        out.stabilizer.push_back(g);
    }
    if (out.stabilizer.empty()) throw error("reflex_degree: empty stabilizer (impossible)");
    out.degree = group_order() / static_cast<long>(out.stabilizer.size());
    return out;
}

namespace {

struct ModpLabeling {
    Fq K;                       // F_p[z]/(m0bar)
    std::vector<Fq::E> taus;    // all roots of Mbar in K (one per labeling)
    ModpLabeling(Fq k, std::vector<Fq::E> t) : K(std::move(k)), taus(std::move(t)) {}
};

ModpLabeling build_labeling(const SplittingField& split, const Int& p) {
    const QPoly& M = split.N->minpoly();
    for (int i = 0; i <= M.degree(); ++i)
        if (p_valuation(Int(M[i].get_den()), p) != 0 && M[i].get_den() != 1)
            throw unsupported("place_partition: splitting-field polynomial has p in denominators");
    modp::P Mbar = modp_from_qpoly(M, p);
    if (modp::deg(Mbar) != M.degree())
        throw unsupported("place_partition: degree loss mod p");
    if (modp::deg(modp::gcd(Mbar, modp::deriv(Mbar, p), p)) > 0)
        throw unsupported("place_partition: p ramifies in the splitting field (or divides the index)");
    auto fac = modp::factor_squarefree_mod_p(Mbar, p);
    Fq K(p, fac[0]);
    std::vector<Fq::E> taus = K.roots_of(Mbar);
    if (static_cast<int>(taus.size()) != M.degree())
        throw unsupported("place_partition: residue field does not split the polynomial");
    std::sort(taus.begin(), taus.end());
    return ModpLabeling(std::move(K), std::move(taus));
}

}  // namespace

EmbeddingModel::PlacePartition EmbeddingModel::place_partition(const Int& p, int precision) const {
    auto all = all_place_partitions(p, precision);
    return all.front();
}

std::vector<EmbeddingModel::PlacePartition> EmbeddingModel::all_place_partitions(
    const Int& p, int precision) const {
    (void)precision;
    ModpLabeling lab = build_labeling(split_, p);
    const Fq& K = lab.K;
    // f_F mod p must be squarefree (p unramified in F and prime to the index).
    modp::P fFbar = modp_from_qpoly(fF_, p);
    if (modp::deg(modp::gcd(fFbar, modp::deriv(fFbar, p), p)) > 0)
        throw unsupported("place_partition: f_F not squarefree mod p");
    auto wfactors = modp::factor_squarefree_mod_p(fFbar, p);
    auto places_v = tower_->enumerate_places(p);
    modp::P f0bar = modp_from_qpoly(tower_->f0(), p);
    auto vfactors = modp::factor_squarefree_mod_p(f0bar, p);
    // fields sorts with multiplicities; unramified here means multiplicity 1,
    // and factor_squarefree_mod_p sorts the same way.
    if (vfactors.size() != places_v.size())
        throw unsupported("place_partition: F0 factor mismatch (p ramified in F0?)");

    std::vector<PlacePartition> out;
    for (size_t li = 0; li < lab.taus.size(); ++li) {
        const Fq::E& tau = lab.taus[li];
        // Reduce each root and the restriction values.
        std::vector<Fq::E> rbar(num_embeddings()), abar(num_embeddings());
        for (int j = 0; j < num_embeddings(); ++j) {
            // roots are Q-polynomials in the generator; p must not divide denominators.
            modp::P rp;
            {
                const QPoly& rj = split_.roots[j].v;
                rp = modp_from_qpoly(rj, p);
            }
            rbar[j] = K.eval_poly(rp, tau);
            modp::P Xp = modp_from_qpoly(X_, p);
            // alpha_j = X(r_j): evaluate X at rbar[j] in F_q.
            Fq::E a = K.zero();
            for (auto it = Xp.rbegin(); it != Xp.rend(); ++it) {
                a = K.mul(a, rbar[j]);
                a = K.add(a, K.from_int(*it));
            }
            abar[j] = a;
        }
        PlacePartition pp;
        pp.p = p;
        pp.labeling_index = static_cast<int>(li);
        for (size_t w = 0; w < wfactors.size(); ++w) {
            std::vector<int> block;
            for (int j = 0; j < num_embeddings(); ++j)
                if (K.is_zero(K.eval_poly(wfactors[w], rbar[j]))) block.push_back(j);
            if (static_cast<int>(block.size()) != modp::deg(wfactors[w]))
                throw error("place_partition: block size mismatch");
            // F0-place: the f0-factor annihilating alpha of any block member.
            int v_index = -1;
            for (size_t v = 0; v < vfactors.size(); ++v)
                if (K.is_zero(K.eval_poly(vfactors[v], abar[block[0]]))) {
                    v_index = static_cast<int>(v);
                    break;
                }
            if (v_index < 0) throw error("place_partition: F0 place not found");
            pp.blocks.push_back(std::move(block));
            pp.f0_place_of_block.push_back(places_v[v_index]);
            pp.splitting_of_block.push_back(tower_->splitting_in_F(places_v[v_index]));
        }
        out.push_back(std::move(pp));
    }
    return out;
}

bool EmbeddingModel::matching_condition(const PlacePartition& pp, int block_index,
                                        const CMType& Phi) {
    if (block_index < 0 || block_index >= static_cast<int>(pp.blocks.size()))
        throw invalid_argument_error("matching_condition: bad block index");
    if (pp.splitting_of_block[block_index] != SplittingType::Split)
        throw non_split_place("matching condition needs a block over a split place");
    for (int l : pp.blocks[block_index])
        if (!Phi.contains(l)) return false;
    return true;
}

std::vector<Place> EmbeddingModel::sigma_spl_phi(const CMType& Phi, long bound, int phi0) const {
    std::vector<Place> out;
    int phi0_default = (phi0 >= 0) ? phi0 : (Phi.labels.empty() ? 0 : Phi.labels.front());
    if (!Phi.contains(phi0_default)) throw phi0_not_in_phi("sigma_spl_phi: phi0 not in Phi");
    for (const Int& p : small_primes(bound)) {
        std::vector<PlacePartition> pps;
        try {
            pps = all_place_partitions(p);
        } catch (const unsupported&) {
            continue;  // outside the supported partition regime; skipped
        } catch (const non_maximal_order&) {
            continue;
        } catch (const two_adic_nonsplit&) {
            continue;
        }
        // For each split place v over p: require that every labeling whose
        // phi0-block sits over v has that block inside Phi.
        auto places_v = tower_->enumerate_places(p);
        for (const auto& v : places_v) {
            SplittingType st;
            try {
                st = tower_->splitting_in_F(v);
            } catch (const two_adic_nonsplit&) {
                continue;
            }
            if (st != SplittingType::Split) continue;
            bool good = true;
            for (const auto& pp : pps) {
                for (size_t b = 0; b < pp.blocks.size(); ++b) {
                    const auto& blk = pp.blocks[b];
                    if (std::find(blk.begin(), blk.end(), phi0_default) == blk.end()) continue;
                    if (!(pp.f0_place_of_block[b] == v)) continue;
                    if (!matching_condition(pp, static_cast<int>(b), Phi)) good = false;
                }
                if (!good) break;
            }
            if (good) out.push_back(v);
        }
    }
    return out;
}

bool EmbeddingModel::is_banal(const SignatureFunction& r, const std::vector<int>& block, int n) {
    for (int l : block)
        if (r.r[l] != 0 && r.r[l] != n) return false;
    return true;
}

}  // namespace cmtbx
