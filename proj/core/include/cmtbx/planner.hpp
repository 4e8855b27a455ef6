#ifndef CMTBX_PLANNER_HPP
#define CMTBX_PLANNER_HPP

#include "cmtbx/cmtypes.hpp"
#include "cmtbx/hermitian.hpp"

namespace cmtbx {
namespace planner {

enum class Regime {
    HyperspecialSmooth,
    SplitSmooth,
    DrinfeldRegular,
    AT1SemiStable,
    AT2Smooth,
    AT3Smooth,
    AT4Excluded,
    Unsupported
};
std::string regime_name(Regime r);

struct PlaceVerdict {
    Place v;
    Regime regime = Regime::Unsupported;
    std::vector<std::string> notes;
    bool embedding_defined = false;  // the morphism from the H-model is defined naively
    std::string conditional;         // unresolved proviso, e.g. E_nu unramified
};

struct ModelConfig {
    std::shared_ptr<FieldTower> tower;
    std::shared_ptr<EmbeddingModel> model;  // may be null; built on demand
    int n = 2;
    GlobalHermitianSpace W, Wflat;
    SpecialVector u;
    std::map<std::string, JordanLattice> lattice_W;      // by place key, non-split places
    std::map<std::string, JordanLattice> lattice_Wflat;  // dimension n-1
    CMType Phi;
    int phi0 = 0;
    std::map<std::string, int> drinfeld_m;  // place key -> m(v) >= 1
    long prime_bound = 100;

    const EmbeddingModel& embedding_model() const;
    LatticeCtx lattice_ctx(const Place& v) const;
    const JordanLattice* lattice_at(const Place& v, bool flat) const;
};

PlaceVerdict validate_hyperspecial(const ModelConfig& cfg, const Place& v0);
PlaceVerdict validate_drinfeld(const ModelConfig& cfg, const Place& v0, int m);
PlaceVerdict validate_AT(const ModelConfig& cfg, const Place& v0);

struct GlobalReport {
    bool ok = true;
    std::vector<std::string> v_AT;  // place keys of V_AT^W
    bool assumption1_ok = true, assumption2_ok = true;
    bool vertex_chain_ok = true;
    bool flat_lattice_prescription_ok = true;
    bool congruence_ok = true;         // dm = 1 mod 2 when forced
    bool congruence_applicable = false;
    bool good_reduction_recipe = false;  // Remark-level everywhere-good-reduction
    std::vector<std::string> violations;
};

GlobalReport validate_global(const ModelConfig& cfg);

struct PlanReport {
    std::vector<PlaceVerdict> verdicts;
    GlobalReport global;
    std::vector<std::pair<std::string, int>> N_of_m;  // place key -> exponent
    std::vector<std::string> notes;
    int exit_code = 0;  // 0 all supported, 2 violations, 1 parse/internal
};

PlanReport plan_report(const ModelConfig& cfg);

}  // namespace planner
}  // namespace cmtbx

#endif
