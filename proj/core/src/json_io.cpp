#include "cmtbx/json_io.hpp"

#include <fstream>

namespace cmtbx {
namespace io {

namespace {

Rat rat_from_json(const json& v) {
    if (v.is_number_integer()) return Rat(static_cast<long>(v.get<long long>()));
    if (v.is_string()) return rat_from_string(v.get<std::string>());
    throw invalid_argument_error("expected integer or rational string");
}

}  // namespace

QPoly poly_from_json(const json& j) {
    std::vector<Rat> c;
    for (const auto& v : j) c.push_back(rat_from_json(v));
    return QPoly(std::move(c));
}

json poly_to_json(const QPoly& p) {
    json out = json::array();
    for (int i = 0; i <= p.degree(); ++i) out.push_back(p[i].get_str());
    return out;
}

std::shared_ptr<FieldTower> tower_from_json(const json& j) {
    QPoly f0 = poly_from_json(j.at("f0_poly"));
    QPoly delta = poly_from_json(j.at("delta"));
    return std::make_shared<FieldTower>(std::move(f0), std::move(delta));
}

json place_to_json(const Place& v) {
    if (v.archimedean) return json{{"arch", v.root_index}};
    return json{{"p", v.p.get_str()}, {"index", v.factor_index}};
}

Place place_from_json(const json& j, const FieldTower& T) {
    if (j.contains("arch")) {
        Place v;
        v.archimedean = true;
        v.root_index = j.at("arch").get<int>();
        return v;
    }
    Int p(j.at("p").is_string() ? Int(j.at("p").get<std::string>())
                                : Int(static_cast<long>(j.at("p").get<long long>())));
    int idx = j.value("index", 0);
    auto places = T.enumerate_places(p);
    if (idx < 0 || idx >= static_cast<int>(places.size()))
        throw invalid_argument_error("place index out of range");
    return places[idx];
}

json space_to_json(const GlobalHermitianSpace& W) {
    json finite = json::array();
    for (const auto& v : W.finite_exceptions)
        finite.push_back(json{{"place", place_to_json(v)}, {"inv", -1}});
    json arch = json::array();
    for (const auto& [r, s] : W.signatures) arch.push_back(json::array({r, s}));
    return json{{"n", W.n}, {"finite", finite}, {"arch", arch}};
}

GlobalHermitianSpace space_from_json(const json& j, const FieldTower& T) {
    GlobalHermitianSpace W;
    W.n = j.at("n").get<int>();
    if (j.contains("finite"))
        for (const auto& e : j.at("finite")) {
            int inv = e.value("inv", 1);
            if (inv == -1) W.finite_exceptions.push_back(place_from_json(e.at("place"), T));
        }
    if (j.contains("arch"))
        for (const auto& rs : j.at("arch"))
            W.signatures.emplace_back(rs.at(0).get<int>(), rs.at(1).get<int>());
    return W;
}

json lattice_to_json(const Place& v, const JordanLattice& L) {
    json blocks = json::array();
    for (const auto& b : L.blocks) blocks.push_back(json::array({b.scale, b.rank, b.det_class}));
    return json{{"place", place_to_json(v)}, {"blocks", blocks}};
}

JordanLattice lattice_from_json(const json& j, const FieldTower& T, Place* v_out) {
    Place v = place_from_json(j.at("place"), T);
    if (v_out) *v_out = v;
    LatticeCtx ctx;
    ctx.st = T.splitting_in_F(v);
    if (ctx.st == SplittingType::Ramified) {
        ctx.chi_minus_one = T.chi_minus_one(v);
        ctx.eta_uniformizer = T.eta_uniformizer(v);
    }
    std::vector<JordanBlock> blocks;
    for (const auto& b : j.at("blocks"))
        blocks.push_back({b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>()});
    return JordanLattice::make(ctx, std::move(blocks));
}

json laurent_to_json(const LaurentValue& L) {
    json terms = json::array();
    for (const auto& [k, c] : L.terms()) terms.push_back(json{{"k", k}, {"c", c.get_str()}});
    return json{{"q", L.q().get_str()}, {"terms", terms}};
}

LaurentValue laurent_from_json(const json& j) {
    LaurentValue L(Int(j.at("q").is_string() ? Int(j.at("q").get<std::string>())
                                             : Int(static_cast<long>(j.at("q").get<long long>()))));
    for (const auto& t : j.at("terms")) L.add_term(t.at("k").get<int>(), rat_from_json(t.at("c")));
    return L;
}

NFMat mat_from_json(const json& j, const CMFieldData& Fd) {
    int n = static_cast<int>(j.size());
    NFMat m(Fd.F.get(), n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(j.at(i).size()) != n)
            throw invalid_argument_error("matrix rows must have equal length");
        for (int k = 0; k < n; ++k) {
            const auto& e = j.at(i).at(k);
            if (e.is_array()) {
                m.at(i, k) = NFElem(Fd.F.get(), poly_from_json(e));
            } else {
                m.at(i, k) = NFElem(Fd.F.get(), QPoly(rat_from_json(e)));
            }
        }
    }
    return m;
}

json mat_to_json(const NFMat& m) {
    json out = json::array();
    for (int i = 0; i < m.n; ++i) {
        json row = json::array();
        for (int k = 0; k < m.n; ++k) row.push_back(poly_to_json(m.at(i, k).v));
        out.push_back(row);
    }
    return out;
}

OrbitTable orbit_table_from_json(const json& orbits, const json& place_values) {
    OrbitTable T;
    for (const auto& v : place_values.at("places")) T.place_keys.push_back(v.get<std::string>());
    T.regular_place = place_values.value("regular_place", std::string());
    for (const auto& row : orbits.at("orbits")) {
        OrbitTable::Row r;
        r.orbit_name = row.value("name", std::string("orbit"));
        if (row.contains("orb"))
            for (auto it = row.at("orb").begin(); it != row.at("orb").end(); ++it)
                r.orb[it.key()] = rat_from_json(it.value());
        if (row.contains("dorb"))
            for (auto it = row.at("dorb").begin(); it != row.at("dorb").end(); ++it)
                r.dorb[it.key()] = rat_from_json(it.value());
        T.rows.push_back(std::move(r));
    }
    return T;
}

planner::ModelConfig config_from_json(const json& j) {
    planner::ModelConfig cfg;
    cfg.tower = tower_from_json(j.at("tower"));
    cfg.n = j.at("n").get<int>();
    cfg.W = space_from_json(j.at("W"), *cfg.tower);
    if (j.contains("u")) {
        cfg.u.totally_negative = j.at("u").value("totally_negative", true);
        if (j.at("u").contains("norms"))
            for (const auto& e : j.at("u").at("norms")) {
                SpecialVector::LocalNorm nu;
                nu.v = place_from_json(e.at("place"), *cfg.tower);
                nu.ord = e.value("ord", 0);
                nu.eta = e.value("eta", 1);
                cfg.u.norms.push_back(nu);
            }
    }
    // eta(-1) data for the orthocomplement at ramified places.
    std::map<std::string, int> em1;
    for (const auto& nu : cfg.u.norms) {
        if (nu.v.archimedean || nu.v.p == 2) continue;
        try {
            if (cfg.tower->splitting_in_F(nu.v) == SplittingType::Ramified)
                em1[nu.v.key()] = cfg.tower->chi_minus_one(nu.v);
        } catch (const error&) {
        }
    }
    for (const auto& v : cfg.W.finite_exceptions) {
        if (v.p == 2) continue;
        try {
            if (cfg.tower->splitting_in_F(v) == SplittingType::Ramified)
                em1[v.key()] = cfg.tower->chi_minus_one(v);
        } catch (const error&) {
        }
    }
    if (j.contains("Wflat")) cfg.Wflat = space_from_json(j.at("Wflat"), *cfg.tower);
    else cfg.Wflat = orthocomplement(cfg.W, cfg.u, em1);
    if (j.contains("lattices"))
        for (const auto& e : j.at("lattices")) {
            Place v;
            auto L = lattice_from_json(e, *cfg.tower, &v);
            cfg.lattice_W.emplace(v.key(), std::move(L));
        }
    if (j.contains("lattices_flat"))
        for (const auto& e : j.at("lattices_flat")) {
            Place v;
            auto L = lattice_from_json(e, *cfg.tower, &v);
            cfg.lattice_Wflat.emplace(v.key(), std::move(L));
        }
    if (j.contains("m"))
        for (const auto& e : j.at("m")) {
            Place v = place_from_json(e.at("place"), *cfg.tower);
            cfg.drinfeld_m[v.key()] = e.at("m").get<int>();
        }
    cfg.prime_bound = j.value("prime_bound", 100L);
    cfg.phi0 = j.value("phi0", 0);
    bool need_model = j.value("build_embedding_model", false);
    for (const auto& [k, m] : cfg.drinfeld_m) (void)k;
    if (need_model || !cfg.drinfeld_m.empty()) {
        cfg.model = std::make_shared<EmbeddingModel>(*cfg.tower);
        if (j.contains("phi")) {
            CMType Phi;
            for (const auto& l : j.at("phi")) Phi.labels.push_back(l.get<int>());
            std::sort(Phi.labels.begin(), Phi.labels.end());
            cfg.Phi = Phi;
        } else {
            cfg.Phi = cfg.model->default_cm_type();
        }
        if (!cfg.Phi.contains(cfg.phi0) && !cfg.Phi.labels.empty()) cfg.phi0 = cfg.Phi.labels[0];
    }
    return cfg;
}

json verdict_to_json(const planner::PlaceVerdict& pv) {
    json out{{"place", place_to_json(pv.v)},
             {"regime", planner::regime_name(pv.regime)},
             {"embedding_defined", pv.embedding_defined}};
    if (!pv.notes.empty()) out["notes"] = pv.notes;
    if (!pv.conditional.empty()) out["conditional"] = pv.conditional;
    return out;
}

json plan_report_to_json(const planner::PlanReport& rep) {
    json verdicts = json::array();
    for (const auto& pv : rep.verdicts) verdicts.push_back(verdict_to_json(pv));
    json nm = json::array();
    for (const auto& [k, e] : rep.N_of_m) nm.push_back(json{{"place", k}, {"exponent", e}});
    json global{{"ok", rep.global.ok},
                {"V_AT", rep.global.v_AT},
                {"assumption1_ok", rep.global.assumption1_ok},
                {"assumption2_ok", rep.global.assumption2_ok},
                {"vertex_chain_ok", rep.global.vertex_chain_ok},
                {"flat_lattice_prescription_ok", rep.global.flat_lattice_prescription_ok},
                {"congruence_applicable", rep.global.congruence_applicable},
                {"congruence_ok", rep.global.congruence_ok},
                {"good_reduction_recipe", rep.global.good_reduction_recipe},
                {"violations", rep.global.violations}};
    return json{{"verdicts", verdicts},
                {"global", global},
                {"N_of_m", nm},
                {"notes", rep.notes},
                {"exit_code", rep.exit_code}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_argument_error("ParseError: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw invalid_argument_error(std::string("ParseError: ") + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

}  // namespace io
}  // namespace cmtbx
