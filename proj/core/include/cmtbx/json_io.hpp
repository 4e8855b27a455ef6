#ifndef CMTBX_JSON_IO_HPP
#define CMTBX_JSON_IO_HPP

#include "cmtbx/laurent.hpp"
#include "cmtbx/orbits.hpp"
#include "cmtbx/planner.hpp"

#include <json.hpp>

namespace cmtbx {
namespace io {

using json = nlohmann::json;

// Field specs: {"f0_poly": [c0,...,1], "delta": [d0,...]} with integer or
// rational-string coefficients.
QPoly poly_from_json(const json& j);
json poly_to_json(const QPoly& p);
std::shared_ptr<FieldTower> tower_from_json(const json& j);

json place_to_json(const Place& v);
Place place_from_json(const json& j, const FieldTower& T);

// Spaces: {"n": int, "finite": [{"place": ..., "inv": +-1}], "arch": [[r,s],...]}.
json space_to_json(const GlobalHermitianSpace& W);
GlobalHermitianSpace space_from_json(const json& j, const FieldTower& T);

// Lattices: {"place": ..., "blocks": [[scale, rank, det], ...]}.
json lattice_to_json(const Place& v, const JordanLattice& L);
JordanLattice lattice_from_json(const json& j, const FieldTower& T, Place* v_out);

// Laurent values: {"q": 3, "terms": [{"k": -1, "c": "2/1"}, ...]}.
json laurent_to_json(const LaurentValue& L);
LaurentValue laurent_from_json(const json& j);

// Matrices over F for the orb CLI: entries as strings "a+b*y" or
// [["1","0"],["0","1"]] with entry = [c0,c1,...] in the generator.
NFMat mat_from_json(const json& j, const CMFieldData& Fd);
json mat_to_json(const NFMat& m);

OrbitTable orbit_table_from_json(const json& orbits, const json& place_values);

planner::ModelConfig config_from_json(const json& j);
json verdict_to_json(const planner::PlaceVerdict& pv);
json plan_report_to_json(const planner::PlanReport& rep);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace io
}  // namespace cmtbx

#endif
