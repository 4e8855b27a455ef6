#ifndef CMTBX_CMTYPES_HPP
#define CMTBX_CMTYPES_HPP

#include "cmtbx/fields.hpp"
#include "cmtbx/numberfield.hpp"

namespace cmtbx {

struct phi0_not_in_phi : error {
    explicit phi0_not_in_phi(const std::string& m) : error("phi0NotInPhi: " + m) {}
};
struct non_split_place : error {
    explicit non_split_place(const std::string& m) : error("NonSplitPlace: " + m) {}
};
struct not_half_system : error {
    explicit not_half_system(const std::string& m) : error("NotHalfSystem: " + m) {}
};

// A CM type: one embedding label from each conjugate pair.
struct CMType {
    std::vector<int> labels;  // sorted
    bool contains(int l) const;
};

// Signature function r on all embedding labels, with distinguished phi0.
struct SignatureFunction {
    std::vector<int> r;
    int phi0 = 0;
};

// Exact model of Hom(F, Qbar) for F = F0(sqrt(delta)): 2d labeled embeddings
// realized as roots of a defining polynomial of F inside its splitting field,
// with the conjugation involution, the restriction to archimedean places of
// F0, and the Galois action on labels.
class EmbeddingModel {
  public:
    explicit EmbeddingModel(const FieldTower& tower, int degree_cap = 40320);

    const FieldTower& tower() const { return *tower_; }
    int d() const { return tower_->degree(); }
    int num_embeddings() const { return 2 * d(); }
    int conj(int label) const { return conj_.at(label); }
    // Index of the archimedean place of F0 under the label (Sturm order).
    int restriction(int label) const { return restr_.at(label); }
    std::pair<int, int> labels_over_arch(int root_index) const;

    const QPoly& fF() const { return fF_; }
    const SplittingField& splitting() const { return split_; }
    int group_order() const { return static_cast<int>(split_.perms.size()); }
    const std::vector<int>& perm(int g) const { return split_.perms.at(g); }

    CMType default_cm_type() const;
    CMType conjugate_type(const CMType& Phi) const;
    bool is_cm_type(const CMType& Phi) const;
    std::vector<CMType> all_cm_types() const;
    CMType apply_group(int g, const CMType& Phi) const;

    SignatureFunction default_r(const CMType& Phi, int phi0, int n) const;

    enum class ReflexSemantics { DefE, GenE };
    struct ReflexResult {
        long degree;                    // [E : Q]
        std::vector<int> stabilizer;    // group element indices
    };
    ReflexResult reflex_degree(const CMType& Phi, const SignatureFunction& r,
                               ReflexSemantics semantics) const;

    struct PlacePartition {
        Int p;
        // One block per place w of F above p: the labels phi with w_phi = w.
        std::vector<std::vector<int>> blocks;
        std::vector<Place> f0_place_of_block;
        std::vector<SplittingType> splitting_of_block;
        int labeling_index = 0;  // which Galois-conjugate labeling produced it
    };
    // The partition for the canonical labeling (index 0).
    PlacePartition place_partition(const Int& p, int precision = 20) const;
    // Partitions for every Galois-conjugate labeling (one per root choice).
    std::vector<PlacePartition> all_place_partitions(const Int& p, int precision = 20) const;

    // Matching condition at the block of w0 (its F0-place must be split).
    static bool matching_condition(const PlacePartition& pp, int block_index, const CMType& Phi);

    // Split places v <= bound such that every place of E above v matches Phi.
    // phi0 = -1 uses the least element of Phi.
    std::vector<Place> sigma_spl_phi(const CMType& Phi, long bound, int phi0 = -1) const;

    static bool is_banal(const SignatureFunction& r, const std::vector<int>& block, int n);

  private:
    const FieldTower* tower_;
    QPoly fF_;
    long shift_c_ = 0;   // theta = sqrt(delta) + c * x
    QPoly X_;            // expression of the F0 generator in F = Q[y]/(fF)
    SplittingField split_;
    std::vector<int> conj_, restr_;
};

}  // namespace cmtbx

#endif
