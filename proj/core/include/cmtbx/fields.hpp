#ifndef CMTBX_FIELDS_HPP
#define CMTBX_FIELDS_HPP

#include "cmtbx/padic.hpp"

#include <map>
#include <memory>

namespace cmtbx {

enum class SplittingType { Split, Inert, Ramified };

struct Place {
    bool archimedean = false;
    Int p = 0;            // finite: rational prime below
    int factor_index = 0; // finite: ordinal of the p-adic factor (deterministic order)
    int e = 1, f = 1;     // over Q
    int root_index = -1;  // archimedean: index of the real root of f0_poly

    std::string key() const;
    bool operator==(const Place& o) const {
        return archimedean == o.archimedean && p == o.p && factor_index == o.factor_index &&
               root_index == o.root_index;
    }
    bool operator<(const Place& o) const { return key() < o.key(); }
};

struct non_maximal_order : error {
    explicit non_maximal_order(const std::string& m) : error("NonMaximalOrder: " + m) {}
};
struct not_totally_real : error {
    explicit not_totally_real(const std::string& m) : error("NotTotallyReal: " + m) {}
};
struct not_totally_negative : error {
    explicit not_totally_negative(const std::string& m) : error("NotTotallyNegative: " + m) {}
};
struct two_adic_nonsplit : error {
    explicit two_adic_nonsplit(const std::string& m) : error("TwoAdicNonSplit: " + m) {}
};
struct zero_argument : error {
    explicit zero_argument(const std::string& m) : error("ZeroArgument: " + m) {}
};

// The tower F/F_0/Q: F_0 = Q[x]/(f0_poly) totally real, F = F_0(sqrt(delta))
// with delta totally negative. All per-place arithmetic is exact; p-adic
// precision starts at `initial_precision` and escalates on demand.
class FieldTower {
  public:
    FieldTower(QPoly f0_poly, QPoly delta, int initial_precision = 20);

    int degree() const { return f0_.degree(); }  // d
    const QPoly& f0() const { return f0_; }
    const QPoly& delta() const { return delta_; }
    bool delta_is_rational() const { return delta_.degree() <= 0; }

    // Finite places above p, ordered by factor index. Requires Z[x]/(f0)
    // maximal at p (Dedekind's criterion); throws non_maximal_order otherwise.
    std::vector<Place> enumerate_places(const Int& p) const;
    std::vector<Place> archimedean_places() const;
    const std::vector<RealRootInterval>& real_roots() const { return real_roots_; }

    SplittingType splitting_in_F(const Place& v) const;

    // Quadratic character of F/F_0 at v: +1 iff x is a local norm from F_v.
    int eta(const Place& v, const QPoly& x) const;
    int eta(const Place& v, const Rat& x) const { return eta(v, QPoly(x)); }

    // Local data at finite v (exact): valuation of x in F_{0,v} and the
    // quadratic-residue character of the unit part (odd residue char only).
    Int residue_card(const Place& v) const;  // q_v = p^f
    long val(const Place& v, const QPoly& x) const;
    int chi_unit(const Place& v, const QPoly& x) const;
    int chi_minus_one(const Place& v) const;
    // For v ramified in F: the character value eta_v(varpi_v), i.e.
    // chi(-delta_unit) in the fixed uniformizer normalization.
    int eta_uniformizer(const Place& v) const;

    // Exact sign of x at the real root of f0 with the given index.
    int sign_at(int root_index, const QPoly& x) const;

    // All finite places of residue characteristic <= bound (p-maximal ones);
    // throws if some p <= bound is non-maximal.
    std::vector<Place> finite_places_up_to(long bound) const;

  private:
    struct CompletionBase;
    struct UnramComp;
    struct RamQuadComp;

    const CompletionBase& completion(const Place& v) const;

    QPoly f0_, delta_;
    int prec0_;
    std::vector<RealRootInterval> real_roots_;
    mutable std::map<std::string, std::shared_ptr<CompletionBase>> completions_;
    mutable std::map<std::string, std::vector<Place>> place_cache_;
};

}  // namespace cmtbx

#endif
