#ifndef CMTBX_LAURENT_HPP
#define CMTBX_LAURENT_HPP

#include "cmtbx/basic.hpp"

#include <map>

namespace cmtbx {

// Finite Laurent polynomial in X = q^{-s} with rational coefficients. The
// derivative at s = 0 is (-sum k c_k) * log q; only the rational coefficient
// of log q is ever materialized.
class LaurentValue {
  public:
    LaurentValue() = default;
    explicit LaurentValue(Int q) : q_(std::move(q)) {}

    const Int& q() const { return q_; }
    const std::map<int, Rat>& terms() const { return terms_; }

    void add_term(int k, const Rat& c) {
        if (c == 0) return;
        auto it = terms_.find(k);
        if (it == terms_.end()) terms_[k] = c;
        else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    LaurentValue operator+(const LaurentValue& o) const {
        LaurentValue r(*this);
        for (const auto& [k, c] : o.terms_) r.add_term(k, c);
        return r;
    }

    bool operator==(const LaurentValue& o) const { return q_ == o.q_ && terms_ == o.terms_; }

    Rat value_at_0() const {
        Rat s(0);
        for (const auto& [k, c] : terms_) s += c;
        return s;
    }

    // d/ds at s=0 divided by log q.
    Rat dlog_coeff() const {
        Rat s(0);
        for (const auto& [k, c] : terms_) s -= Rat(k) * c;
        return s;
    }

    bool is_zero() const { return terms_.empty(); }

  private:
    Int q_ = 0;
    std::map<int, Rat> terms_;
};

}  // namespace cmtbx

#endif
