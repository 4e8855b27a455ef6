#ifndef CMTBX_POLY_HPP
#define CMTBX_POLY_HPP

#include "cmtbx/basic.hpp"

#include <optional>

namespace cmtbx {

// Dense univariate polynomial over Q, coefficient k = coefficient of x^k.
// The zero polynomial has empty coefficient vector and degree -1.
class QPoly {
  public:
    QPoly() = default;
    explicit QPoly(const Rat& c) { if (c != 0) c_ = {c}; }
    explicit QPoly(std::vector<Rat> c) : c_(std::move(c)) { trim(); }

    static QPoly x() { return QPoly(std::vector<Rat>{Rat(0), Rat(1)}); }
    static QPoly monomial(int k, const Rat& c = Rat(1)) {
        std::vector<Rat> v(k + 1);
        v[k] = c;
        return QPoly(std::move(v));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const Rat& operator[](int k) const {
        static const Rat zero(0);
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : zero;
    }
    const std::vector<Rat>& coeffs() const { return c_; }
    Rat lc() const { return c_.empty() ? Rat(0) : c_.back(); }

    QPoly operator+(const QPoly& o) const;
    QPoly operator-(const QPoly& o) const;
    QPoly operator*(const QPoly& o) const;
    QPoly operator*(const Rat& k) const;
    QPoly operator-() const { return *this * Rat(-1); }
    bool operator==(const QPoly& o) const { return c_ == o.c_; }

    // Euclidean division; o must be nonzero.
    std::pair<QPoly, QPoly> divrem(const QPoly& o) const;
    QPoly mod(const QPoly& o) const { return divrem(o).second; }

    QPoly derivative() const;
    Rat eval(const Rat& x) const;
    QPoly compose(const QPoly& inner) const;
    QPoly monic() const;
    QPoly shift_arg(const Rat& a) const;  // p(x + a)

    // Clears denominators and the content: returns primitive integer
    // polynomial with positive leading coefficient.
    QPoly primitive_part() const;
    bool is_integral() const;

    std::string str(const std::string& var = "x") const;

  private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rat> c_;
};

QPoly gcd_poly(QPoly a, QPoly b);            // monic gcd over Q
QPoly squarefree_part(const QPoly& f);
Rat resultant(const QPoly& a, const QPoly& b);
Rat discriminant(const QPoly& f);

// --- Real root machinery (Sturm sequences, exact rational endpoints) ---

struct RealRootInterval {
    Rat lo, hi;  // half-open (lo, hi], root strictly inside; lo < hi
};

// Isolating intervals for the distinct real roots of f, sorted increasingly.
std::vector<RealRootInterval> isolate_real_roots(const QPoly& f);

// Exact sign of g at the real root of f isolated by iv (f squarefree at that
// root). Refines the interval until the sign is certified.
int sign_at_root(const QPoly& f, RealRootInterval iv, const QPoly& g);

int count_real_roots(const QPoly& f);

}  // namespace cmtbx

#endif
