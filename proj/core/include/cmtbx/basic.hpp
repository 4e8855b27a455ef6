#ifndef CMTBX_BASIC_HPP
#define CMTBX_BASIC_HPP

#include <gmpxx.h>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmtbx {

using Int = mpz_class;
using Rat = mpq_class;

// Error taxonomy shared across modules. Every failure is a typed exception;
// no operation returns a silently truncated or rounded answer.
struct error : std::runtime_error {
    explicit error(const std::string& m) : std::runtime_error(m) {}
};
struct precision_exhausted : error {
    explicit precision_exhausted(const std::string& m) : error("PrecisionExhausted: " + m) {}
};
struct budget_exceeded : error {
    explicit budget_exceeded(const std::string& m) : error("BudgetExceeded: " + m) {}
};
struct unsupported : error {
    explicit unsupported(const std::string& m) : error("Unsupported: " + m) {}
};
struct invalid_argument_error : error {
    explicit invalid_argument_error(const std::string& m) : error(m) {}
};

inline Int pow_int(const Int& a, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), a.get_mpz_t(), e);
    return r;
}

inline Int mod_pos(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

inline Int powmod(Int b, Int e, const Int& m) {
    Int r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline bool is_probable_prime(const Int& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

// Valuation of a at p; a must be nonzero.
inline long p_valuation(Int a, const Int& p) {
    if (a == 0) throw invalid_argument_error("p_valuation of zero");
    long v = 0;
    Int q, r;
    for (;;) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
        if (r != 0) return v;
        a = q;
        ++v;
    }
}

// Valuation of a rational at p (may be negative).
inline long p_valuation(const Rat& a, const Int& p) {
    if (a == 0) throw invalid_argument_error("p_valuation of zero");
    long v = p_valuation(Int(a.get_num()), p);
    if (a.get_den() != 1) v -= p_valuation(Int(a.get_den()), p);
    return v;
}

// Legendre symbol (a/p) for odd prime p; returns -1, 0, +1.
inline int legendre(const Int& a, const Int& p) {
    Int r = powmod(mod_pos(a, p), (p - 1) / 2, p);
    if (r == 0) return 0;
    return r == 1 ? 1 : -1;
}

std::vector<Int> small_primes(long bound);

// Full factorization of |n| by trial division + Pollard rho. Returns
// prime -> exponent pairs, primes ascending.
std::vector<std::pair<Int, unsigned>> factor_integer(Int n);

inline Rat rat_from_string(const std::string& s) {
    Rat r(s);
    r.canonicalize();
    return r;
}

}  // namespace cmtbx

#endif
