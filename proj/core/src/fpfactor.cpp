#include "cmtbx/modpoly.hpp"

#include <algorithm>

namespace cmtbx {
namespace modp {

P trim(P a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

P reduce(P a, const Int& m) {
    for (auto& c : a) c = mod_pos(c, m);
    return trim(std::move(a));
}

int deg(const P& a) { return static_cast<int>(a.size()) - 1; }

P add(const P& a, const P& b, const Int& m) {
    P r(std::max(a.size(), b.size()), Int(0));
    for (size_t i = 0; i < r.size(); ++i) {
        if (i < a.size()) r[i] += a[i];
        if (i < b.size()) r[i] += b[i];
        r[i] = mod_pos(r[i], m);
    }
    return trim(std::move(r));
}

P sub(const P& a, const P& b, const Int& m) {
    P r(std::max(a.size(), b.size()), Int(0));
    for (size_t i = 0; i < r.size(); ++i) {
        if (i < a.size()) r[i] += a[i];
        if (i < b.size()) r[i] -= b[i];
        r[i] = mod_pos(r[i], m);
    }
    return trim(std::move(r));
}

P mul(const P& a, const P& b, const Int& m) {
    if (a.empty() || b.empty()) return {};
    P r(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = mod_pos(r[i + j] + a[i] * b[j], m);
    return trim(std::move(r));
}

P scal(const P& a, const Int& c, const Int& m) {
    P r(a);
    for (auto& x : r) x = mod_pos(x * c, m);
    return trim(std::move(r));
}

std::pair<P, P> divrem(const P& a, const P& b, const Int& m) {
    if (b.empty()) throw invalid_argument_error("modp division by zero");
    Int lcinv;
    if (mpz_invert(lcinv.get_mpz_t(), b.back().get_mpz_t(), m.get_mpz_t()) == 0)
        throw invalid_argument_error("modp division: leading coefficient not invertible");
    P rem = a;
    int db = deg(b);
    if (deg(a) < db) return {{}, rem};
    P quo(a.size() - b.size() + 1, Int(0));
    for (int k = deg(a); k >= db; --k) {
        if (static_cast<size_t>(k) >= rem.size()) continue;
        Int q = mod_pos(rem[k] * lcinv, m);
        if (q == 0) continue;
        quo[k - db] = q;
        for (int j = 0; j <= db; ++j) rem[k - db + j] = mod_pos(rem[k - db + j] - q * b[j], m);
    }
    return {trim(std::move(quo)), trim(std::move(rem))};
}

P monic(const P& a, const Int& p) {
    if (a.empty()) return a;
    Int inv;
    mpz_invert(inv.get_mpz_t(), a.back().get_mpz_t(), p.get_mpz_t());
    return scal(a, inv, p);
}

P gcd(P a, P b, const Int& p) {
    while (!b.empty()) {
        P r = divrem(a, b, p).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a, p);
}

P powmod(const P& a, Int e, const P& mod, const Int& p) {
    P base = divrem(a, mod, p).second;
    P r = {Int(1)};
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = divrem(mul(r, base, p), mod, p).second;
        base = divrem(mul(base, base, p), mod, p).second;
        e >>= 1;
    }
    return r;
}

P deriv(const P& a, const Int& m) {
    if (a.size() <= 1) return {};
    P r(a.size() - 1);
    for (size_t i = 1; i < a.size(); ++i) r[i - 1] = mod_pos(a[i] * Int(static_cast<long>(i)), m);
    return trim(std::move(r));
}

Int eval(const P& a, const Int& x, const Int& m) {
    Int r(0);
    for (auto it = a.rbegin(); it != a.rend(); ++it) r = mod_pos(r * x + *it, m);
    return r;
}

namespace {

// Tiny deterministic PRNG for equal-degree splitting.
struct Rng {
    uint64_t s;
    uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
};

P random_poly(Rng& rng, int degree, const Int& p) {
    P r(degree + 1);
    for (auto& c : r) c = mod_pos(Int(static_cast<unsigned long>(rng.next() >> 8)), p);
    return trim(std::move(r));
}

// Equal-degree splitting of squarefree f whose irreducible factors all have
// degree d (Cantor-Zassenhaus; trace construction at p = 2).
void edf(const P& f, int d, const Int& p, Rng& rng, std::vector<P>& out) {
    int n = deg(f);
    if (n == d) {
        out.push_back(monic(f, p));
        return;
    }
    Int q = pow_int(p, static_cast<unsigned long>(d));
    for (;;) {
        P a = random_poly(rng, n - 1, p);
        if (deg(a) < 1) continue;
        P g = gcd(a, f, p);
        if (deg(g) > 0 && deg(g) < n) {
            edf(g, d, p, rng, out);
            edf(divrem(f, g, p).first, d, p, rng, out);
            return;
        }
        P b;
        if (p != 2) {
            b = powmod(a, (q - 1) / 2, f, p);
            b = sub(b, {Int(1)}, p);
        } else {
            // Trace map a + a^2 + ... + a^(2^(d-1)).
            b = divrem(a, f, p).second;
            P t = b;
            for (int i = 1; i < d; ++i) {
                t = powmod(t, Int(2), f, p);
                b = add(b, t, p);
            }
        }
        g = gcd(b, f, p);
        if (deg(g) > 0 && deg(g) < n) {
            edf(g, d, p, rng, out);
            edf(divrem(f, g, p).first, d, p, rng, out);
            return;
        }
    }
}

}  // namespace

std::vector<P> factor_squarefree_mod_p(const P& f0, const Int& p, uint64_t seed) {
    P f = monic(reduce(f0, p), p);
    std::vector<P> out;
    if (deg(f) <= 0) return out;
    Rng rng{seed * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull};
    // Distinct-degree decomposition.
    P xq = {Int(0), Int(1)};  // x
    P rest = f;
    int d = 0;
    while (deg(rest) > 0) {
        ++d;
        if (2 * d > deg(rest)) {
            out.push_back(monic(rest, p));
            break;
        }
        xq = powmod(xq, p, rest, p);
        P g = gcd(sub(xq, {Int(0), Int(1)}, p), rest, p);
        if (deg(g) > 0) {
            edf(g, d, p, rng, out);
            rest = divrem(rest, g, p).first;
            xq = divrem(xq, rest, p).second;
        }
    }
    std::sort(out.begin(), out.end(), [](const P& a, const P& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        for (size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    });
    return out;
}

std::vector<std::pair<P, int>> factor_mod_p(const P& f0, const Int& p) {
    P f = monic(reduce(f0, p), p);
    std::vector<std::pair<P, int>> out;
    if (deg(f) <= 0) return out;
    // Multiplicity by repeated division against the squarefree factors; the
    // p-th power pathology is handled by recursing on the p-th root.
    P df = deriv(f, p);
    if (df.empty()) {
        // f = g(x^p) = (g-twisted)^p over F_p; take p-th root coefficientwise.
        unsigned long pl = p.get_ui();
        P g;
        for (size_t i = 0; i * pl < f.size(); ++i) {
            Int c = f[i * pl];
            // c^(1/p) = c^(p^(f-1)) in F_p is just c (Frobenius fixes F_p).
            g.push_back(c);
        }
        auto sub_factors = factor_mod_p(trim(std::move(g)), p);
        for (auto& [q, m] : sub_factors) out.emplace_back(q, m * static_cast<int>(pl));
        return out;
    }
    P sf = divrem(f, gcd(f, df, p), p).first;
    auto irr = factor_squarefree_mod_p(sf, p);
    P rest = f;
    for (const auto& g : irr) {
        int m = 0;
        for (;;) {
            auto [q, r] = divrem(rest, g, p);
            if (!r.empty()) break;
            rest = q;
            ++m;
        }
        out.emplace_back(g, m);
    }
    if (deg(rest) > 0) {
        // Residual p-th-power part whose factors are coprime to those found.
        for (auto& [g, m] : factor_mod_p(rest, p)) out.emplace_back(g, m);
    }
    return out;
}

bool is_irreducible_mod_p(const P& f, const Int& p) {
    P g = monic(reduce(f, p), p);
    int n = deg(g);
    if (n <= 0) return false;
    if (n == 1) return true;
    if (gcd(g, deriv(g, p), p).size() > 1) return false;
    auto fac = factor_squarefree_mod_p(g, p);
    return fac.size() == 1 && deg(fac[0]) == n;
}

P find_irreducible(const Int& p, int f) {
    if (f == 1) return {Int(0), Int(1)};
    // Deterministic scan over monic polynomials x^f + a_{f-1}x^{f-1}+...+a_0.
    std::vector<Int> a(f, Int(0));
    for (;;) {
        P cand(a);
        cand.push_back(Int(1));
        cand = trim(std::move(cand));
        if (deg(cand) == f && is_irreducible_mod_p(cand, p)) return cand;
        // Increment the coefficient vector in base p.
        int i = 0;
        while (i < f) {
            a[i] += 1;
            if (a[i] < p) break;
            a[i] = 0;
            ++i;
        }
        if (i == f) throw error("find_irreducible: exhausted search (impossible)");
    }
}

}  // namespace modp

Fq::E Fq::pow(E a, Int e) const {
    E r = one();
    a = modp::divrem(a, h_, p_).second;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Fq::E Fq::inv(const E& a) const {
    if (is_zero(a)) throw invalid_argument_error("Fq inverse of zero");
    return pow(a, q() - 2);
}

bool Fq::is_square(const E& a) const {
    if (is_zero(a)) return true;
    if (p_ == 2) return true;  // Frobenius is surjective on F_q, q even
    E r = pow(a, (q() - 1) / 2);
    return eq(r, one());
}

Fq::E Fq::eval_poly(const modp::P& g, const E& x) const {
    E r = zero();
    for (auto it = g.rbegin(); it != g.rend(); ++it) {
        r = mul(r, x);
        r = add(r, from_int(*it));
    }
    return r;
}

std::vector<Fq::E> Fq::all_elements() const {
    std::vector<E> out;
    int n = f();
    std::vector<Int> a(n, Int(0));
    for (;;) {
        out.push_back(modp::trim(a));
        int i = 0;
        while (i < n) {
            a[i] += 1;
            if (a[i] < p_) break;
            a[i] = 0;
            ++i;
        }
        if (i == n) break;
    }
    return out;
}

std::vector<Fq::E> Fq::roots_of(const modp::P& g) const {
    std::vector<E> out;
    for (const auto& x : all_elements())
        if (is_zero(eval_poly(g, x))) out.push_back(x);
    return out;
}

}  // namespace cmtbx
