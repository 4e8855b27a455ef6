#include "cmtbx/zfactor.hpp"

#include <algorithm>
#include <numeric>

namespace cmtbx {

QPoly qpoly_from_modp(const modp::P& a) {
    std::vector<Rat> c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[i] = Rat(a[i]);
    return QPoly(std::move(c));
}

modp::P modp_from_qpoly(const QPoly& f, const Int& m) {
    modp::P c(f.degree() + 1);
    for (int i = 0; i <= f.degree(); ++i) {
        const Rat& q = f[i];
        if (q.get_den() != 1) {
            Int inv;
            if (mpz_invert(inv.get_mpz_t(), q.get_den().get_mpz_t(), m.get_mpz_t()) == 0)
                throw invalid_argument_error("modp_from_qpoly: denominator not invertible");
            c[i] = mod_pos(q.get_num() * inv, m);
        } else {
            c[i] = mod_pos(Int(q.get_num()), m);
        }
    }
    return modp::trim(std::move(c));
}

namespace hensel {

std::pair<modp::P, modp::P> lift_pair(const modp::P& f, modp::P g, modp::P h,
                                      const Int& p, int N) {
    using namespace modp;
    // Bezout mod p: s*g + t*h = 1.
    P s, t;
    {
        P r0 = reduce(g, p), r1 = reduce(h, p);
        P s0 = {Int(1)}, s1 = {}, t0 = {}, t1 = {Int(1)};
        while (!r1.empty()) {
            auto [q, r] = divrem(r0, r1, p);
            P s2 = sub(s0, mul(q, s1, p), p);
            P t2 = sub(t0, mul(q, t1, p), p);
            r0 = r1; r1 = r;
            s0 = s1; s1 = s2;
            t0 = t1; t1 = t2;
        }
        if (deg(r0) != 0) throw invalid_argument_error("hensel: factors not coprime mod p");
        Int inv;
        mpz_invert(inv.get_mpz_t(), r0[0].get_mpz_t(), p.get_mpz_t());
        s = scal(s0, inv, p);
        t = scal(t0, inv, p);
    }
    Int pk = p;
    g = reduce(g, p);
    h = reduce(h, p);
    while (pk < pow_int(p, N)) {
        Int pk2 = pk * pk;
        if (pk2 > pow_int(p, N)) pk2 = pow_int(p, N);
        // e = f - g*h mod pk2; corrections dg = t*e mod g, dh = s*e mod h.
        P e = sub(reduce(f, pk2), mul(reduce(g, pk2), reduce(h, pk2), pk2), pk2);
        P dg = divrem(mul(reduce(t, pk2), e, pk2), reduce(g, pk2), pk2).second;
        P dh = divrem(mul(reduce(s, pk2), e, pk2), reduce(h, pk2), pk2).second;
        g = add(reduce(g, pk2), dg, pk2);
        h = add(reduce(h, pk2), dh, pk2);
        // Refresh Bezout to the current precision: s,t with s*g+t*h = 1 (mod pk2).
        P d = sub(reduce({Int(1)}, pk2), add(mul(s, g, pk2), mul(t, h, pk2), pk2), pk2);
        P ds = divrem(mul(s, d, pk2), g, pk2).second;
        P dt = divrem(mul(t, d, pk2), h, pk2).second;
        s = add(s, ds, pk2);
        t = add(t, dt, pk2);
        pk = pk2;
    }
    return {g, h};
}

std::vector<modp::P> lift_factorization(const QPoly& f, const Int& p, int N) {
    using namespace modp;
    if (!f.is_integral() || f.lc() != 1)
        throw invalid_argument_error("lift_factorization requires monic integral polynomial");
    Int P0 = p, PN = pow_int(p, N);
    P fp = modp_from_qpoly(f, P0);
    if (deg(gcd(fp, deriv(fp, p), p)) > 0)
        throw invalid_argument_error("lift_factorization: not squarefree mod p");
    std::vector<P> fac = factor_squarefree_mod_p(fp, p);
    std::vector<P> lifted;
    P rest = modp_from_qpoly(f, PN);
    for (size_t i = 0; i + 1 < fac.size(); ++i) {
        // rest = fac[i] * (product of the others) mod p.
        P cof = {Int(1)};
        for (size_t j = i + 1; j < fac.size(); ++j) cof = mul(cof, fac[j], p);
        auto [g, h] = lift_pair(rest, fac[i], cof, p, N);
        lifted.push_back(g);
        rest = h;
    }
    if (!fac.empty()) lifted.push_back(rest);
    return lifted;
}

}  // namespace hensel

namespace {

// Zassenhaus factorization of a monic squarefree integral polynomial.
std::vector<QPoly> zassenhaus_monic(const QPoly& f) {
    using namespace modp;
    int n = f.degree();
    if (n == 1) return {f};
    // Choose a prime of good reduction.
    Int p(3);
    for (;;) {
        P fp = modp_from_qpoly(f, p);
        if (deg(fp) == n && deg(gcd(fp, deriv(fp, p), p)) == 0) break;
        mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    }
    // Landau-Mignotte style bound on factor coefficients: 2^n * ||f||_2.
    Rat norm2_sq(0);
    for (int i = 0; i <= n; ++i) norm2_sq += f[i] * f[i];
    Int bound = 1;
    while (Rat(bound * bound) < norm2_sq) bound *= 2;
    bound <<= (n + 1);
    int N = 1;
    while (pow_int(p, N) < 2 * bound) ++N;
    Int PN = pow_int(p, N);

    std::vector<P> mods = hensel::lift_factorization(f, p, N);
    size_t r = mods.size();
    if (r == 1) return {f};

    auto symmetric = [&](const Int& a) {
        Int x = mod_pos(a, PN);
        if (2 * x > PN) x -= PN;
        return x;
    };

    std::vector<QPoly> result;
    QPoly rem = f;
    std::vector<bool> used(r, false);
    size_t live = r;
    for (size_t csize = 1; csize <= live && live > 0; ++csize) {
        bool progress = true;
        while (progress && csize <= live) {
            progress = false;
            // Enumerate subsets of the unused modular factors of size csize.
            std::vector<size_t> idxs;
            for (size_t i = 0; i < r; ++i)
                if (!used[i]) idxs.push_back(i);
            if (idxs.size() < csize) break;
            std::vector<size_t> comb(csize);
            std::iota(comb.begin(), comb.end(), 0);
            for (;;) {
                // Candidate = product of chosen modular factors, coefficients
                // mapped to the symmetric residue range.
                P prod = {Int(1)};
                for (size_t k = 0; k < csize; ++k) prod = mul(prod, mods[idxs[comb[k]]], PN);
                std::vector<Rat> cand(prod.size());
                for (size_t i = 0; i < prod.size(); ++i) cand[i] = Rat(symmetric(prod[i]));
                QPoly g(std::move(cand));
                auto [q, rr] = rem.divrem(g);
                if (rr.is_zero()) {
                    result.push_back(g);
                    rem = q;
                    for (size_t k = 0; k < csize; ++k) used[idxs[comb[k]]] = true;
                    live -= csize;
                    progress = true;
                    break;
                }
                // Next combination.
                int k = static_cast<int>(csize) - 1;
                while (k >= 0 && comb[k] == idxs.size() - csize + k) --k;
                if (k < 0) break;
                ++comb[k];
                for (size_t j = k + 1; j < csize; ++j) comb[j] = comb[j - 1] + 1;
            }
        }
    }
    if (rem.degree() > 0) result.push_back(rem);
    return result;
}

}  // namespace

namespace {

// Irreducible monic factors of a squarefree monic polynomial over Q.
std::vector<QPoly> factor_squarefree_over_Q(const QPoly& sf) {
    // Transform to a monic integral polynomial: m(x) = L^(n-1) prim(x/L).
    QPoly prim = sf.primitive_part();
    int n = prim.degree();
    Rat L = prim.lc();
    std::vector<Rat> d(n + 1);
    Rat acc(1);
    for (int i = n; i >= 0; --i) {
        d[i] = prim[i] * acc / L;
        acc *= L;
    }
    QPoly monic_int(std::move(d));
    std::vector<QPoly> out;
    for (const QPoly& g : zassenhaus_monic(monic_int)) {
        if (L == 1) {
            out.push_back(g);
            continue;
        }
        // Undo the substitution: factor of prim is g(L x), re-normalized monic.
        std::vector<Rat> e(g.degree() + 1);
        Rat a(1);
        for (int i = 0; i <= g.degree(); ++i) {
            e[i] = g[i] * a;
            a *= L;
        }
        out.push_back(QPoly(std::move(e)).monic());
    }
    return out;
}

}  // namespace

std::vector<std::pair<QPoly, int>> factor_over_Q(const QPoly& f0) {
    if (f0.degree() < 1) throw invalid_argument_error("factor_over_Q: constant polynomial");
    QPoly f = f0.monic();
    std::vector<std::pair<QPoly, int>> out;
    // Yun's squarefree decomposition (characteristic zero).
    QPoly g = gcd_poly(f, f.derivative());
    QPoly c = f.divrem(g).first;
    QPoly d = f.derivative().divrem(g).first - c.derivative();
    int i = 1;
    while (c.degree() > 0) {
        QPoly a = gcd_poly(c, d);
        if (a.degree() > 0)
            for (const QPoly& irr : factor_squarefree_over_Q(a)) out.emplace_back(irr, i);
        c = c.divrem(a).first;
        d = d.divrem(a).first - c.derivative();
        ++i;
    }
    return out;
}

bool is_irreducible_over_Q(const QPoly& f) {
    if (f.degree() < 1) return false;
    auto fac = factor_over_Q(f);
    return fac.size() == 1 && fac[0].second == 1 && fac[0].first.degree() == f.degree();
}

}  // namespace cmtbx
