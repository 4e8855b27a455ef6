#include "cmtbx/orbits.hpp"

#include <algorithm>

namespace cmtbx {

// Enumeration layer for local orbital integrals. Scope: F0 = Q and F
// imaginary quadratic presented by a p-maximal quadratic polynomial, at odd
// places unramified in F; orbit sizes n <= 3 on the linear side. Everything is
// exact: lattice conditions are integrality statements about rational-in-y
// matrix entries and their conjugates.

namespace {

struct LocalCtx {
    const CMFieldData* Fd;
    Int p;
    bool split = false;
    int Nprec = 24;
    // Split place: Hensel-lifted roots of fF mod p^Nprec.
    Int root1, root2, pN;

    explicit LocalCtx(const CMFieldData& fd, const Place& v) : Fd(&fd), p(v.p) {
        if (fd.tower->degree() != 1)
            throw unsupported("orbital enumeration requires F0 = Q");
        const QPoly& fF = fd.F->minpoly();
        if (fF.degree() != 2) throw unsupported("orbital enumeration: F must be quadratic");
        if (v.archimedean || p == 2) throw unsupported("orbital enumeration at this place");
        Rat disc = discriminant(fF);
        if (p_valuation(disc, p) != 0)
            throw unsupported("orbital enumeration: p ramifies in F or divides the index");
        SplittingType st = fd.tower->splitting_in_F(v);
        if (st == SplittingType::Ramified)
            throw unsupported("orbital enumeration at ramified places");
        split = (st == SplittingType::Split);
        pN = pow_int(p, Nprec);
        if (split) {
            auto lifted = hensel::lift_factorization(fF, p, Nprec);
            if (lifted.size() != 2) throw error("split place but fF does not split mod p");
            // factors are monic linear: t + c => root -c.
            root1 = mod_pos(-lifted[0][0], pN);
            root2 = mod_pos(-lifted[1][0], pN);
        }
    }

    // p-valuation of a nonzero rational.
    long vp(const Rat& x) const { return p_valuation(x, p); }

    // Inert valuation of z in F (coordinates w.r.t. the power basis, which is
    // p-integral because p does not divide disc).
    long val_inert(const NFElem& z) const {
        if (z.is_zero()) throw invalid_argument_error("val of zero");
        long v = 1 << 30;
        for (int i = 0; i <= z.v.degree(); ++i)
            if (z.v[i] != 0) v = std::min(v, vp(z.v[i]));
        return v;
    }

    // Valuations at the two split places; exact, certified via the norm.
    std::pair<long, long> val_split(const NFElem& z) const {
        if (z.is_zero()) throw invalid_argument_error("val of zero");
        NFElem nm = z * Fd->conj(z);
        if (!nm.is_rational()) throw error("val_split: norm not rational");
        long total = vp(nm.rational_value());
        auto eval_at = [&](const Int& root) {
            // z = (A + B y)/D evaluated at y = root, valuation mod p^Nprec.
            Int den(1);
            for (int i = 0; i <= z.v.degree(); ++i)
                mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), z.v[i].get_den().get_mpz_t());
            Int acc(0), pw(1);
            for (int i = 0; i <= z.v.degree(); ++i) {
                Rat c = z.v[i] * Rat(den);
                acc = mod_pos(acc + c.get_num() * pw, pN);
                pw = mod_pos(pw * root, pN);
            }
            long vd = (den == 1) ? 0 : vp(Rat(den));
            if (acc == 0) return std::pair<long, bool>(Nprec - vd, false);  // saturated
            return std::pair<long, bool>(p_valuation(acc, p) - vd, true);
        };
        auto [v1, ok1] = eval_at(root1);
        auto [v2, ok2] = eval_at(root2);
        if (ok1 && ok2 && v1 + v2 == total) return {v1, v2};
        if (ok1 && !ok2) return {v1, total - v1};
        if (ok2 && !ok1) return {total - v2, v2};
        if (ok1 && ok2) {
            // One of the evaluations saturated invisibly; trust the smaller.
            if (v1 <= v2) return {v1, total - v1};
            return {total - v2, v2};
        }
        throw precision_exhausted("val_split: both embeddings saturate precision");
    }

    bool integral_inert(const NFElem& z) const { return z.is_zero() || val_inert(z) >= 0; }

    bool mat_integral_inert(const NFMat& M) const {
        for (const auto& e : M.a)
            if (!integral_inert(e)) return false;
        return true;
    }

    // Is M in GL_k(O_{F,v}) (inert)?
    bool in_glO_inert(const NFMat& M) const {
        if (!mat_integral_inert(M)) return false;
        NFElem d = M.det();
        return !d.is_zero() && val_inert(d) == 0;
    }
};

Rat p_power(const Int& p, long e) {
    if (e >= 0) return Rat(pow_int(p, static_cast<unsigned long>(e)));
    return Rat(1) / Rat(pow_int(p, static_cast<unsigned long>(-e)));
}

}  // namespace

// ---------------------------------------------------------------------------
// orb_linear
// ---------------------------------------------------------------------------

namespace {

// One enumeration pass at window bound B; returns the Laurent polynomial.
LaurentValue orb_linear_pass_inert(const LocalCtx& ctx, const OrbitPair& gamma,
                                   const LevelSpec& level, int B, long* visited) {
    const CMFieldData& Fd = gamma.Fd;
    const NumberField* K = Fd.F.get();
    int n = gamma.n();
    int k = n - 1;
    LaurentValue out(ctx.p);
    NFMat g1i = gamma.gamma1.inverse();
    NFMat g2i = gamma.gamma2.inverse();

    if (!level.hyperspecial && k != 1)
        throw unsupported("principal congruence level implemented for n = 2");

    // Enumerate lattices M = column span of Bm in F_v^k with elementary
    // divisor exponents in [-B, B].
    std::vector<NFMat> bases;
    std::vector<long> detvals;
    if (k == 1) {
        for (int a0 = -B; a0 <= B; ++a0) {
            NFMat M(K, 1);
            M.at(0, 0) = NFElem::from_rat(K, p_power(ctx.p, a0));
            bases.push_back(M);
            detvals.push_back(a0);
        }
    } else if (k == 2) {
        for (int a0 = -B; a0 <= B; ++a0)
            for (int a1 = -B; a1 <= B; ++a1) {
                long reps = (a1 - a0 > 0) ? (a1 - a0) : 0;
                Int m = pow_int(ctx.p, static_cast<unsigned long>(reps));
                for (Int cx(0); cx < m; ++cx)
                    for (Int cy(0); cy < m; ++cy) {
                        NFMat M(K, 2);
                        M.at(0, 0) = NFElem::from_rat(K, p_power(ctx.p, a0));
                        M.at(1, 1) = NFElem::from_rat(K, p_power(ctx.p, a1));
                        // off-diagonal entry in column 1: (cx + cy*y) * p^{a0}
                        NFElem c = NFElem(K, QPoly(std::vector<Rat>{Rat(cx), Rat(cy)}));
                        M.at(0, 1) = c * p_power(ctx.p, a0);
                        bases.push_back(M);
                        detvals.push_back(a0 + a1);
                    }
            }
    } else {
        throw unsupported("orbital enumeration: n > 3 on the linear side");
    }

    auto sigma_stable_weight = [&](const NFMat& Bm) -> std::pair<bool, long> {
        // Is the lattice spanned by Bm defined over Q_p? If so, the valuation
        // of det of a rational basis equals val_w(det Bm).
        NFMat C = Bm.inverse() * Bm.conj(Fd);
        if (!ctx.in_glO_inert(C)) return {false, 0};
        NFElem d = Bm.det();
        return {true, ctx.val_inert(d)};
    };

    for (size_t idx = 0; idx < bases.size(); ++idx) {
        const NFMat& Bm = bases[idx];
        ++*visited;
        if (level.hyperspecial) {
            // Condition 1: gamma1^{-1} M is sigma-stable.
            NFMat L1 = g1i * Bm;
            auto [st1, v1] = sigma_stable_weight(L1);
            if (!st1) continue;
            // Condition 2: gamma2^{-1} (M + O e) is sigma-stable.
            NFMat Bm2(K, n);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) Bm2.at(i, j) = Bm.at(i, j);
            Bm2.at(n - 1, n - 1) = NFElem::from_rat(K, Rat(1));
            NFMat L2 = g2i * Bm2;
            auto [st2, v2] = sigma_stable_weight(L2);
            if (!st2) continue;
            int w1 = ((n % 2) && (v1 % 2)) ? -1 : 1;        // eta(det x1)^n
            int w2 = (((n - 1) % 2) && (v2 % 2)) ? -1 : 1;  // eta(det x2)^(n-1)
            out.add_term(static_cast<int>(2 * detvals[idx]), Rat(w1 * w2));
        } else {
            // n = 2, principal congruence level m: refine by unit framings.
            Int pm = pow_int(ctx.p, level.m);
            // Enumerate units of O/p^m.
            for (Int cx(0); cx < pm; ++cx)
                for (Int cy(0); cy < pm; ++cy) {
                    NFElem u(K, QPoly(std::vector<Rat>{Rat(cx), Rat(cy)}));
                    NFElem nm = u * Fd.conj(u);
                    if (nm.is_zero() || ctx.val_inert(nm) != 0) continue;  // not a unit
                    NFElem h1 = Bm.at(0, 0) * u;
                    // Condition 1: c = gamma1^{-1} h1 with cbar/c = 1 mod p^m.
                    NFElem c = g1i.at(0, 0) * h1;
                    NFElem ratio = Fd.conj(c) / c - NFElem::from_rat(K, Rat(1));
                    if (!ratio.is_zero() && ctx.val_inert(ratio) < level.m) continue;
                    // Canonical rational representative x1 = (c + cbar)/2.
                    NFElem x1 = (c + Fd.conj(c)) * Rat(1, 2);
                    if (x1.is_zero()) continue;
                    long vx1 = ctx.val_inert(x1);
                    // Condition 2: D = gamma2^{-1} diag(h1, 1), D^{-1}Dbar = 1 mod p^m.
                    NFMat H(K, 2);
                    H.at(0, 0) = h1;
                    H.at(1, 1) = NFElem::from_rat(K, Rat(1));
                    NFMat D = g2i * H;
                    NFMat R = D.inverse() * D.conj(Fd);
                    bool ok = true;
                    for (int i = 0; i < 2 && ok; ++i)
                        for (int j = 0; j < 2 && ok; ++j) {
                            NFElem e = R.at(i, j) - (i == j ? NFElem::from_rat(K, Rat(1))
                                                            : NFElem::from_rat(K, Rat(0)));
                            if (!e.is_zero() && ctx.val_inert(e) < level.m) ok = false;
                        }
                    if (!ok) continue;
                    NFMat X2(K, 2);
                    NFMat Dbar = D.conj(Fd);
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j)
                            X2.at(i, j) = (D.at(i, j) + Dbar.at(i, j)) * Rat(1, 2);
                    NFElem dx2 = X2.det();
                    if (dx2.is_zero()) continue;
                    long vx2 = ctx.val_inert(dx2);
                    int w1 = 1;                      // eta(x1)^n, n = 2
                    int w2 = (vx2 % 2) ? -1 : 1;     // eta(det x2)^(n-1), n-1 = 1
                    (void)vx1;
                    out.add_term(static_cast<int>(2 * ctx.val_inert(h1)), Rat(w1 * w2));
                    ++*visited;
                }
        }
    }
    return out;
}

LaurentValue orb_linear_pass_split(const LocalCtx& ctx, const OrbitPair& gamma, int B,
                                   long* visited) {
    // n = 2, hyperspecial. h1-cosets: (a1, a2) with the rationality constraint
    // a1 - v1(gamma1) = a2 - v2(gamma1).
    const CMFieldData& Fd = gamma.Fd;
    const NumberField* K = Fd.F.get();
    int n = gamma.n();
    if (n != 2) throw unsupported("split orbital enumeration implemented for n = 2");
    LaurentValue out(ctx.p);
    auto [v1g, v2g] = ctx.val_split(gamma.gamma1.at(0, 0));
    NFMat g2i = gamma.gamma2.inverse();

    // Component matrices of g2i at the two lifted roots, mod p^N (kept as
    // exact rationals evaluated at the roots).
    auto comp_entry = [&](const NFElem& z, int which) -> std::pair<Int, long> {
        // returns (numerator mod p^N, -val of denominator)
        Int den(1);
        for (int i = 0; i <= z.v.degree(); ++i)
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), z.v[i].get_den().get_mpz_t());
        Int acc(0), pw(1);
        const Int& root = (which == 0) ? ctx.root1 : ctx.root2;
        for (int i = 0; i <= z.v.degree(); ++i) {
            Rat c = z.v[i] * Rat(den);
            acc = mod_pos(acc + c.get_num() * pw, ctx.pN);
            pw = mod_pos(pw * root, ctx.pN);
        }
        long dv = (den == 1) ? 0 : p_valuation(den, ctx.p);
        return {acc, dv};
    };

    for (int d = -B; d <= B; ++d) {
        ++*visited;
        // a1 = d + v1g, a2 = d + v2g gives x1 = p^d rational.
        long a1 = d + v1g, a2 = d + v2g;
        // Lattice condition: A_i := (g2^{(i)})^{-1} diag(p^{a_i}, 1) Z_p^2 must
        // agree for i = 1,2, i.e. A_2^{-1} A_1 in GL_2(Z_p). Work with the
        // exact F-matrix E := g2i * diag(p^{a1}-vs-a2 pattern) evaluated
        // per-component.
        // Build component matrices C_i = comp_i(g2i) * diag(p^{a_i}, 1).
        // Then the test matrix is C_2^{-1} C_1; integrality is checked at
        // working precision, det valuation exactly.
        // Assemble 2x2 rational-matrices over Z/p^N per component with
        // denominator tracking: entries e_{rc}^{(i)} = comp(g2i[r][c], i) *
        // p^{a_i if c == 0 else 0}.
        struct Ent { Int num; long shift; };  // value = num * p^{shift} (num mod p^N)
        Ent C1[2][2], C2[2][2];
        bool bad = false;
        for (int r = 0; r < 2 && !bad; ++r)
            for (int c = 0; c < 2 && !bad; ++c) {
                auto [n1, d1] = comp_entry(g2i.at(r, c), 0);
                auto [n2, d2] = comp_entry(g2i.at(r, c), 1);
                C1[r][c] = {n1, -d1 + (c == 0 ? a1 : 0)};
                C2[r][c] = {n2, -d2 + (c == 0 ? a2 : 0)};
            }
        // det C_i valuation: val(det g2^{(i)-1}) + a_i; det of g2i component =
        // evaluation of det(g2i) in F.
        NFElem detg2i = g2i.det();
        auto [w1det, w2det] = ctx.val_split(detg2i);
        long vdet1 = w1det + a1, vdet2 = w2det + a2;
        if (vdet1 != vdet2) continue;  // det of transition not a unit
        // adj(C2) * C1, entries as num * p^shift; need all >= 0 after
        // dividing by det C2.
        auto mulent = [&](const Ent& x, const Ent& y) -> Ent {
            return {mod_pos(x.num * y.num, ctx.pN), x.shift + y.shift};
        };
        auto addent = [&](const Ent& x, const Ent& y) -> Ent {
            long s = std::min(x.shift, y.shift);
            Int xv = mod_pos(x.num * pow_int(ctx.p, static_cast<unsigned long>(x.shift - s)), ctx.pN);
            Int yv = mod_pos(y.num * pow_int(ctx.p, static_cast<unsigned long>(y.shift - s)), ctx.pN);
            return {mod_pos(xv + yv, ctx.pN), s};
        };
        auto negent = [&](const Ent& x) -> Ent { return {mod_pos(-x.num, ctx.pN), x.shift}; };
        Ent adj[2][2] = {{C2[1][1], negent(C2[0][1])}, {negent(C2[1][0]), C2[0][0]}};
        bool ok = true;
        for (int r = 0; r < 2 && ok; ++r)
            for (int c = 0; c < 2 && ok; ++c) {
                Ent e = addent(mulent(adj[r][0], C1[0][c]), mulent(adj[r][1], C1[1][c]));
                // divide by det C2 (valuation vdet2): need val(e) >= vdet2.
                long ve = e.shift + ((e.num == 0) ? ctx.Nprec : p_valuation(e.num, ctx.p));
                if (ve < vdet2) ok = false;
            }
        if (!ok) continue;
        (void)bad;
        out.add_term(static_cast<int>(a1 + a2), Rat(1));  // eta trivial at split places
    }
    return out;
}

}  // namespace

LaurentValue orb_linear(const OrbitPair& gamma, const Place& v, const LevelSpec& level,
                        EnumerationCertificate* cert, int max_bound) {
    OrbitInvariants inv = invariants_linear(gamma);
    if (!inv.regular_semisimple) throw not_regular_semisimple("orb_linear");
    LocalCtx ctx(gamma.Fd, v);
    if (ctx.split && !level.hyperspecial)
        throw unsupported("split principal-congruence enumeration not implemented");
    // Initial bound from the valuations of the entries and invariants.
    long b0 = 2;
    for (const auto& e : gamma.gamma2.a)
        if (!e.is_zero()) {
            long ve = ctx.split ? std::min(ctx.val_split(e).first, ctx.val_split(e).second)
                                : ctx.val_inert(e);
            b0 = std::max(b0, std::labs(ve) + 2);
        }
    long visited = 0;
    for (int B = static_cast<int>(b0); B + 1 <= max_bound; ++B) {
        LaurentValue at_B = ctx.split ? orb_linear_pass_split(ctx, gamma, B, &visited)
                                      : orb_linear_pass_inert(ctx, gamma, level, B, &visited);
        LaurentValue at_B1 = ctx.split ? orb_linear_pass_split(ctx, gamma, B + 1, &visited)
                                       : orb_linear_pass_inert(ctx, gamma, level, B + 1, &visited);
        if (at_B == at_B1) {
            if (cert) {
                cert->stable_bound = B;
                cert->cosets_visited = visited;
            }
            return at_B;
        }
    }
    throw budget_exceeded("orb_linear did not stabilize below bound " + std::to_string(max_bound));
}

Rat orb_unitary(const UnitaryPair& g, const Place& v, const NFMat& lattice_basis,
                EnumerationCertificate* cert, int max_bound) {
    (void)max_bound;
    OrbitInvariants inv = invariants_unitary(g);
    if (!inv.regular_semisimple) throw not_regular_semisimple("orb_unitary");
    LocalCtx ctx(g.Fd, v);
    if (ctx.split)
        throw unsupported("orb_unitary at split places: use orb_unitary_split_gl");
    int n = g.n();
    if (n != 2)
        throw unsupported("orb_unitary: inert enumeration implemented for n = 2");
    // H = U(W^flat) = U(1) is compact and stabilizes every lattice, so the
    // double-coset space is a point of volume one.
    const NumberField* K = g.Fd.F.get();
    NFMat T = lattice_basis;
    NFMat Ti = T.inverse();
    NFMat g2L = (Ti * g.g2) * T;
    bool member = ctx.in_glO_inert(g2L);
    // g1 is a norm-one scalar (unit), so it always stabilizes.
    NFElem nm1 = g.g1.at(0, 0) * g.Fd.conj(g.g1.at(0, 0));
    if (!(nm1 == NFElem::from_rat(K, Rat(1))))
        throw invalid_argument_error("orb_unitary: g1 not norm-one");
    if (cert) {
        cert->stable_bound = 0;
        cert->cosets_visited = 1;
    }
    return member ? Rat(1) : Rat(0);
}

Rat orb_unitary_split_gl(const CMFieldData& Fd, const NFMat& g1, const NFMat& g2, const Int& p,
                         EnumerationCertificate* cert, int max_bound) {
    // Split place in GL coordinates: H = GL_{n-1}(Q_p), K = stabilizers of the
    // standard lattices. Implemented for n = 2 (H = GL_1).
    const NumberField* K = Fd.F.get();
    int n = g2.n;
    if (n != 2) throw unsupported("orb_unitary_split_gl: n = 2 only");
    auto vp_of = [&](const NFElem& z) {
        if (!z.is_rational()) throw invalid_argument_error("split GL data must be rational");
        return p_valuation(z.rational_value(), p);
    };
    (void)vp_of;
    auto rat = [&](const NFElem& z) {
        if (!z.is_rational()) throw invalid_argument_error("split GL data must be rational");
        return z.rational_value();
    };
    Rat count(0);
    long visited = 0;
    auto run = [&](int B) {
        Rat total(0);
        for (int a = -B; a <= B; ++a)
            for (int b = -B; b <= B; ++b) {
                ++visited;
                // h1 = p^a, h2 = p^b; conditions: p^{-a} g1 p^{b} unit and
                // diag(p^{-a},1) g2 diag(p^{b},1) in GL_2(Z_p).
                Rat c1 = rat(g1.at(0, 0)) * p_power(p, b - a);
                if (p_valuation(c1, p) != 0) continue;
                Rat m00 = rat(g2.at(0, 0)) * p_power(p, b - a);
                Rat m01 = rat(g2.at(0, 1)) * p_power(p, -a);
                Rat m10 = rat(g2.at(1, 0)) * p_power(p, b);
                Rat m11 = rat(g2.at(1, 1));
                auto ip = [&](const Rat& x) { return x == 0 || p_valuation(x, p) >= 0; };
                if (!(ip(m00) && ip(m01) && ip(m10) && ip(m11))) continue;
                Rat det = m00 * m11 - m01 * m10;
                if (det == 0 || p_valuation(det, p) != 0) continue;
                total += 1;
            }
        return total;
    };
    for (int B = 2; B + 1 <= max_bound; ++B) {
        Rat atB = run(B), atB1 = run(B + 1);
        if (atB == atB1) {
            if (cert) {
                cert->stable_bound = B;
                cert->cosets_visited = visited;
            }
            return atB;
        }
    }
    (void)K;
    throw budget_exceeded("orb_unitary_split_gl did not stabilize");
}

}  // namespace cmtbx
