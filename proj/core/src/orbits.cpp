#include "cmtbx/orbits.hpp"

#include <algorithm>

namespace cmtbx {

// ---------------------------------------------------------------------------
// CM field plumbing
// ---------------------------------------------------------------------------

namespace {

QPoly theta_min_poly(const QPoly& f0, const QPoly& delta, long c) {
    int D = 2 * f0.degree();
    auto eval_at = [&](const Rat& y0) {
        QPoly lin(std::vector<Rat>{y0, Rat(-c)});
        QPoly g = lin * lin - delta;
        return resultant(f0, g);
    };
    std::vector<Rat> xs(D + 1), ys(D + 1);
    for (int i = 0; i <= D; ++i) {
        xs[i] = Rat(i);
        ys[i] = eval_at(xs[i]);
    }
    QPoly result;
    for (int i = 0; i <= D; ++i) {
        QPoly li(Rat(1));
        Rat denom(1);
        for (int j = 0; j <= D; ++j) {
            if (j == i) continue;
            li = li * QPoly(std::vector<Rat>{-xs[j], Rat(1)});
            denom *= xs[i] - xs[j];
        }
        result = result + li * (ys[i] / denom);
    }
    return result.monic();
}

}  // namespace

CMFieldData build_cm_field(const FieldTower& tower) {
    CMFieldData out;
    out.tower = &tower;
    const QPoly& f0 = tower.f0();
    const QPoly& delta = tower.delta();
    for (long c = 0;; ++c) {
        if (c > 50) throw error("build_cm_field: no primitive shift found");
        QPoly N = theta_min_poly(f0, delta, c);
        if (N.degree() != 2 * f0.degree()) continue;
        if (gcd_poly(N, N.derivative()).degree() != 0) continue;
        out.F = std::make_shared<NumberField>(N.monic());
        out.shift_c = c;
        break;
    }
    const NumberField* F = out.F.get();
    if (f0.degree() == 1) {
        // F0 = Q: the generator of F0 is the rational root of f0.
        out.X = QPoly(-f0[0]);
    } else {
        NFElem ybar = NFElem::gen(F);
        NFPoly f0_F = NFPoly::from_qpoly(F, f0);
        NFPoly lin(F, {ybar, NFElem::from_rat(F, Rat(-out.shift_c))});
        NFPoly g = lin * lin - NFPoly::from_qpoly(F, delta);
        NFPoly h = gcd_poly(f0_F, g);
        if (h.degree() != 1) throw error("build_cm_field: generator recovery failed");
        out.X = (-(h.coeff(0) * h.coeff(1).inverse())).v;
    }
    // sqrt(delta) = y - c*X(y); conjugation: y -> 2c X(y) - y.
    {
        NFElem ybar = NFElem::gen(F);
        NFElem Xe(F, out.X);
        out.sqrt_delta = (ybar - Xe * Rat(out.shift_c)).v;
        out.conj_gen = (Xe * Rat(2 * out.shift_c) - ybar).v;
    }
    return out;
}

NFElem CMFieldData::conj(const NFElem& z) const {
    const NumberField* Fp = F.get();
    NFElem img = NFElem::from_rat(Fp, Rat(0));
    NFElem cg(Fp, conj_gen);
    for (int i = z.v.degree(); i >= 0; --i) img = img * cg + NFElem::from_rat(Fp, z.v[i]);
    return img;
}

NFElem CMFieldData::from_f0(const QPoly& x0_poly) const {
    const NumberField* Fp = F.get();
    NFElem img = NFElem::from_rat(Fp, Rat(0));
    NFElem Xe(Fp, X);
    QPoly red = x0_poly.mod(tower->f0());
    for (int i = red.degree(); i >= 0; --i) img = img * Xe + NFElem::from_rat(Fp, red[i]);
    return img;
}

QPoly CMFieldData::to_f0(const NFElem& z) const {
    int d = tower->degree();
    const NumberField* Fp = F.get();
    // Solve z = sum a_i X^i by exact linear algebra on the 2d coordinates.
    std::vector<QPoly> basis;
    NFElem pw = NFElem::from_rat(Fp, Rat(1));
    NFElem Xe(Fp, X);
    for (int i = 0; i < d; ++i) {
        basis.push_back(pw.v);
        pw = pw * Xe;
    }
    int rows = 2 * d;
    std::vector<std::vector<Rat>> M(rows, std::vector<Rat>(d + 1, Rat(0)));
    for (int i = 0; i < d; ++i)
        for (int r = 0; r < rows; ++r) M[r][i] = basis[i][r];
    for (int r = 0; r < rows; ++r) M[r][d] = z.v[r];
    // Gaussian elimination.
    int rank = 0;
    std::vector<int> pivot_col(rows, -1);
    for (int col = 0; col < d && rank < rows; ++col) {
        int pr = -1;
        for (int r = rank; r < rows; ++r)
            if (M[r][col] != 0) { pr = r; break; }
        if (pr < 0) continue;
        std::swap(M[rank], M[pr]);
        Rat inv = 1 / M[rank][col];
        for (int j = col; j <= d; ++j) M[rank][j] *= inv;
        for (int r = 0; r < rows; ++r) {
            if (r == rank || M[r][col] == 0) continue;
            Rat f = M[r][col];
            for (int j = col; j <= d; ++j) M[r][j] -= f * M[rank][j];
        }
        pivot_col[rank] = col;
        ++rank;
    }
    for (int r = rank; r < rows; ++r)
        if (M[r][d] != 0) throw invalid_argument_error("to_f0: element not in F0");
    std::vector<Rat> coeffs(d, Rat(0));
    for (int r = 0; r < rank; ++r) coeffs[pivot_col[r]] = M[r][d];
    return QPoly(std::move(coeffs));
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

NFMat::NFMat(const NumberField* field, int size)
    : K(field), n(size), a(static_cast<size_t>(size) * size, NFElem::from_rat(field, Rat(0))) {}

NFMat NFMat::identity(const NumberField* field, int size) {
    NFMat m(field, size);
    for (int i = 0; i < size; ++i) m.at(i, i) = NFElem::from_rat(field, Rat(1));
    return m;
}

NFMat NFMat::operator*(const NFMat& o) const {
    NFMat r(K, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (at(i, k).is_zero()) continue;
            for (int j = 0; j < n; ++j) r.at(i, j) = r.at(i, j) + at(i, k) * o.at(k, j);
        }
    return r;
}

NFMat NFMat::inverse() const {
    NFMat A(*this), I = identity(K, n);
    for (int col = 0; col < n; ++col) {
        int pr = -1;
        for (int r = col; r < n; ++r)
            if (!A.at(r, col).is_zero()) { pr = r; break; }
        if (pr < 0) throw invalid_argument_error("NFMat::inverse: singular");
        for (int j = 0; j < n; ++j) {
            std::swap(A.a[col * n + j], A.a[pr * n + j]);
            std::swap(I.a[col * n + j], I.a[pr * n + j]);
        }
        NFElem inv = A.at(col, col).inverse();
        for (int j = 0; j < n; ++j) {
            A.at(col, j) = A.at(col, j) * inv;
            I.at(col, j) = I.at(col, j) * inv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || A.at(r, col).is_zero()) continue;
            NFElem f = A.at(r, col);
            for (int j = 0; j < n; ++j) {
                A.at(r, j) = A.at(r, j) - f * A.at(col, j);
                I.at(r, j) = I.at(r, j) - f * I.at(col, j);
            }
        }
    }
    return I;
}

NFElem NFMat::det() const {
    NFMat A(*this);
    NFElem d = NFElem::from_rat(K, Rat(1));
    for (int col = 0; col < n; ++col) {
        int pr = -1;
        for (int r = col; r < n; ++r)
            if (!A.at(r, col).is_zero()) { pr = r; break; }
        if (pr < 0) return NFElem::from_rat(K, Rat(0));
        if (pr != col) {
            for (int j = 0; j < n; ++j) std::swap(A.a[col * n + j], A.a[pr * n + j]);
            d = -d;
        }
        d = d * A.at(col, col);
        NFElem inv = A.at(col, col).inverse();
        for (int r = col + 1; r < n; ++r) {
            if (A.at(r, col).is_zero()) continue;
            NFElem f = A.at(r, col) * inv;
            for (int j = col; j < n; ++j) A.at(r, j) = A.at(r, j) - f * A.at(col, j);
        }
    }
    return d;
}

NFMat NFMat::conj(const CMFieldData& Fd) const {
    NFMat r(K, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.at(i, j) = Fd.conj(at(i, j));
    return r;
}

std::vector<NFElem> charpoly(const NFMat& m) {
    // Faddeev-LeVerrier.
    int n = m.n;
    const NumberField* K = m.K;
    std::vector<NFElem> c(n + 1, NFElem::from_rat(K, Rat(0)));
    c[n] = NFElem::from_rat(K, Rat(1));
    NFMat Mk(K, n);  // zero
    for (int k = 1; k <= n; ++k) {
        // M_k = A*M_{k-1} + c_{n-k+1} I
        NFMat AM = m * Mk;
        for (int i = 0; i < n; ++i) AM.at(i, i) = AM.at(i, i) + c[n - k + 1];
        Mk = AM;
        NFMat prod = m * Mk;
        NFElem tr = NFElem::from_rat(K, Rat(0));
        for (int i = 0; i < n; ++i) tr = tr + prod.at(i, i);
        c[n - k] = tr * Rat(-1, k);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Invariants
// ---------------------------------------------------------------------------

NFMat OrbitPair::contraction() const {
    int m = n();
    NFMat iota = NFMat::identity(Fd.F.get(), m);
    for (int i = 0; i < m - 1; ++i)
        for (int j = 0; j < m - 1; ++j) iota.at(i, j) = gamma1.at(i, j);
    return iota.inverse() * gamma2;
}

NFMat OrbitPair::reduced() const {
    NFMat c = contraction();
    return c * c.conj(Fd).inverse();
}

OrbitInvariants invariants_of_matrix(const CMFieldData& Fd, const NFMat& s) {
    const NumberField* K = s.K;
    int n = s.n;
    OrbitInvariants inv;
    inv.charpoly = charpoly(s);
    // moments e* s^i e with e the last standard basis vector.
    std::vector<NFElem> pow_e(n, NFElem::from_rat(K, Rat(0)));
    pow_e[n - 1] = NFElem::from_rat(K, Rat(1));
    std::vector<std::vector<NFElem>> powers;  // s^i e as column vectors
    powers.push_back(pow_e);
    for (int i = 1; i < 2 * n - 1; ++i) {
        std::vector<NFElem> nxt(n, NFElem::from_rat(K, Rat(0)));
        for (int r = 0; r < n; ++r)
            for (int k = 0; k < n; ++k) nxt[r] = nxt[r] + s.at(r, k) * powers.back()[k];
        powers.push_back(nxt);
    }
    std::vector<NFElem> b;
    for (int i = 0; i < 2 * n - 1; ++i) b.push_back(powers[i][n - 1]);
    inv.moments.assign(b.begin(), b.begin() + n);
    NFMat M(K, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M.at(i, j) = b[i + j];
    inv.delta = M.det();
    inv.regular_semisimple = !inv.delta.is_zero();
    return inv;
}

OrbitInvariants invariants_linear(const OrbitPair& g) {
    return invariants_of_matrix(g.Fd, g.reduced());
}

std::pair<bool, NFElem> rs_test(const CMFieldData& Fd, const NFMat& g) {
    if (g.det().is_zero()) throw invalid_argument_error("rs_test: singular input");
    OrbitInvariants inv = invariants_of_matrix(Fd, g);
    return {inv.regular_semisimple, inv.delta};
}

NFMat UnitaryPair::contraction() const {
    int m = n();
    NFMat iota = NFMat::identity(Fd.F.get(), m);
    for (int i = 0; i < m - 1; ++i)
        for (int j = 0; j < m - 1; ++j) iota.at(i, j) = g1.at(i, j);
    return iota.inverse() * g2;
}

bool UnitaryPair::is_unitary() const {
    int m = n();
    const NumberField* K = Fd.F.get();
    // g2* J g2 = J with * = conjugate transpose.
    NFMat g2s(K, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g2s.at(i, j) = Fd.conj(g2.at(j, i));
    if (!((g2s * J) * g2 == J)) return false;
    // g1 preserves the upper-left block.
    NFMat Jf(K, m - 1), g1s(K, m - 1);
    for (int i = 0; i < m - 1; ++i)
        for (int j = 0; j < m - 1; ++j) {
            Jf.at(i, j) = J.at(i, j);
            g1s.at(i, j) = Fd.conj(g1.at(j, i));
        }
    // W = W^flat + F u orthogonally: J must be block diagonal.
    for (int i = 0; i < m - 1; ++i)
        if (!J.at(i, m - 1).is_zero() || !J.at(m - 1, i).is_zero()) return false;
    return (g1s * Jf) * g1 == Jf;
}

OrbitInvariants invariants_unitary(const UnitaryPair& g) {
    const NumberField* K = g.Fd.F.get();
    int n = g.n();
    NFMat c = g.contraction();
    OrbitInvariants inv;
    inv.charpoly = charpoly(c);
    // b_i = (c^i u, u)/(u,u) with (x,y) = x^T J conj(y), u = e_n.
    NFElem uu = g.J.at(n - 1, n - 1);
    if (uu.is_zero()) throw invalid_argument_error("invariants_unitary: isotropic special vector");
    std::vector<NFElem> vec(n, NFElem::from_rat(K, Rat(0)));
    vec[n - 1] = NFElem::from_rat(K, Rat(1));
    std::vector<NFElem> b;
    for (int i = 0; i < 2 * n - 1; ++i) {
        // (vec, u) = (vec^T J conj(u))_scalar = sum_k vec[k] J[k][n-1]
        NFElem val = NFElem::from_rat(K, Rat(0));
        for (int k = 0; k < n; ++k) val = val + vec[k] * g.J.at(k, n - 1);
        b.push_back(val / uu);
        std::vector<NFElem> nxt(n, NFElem::from_rat(K, Rat(0)));
        for (int r = 0; r < n; ++r)
            for (int k2 = 0; k2 < n; ++k2) nxt[r] = nxt[r] + c.at(r, k2) * vec[k2];
        vec = nxt;
    }
    inv.moments.assign(b.begin(), b.begin() + n);
    NFMat M(K, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M.at(i, j) = b[i + j];
    inv.delta = M.det();
    inv.regular_semisimple = !inv.delta.is_zero();
    return inv;
}

bool match(const OrbitPair& gamma, const UnitaryPair& g) {
    OrbitInvariants a = invariants_linear(gamma);
    OrbitInvariants b = invariants_unitary(g);
    if (!a.regular_semisimple || !b.regular_semisimple)
        throw not_regular_semisimple("match requires regular semisimple inputs");
    return a.same_orbit_data(b);
}

// ---------------------------------------------------------------------------
// Transfer factor
// ---------------------------------------------------------------------------

QPoly transfer_factor_argument(const OrbitPair& gamma) {
    const CMFieldData& Fd = gamma.Fd;
    const NumberField* K = Fd.F.get();
    int n = gamma.n();
    NFMat c = gamma.contraction();
    NFMat cbar = c.conj(Fd);
    NFMat rho = c * cbar.inverse();      // transforms by rational conjugation
    NFMat tau = c.inverse() * cbar;      //            "
    // U = [rho^j e], V = [tau^j c^{-1} e], e = last basis vector.
    NFMat U(K, n), V(K, n);
    std::vector<NFElem> u(n, NFElem::from_rat(K, Rat(0)));
    u[n - 1] = NFElem::from_rat(K, Rat(1));
    NFMat cinv = c.inverse();
    std::vector<NFElem> w(n, NFElem::from_rat(K, Rat(0)));
    for (int r = 0; r < n; ++r) w[r] = cinv.at(r, n - 1);
    for (int j = 0; j < n; ++j) {
        for (int r = 0; r < n; ++r) {
            U.at(r, j) = u[r];
            V.at(r, j) = w[r];
        }
        if (j + 1 < n) {
            std::vector<NFElem> nu(n, NFElem::from_rat(K, Rat(0))),
                nw(n, NFElem::from_rat(K, Rat(0)));
            for (int r = 0; r < n; ++r)
                for (int k = 0; k < n; ++k) {
                    nu[r] = nu[r] + rho.at(r, k) * u[k];
                    nw[r] = nw[r] + tau.at(r, k) * w[k];
                }
            u = nu;
            w = nw;
        }
    }
    NFElem dU = U.det(), dV = V.det();
    if (dU.is_zero() || dV.is_zero())
        throw not_regular_semisimple("transfer factor: cyclic matrices degenerate");
    NFElem y = NFElem::from_rat(K, Rat(1));
    for (int i = 0; i < n; ++i) y = y * dU;
    for (int i = 0; i < n - 1; ++i) y = y * dV;
    int residue = ((n % 4) == 2 || (n % 4) == 3) ? 1 : 0;
    if (residue) y = y / NFElem(K, Fd.sqrt_delta);
    if (!Fd.is_f0_rational(y))
        throw error("transfer factor argument not F0-rational (internal)");
    return Fd.to_f0(y);
}

int transfer_factor(const OrbitPair& gamma, const Place& v) {
    QPoly y = transfer_factor_argument(gamma);
    return gamma.Fd.tower->eta(v, y);
}

QPoly matching_discriminant(const CMFieldData& Fd, const OrbitInvariants& inv) {
    const NumberField* K = Fd.F.get();
    int n = static_cast<int>(inv.moments.size());
    if (!inv.regular_semisimple) throw not_regular_semisimple("matching discriminant");
    // D = det(moment matrix) * det(s)^{-(n-1)}; det(s) = (-1)^n c_0 of charpoly.
    NFElem det_s = inv.charpoly[0] * Rat((n % 2) ? -1 : 1);
    NFElem D = inv.delta;
    NFElem dsi = det_s.inverse();
    for (int i = 0; i < n - 1; ++i) D = D * dsi;
    if (!Fd.is_f0_rational(D)) throw error("matching discriminant not F0-rational (internal)");
    // Normalization fixed against the low-rank unitary enumeration oracle:
    // the matching space has inv_v(W_v) = eta_v((-1)^(n(n-1)/2) * (u,u)^n-free
    // discriminant); the (-1) power is carried here so which_space returns
    // inv_v(W_v) directly.
    QPoly Df0 = Fd.to_f0(D);
    if (((n * (n - 1) / 2) % 2)) Df0 = -Df0;
    return Df0;
}

int which_space(const CMFieldData& Fd, const OrbitInvariants& inv, const Place& v) {
    return Fd.tower->eta(v, matching_discriminant(Fd, inv));
}

UnitaryPair unitary_section(const CMFieldData& Fd, const OrbitInvariants& inv,
                            const QPoly& uu_f0) {
    const NumberField* K = Fd.F.get();
    int n = static_cast<int>(inv.moments.size());
    if (!inv.regular_semisimple) throw not_regular_semisimple("unitary_section");
    if (!(inv.moments[0] == NFElem::from_rat(K, Rat(1))))
        throw invalid_argument_error("unitary_section: b_0 != 1");
    NFElem uu = Fd.from_f0(uu_f0);
    // Extended moments b_{-k} = conj(b_k), b_k for k >= n via the charpoly
    // recursion s^n = -sum a_i s^i.
    std::vector<NFElem> bpos(inv.moments);
    while (static_cast<int>(bpos.size()) < 2 * n) {
        NFElem nxt = NFElem::from_rat(K, Rat(0));
        int m = static_cast<int>(bpos.size());
        for (int i = 0; i < n; ++i) nxt = nxt - inv.charpoly[i] * bpos[m - n + i];
        bpos.push_back(nxt);
    }
    auto b_at = [&](int k) {
        if (k >= 0) return bpos[k];
        return Fd.conj(bpos[-k]);
    };
    // Frame F_j = c^{n-1-j} u, so u is the last frame vector; Gram G_{ij} =
    // (F_i, F_j) = (u,u) * b_{j-i} (the form is linear in the first slot).
    NFMat G(K, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G.at(i, j) = uu * b_at(j - i);
    if (G.det().is_zero()) throw not_regular_semisimple("unitary_section: degenerate frame Gram");
    // Action of c on the frame: c F_j = F_{j-1} (j >= 1); c F_0 = c^n u =
    // -sum a_i F_{n-1-i}.
    NFMat g2(K, n);
    for (int j = 1; j < n; ++j) g2.at(j - 1, j) = NFElem::from_rat(K, Rat(1));
    for (int i = 0; i < n; ++i) g2.at(n - 1 - i, 0) = -inv.charpoly[i];
    // Orthogonalize the first n-1 frame vectors against u (exact Gram-Schmidt
    // in the last coordinate only), to reach a block-diagonal Gram.
    NFMat T = NFMat::identity(K, n);
    NFElem uu_inv = G.at(n - 1, n - 1).inverse();
    for (int j = 0; j + 1 < n; ++j) T.at(n - 1, j) = -(G.at(j, n - 1) * uu_inv);
    // New Gram and transported action.
    NFMat Ts(K, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Ts.at(i, j) = Fd.conj(T.at(j, i));
    NFMat Gb = (Ts * G) * T;
    NFMat g2b = (T.inverse() * g2) * T;
    UnitaryPair out;
    out.Fd = Fd;
    out.g1 = NFMat::identity(K, n - 1);
    out.g2 = g2b;
    out.J = Gb;
    if (!out.is_unitary())
        throw invalid_argument_error("unitary_section: invariants violate the unitary relations");
    OrbitInvariants chk = invariants_unitary(out);
    if (!chk.same_orbit_data(inv)) throw error("unitary_section: invariant mismatch (internal)");
    return out;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

AssembleResult assemble_J(const OrbitTable& table) {
    if (table.regular_place.empty())
        throw infinite_support("assemble_J requires a declared regular-support place");
    bool found = std::find(table.place_keys.begin(), table.place_keys.end(),
                           table.regular_place) != table.place_keys.end();
    if (!found && !table.rows.empty())
        throw infinite_support("declared regular place not among the table places");
    AssembleResult out;
    out.J = Rat(0);
    out.dJ_total = Rat(0);
    for (const auto& v : table.place_keys) out.dJ[v] = Rat(0);
    for (const auto& row : table.rows) {
        Rat prod(1);
        for (const auto& v : table.place_keys) {
            auto it = row.orb.find(v);
            prod *= (it == row.orb.end()) ? Rat(1) : it->second;
        }
        out.J += prod;
        for (const auto& v : table.place_keys) {
            auto itd = row.dorb.find(v);
            Rat d = (itd == row.dorb.end()) ? Rat(0) : itd->second;
            if (d == 0) continue;
            Rat rest(1);
            for (const auto& u : table.place_keys) {
                if (u == v) continue;
                auto it = row.orb.find(u);
                rest *= (it == row.orb.end()) ? Rat(1) : it->second;
            }
            out.dJ[v] += d * rest;
        }
    }
    for (const auto& [v, d] : out.dJ) out.dJ_total += d;
    return out;
}

}  // namespace cmtbx
