#include "cmtbx/numberfield.hpp"

#include "cmtbx/zfactor.hpp"

#include <algorithm>
#include <map>

namespace cmtbx {

NFElem NFElem::inverse() const {
    if (is_zero()) throw invalid_argument_error("NFElem inverse of zero");
    // Extended Euclid in Q[t] against the minimal polynomial.
    QPoly r0 = K->minpoly(), r1 = v;
    QPoly s0, s1(Rat(1));
    while (!r1.is_zero()) {
        auto [q, r] = r0.divrem(r1);
        QPoly s2 = s0 - q * s1;
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    if (r0.degree() != 0) throw error("NFElem inverse: generator polynomial not irreducible?");
    return NFElem(K, s0 * (1 / r0[0]));
}

NFPoly NFPoly::from_qpoly(const NumberField* field, const QPoly& f) {
    std::vector<NFElem> cs;
    for (int i = 0; i <= f.degree(); ++i) cs.push_back(NFElem::from_rat(field, f[i]));
    return NFPoly(field, std::move(cs));
}

NFPoly NFPoly::operator+(const NFPoly& o) const {
    std::vector<NFElem> r(std::max(c.size(), o.c.size()), NFElem::from_rat(K, Rat(0)));
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(static_cast<int>(i)) + o.coeff(static_cast<int>(i));
    return NFPoly(K, std::move(r));
}

NFPoly NFPoly::operator-(const NFPoly& o) const {
    std::vector<NFElem> r(std::max(c.size(), o.c.size()), NFElem::from_rat(K, Rat(0)));
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(static_cast<int>(i)) - o.coeff(static_cast<int>(i));
    return NFPoly(K, std::move(r));
}

NFPoly NFPoly::operator*(const NFPoly& o) const {
    if (is_zero() || o.is_zero()) return NFPoly(K);
    std::vector<NFElem> r(c.size() + o.c.size() - 1, NFElem::from_rat(K, Rat(0)));
    for (size_t i = 0; i < c.size(); ++i)
        for (size_t j = 0; j < o.c.size(); ++j) r[i + j] = r[i + j] + c[i] * o.c[j];
    return NFPoly(K, std::move(r));
}

NFPoly NFPoly::monic() const {
    if (is_zero()) return *this;
    NFElem inv = lc().inverse();
    std::vector<NFElem> r(c);
    for (auto& x : r) x = x * inv;
    return NFPoly(K, std::move(r));
}

std::pair<NFPoly, NFPoly> NFPoly::divrem(const NFPoly& o) const {
    if (o.is_zero()) throw invalid_argument_error("NFPoly division by zero");
    std::vector<NFElem> rem(c);
    int dr = degree(), dq = o.degree();
    if (dr < dq) return {NFPoly(K), *this};
    std::vector<NFElem> quo(dr - dq + 1, NFElem::from_rat(K, Rat(0)));
    NFElem inv = o.lc().inverse();
    for (int k = dr; k >= dq; --k) {
        NFElem q = rem[k] * inv;
        if (q.is_zero()) continue;
        quo[k - dq] = q;
        for (int j = 0; j <= dq; ++j) rem[k - dq + j] = rem[k - dq + j] - q * o.c[j];
    }
    return {NFPoly(K, std::move(quo)), NFPoly(K, std::move(rem))};
}

NFPoly NFPoly::derivative() const {
    if (c.size() <= 1) return NFPoly(K);
    std::vector<NFElem> r(c.size() - 1, NFElem::from_rat(K, Rat(0)));
    for (size_t i = 1; i < c.size(); ++i) r[i - 1] = c[i] * Rat(static_cast<long>(i));
    return NFPoly(K, std::move(r));
}

NFElem NFPoly::eval(const NFElem& x) const {
    NFElem r = NFElem::from_rat(K, Rat(0));
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

NFPoly gcd_poly(NFPoly a, NFPoly b) {
    while (!b.is_zero()) {
        NFPoly r = a.divrem(b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.is_zero() ? a : a.monic();
}

namespace {

// Norm of f(x - s*theta) as a polynomial in x: Res_t(M(t), F(x,t)) computed by
// evaluation at enough rational points and Lagrange interpolation.
QPoly resultant_norm(const NFPoly& f, long s) {
    const NumberField* K = f.K;
    const QPoly& M = K->minpoly();
    int D = f.degree() * M.degree();
    // g_x0(t) = sum_i c_i(t) * (x0 - s t)^i.
    auto eval_at = [&](const Rat& x0) {
        QPoly shift(std::vector<Rat>{x0, Rat(-s)});  // x0 - s*t
        QPoly acc;  // in t
        QPoly pw(Rat(1));
        for (int i = 0; i <= f.degree(); ++i) {
            acc = acc + f.coeff(i).v * pw;
            pw = pw * shift;
        }
        return resultant(M, acc);
    };
    // Lagrange interpolation through x0 = 0..D.
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
    return result;
}

}  // namespace

std::vector<NFPoly> factor_over_field(const NFPoly& f0) {
    const NumberField* K = f0.K;
    NFPoly f = f0.monic();
    if (f.degree() <= 1) return {f};
    if (K->is_rationals()) {
        QPoly g;
        {
            std::vector<Rat> cs(f.degree() + 1);
            for (int i = 0; i <= f.degree(); ++i) cs[i] = f.coeff(i).v[0];
            g = QPoly(std::move(cs));
        }
        std::vector<NFPoly> out;
        for (auto& [h, m] : factor_over_Q(g)) {
            if (m != 1) throw invalid_argument_error("factor_over_field requires squarefree input");
            out.push_back(NFPoly::from_qpoly(K, h));
        }
        return out;
    }
    // Trager: find s with squarefree norm.
    for (long s = 0; s < 200; ++s) {
        for (long sign : {1L, -1L}) {
            long sh = s * sign;
            if (s == 0 && sign < 0) continue;
            QPoly N = resultant_norm(f, sh);
            if (N.degree() != f.degree() * K->degree()) continue;
            if (gcd_poly(N, N.derivative()).degree() != 0) continue;
            auto nf = factor_over_Q(N);
            std::vector<NFPoly> out;
            NFElem theta = NFElem::gen(K);
            for (auto& [Ni, m] : nf) {
                (void)m;
                // gcd(f(x), N_i(x + s*theta)).
                NFPoly shifted(K);
                {
                    // substitute x -> x + s*theta
                    NFPoly acc(K);
                    NFPoly lin(K, {theta * Rat(sh), NFElem::from_rat(K, Rat(1))});
                    for (int i = Ni.degree(); i >= 0; --i) {
                        acc = acc * lin;
                        acc = acc + NFPoly(K, {NFElem::from_rat(K, Ni[i])});
                    }
                    shifted = acc;
                }
                NFPoly g = gcd_poly(f, shifted);
                if (g.degree() > 0) out.push_back(g.monic());
            }
            // Sanity: degrees must add up.
            int total = 0;
            for (const auto& g : out) total += g.degree();
            if (total == f.degree()) {
                std::sort(out.begin(), out.end(), [](const NFPoly& a, const NFPoly& b) {
                    if (a.degree() != b.degree()) return a.degree() < b.degree();
                    for (int i = a.degree(); i >= 0; --i) {
                        const auto& ca = a.c[i].v.coeffs();
                        const auto& cb = b.c[i].v.coeffs();
                        if (ca != cb) return ca < cb;
                    }
                    return false;
                });
                return out;
            }
        }
    }
    throw error("factor_over_field: no squarefree norm shift found");
}

std::vector<NFElem> roots_in_field(const NFPoly& f) {
    std::vector<NFElem> out;
    for (const auto& g : factor_over_field(f))
        if (g.degree() == 1) out.push_back(-g.coeff(0));
    return out;
}

namespace {

// Extend K by a root of the irreducible h over K. Returns the new field, the
// image of K's generator, and the root of h, all inside the new field.
struct Extension {
    std::shared_ptr<NumberField> field;
    QPoly old_gen_image;  // polynomial in the new generator
    QPoly root_image;
};

Extension extend_by(const std::shared_ptr<NumberField>& K, const NFPoly& h) {
    if (K->is_rationals()) {
        // New field is Q[x]/(h) directly.
        std::vector<Rat> cs(h.degree() + 1);
        for (int i = 0; i <= h.degree(); ++i) cs[i] = h.coeff(i).v[0];
        auto field = std::make_shared<NumberField>(QPoly(std::move(cs)));
        return {field, QPoly(), QPoly::x()};
    }
    for (long s = 1; s < 200; ++s) {
        QPoly N = resultant_norm(h, s);
        if (N.degree() != h.degree() * K->degree()) continue;
        if (gcd_poly(N, N.derivative()).degree() != 0) continue;
        // N is the minimal polynomial of beta + s*theta (irreducible since its
        // degree equals [K(beta):Q] once squarefree).
        auto field = std::make_shared<NumberField>(N.monic());
        // Recover theta inside the new field: gcd over field of
        // (M(t), h-with-theta-written-as-t evaluated at x = u - s t).
        const NumberField* Kf = field.get();
        NFElem u = NFElem::gen(Kf);
        NFPoly Mt = NFPoly::from_qpoly(Kf, K->minpoly());  // in variable t
        // H(t) = sum_j c_j(t) (u - s t)^j where c_j are the Q[t]-coefficients of h.
        NFPoly lin(Kf, {u, NFElem::from_rat(Kf, Rat(-s))});  // u - s t as poly in t
        NFPoly H(Kf);
        NFPoly pw(Kf, {NFElem::from_rat(Kf, Rat(1))});
        for (int j = 0; j <= h.degree(); ++j) {
            // c_j as polynomial in t with rational coefficients, coefficients
            // embedded into the new field as constants.
            NFPoly cj = NFPoly::from_qpoly(Kf, h.coeff(j).v);
            H = H + cj * pw;
            pw = pw * lin;
        }
        NFPoly g = gcd_poly(Mt, H);
        if (g.degree() != 1) continue;
        NFElem theta_img = -(g.coeff(0) * g.coeff(1).inverse());
        QPoly root_img = (u - theta_img * Rat(s)).v;
        return {field, theta_img.v, root_img};
    }
    throw error("extend_by: no primitive shift found");
}

}  // namespace

NFElem SplittingField::apply(int g, const NFElem& x) const {
    // Substitute the automorphism image into the residue polynomial.
    NFElem img = NFElem::from_rat(N.get(), Rat(0));
    NFElem a = automorphism_images[g];
    for (int i = x.v.degree(); i >= 0; --i) img = img * a + NFElem::from_rat(N.get(), x.v[i]);
    return img;
}

SplittingField splitting_field(const QPoly& f0, int degree_cap) {
    QPoly f = squarefree_part(f0.monic());
    auto N = std::make_shared<NumberField>(NumberField::rationals());
    for (;;) {
        NFPoly fN = NFPoly::from_qpoly(N.get(), f);
        auto factors = factor_over_field(fN);
        const NFPoly* nonlinear = nullptr;
        for (const auto& g : factors)
            if (g.degree() > 1) {
                nonlinear = &g;
                break;
            }
        if (!nonlinear) {
            SplittingField out;
            out.N = N;
            for (const auto& g : factors) out.roots.push_back(-g.coeff(0));
            std::sort(out.roots.begin(), out.roots.end(), [](const NFElem& a, const NFElem& b) {
                return a.v.coeffs() < b.v.coeffs();
            });
            // Automorphisms: roots of the minimal polynomial of the generator.
            NFPoly M = NFPoly::from_qpoly(N.get(), N->minpoly());
            std::vector<NFElem> gen_roots = roots_in_field(M);
            if (static_cast<int>(gen_roots.size()) != N->degree())
                throw error("splitting_field: field not normal (internal)");
            std::sort(gen_roots.begin(), gen_roots.end(), [](const NFElem& a, const NFElem& b) {
                return a.v.coeffs() < b.v.coeffs();
            });
            for (const auto& gr : gen_roots) {
                out.automorphism_images.push_back(gr);
                std::vector<int> perm(out.roots.size());
                for (size_t i = 0; i < out.roots.size(); ++i) {
                    // image of root i under t -> gr
                    NFElem img = NFElem::from_rat(N.get(), Rat(0));
                    for (int k = out.roots[i].v.degree(); k >= 0; --k)
                        img = img * gr + NFElem::from_rat(N.get(), out.roots[i].v[k]);
                    auto it = std::find(out.roots.begin(), out.roots.end(), img);
                    if (it == out.roots.end()) throw error("splitting_field: automorphism does not permute roots");
                    perm[i] = static_cast<int>(it - out.roots.begin());
                }
                out.perms.push_back(std::move(perm));
            }
            return out;
        }
        if (N->degree() * nonlinear->degree() > degree_cap)
            throw degree_bound_exceeded("splitting field degree exceeds cap");
        Extension ext = extend_by(N, *nonlinear);
        N = ext.field;
    }
}

}  // namespace cmtbx
