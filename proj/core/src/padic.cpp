#include "cmtbx/padic.hpp"

namespace cmtbx {

int ZpElem::precision_floor = 4;

ZpElem::ZpElem(Int p, long val, Int unit, int prec)
    : p_(std::move(p)), val_(val), unit_(std::move(unit)), prec_(prec) {
    if (prec_ < 1) throw precision_exhausted("ZpElem constructed with nonpositive precision");
    unit_ = mod_pos(unit_, pow_int(p_, prec_));
    if (unit_ % p_ == 0) throw invalid_argument_error("ZpElem unit part divisible by p");
}

ZpElem ZpElem::from_rat(const Int& p, const Rat& x, int prec) {
    if (x == 0) throw invalid_argument_error("ZpElem::from_rat(0)");
    long v = p_valuation(x, p);
    Rat u = x / Rat(pow_int(p, static_cast<unsigned long>(std::abs(v))));
    if (v < 0) u = x * Rat(pow_int(p, static_cast<unsigned long>(-v)));
    Int pN = pow_int(p, prec);
    Int den_inv;
    if (mpz_invert(den_inv.get_mpz_t(), u.get_den().get_mpz_t(), pN.get_mpz_t()) == 0)
        throw invalid_argument_error("ZpElem::from_rat: denominator not unit");
    return ZpElem(p, v, mod_pos(u.get_num() * den_inv, pN), prec);
}

ZpElem ZpElem::operator*(const ZpElem& o) const {
    int N = std::min(prec_, o.prec_);
    return ZpElem(p_, val_ + o.val_, mod_pos(unit_ * o.unit_, pow_int(p_, N)), N);
}

ZpElem ZpElem::operator/(const ZpElem& o) const {
    int N = std::min(prec_, o.prec_);
    Int pN = pow_int(p_, N), inv;
    mpz_invert(inv.get_mpz_t(), o.unit_.get_mpz_t(), pN.get_mpz_t());
    return ZpElem(p_, val_ - o.val_, mod_pos(unit_ * inv, pN), N);
}

ZpElem ZpElem::operator+(const ZpElem& o) const {
    long v0 = std::min(val_, o.val_);
    int N = std::min(prec_, o.prec_);
    Int pN = pow_int(p_, N);
    Int a = mod_pos(unit_ * pow_int(p_, static_cast<unsigned long>(val_ - v0)), pN);
    Int b = mod_pos(o.unit_ * pow_int(p_, static_cast<unsigned long>(o.val_ - v0)), pN);
    Int s = mod_pos(a + b, pN);
    if (s == 0) throw precision_exhausted("ZpElem addition cancels to working precision");
    long extra = p_valuation(s, p_);
    if (N - extra < precision_floor)
        throw precision_exhausted("ZpElem addition drops below precision floor");
    return ZpElem(p_, v0 + extra, s / pow_int(p_, static_cast<unsigned long>(extra)), N - static_cast<int>(extra));
}

UnramifiedRing::UnramifiedRing(Int p, int N, modp::P lifted_factor)
    : p_(std::move(p)), N_(N), g_(std::move(lifted_factor)) {
    pN_ = pow_int(p_, N_);
    g_ = modp::reduce(g_, pN_);
    if (g_.back() != 1) throw invalid_argument_error("UnramifiedRing: factor must be monic");
    modp::P gbar = modp::reduce(g_, p_);
    if (!modp::is_irreducible_mod_p(gbar, p_))
        throw invalid_argument_error("UnramifiedRing: residue polynomial reducible");
    Fq_ = std::make_shared<Fq>(p_, gbar);
}

bool UnramifiedRing::is_unit(const E& a) const {
    return !modp::reduce(reduce(a), p_).empty();
}

UnramifiedRing::E UnramifiedRing::inv(const E& a) const {
    if (!is_unit(a)) throw invalid_argument_error("UnramifiedRing::inv of non-unit");
    // Inverse in F_q, then Newton iteration b <- b(2 - a b) up to p^N.
    modp::P gbar = modp::reduce(g_, p_);
    modp::P abar = modp::reduce(reduce(a), p_);
    // Extended Euclid over F_p[t].
    modp::P r0 = gbar, r1 = abar, s0 = {}, s1 = {Int(1)};
    while (!r1.empty()) {
        auto [q, r] = modp::divrem(r0, r1, p_);
        modp::P s2 = modp::sub(s0, modp::mul(q, s1, p_), p_);
        r0 = r1; r1 = r;
        s0 = s1; s1 = s2;
    }
    Int c_inv;
    mpz_invert(c_inv.get_mpz_t(), r0[0].get_mpz_t(), p_.get_mpz_t());
    E b = modp::scal(s0, c_inv, p_);
    int k = 1;
    while (k < N_) {
        k *= 2;
        Int pk = pow_int(p_, std::min(k, N_));
        E two_minus = modp::sub({Int(2)}, modp::divrem(modp::mul(reduce(a), b, pk),
                                                       modp::reduce(g_, pk), pk).second, pk);
        b = modp::divrem(modp::mul(b, two_minus, pk), modp::reduce(g_, pk), pk).second;
    }
    return reduce(b);
}

long UnramifiedRing::val(const E& a) const {
    E r = reduce(a);
    if (r.empty()) throw precision_exhausted("UnramifiedRing::val of (apparent) zero");
    long v = N_;
    for (const auto& c : r)
        if (c != 0) v = std::min(v, p_valuation(c, p_));
    if (v >= N_) throw precision_exhausted("UnramifiedRing::val saturated at precision");
    return v;
}

UnramifiedRing::E UnramifiedRing::unit_part(const E& a) const {
    long v = val(a);
    Int pv = pow_int(p_, static_cast<unsigned long>(v));
    E r = reduce(a);
    for (auto& c : r) c /= pv;
    return modp::reduce(r, pN_);
}

Fq::E UnramifiedRing::residue(const E& a) const {
    return modp::reduce(reduce(a), p_);
}

UnramifiedRing::E UnramifiedRing::from_rat(const Rat& a) const {
    Int inv;
    if (mpz_invert(inv.get_mpz_t(), a.get_den().get_mpz_t(), pN_.get_mpz_t()) == 0)
        throw invalid_argument_error("UnramifiedRing::from_rat: denominator not unit");
    return from_int(mod_pos(a.get_num() * inv, pN_));
}

Int UnramifiedRing::norm_to_qp(const E& a) const {
    int n = f();
    // Multiplication matrix of a on the power basis, entries lifted to Z;
    // exact integer determinant reduced mod p^N.
    std::vector<std::vector<Int>> M(n, std::vector<Int>(n, Int(0)));
    E col = reduce(a);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) M[i][j] = (i < static_cast<int>(col.size())) ? col[i] : Int(0);
        col = mul(col, {Int(0), Int(1)});
    }
    // Fraction-free Gaussian elimination (Bareiss) over Z.
    Int denom(1);
    Int sign(1);
    for (int k = 0; k < n - 1; ++k) {
        if (M[k][k] == 0) {
            int swap_row = -1;
            for (int i = k + 1; i < n; ++i)
                if (M[i][k] != 0) { swap_row = i; break; }
            if (swap_row < 0) return 0;
            std::swap(M[k], M[swap_row]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                M[i][j] = M[k][k] * M[i][j] - M[i][k] * M[k][j];
                if (k > 0) M[i][j] /= denom;
            }
        denom = M[k][k];
    }
    return mod_pos(sign * M[n - 1][n - 1], pN_);
}

namespace {

int eps2(const Int& u) { return mpz_tstbit(Int((u - 1) / 2).get_mpz_t(), 0); }
int omega2(const Int& u) { return mpz_tstbit(Int((u * u - 1) / 8).get_mpz_t(), 0); }

}  // namespace

int hilbert_symbol_2(const Rat& a, const Rat& b) {
    if (a == 0 || b == 0) throw invalid_argument_error("hilbert_symbol_2 of zero");
    Int two(2);
    long alpha = p_valuation(a, two), beta = p_valuation(b, two);
    Rat ua = a / Rat(pow_int(two, static_cast<unsigned long>(std::abs(alpha))));
    if (alpha < 0) ua = a * Rat(pow_int(two, static_cast<unsigned long>(-alpha)));
    Rat ub = b / Rat(pow_int(two, static_cast<unsigned long>(std::abs(beta))));
    if (beta < 0) ub = b * Rat(pow_int(two, static_cast<unsigned long>(-beta)));
    // Units mod 8 determine the symbol.
    Int m(8), inv_a, inv_b;
    mpz_invert(inv_a.get_mpz_t(), ua.get_den().get_mpz_t(), m.get_mpz_t());
    mpz_invert(inv_b.get_mpz_t(), ub.get_den().get_mpz_t(), m.get_mpz_t());
    Int u = mod_pos(ua.get_num() * inv_a, m);
    Int v = mod_pos(ub.get_num() * inv_b, m);
    int e = eps2(u) * eps2(v) + static_cast<int>(mod_pos(Int(alpha), Int(2)).get_si()) * omega2(v) +
            static_cast<int>(mod_pos(Int(beta), Int(2)).get_si()) * omega2(u);
    return (e % 2) ? -1 : 1;
}

int hilbert_symbol_odd(const Rat& a, const Rat& b, const Int& p) {
    if (a == 0 || b == 0) throw invalid_argument_error("hilbert_symbol_odd of zero");
    long alpha = p_valuation(a, p), beta = p_valuation(b, p);
    auto unit_of = [&](const Rat& x, long v) {
        Rat u = x;
        if (v > 0) u /= Rat(pow_int(p, static_cast<unsigned long>(v)));
        if (v < 0) u *= Rat(pow_int(p, static_cast<unsigned long>(-v)));
        Int inv;
        mpz_invert(inv.get_mpz_t(), u.get_den().get_mpz_t(), p.get_mpz_t());
        return mod_pos(u.get_num() * inv, p);
    };
    Int u = unit_of(a, alpha), v = unit_of(b, beta);
    // (a,b)_p = (-1)^(alpha*beta*eps(p)) (u/p)^beta (v/p)^alpha.
    int s = 1;
    if ((alpha % 2) && (beta % 2) && ((p - 1) / 2) % 2 == 1) s = -s;
    if (beta % 2) s *= legendre(u, p);
    if (alpha % 2) s *= legendre(v, p);
    return s;
}

bool is_square_unramified_2adic(const UnramifiedRing& K, const UnramifiedRing::E& x) {
    if (K.p() != 2) throw invalid_argument_error("is_square_unramified_2adic: p != 2");
    if (K.N() < 3) throw precision_exhausted("need precision >= 3 for 2-adic square test");
    long v = K.val(x);
    if (v % 2) return false;
    auto u = K.unit_part(x);
    // u is a square iff it is a square mod 8 (Hensel: val(w^2-u) >= 3 > 2*val(2)).
    Int m(8);
    modp::P u8 = modp::reduce(u, m);
    int f = K.f();
    std::vector<Int> w(f, Int(0));
    for (;;) {
        modp::P we = modp::trim(w);
        modp::P sq = modp::divrem(modp::mul(we, we, m), modp::reduce(K.modulus(), m), m).second;
        if (sq == u8) return true;
        int i = 0;
        while (i < f) {
            w[i] += 1;
            if (w[i] < m) break;
            w[i] = 0;
            ++i;
        }
        if (i == f) return false;
    }
}

}  // namespace cmtbx
