#include "cmtbx/poly.hpp"

#include <algorithm>
#include <sstream>

namespace cmtbx {

QPoly QPoly::operator+(const QPoly& o) const {
    std::vector<Rat> r(std::max(c_.size(), o.c_.size()));
    for (size_t i = 0; i < r.size(); ++i) r[i] = (*this)[static_cast<int>(i)] + o[static_cast<int>(i)];
    return QPoly(std::move(r));
}

QPoly QPoly::operator-(const QPoly& o) const {
    std::vector<Rat> r(std::max(c_.size(), o.c_.size()));
    for (size_t i = 0; i < r.size(); ++i) r[i] = (*this)[static_cast<int>(i)] - o[static_cast<int>(i)];
    return QPoly(std::move(r));
}

QPoly QPoly::operator*(const QPoly& o) const {
    if (is_zero() || o.is_zero()) return QPoly();
    std::vector<Rat> r(c_.size() + o.c_.size() - 1);
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return QPoly(std::move(r));
}

QPoly QPoly::operator*(const Rat& k) const {
    std::vector<Rat> r(c_);
    for (auto& x : r) x *= k;
    return QPoly(std::move(r));
}

std::pair<QPoly, QPoly> QPoly::divrem(const QPoly& o) const {
    if (o.is_zero()) throw invalid_argument_error("division by zero polynomial");
    std::vector<Rat> rem(c_);
    int dr = degree(), dq = o.degree();
    if (dr < dq) return {QPoly(), *this};
    std::vector<Rat> quo(dr - dq + 1);
    Rat inv = 1 / o.lc();
    for (int k = dr; k >= dq; --k) {
        Rat q = rem[k] * inv;
        if (q == 0) continue;
        quo[k - dq] = q;
        for (int j = 0; j <= dq; ++j) rem[k - dq + j] -= q * o[j];
    }
    return {QPoly(std::move(quo)), QPoly(std::move(rem))};
}

QPoly QPoly::derivative() const {
    if (c_.size() <= 1) return QPoly();
    std::vector<Rat> r(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Rat(static_cast<long>(i));
    return QPoly(std::move(r));
}

Rat QPoly::eval(const Rat& x) const {
    Rat r(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
}

QPoly QPoly::compose(const QPoly& inner) const {
    QPoly r;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * inner + QPoly(*it);
    return r;
}

QPoly QPoly::monic() const {
    if (is_zero()) return *this;
    return *this * (1 / lc());
}

QPoly QPoly::shift_arg(const Rat& a) const {
    return compose(QPoly(std::vector<Rat>{a, Rat(1)}));
}

QPoly QPoly::primitive_part() const {
    if (is_zero()) return *this;
    Int den(1);
    for (const auto& c : c_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
    Int content(0);
    std::vector<Rat> r(c_);
    for (auto& c : r) {
        c *= Rat(den);
        mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_num().get_mpz_t());
    }
    if (content == 0) content = 1;
    if (r.back() < 0) content = -content;
    for (auto& c : r) c /= Rat(content);
    return QPoly(std::move(r));
}

bool QPoly::is_integral() const {
    for (const auto& c : c_)
        if (c.get_den() != 1) return false;
    return true;
}

std::string QPoly::str(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const Rat& c = (*this)[k];
        if (c == 0) continue;
        if (!first) os << (c > 0 ? " + " : " - ");
        else if (c < 0) os << "-";
        Rat a = abs(c);
        if (k == 0 || a != 1) os << a.get_str();
        if (k > 0) {
            if (a != 1) os << "*";
            os << var;
            if (k > 1) os << "^" << k;
        }
        first = false;
    }
    return os.str();
}

QPoly gcd_poly(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly r = a.mod(b);
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

QPoly squarefree_part(const QPoly& f) {
    if (f.degree() <= 0) return f.monic();
    QPoly g = gcd_poly(f, f.derivative());
    return f.divrem(g).first.monic();
}

Rat resultant(const QPoly& a, const QPoly& b) {
    // Euclidean remainder sequence with the standard sign/leading-coefficient
    // bookkeeping: res(a,b) = lc(b)^(da-dc) * (-1)^(da*db) * res(b, a mod b).
    if (a.is_zero() || b.is_zero()) return Rat(0);
    QPoly f = a, g = b;
    Rat acc(1);
    for (;;) {
        int df = f.degree(), dg = g.degree();
        if (dg == 0) {
            Rat r = g.lc();
            Rat p(1);
            for (int i = 0; i < df; ++i) p *= r;
            return acc * p;
        }
        QPoly r = f.mod(g);
        if (r.is_zero()) return Rat(0);
        int dr = r.degree();
        Rat lg = g.lc();
        Rat p(1);
        for (int i = 0; i < df - dr; ++i) p *= lg;
        acc *= p;
        if ((df % 2) && (dg % 2)) acc = -acc;
        f = std::move(g);
        g = std::move(r);
    }
}

Rat discriminant(const QPoly& f) {
    int n = f.degree();
    if (n < 1) throw invalid_argument_error("discriminant of constant");
    Rat r = resultant(f, f.derivative()) / f.lc();
    if (((n * (n - 1)) / 2) % 2) r = -r;
    return r;
}

namespace {

std::vector<QPoly> sturm_chain(const QPoly& f) {
    std::vector<QPoly> ch;
    ch.push_back(f);
    ch.push_back(f.derivative());
    while (!ch.back().is_zero()) {
        QPoly r = ch[ch.size() - 2].mod(ch.back());
        ch.push_back(-r);
    }
    ch.pop_back();
    return ch;
}

int sign_changes_at(const std::vector<QPoly>& ch, const Rat& x) {
    int cnt = 0, last = 0;
    for (const auto& p : ch) {
        Rat v = p.eval(x);
        int s = (v > 0) - (v < 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++cnt;
        last = s;
    }
    return cnt;
}

Rat root_bound(const QPoly& f) {
    // Cauchy bound 1 + max |a_i| / |a_n|.
    Rat m(0);
    for (int i = 0; i < f.degree(); ++i) m = std::max(m, abs(f[i]));
    return Rat(1) + m / abs(f.lc());
}

}  // namespace

std::vector<RealRootInterval> isolate_real_roots(const QPoly& f) {
    QPoly sf = squarefree_part(f);
    if (sf.degree() <= 0) return {};
    auto ch = sturm_chain(sf);
    Rat B = root_bound(sf);
    std::vector<RealRootInterval> out;
    struct Seg { Rat lo, hi; int nroots; };
    std::vector<Seg> stack;
    int total = sign_changes_at(ch, -B) - sign_changes_at(ch, B);
    if (total > 0) stack.push_back({-B, B, total});
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        if (s.nroots == 1) {
            out.push_back({s.lo, s.hi});
            continue;
        }
        Rat mid = (s.lo + s.hi) / 2;
        // Nudge off a root of the chain head.
        while (sf.eval(mid) == 0) mid = (s.lo + mid) / 2;
        int left = sign_changes_at(ch, s.lo) - sign_changes_at(ch, mid);
        int right = s.nroots - left;
        if (left > 0) stack.push_back({s.lo, mid, left});
        if (right > 0) stack.push_back({mid, s.hi, right});
    }
    std::sort(out.begin(), out.end(), [](const RealRootInterval& a, const RealRootInterval& b) {
        return a.lo < b.lo;
    });
    return out;
}

namespace {

// Bisect iv once, keeping the unique root of squarefree sf inside. Returns
// true if the root turned out to be the rational midpoint (stored in *exact).
bool bisect_keeping_root(const QPoly& sf, RealRootInterval& iv, Rat* exact) {
    Rat mid = (iv.lo + iv.hi) / 2;
    if (sf.eval(mid) == 0) {
        *exact = mid;
        return true;
    }
    Rat flo = sf.eval(iv.lo);
    Rat fmid = sf.eval(mid);
    if ((flo > 0) != (fmid > 0)) iv.hi = mid; else iv.lo = mid;
    return false;
}

}  // namespace

int sign_at_root(const QPoly& f, RealRootInterval iv, const QPoly& g) {
    if (g.is_zero()) return 0;
    QPoly sf = squarefree_part(f);
    Rat exact;
    // g vanishes at the root exactly when gcd(sf, g) does; that gcd is
    // squarefree, so its root shows as a sign change once endpoints are clean.
    QPoly common = gcd_poly(sf, g);
    if (common.degree() > 0) {
        RealRootInterval jv = iv;
        for (int iter = 0; iter < 100000; ++iter) {
            Rat clo = common.eval(jv.lo), chi = common.eval(jv.hi);
            if (clo != 0 && chi != 0) {
                if ((clo > 0) != (chi > 0)) return 0;
                break;
            }
            if (bisect_keeping_root(sf, jv, &exact)) {
                Rat v = g.eval(exact);
                return (v > 0) - (v < 0);
            }
        }
    }
    for (int iter = 0; iter < 100000; ++iter) {
        Rat vlo = g.eval(iv.lo), vhi = g.eval(iv.hi);
        int slo = (vlo > 0) - (vlo < 0), shi = (vhi > 0) - (vhi < 0);
        if (slo == shi && slo != 0) {
            // Certified once g has no root inside the interval.
            auto roots_g = isolate_real_roots(g);
            bool clean = true;
            for (const auto& r : roots_g)
                if (!(r.hi <= iv.lo || r.lo >= iv.hi)) { clean = false; break; }
            if (clean) return slo;
        }
        if (bisect_keeping_root(sf, iv, &exact)) {
            Rat v = g.eval(exact);
            return (v > 0) - (v < 0);
        }
    }
    throw precision_exhausted("sign_at_root did not certify");
}

int count_real_roots(const QPoly& f) {
    return static_cast<int>(isolate_real_roots(f).size());
}

}  // namespace cmtbx
