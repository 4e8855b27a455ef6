#include "cmtbx/basic.hpp"

#include <algorithm>

namespace cmtbx {

std::vector<Int> small_primes(long bound) {
    std::vector<Int> out;
    if (bound < 2) return out;
    std::vector<bool> sieve(bound + 1, true);
    for (long i = 2; i <= bound; ++i) {
        if (!sieve[i]) continue;
        out.emplace_back(i);
        for (long j = 2 * i; j <= bound; j += i) sieve[j] = false;
    }
    return out;
}

namespace {

Int pollard_rho(const Int& n) {
    if (n % 2 == 0) return Int(2);
    Int x(2), y(2), d(1), c(1);
    auto f = [&](const Int& v) { return mod_pos(v * v + c, n); };
    for (;;) {
        x = f(x);
        y = f(f(y));
        Int diff = abs(x - y);
        if (diff == 0) {
            c += 1;
            x = 2;
            y = 2;
            continue;
        }
        mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        if (d > 1 && d < n) return d;
        if (d == n) {
            c += 1;
            x = 2;
            y = 2;
        }
    }
}

void factor_rec(Int n, std::vector<Int>& primes) {
    if (n == 1) return;
    if (is_probable_prime(n)) {
        primes.push_back(n);
        return;
    }
    Int d = pollard_rho(n);
    factor_rec(d, primes);
    factor_rec(n / d, primes);
}

}  // namespace

std::vector<std::pair<Int, unsigned>> factor_integer(Int n) {
    n = abs(n);
    if (n == 0) throw invalid_argument_error("factor_integer(0)");
    std::vector<Int> primes;
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L}) {
        while (n % p == 0) {
            primes.emplace_back(p);
            n /= p;
        }
    }
    factor_rec(n, primes);
    std::sort(primes.begin(), primes.end());
    std::vector<std::pair<Int, unsigned>> out;
    for (const auto& p : primes) {
        if (!out.empty() && out.back().first == p) ++out.back().second;
        else out.emplace_back(p, 1u);
    }
    return out;
}

}  // namespace cmtbx
