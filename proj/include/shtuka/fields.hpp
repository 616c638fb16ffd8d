#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "shtuka/util.hpp"

namespace shtuka {

using Poly = std::vector<int>;  // dense, ascending degree, coefficients in [0,p)

namespace fp {

// Arithmetic in F_p[t], used to bootstrap the field tables and to verify
// moduli. Everything here is cold-path.

inline Poly trim(Poly a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly add(const Poly& a, const Poly& b, int p) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        int v = (i < a.size() ? a[i] : 0) + (i < b.size() ? b[i] : 0);
        r[i] = v % p;
    }
    return trim(r);
}

inline Poly sub(const Poly& a, const Poly& b, int p) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        int v = (i < a.size() ? a[i] : 0) - (i < b.size() ? b[i] : 0);
        r[i] = ((v % p) + p) % p;
    }
    return trim(r);
}

inline Poly mul(const Poly& a, const Poly& b, int p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return trim(r);
}

inline int inv_mod(int a, int p) {
    int r = 1;
    int e = p - 2;  // Fermat
    a %= p;
    while (e) {
        if (e & 1) r = r * a % p;
        a = a * a % p;
        e >>= 1;
    }
    return r;
}

inline Poly mod(Poly a, const Poly& m, int p) {
    int dm = deg(m);
    int lead_inv = inv_mod(m.back(), p);
    a = trim(std::move(a));
    while (deg(a) >= dm) {
        int shift = deg(a) - dm;
        int c = a.back() * lead_inv % p;
        for (int i = 0; i <= dm; ++i) {
            int v = a[i + shift] - c * m[i];
            a[i + shift] = ((v % p) + p) % p;
        }
        a = trim(std::move(a));
    }
    return a;
}

inline Poly gcd(Poly a, Poly b, int p) {
    a = trim(std::move(a));
    b = trim(std::move(b));
    while (!b.empty()) {
        Poly r = mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty() && a.back() != 1) {
        int c = inv_mod(a.back(), p);
        for (auto& x : a) x = x * c % p;
    }
    return a;
}

inline Poly pow_mod(Poly base, unsigned long long e, const Poly& m, int p) {
    Poly r = {1};
    base = mod(std::move(base), m, p);
    while (e) {
        if (e & 1) r = mod(mul(r, base, p), m, p);
        base = mod(mul(base, base, p), m, p);
        e >>= 1;
    }
    return r;
}

/// x^(p^k) mod m, by k-fold p-th powering.
inline Poly frob_pow(Poly x, int k, const Poly& m, int p) {
    for (int i = 0; i < k; ++i) x = pow_mod(std::move(x), static_cast<unsigned long long>(p), m, p);
    return x;
}

/// Returns 0 if f (monic, degree >= 1) is irreducible over F_p; otherwise the
/// degree of a smallest-degree nontrivial irreducible factor.
inline int reducible_factor_degree(const Poly& f, int p) {
    int d = deg(f);
    if (d <= 0) return 1;
    Poly x = mod({0, 1}, f, p);
    for (int i = 1; i <= d / 2; ++i) {
        // gcd(x^{p^i} - x, f) collects the factors of degree dividing i; the
        // first i that hits is the minimal factor degree.
        Poly xi = frob_pow(x, i, f, p);
        Poly g = gcd(sub(xi, x, p), f, p);
        if (deg(g) >= 1) return i;
    }
    // No factor of degree <= d/2, so f is irreducible iff x^{p^d} == x mod f.
    Poly xd = frob_pow(x, d, f, p);
    if (trim(sub(xd, x, p)).empty()) return 0;
    return d;  // should not happen for monic f, kept as a safeguard
}

}  // namespace fp

/// A concrete finite field F_{p^deg} in the polynomial basis of
/// F_p[t]/(modulus), together with the declared base-field order q = p^e
/// (e | deg) that defines the Frobenius sigma: x -> x^q. Element codes are the
/// base-p encodings of their coordinate vectors; multiplication runs on
/// discrete-log tables.
class FieldSpec {
  public:
    int p;
    int deg;
    Poly modulus;            // monic irreducible of degree deg, ascending
    long long q;             // sigma is x -> x^q
    std::uint32_t order;     // p^deg
    int sigma_e;             // q = p^sigma_e

    static constexpr std::uint32_t kMaxOrder = 1u << 20;

    std::uint32_t zero() const { return 0; }
    std::uint32_t one() const { return 1; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
        if (p == 2) return a ^ b;
        std::uint32_t r = 0, mul = 1;
        for (int i = 0; i < deg; ++i) {
            int da = static_cast<int>(a % p), db = static_cast<int>(b % p);
            a /= p;
            b /= p;
            r += static_cast<std::uint32_t>((da + db) % p) * mul;
            mul *= p;
        }
        return r;
    }

    std::uint32_t neg(std::uint32_t a) const {
        if (p == 2) return a;
        std::uint32_t r = 0, mul = 1;
        for (int i = 0; i < deg; ++i) {
            int da = static_cast<int>(a % p);
            a /= p;
            r += static_cast<std::uint32_t>((p - da) % p) * mul;
            mul *= p;
        }
        return r;
    }

    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg(b)); }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }

    std::uint32_t inv(std::uint32_t a) const {
        if (a == 0) throw NotAUnit("field inverse of zero");
        return exp_[group_order_ - log_[a]];
    }

    std::uint32_t pow(std::uint32_t a, unsigned long long e) const {
        if (a == 0) return e == 0 ? 1u : 0u;
        unsigned long long k = (static_cast<unsigned long long>(log_[a]) * (e % group_order_)) %
                               group_order_;
        return exp_[k];
    }

    /// sigma(x) = x^q.
    std::uint32_t frobenius(std::uint32_t a) const {
        if (a == 0) return 0;
        return exp_[(static_cast<unsigned long long>(log_[a]) *
                     (static_cast<unsigned long long>(q) % group_order_)) %
                    group_order_];
    }

    std::uint32_t frobenius_iter(std::uint32_t a, int times) const {
        for (int i = 0; i < times; ++i) a = frobenius(a);
        return a;
    }

    bool in_subfield_fqs(std::uint32_t a, int s) const { return frobenius_iter(a, s) == a; }

    std::vector<int> coords(std::uint32_t code) const {
        std::vector<int> c(deg);
        for (int i = 0; i < deg; ++i) {
            c[i] = static_cast<int>(code % p);
            code /= static_cast<std::uint32_t>(p);
        }
        return c;
    }

    std::uint32_t from_coords(const std::vector<int>& c) const {
        require(static_cast<int>(c.size()) <= deg, "coords length exceeds field degree");
        std::uint32_t code = 0, mul = 1;
        for (int i = 0; i < deg; ++i) {
            int v = i < static_cast<int>(c.size()) ? c[i] : 0;
            require(v >= 0 && v < p, "coordinate out of [0,p)");
            code += static_cast<std::uint32_t>(v) * mul;
            mul *= static_cast<std::uint32_t>(p);
        }
        return code;
    }

    /// Prime-field constants embed canonically into every extension.
    std::uint32_t from_int(long long n) const {
        long long v = ((n % p) + p) % p;
        return static_cast<std::uint32_t>(v);
    }

    bool prime_field_element(std::uint32_t a) const { return a < static_cast<std::uint32_t>(p); }

    std::uint32_t random_element(Rng& rng) const {
        return static_cast<std::uint32_t>(rng.below(order));
    }
    std::uint32_t random_nonzero(Rng& rng) const {
        return static_cast<std::uint32_t>(1 + rng.below(order - 1));
    }

    std::string describe() const {
        return "F_" + std::to_string(order) + " = F_" + std::to_string(p) + "[t]/(modulus deg " +
               std::to_string(deg) + "), sigma = x^" + std::to_string(q);
    }

    // Construction goes through the cache below so that FieldSpec pointers can
    // be compared for ring identity and stay valid for the program lifetime.
    FieldSpec(int p_, int deg_, Poly modulus_, long long q_);

  private:
    std::uint32_t group_order_;        // order - 1
    std::vector<std::uint32_t> log_;   // index: element code (0 unused)
    std::vector<std::uint32_t> exp_;   // length 2*group_order_+1 to skip a mod

    std::uint32_t bootstrap_mul(std::uint32_t a, std::uint32_t b) const;
};

namespace detail {

inline bool is_prime(long long n) {
    if (n < 2) return false;
    for (long long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<long long> prime_factors(long long n) {
    std::vector<long long> f;
    for (long long d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            f.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) f.push_back(n);
    return f;
}

/// First monic irreducible of degree d over F_p in integer-encoding order
/// (so the fixture fields are identical on every run and platform).
inline Poly least_irreducible(int p, int d) {
    long long count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (long long n = 0; n < count; ++n) {
        Poly f(d + 1, 0);
        long long m = n;
        for (int i = 0; i < d; ++i) {
            f[i] = static_cast<int>(m % p);
            m /= p;
        }
        f[d] = 1;
        if (fp::reducible_factor_degree(f, p) == 0) return f;
    }
    throw Error("no irreducible polynomial found");  // unreachable
}

}  // namespace detail

inline std::uint32_t FieldSpec::bootstrap_mul(std::uint32_t a, std::uint32_t b) const {
    Poly pa = coords(a), pb = coords(b);
    Poly pr = fp::mod(fp::mul(fp::trim(pa), fp::trim(pb), p), modulus, p);
    pr.resize(deg, 0);
    return from_coords(pr);
}

inline FieldSpec::FieldSpec(int p_, int deg_, Poly modulus_, long long q_)
    : p(p_), deg(deg_), modulus(std::move(modulus_)), q(q_) {
    require(detail::is_prime(p), "p must be prime");
    require(deg >= 1, "extension degree must be >= 1");

    long long ord = 1;
    for (int i = 0; i < deg; ++i) {
        ord *= p;
        require(ord <= kMaxOrder, "field too large (order cap " + std::to_string(kMaxOrder) + ")");
    }
    order = static_cast<std::uint32_t>(ord);
    group_order_ = order - 1;

    // q = p^e with e | deg so that sigma is an automorphism fixing F_q.
    long long qq = q;
    sigma_e = 0;
    while (qq > 1 && qq % p == 0) {
        qq /= p;
        ++sigma_e;
    }
    require(qq == 1 && sigma_e >= 1, "q must be a positive power of p");
    require(deg % sigma_e == 0, "q = p^e requires e | deg so that F_q embeds in F_{p^deg}");

    if (modulus.empty()) {
        modulus = detail::least_irreducible(p, deg);
    }
    require(static_cast<int>(modulus.size()) == deg + 1 && modulus[deg] == 1,
            "modulus must be monic of degree deg");
    for (int c : modulus) require(c >= 0 && c < p, "modulus coefficients must lie in [0,p)");
    if (int fd = fp::reducible_factor_degree(modulus, p); fd != 0)
        throw ValidationError("modulus is reducible: it has an irreducible factor of degree " +
                              std::to_string(fd));

    // Find a generator of the multiplicative group, then fill log/exp.
    log_.assign(order, 0);
    exp_.assign(2 * static_cast<size_t>(group_order_) + 1, 1);
    if (group_order_ == 0) return;  // F_2 special-cases to trivial tables? (order 2: group 1)

    auto factors = detail::prime_factors(group_order_);
    std::uint32_t gen = 0;
    for (std::uint32_t cand = 2; cand < order; ++cand) {
        bool ok = true;
        for (long long f : factors) {
            // cand^{(order-1)/f} == 1 means cand misses a factor.
            std::uint32_t acc = 1;
            long long e = group_order_ / f;
            std::uint32_t base = cand;
            while (e) {
                if (e & 1) acc = bootstrap_mul(acc, base);
                base = bootstrap_mul(base, base);
                e >>= 1;
            }
            if (acc == 1) {
                ok = false;
                break;
            }
        }
        if (ok) {
            gen = cand;
            break;
        }
    }
    if (gen == 0) gen = 1;  // only for order 2, where the group is trivial

    std::uint32_t acc = 1;
    for (std::uint32_t k = 0; k < group_order_; ++k) {
        exp_[k] = acc;
        log_[acc] = k;
        acc = bootstrap_mul(acc, gen);
    }
    require(acc == 1, "generator order mismatch");
    for (std::uint32_t k = group_order_; k < 2 * group_order_ + 1; ++k)
        exp_[k] = exp_[k - group_order_];
}

/// Global field cache: one immutable FieldSpec per (p, deg, modulus, q).
/// Raw pointers taken from here stay valid for the program lifetime.
inline const FieldSpec* get_field(int p, int deg, Poly modulus = {}, long long q = 0) {
    if (q == 0) q = p;
    if (modulus.empty()) modulus = detail::least_irreducible(p, deg);
    static std::mutex mx;
    static std::map<std::string, std::unique_ptr<FieldSpec>> cache;
    std::string key = std::to_string(p) + ":" + std::to_string(deg) + ":" + std::to_string(q) + ":";
    for (int c : modulus) key += std::to_string(c) + ",";
    std::lock_guard<std::mutex> lock(mx);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<FieldSpec>(p, deg, modulus, q)).first;
    return it->second.get();
}

/// Spec entry point: F_{p^deg} with sigma = x^p (q defaults to p).
inline const FieldSpec* ff_make(int p, int deg, Poly modulus = {}) {
    return get_field(p, deg, std::move(modulus), p);
}

/// F_{q^m} for a prime power q, with sigma = x^q and the deterministic modulus
/// of degree e*m over the prime field.
inline const FieldSpec* make_fqm(long long q, int m) {
    require(q >= 2, "q must be >= 2");
    long long p = 0;
    for (long long d = 2; d * d <= q; ++d)
        if (q % d == 0) {
            p = d;
            break;
        }
    if (p == 0) p = q;  // q prime
    int e = 0;
    long long qq = q;
    while (qq > 1) {
        require(qq % p == 0, "q must be a prime power");
        qq /= p;
        ++e;
    }
    return get_field(static_cast<int>(p), e * m, {}, q);
}

}  // namespace shtuka
