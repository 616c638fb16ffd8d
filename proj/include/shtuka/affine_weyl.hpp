#pragma once

#include <string>
#include <vector>

#include "shtuka/root_datum.hpp"

namespace shtuka {

/// Finite Weyl group element as its integer matrix on X_*(T), carried together
/// with its inverse so that composition and inversion stay integral.
struct WeylElement {
    const RootDatum* datum = nullptr;
    IMat mat;   // action on coweights: v -> mat * v
    IMat minv;  // matrix of the inverse element

    static WeylElement identity(const RootDatum& d) {
        size_t n = static_cast<size_t>(d.rank);
        IMat id(n, IVec(n, 0));
        for (size_t i = 0; i < n; ++i) id[i][i] = 1;
        return WeylElement{&d, id, id};
    }

    /// Reflection in an arbitrary root/coroot pair: v -> v - <root, v> coroot.
    static WeylElement reflection(const RootDatum& d, const IVec& root, const IVec& coroot) {
        size_t n = static_cast<size_t>(d.rank);
        IMat m(n, IVec(n, 0));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) m[i][j] = (i == j ? 1 : 0) - coroot[i] * root[j];
        return WeylElement{&d, m, m};  // involution
    }

    static WeylElement simple_reflection(const RootDatum& d, size_t j) {
        return reflection(d, d.simple_roots[j], d.simple_coroots[j]);
    }

    /// Permutation w(e_j) = e_{perm[j]} (GL_r style).
    static WeylElement from_permutation(const RootDatum& d, const std::vector<int>& perm) {
        size_t n = static_cast<size_t>(d.rank);
        IMat m(n, IVec(n, 0)), mi(n, IVec(n, 0));
        for (size_t j = 0; j < n; ++j) {
            m[static_cast<size_t>(perm[j])][j] = 1;
            mi[j][static_cast<size_t>(perm[j])] = 1;
        }
        return WeylElement{&d, m, mi};
    }

    IVec act(const IVec& v) const {
        size_t n = mat.size();
        IVec r(n, 0);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) r[i] += mat[i][j] * v[j];
        return r;
    }

    /// w^{-1} applied to a weight chi: (w^{-1} chi)(v) = chi(w v), i.e. mat^T chi.
    IVec inv_act_weight(const IVec& chi) const {
        size_t n = mat.size();
        IVec r(n, 0);
        for (size_t j = 0; j < n; ++j)
            for (size_t i = 0; i < n; ++i) r[j] += mat[i][j] * chi[i];
        return r;
    }

    WeylElement inverse() const { return WeylElement{datum, minv, mat}; }

    friend WeylElement operator*(const WeylElement& a, const WeylElement& b) {
        size_t n = a.mat.size();
        IMat m(n, IVec(n, 0)), mi(n, IVec(n, 0));
        for (size_t i = 0; i < n; ++i)
            for (size_t k = 0; k < n; ++k) {
                if (a.mat[i][k])
                    for (size_t j = 0; j < n; ++j) m[i][j] += a.mat[i][k] * b.mat[k][j];
                if (b.minv[i][k])
                    for (size_t j = 0; j < n; ++j) mi[i][j] += b.minv[i][k] * a.minv[k][j];
            }
        return WeylElement{a.datum, std::move(m), std::move(mi)};
    }

    bool operator==(const WeylElement& o) const { return mat == o.mat; }
    bool operator!=(const WeylElement& o) const { return !(*this == o); }
    bool is_identity() const {
        for (size_t i = 0; i < mat.size(); ++i)
            for (size_t j = 0; j < mat.size(); ++j)
                if (mat[i][j] != (i == j ? 1 : 0)) return false;
        return true;
    }
};

/// Element x = t_lambda * w of the extended affine Weyl group W~ = W x X_*(T).
struct AffineWeylElement {
    IVec translation;  // lambda
    WeylElement finite;

    const RootDatum& datum() const { return *finite.datum; }

    static AffineWeylElement identity(const RootDatum& d) {
        return {IVec(static_cast<size_t>(d.rank), 0), WeylElement::identity(d)};
    }
    static AffineWeylElement translation_of(const RootDatum& d, IVec lambda) {
        return {std::move(lambda), WeylElement::identity(d)};
    }
    static AffineWeylElement from_finite(WeylElement w) {
        return {IVec(w.mat.size(), 0), std::move(w)};
    }

    // (t_l w)(t_m v) = t_{l + w(m)} (w v)
    friend AffineWeylElement operator*(const AffineWeylElement& a, const AffineWeylElement& b) {
        IVec lam = a.finite.act(b.translation);
        for (size_t i = 0; i < lam.size(); ++i) lam[i] += a.translation[i];
        return {std::move(lam), a.finite * b.finite};
    }

    AffineWeylElement inverse() const {
        WeylElement wi = finite.inverse();
        IVec lam = wi.act(translation);
        for (auto& x : lam) x = -x;
        return {std::move(lam), std::move(wi)};
    }

    bool operator==(const AffineWeylElement& o) const {
        return translation == o.translation && finite == o.finite;
    }
    bool operator!=(const AffineWeylElement& o) const { return !(*this == o); }
    bool operator<(const AffineWeylElement& o) const {
        if (translation != o.translation) return translation < o.translation;
        return finite.mat < o.finite.mat;
    }

    std::string str() const {
        std::string s = "t_(";
        for (size_t i = 0; i < translation.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(translation[i]);
        }
        s += ")";
        if (!finite.is_identity()) {
            s += " * w[";
            for (size_t i = 0; i < finite.mat.size(); ++i) {
                if (i) s += ";";
                for (size_t j = 0; j < finite.mat.size(); ++j) {
                    if (j) s += ",";
                    s += std::to_string(finite.mat[i][j]);
                }
            }
            s += "]";
        }
        return s;
    }
};

/// Iwahori-Matsumoto length
///   l(t_l w) = sum_{a>0, w^{-1}a>0} |<a,l>| + sum_{a>0, w^{-1}a<0} |<a,l>-1|.
/// Length-zero elements (the Omega-normalizer of the Iwahori, e.g. central
/// translations of GL_r) come out as 0 without special-casing.
inline long long awe_length(const AffineWeylElement& x) {
    const RootDatum& d = x.datum();
    long long len = 0;
    for (const auto& alpha : d.positive_roots) {
        IVec winv_alpha = x.finite.inv_act_weight(alpha);
        bool positive = dot(winv_alpha, d.two_rho_cov) > 0;
        long long pairing = dot(alpha, x.translation);
        long long term = positive ? pairing : pairing - 1;
        len += term < 0 ? -term : term;
    }
    return len;
}

/// The affine simple reflections s_1..s_k (finite) and s_0 = t_{theta^vee}
/// s_theta for the highest root theta. Only meaningful for irreducible data;
/// used by the word-length oracles and the check CLI.
inline std::vector<AffineWeylElement> affine_simple_reflections(const RootDatum& d) {
    std::vector<AffineWeylElement> gens;
    for (size_t j = 0; j < d.num_simple(); ++j)
        gens.push_back(AffineWeylElement::from_finite(WeylElement::simple_reflection(d, j)));
    if (!d.positive_roots.empty()) {
        const IVec& theta = d.positive_roots.back();  // maximal height in the graded order
        const IVec& theta_cov = d.positive_coroots.back();
        AffineWeylElement s0{theta_cov, WeylElement::reflection(d, theta, theta_cov)};
        gens.push_back(std::move(s0));
    }
    return gens;
}

/// Omega generator of GL_r: t_{(1,0,...,0)} * (r-cycle), the image of the
/// matrix with z in the upper-right corner and 1s on the subdiagonal.
inline AffineWeylElement glr_omega(const RootDatum& d) {
    int r = d.rank;
    IVec lam(static_cast<size_t>(r), 0);
    lam[0] = 1;
    std::vector<int> perm(static_cast<size_t>(r));
    for (int j = 0; j < r; ++j) perm[static_cast<size_t>(j)] = (j + 1) % r;
    return {std::move(lam), WeylElement::from_permutation(d, perm)};
}

}  // namespace shtuka
