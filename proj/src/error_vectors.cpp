#include "lasmud/error_vectors.hpp"

#include <algorithm>
#include <cmath>
#include <omp.h>
#include <optional>
#include <stdexcept>

namespace lasmud {

Eigen::VectorXd ErrorVector::to_real() const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(K);
    for (int i = 0; i < K; ++i) v[i] = entry(i);
    return v;
}

std::vector<int> ErrorVector::support_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < K; ++i)
        if (support & (std::uint64_t{1} << i)) idx.push_back(i);
    return idx;
}

ErrorVector error_vector_from_entries(const Eigen::VectorXi& e) {
    ErrorVector eps;
    eps.K = static_cast<int>(e.size());
    if (eps.K > 63) throw std::invalid_argument("error vectors support K <= 63");
    for (int i = 0; i < eps.K; ++i) {
        if (e[i] == 0) continue;
        if (e[i] != 1 && e[i] != -1)
            throw std::invalid_argument("error vector entries must be in {-1,0,+1}");
        eps.support |= std::uint64_t{1} << i;
        if (e[i] == 1) eps.plus |= std::uint64_t{1} << i;
    }
    if (eps.support == 0) throw std::invalid_argument("the zero error vector is excluded");
    return eps;
}

bool is_admissible(const ErrorVector& eps, const BitVector& b) {
    for (int i = 0; i < eps.K; ++i) {
        const int e = eps.entry(i);
        if (e != 0 && e != b[i]) return false;
    }
    return true;
}

namespace {

/// Signed support-local coupling matrix W_ij = eps_i H_ij eps_j, i != j.
/// Every bipartition cross-sum is a sum of these entries.
void build_coupling(const Channel& ch, const std::vector<int>& idx,
                    const std::vector<int>& sign, std::vector<double>& W) {
    const int w = static_cast<int>(idx.size());
    W.assign(static_cast<std::size_t>(w) * w, 0.0);
    for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j)
            if (i != j) W[i * w + j] = sign[i] * ch.H(idx[i], idx[j]) * sign[j];
}

/// True iff every bipartition of the support has strictly negative
/// cross-coupling. Bipartitions are visited in Gray-code order, moving one
/// coordinate per step and updating the cross-sum in O(w).
bool indecomposable_from_coupling(const std::vector<double>& W, int w) {
    if (w <= 1) return true;

    // side[i]: 0 = with coordinate 0, 1 = opposite side.
    // sA[u] (sB[u]): coupling of u to the current side-0 (side-1) members.
    std::vector<int> side(w, 0);
    std::vector<double> sA(w), sB(w, 0.0);
    side[1] = 1;
    for (int u = 0; u < w; ++u) {
        double a = 0.0, b = 0.0;
        for (int i = 0; i < w; ++i) {
            if (i == u) continue;
            (i == 1 ? b : a) += W[i * w + u];
        }
        sA[u] = a;
        sB[u] = b;
    }
    double cross = sA[1];
    if (cross >= 0.0) return false;

    const std::uint64_t masks = std::uint64_t{1} << (w - 1);
    for (std::uint64_t m = 2; m < masks; ++m) {
        const int t = std::countr_zero(m) + 1;  // coordinate crossing sides
        if (side[t] == 0) {
            cross += sA[t] - sB[t];
            side[t] = 1;
            for (int u = 0; u < w; ++u) {
                if (u == t) continue;
                sA[u] -= W[t * w + u];
                sB[u] += W[t * w + u];
            }
        } else {
            cross += sB[t] - sA[t];
            side[t] = 0;
            for (int u = 0; u < w; ++u) {
                if (u == t) continue;
                sA[u] += W[t * w + u];
                sB[u] -= W[t * w + u];
            }
        }
        if (cross >= 0.0) return false;
    }
    return true;
}

}  // namespace

bool is_indecomposable(const Channel& ch, const ErrorVector& eps) {
    if (eps.support == 0) throw std::invalid_argument("error vector must be nonzero");
    const std::vector<int> idx = eps.support_indices();
    const int w = static_cast<int>(idx.size());
    if (w == 1) return true;
    std::vector<int> sign(w);
    for (int i = 0; i < w; ++i) sign[i] = eps.entry(idx[i]);
    std::vector<double> W;
    build_coupling(ch, idx, sign, W);
    return indecomposable_from_coupling(W, w);
}

double lemma2_margin(const Channel& ch, const ErrorVector& eps) {
    double q = 0.0;
    const std::vector<int> idx = eps.support_indices();
    for (int i : idx)
        for (int j : idx) {
            const double m = ch.H(i, j) - (i == j ? ch.A[i] * ch.A[i] : 0.0);
            q += eps.entry(i) * m * eps.entry(j);
        }
    return q;
}

namespace {

/// Scans the sign patterns of one support set, first coordinate pinned to
/// +1, and returns the indecomposable pattern if the support carries one.
std::optional<ErrorVector> scan_support(const Channel& ch, std::uint64_t support, int K) {
    std::vector<int> idx;
    for (int i = 0; i < K; ++i)
        if (support & (std::uint64_t{1} << i)) idx.push_back(i);
    const int w = static_cast<int>(idx.size());

    std::vector<int> sign(w);
    std::vector<double> W;
    const std::uint64_t patterns = std::uint64_t{1} << (w - 1);
    for (std::uint64_t p = 0; p < patterns; ++p) {
        sign[0] = 1;
        for (int i = 1; i < w; ++i) sign[i] = (p & (std::uint64_t{1} << (i - 1))) ? -1 : 1;
        build_coupling(ch, idx, sign, W);
        if (indecomposable_from_coupling(W, w)) {
            ErrorVector eps;
            eps.K = K;
            eps.support = support;
            for (int i = 0; i < w; ++i)
                if (sign[i] == 1) eps.plus |= std::uint64_t{1} << idx[i];
            return eps;
        }
    }
    return std::nullopt;
}

std::vector<std::uint64_t> supports_by_cardinality(int K) {
    std::vector<std::uint64_t> masks;
    masks.reserve((std::uint64_t{1} << K) - 1);
    for (std::uint64_t m = 1; m < (std::uint64_t{1} << K); ++m) masks.push_back(m);
    std::sort(masks.begin(), masks.end(), [](std::uint64_t a, std::uint64_t b) {
        const int wa = std::popcount(a), wb = std::popcount(b);
        return wa != wb ? wa < wb : a < b;
    });
    return masks;
}

void check_enumeration_size(int K, int max_k) {
    if (K > max_k)
        throw std::invalid_argument(
            "error enumeration refused for K = " + std::to_string(K) + " > " +
            std::to_string(max_k) + " (worst case ~" +
            std::to_string((std::pow(3.0, K) - 1.0) / 2.0) + " sign patterns)");
    if (K > 63) throw std::invalid_argument("error enumeration supports K <= 63");
}

IndecomposableSet assemble(const Channel& ch,
                           std::vector<std::optional<ErrorVector>>&& found) {
    IndecomposableSet F;
    F.K = ch.K;
    F.fingerprint = channel_fingerprint(ch);
    for (auto& hit : found) {
        if (!hit) continue;
        F.vectors.push_back(*hit);
        F.vectors.push_back(hit->negated());
    }
    std::sort(F.vectors.begin(), F.vectors.end());
    F.by_user.assign(ch.K, {});
    for (std::size_t v = 0; v < F.vectors.size(); ++v)
        for (int k = 0; k < ch.K; ++k)
            if (F.vectors[v].support & (std::uint64_t{1} << k))
                F.by_user[k].push_back(static_cast<int>(v));
    return F;
}

}  // namespace

IndecomposableSet enumerate_indecomposable(const Channel& ch, int max_k, int threads) {
    check_enumeration_size(ch.K, max_k);
    const auto masks = supports_by_cardinality(ch.K);
    std::vector<std::optional<ErrorVector>> found(masks.size());
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 64) num_threads(nthreads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(masks.size()); ++i)
        found[i] = scan_support(ch, masks[i], ch.K);
    return assemble(ch, std::move(found));
}

IndecomposableSet enumerate_indecomposable_serial(const Channel& ch, int max_k) {
    check_enumeration_size(ch.K, max_k);
    const auto masks = supports_by_cardinality(ch.K);
    std::vector<std::optional<ErrorVector>> found(masks.size());
    for (std::size_t i = 0; i < masks.size(); ++i)
        found[i] = scan_support(ch, masks[i], ch.K);
    return assemble(ch, std::move(found));
}

}  // namespace lasmud
