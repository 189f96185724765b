#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "lasmud/channel.hpp"

namespace lasmud {

/// A nonzero K-vector over {-1, 0, +1}, stored as (support, sign) bitmasks.
/// `plus` is a subset of `support`: bit set means +1, support-only means -1.
struct ErrorVector {
    int K = 0;
    std::uint64_t support = 0;
    std::uint64_t plus = 0;

    int weight() const { return std::popcount(support); }
    int entry(int i) const {
        const std::uint64_t bit = std::uint64_t{1} << i;
        if (!(support & bit)) return 0;
        return (plus & bit) ? 1 : -1;
    }
    ErrorVector negated() const { return {K, support, support & ~plus}; }
    Eigen::VectorXd to_real() const;
    std::vector<int> support_indices() const;

    bool operator==(const ErrorVector& o) const {
        return K == o.K && support == o.support && plus == o.plus;
    }
    /// Canonical order: by weight, then support, then sign pattern.
    bool operator<(const ErrorVector& o) const {
        const int w = weight(), ow = o.weight();
        if (w != ow) return w < ow;
        if (support != o.support) return support < o.support;
        return plus < o.plus;
    }
};

ErrorVector error_vector_from_entries(const Eigen::VectorXi& e);

/// eps is admissible for b iff eps_i = b_i wherever eps_i != 0
/// (equivalently b - 2 eps stays in {-1,+1}^K).
bool is_admissible(const ErrorVector& eps, const BitVector& b);

/// True iff every split of the support into two nonempty disjoint parts
/// eps = eps1 + eps2 has eps1^T H eps2 < 0. Weight-1 vectors are vacuously
/// indecomposable. Splits are walked in Gray-code order with incremental
/// cross-sum updates.
bool is_indecomposable(const Channel& ch, const ErrorVector& eps);

/// eps^T (H - A^2) eps; nonpositive for indecomposable eps, zero exactly
/// when the weight is 1.
double lemma2_margin(const Channel& ch, const ErrorVector& eps);

/// All indecomposable error vectors of a channel, in canonical order, plus
/// the per-user sublists F_k = { eps in F : eps_k != 0 } (indices into
/// `vectors`).
struct IndecomposableSet {
    int K = 0;
    std::uint64_t fingerprint = 0;  // channel_fingerprint of the source channel
    std::vector<ErrorVector> vectors;
    std::vector<std::vector<int>> by_user;

    std::size_t size() const { return vectors.size(); }
};

/// Support sets are scanned in increasing cardinality; within a support the
/// first sign is fixed +1 and the scan stops at the first indecomposable hit
/// (exactly none or two antipodal vectors exist per support). OpenMP-parallel
/// over supports; bit-identical to the serial variant. Refuses K > max_k
/// with a cost estimate.
IndecomposableSet enumerate_indecomposable(const Channel& ch, int max_k = 20,
                                           int threads = 0);

/// Serial reference of the same pruned enumeration, kept for tests and the
/// kernel benchmark.
IndecomposableSet enumerate_indecomposable_serial(const Channel& ch, int max_k = 20);

}  // namespace lasmud
