#include "lasmud/baselines.hpp"

#include <Eigen/LU>
#include <bit>
#include <stdexcept>

namespace lasmud {

BitVector mf_detect(const Observation& obs) { return sign_vector(obs.y); }

BitVector decorrelator_detect(const Channel& ch, const Observation& obs) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ch.R);
    if (!lu.isInvertible())
        throw std::invalid_argument("decorrelator needs an invertible R");
    return sign_vector(lu.solve(obs.y));
}

BitVector mmse_detect(const Channel& ch, const Observation& obs) {
    if (obs.sigma == 0.0) return decorrelator_detect(ch, obs);
    const double s2 = obs.sigma * obs.sigma;
    Eigen::MatrixXd M = ch.R;
    for (int k = 0; k < ch.K; ++k) M(k, k) += s2 / (ch.A[k] * ch.A[k]);
    return sign_vector(M.ldlt().solve(obs.y));
}

namespace {

bool lex_less(const BitVector& a, const BitVector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] < b[i];
    return false;
}

}  // namespace

BitVector gml_bruteforce(const Channel& ch, const Observation& obs, int max_k) {
    if (ch.K > max_k)
        throw std::invalid_argument("brute-force search refused for K = " +
                                    std::to_string(ch.K) + " > " + std::to_string(max_k));

    // Gray-code walk over all 2^K vectors: one bit flip per visited state,
    // with the likelihood and gradient maintained by single-flip deltas.
    BitVector b = BitVector::Constant(ch.K, -1);
    Eigen::VectorXd g = gradient(ch, obs, b);
    double f = likelihood(ch, obs, b);

    BitVector best_b = b;
    double best_f = f;
    const std::uint64_t states = std::uint64_t{1} << ch.K;
    for (std::uint64_t i = 1; i < states; ++i) {
        const int k = std::countr_zero(i);
        f += -2.0 * b[k] * g[k] - 2.0 * ch.H(k, k);
        g += (2.0 * b[k]) * ch.H.col(k);
        b[k] = -b[k];
        if (f > best_f || (f == best_f && lex_less(b, best_b))) {
            best_f = f;
            best_b = b;
        }
    }
    return best_b;
}

bool lml_check(const Channel& ch, const Observation& obs, const BitVector& b) {
    const double f0 = likelihood(ch, obs, b);
    BitVector n = b;
    for (int k = 0; k < ch.K; ++k) {
        n[k] = -n[k];
        if (likelihood(ch, obs, n) > f0) return false;
        n[k] = -n[k];
    }
    return true;
}

}  // namespace lasmud
