#include "lasmud/channel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lasmud/rng.hpp"

namespace lasmud {

namespace {

constexpr double kPsdTolerance = 1e-10;

void validate_bits(const BitVector& b, int K) {
    if (b.size() != K) throw std::invalid_argument("bit vector has wrong length");
    for (int i = 0; i < K; ++i)
        if (b[i] != 1 && b[i] != -1)
            throw std::invalid_argument("bit vector entries must be exactly -1 or +1");
}

/// Shared construction: validates the (A, R) pair, builds H = A R A and the
/// PSD square root G of R. Eigenvalues in [-1e-10, 0) are clamped to zero.
Channel finalize_channel(const Eigen::VectorXd& A, const Eigen::MatrixXd& R,
                         std::optional<SpreadingMatrix> S) {
    const int K = static_cast<int>(A.size());
    if (K < 1) throw std::invalid_argument("channel needs at least one user");
    if (R.rows() != K || R.cols() != K)
        throw std::invalid_argument("R must be K x K");
    for (int i = 0; i < K; ++i)
        if (!(A[i] > 0.0)) throw std::invalid_argument("amplitudes must be positive");
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > kPsdTolerance)
        throw std::invalid_argument("R must be symmetric");
    for (int i = 0; i < K; ++i)
        if (std::abs(R(i, i) - 1.0) > kPsdTolerance)
            throw std::invalid_argument("R must have unit diagonal");

    Channel ch;
    ch.K = K;
    ch.A = A;
    ch.R = R;
    ch.H = A.asDiagonal() * R * A.asDiagonal();
    // Exact symmetry keeps downstream quadratic forms order-insensitive.
    ch.H = ((ch.H + ch.H.transpose()) * 0.5).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition of R failed");
    Eigen::VectorXd lam = es.eigenvalues();
    if (lam.minCoeff() < -kPsdTolerance)
        throw std::invalid_argument("R is not positive semidefinite (min eigenvalue " +
                                    std::to_string(lam.minCoeff()) + ")");
    lam = lam.cwiseMax(0.0);
    ch.noise_factor = es.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
                      es.eigenvectors().transpose();

    if (S) {
        if (S->K != K) throw std::invalid_argument("spreading has wrong user count");
        const Eigen::MatrixXd G = S->S.transpose() * S->S;
        if ((G - R).cwiseAbs().maxCoeff() > kPsdTolerance)
            throw std::invalid_argument("S^T S does not match R");
        ch.spreading = std::move(S);
    }
    return ch;
}

}  // namespace

SpreadingMatrix make_random_spreading(int K, int N, std::uint64_t seed) {
    if (K < 1 || N < 1) throw std::invalid_argument("K and N must be >= 1");
    SpreadingMatrix sm;
    sm.N = N;
    sm.K = K;
    sm.S.resize(N, K);
    const double chip = 1.0 / std::sqrt(static_cast<double>(N));
    auto eng = stream_engine(seed, 0x5350524541444d58ULL);
    std::uint64_t word = 0;
    int bits_left = 0;
    for (int k = 0; k < K; ++k) {
        for (int n = 0; n < N; ++n) {
            if (bits_left == 0) {
                word = eng();
                bits_left = 64;
            }
            sm.S(n, k) = (word & 1u) ? chip : -chip;
            word >>= 1;
            --bits_left;
        }
    }
    return sm;
}

Channel make_equicorrelated_channel(int K, double rho, const Eigen::VectorXd& A) {
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    const double lo = K > 1 ? -1.0 / (K - 1) : -1.0;
    if (K > 1 && !(rho > lo && rho < 1.0))
        throw std::invalid_argument("rho = " + std::to_string(rho) +
                                    " outside the positive-definite interval (" +
                                    std::to_string(lo) + ", 1)");
    Eigen::MatrixXd R = Eigen::MatrixXd::Constant(K, K, rho);
    R.diagonal().setOnes();
    return finalize_channel(A, R, std::nullopt);
}

Channel make_channel_from_spreading(const SpreadingMatrix& S, const Eigen::VectorXd& A) {
    Eigen::MatrixXd R = S.S.transpose() * S.S;
    R = ((R + R.transpose()) * 0.5).eval();
    return finalize_channel(A, R, S);
}

Observation transmit(const Channel& ch, const BitVector& b, double sigma,
                     std::uint64_t seed) {
    validate_bits(b, ch.K);
    if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
    Observation obs;
    obs.sigma = sigma;
    obs.y = ch.R * (ch.A.cwiseProduct(b.cast<double>()));
    if (sigma > 0.0) {
        auto eng = stream_engine(seed, 0x54524e534d495431ULL);
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd xi(ch.K);
        for (int i = 0; i < ch.K; ++i) xi[i] = normal(eng);
        obs.y += sigma * (ch.noise_factor * xi);
    }
    return obs;
}

Observation transmit_chip(const Channel& ch, const BitVector& b, double sigma,
                          std::uint64_t seed) {
    if (!ch.spreading)
        throw std::invalid_argument("chip-level transmit needs a spreading matrix");
    validate_bits(b, ch.K);
    const auto& S = ch.spreading->S;
    Eigen::VectorXd r = S * (ch.A.cwiseProduct(b.cast<double>()));
    if (sigma > 0.0) {
        auto eng = stream_engine(seed, 0x54524e534d495432ULL);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int n = 0; n < ch.spreading->N; ++n) r[n] += sigma * normal(eng);
    }
    return Observation{S.transpose() * r, sigma};
}

double likelihood(const Channel& ch, const Observation& obs, const BitVector& b) {
    validate_bits(b, ch.K);
    const Eigen::VectorXd bd = b.cast<double>();
    return -0.5 * bd.dot(ch.H * bd) + bd.dot(ch.A.cwiseProduct(obs.y));
}

Eigen::VectorXd gradient(const Channel& ch, const Observation& obs, const BitVector& b) {
    validate_bits(b, ch.K);
    return ch.A.cwiseProduct(obs.y) - ch.H * b.cast<double>();
}

BitVector sign_vector(const Eigen::VectorXd& v) {
    BitVector b(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) b[i] = sign_pm1(v[i]);
    return b;
}

std::uint64_t channel_fingerprint(const Channel& ch) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const unsigned char* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    mix(reinterpret_cast<const unsigned char*>(ch.H.data()),
        sizeof(double) * ch.H.size());
    return h;
}

}  // namespace lasmud
