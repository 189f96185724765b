#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

namespace lasmud {

/// A vector of K transmitted or detected symbols, entries exactly -1 or +1.
using BitVector = Eigen::VectorXi;

/// N x K matrix of unit-norm spreading sequences, one column per user.
struct SpreadingMatrix {
    int N = 0;
    int K = 0;
    Eigen::MatrixXd S;  // N x K, every column unit Euclidean norm
};

/// Synchronous CDMA channel: per-user amplitudes A, crosscorrelation R,
/// and the coupled matrix H = A R A. `noise_factor` is a K x K matrix G
/// with G * G^T = R, used to synthesize correlated matched-filter noise.
struct Channel {
    int K = 0;
    Eigen::VectorXd A;             // positive amplitudes (diagonal of A)
    Eigen::MatrixXd R;             // symmetric, unit diagonal, PSD
    Eigen::MatrixXd H;             // A R A
    Eigen::MatrixXd noise_factor;  // G with G G^T = R
    std::optional<SpreadingMatrix> spreading;
};

/// Matched-filter-bank output y together with the noise level it was
/// generated at (sigma >= 0).
struct Observation {
    Eigen::VectorXd y;
    double sigma = 0.0;
};

/// i.i.d. +-1/sqrt(N) chips; columns are unit norm by construction.
/// Deterministic for a fixed seed.
SpreadingMatrix make_random_spreading(int K, int N, std::uint64_t seed);

/// R_ij = rho off the diagonal. Requires -1/(K-1) < rho < 1 so that R is
/// positive definite; anything else is rejected with the valid interval
/// in the message.
Channel make_equicorrelated_channel(int K, double rho, const Eigen::VectorXd& A);

/// R = S^T S; the spreading matrix is retained on the channel.
Channel make_channel_from_spreading(const SpreadingMatrix& S, const Eigen::VectorXd& A);

/// y = R A b + n with n ~ N(0, sigma^2 R), synthesized as sigma * G * xi
/// from i.i.d. standard normals xi. Deterministic per seed.
Observation transmit(const Channel& ch, const BitVector& b, double sigma, std::uint64_t seed);

/// Chip-level route: r = S A b + m with white m, returned as S^T r.
/// Requires spreading to be present. Agrees with transmit() in distribution.
Observation transmit_chip(const Channel& ch, const BitVector& b, double sigma,
                          std::uint64_t seed);

/// f(y|b) = -1/2 b^T H b + b^T A y.
double likelihood(const Channel& ch, const Observation& obs, const BitVector& b);

/// g = -H b + A y.
Eigen::VectorXd gradient(const Channel& ch, const Observation& obs, const BitVector& b);

/// Sign with the documented tie rule sign(0) = +1. Used everywhere a real
/// value is sliced to a bit.
inline int sign_pm1(double x) { return x < 0.0 ? -1 : 1; }

/// Elementwise sign_pm1.
BitVector sign_vector(const Eigen::VectorXd& v);

/// FNV-1a over the raw bytes of H; binds derived artifacts (e.g. a
/// serialized error-vector set) to the channel they were computed for.
std::uint64_t channel_fingerprint(const Channel& ch);

}  // namespace lasmud
