#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lasmud/channel.hpp"
#include "lasmud/error_vectors.hpp"
#include "lasmud/schedule.hpp"

namespace lasmud {

/// Gaussian tail Q(x) = P(N(0,1) > x), clamped into (0, 1) so that
/// pathological arguments never produce 0 or 1 exactly.
double q_function(double x);

enum class DetectorTag { LasWithT, Lml, Gml };
std::string to_string(DetectorTag tag);

struct BoundTerm {
    ErrorVector eps;
    int weight = 0;
    double q_argument = 0.0;
    double q_value = 0.0;
};

/// One user's union-bound value with its per-error-vector terms.
struct UserBound {
    int user = 0;  // 0-based
    double bound = 0.0;
    std::vector<BoundTerm> terms;
    int negative_arg_terms = 0;  // terms with q_argument < 0, included as-is
};

struct BoundReport {
    DetectorTag tag = DetectorTag::Lml;
    double sigma = 0.0;
    std::optional<ThresholdVector> thresholds;  // LasWithT only
    std::vector<UserBound> per_user;
};

/// Union bound on user k's bit error rate, summed over the indecomposable
/// vectors affecting k:
///   LasWithT / Lml:  2^-w(eps) Q( eps^T (2H - T) eps / (sigma sqrt(eps^T H eps)) )
///   Gml:             2^-w(eps) Q( sqrt(eps^T H eps) / sigma )
/// Lml is the T = A^2 instance. Terms with negative argument are included
/// as written and counted. Hard failure if eps^T H eps <= 0 (broken channel).
UserBound ber_bound(const Channel& ch, const IndecomposableSet& F, DetectorTag tag,
                    const std::optional<ThresholdVector>& T, double sigma, int user);

BoundReport ber_bound_all(const Channel& ch, const IndecomposableSet& F, DetectorTag tag,
                          const std::optional<ThresholdVector>& T, double sigma);

/// Signal-space distances of an error vector: to the optimal separating
/// hyperplane, to the threshold-shifted one, and the two differences.
struct ErrorDistances {
    double d_gml = 0.0;     // sqrt(eps^T H eps)
    double d_las = 0.0;     // eps^T (2H - T) eps / sqrt(eps^T H eps)
    double delta_las = 0.0; // eps^T (H - T) eps / sqrt(eps^T H eps)
    double delta_lml = 0.0; // same with T = A^2
};

ErrorDistances distances(const Channel& ch, const ErrorVector& eps, const ThresholdVector& T);

struct UserAme {
    int user = 0;
    double lower_bound = 0.0;  // in [0, 1]
    ErrorVector argmin;
};

/// min over eps in F_k of ( [eps^T (2H - T) eps]^+ / (A_k sqrt(eps^T H eps)) )^2.
UserAme ame_lower_bound(const Channel& ch, const IndecomposableSet& F,
                        const ThresholdVector& T, int user);

enum class AmeVariant { Gml, Las };

/// Gml: sqrt(eps^T H eps) >= A_k for all eps in F_k.
/// Las: eps^T (2H - T) eps / sqrt(eps^T H eps) >= A_k for all eps in F_k.
bool unit_ame_condition(const Channel& ch, const IndecomposableSet& F,
                        const ThresholdVector& T, int user, AmeVariant variant);

/// Equal-power equicorrelated closed form for a group size M:
/// min^2 { 1, 2 [1 - (M+1) rho]^+ / sqrt(2 (1 - rho)) }.
double equicorr_ame_gplas(int M, double rho);

/// Largest rho at which the M-group closed form still equals one:
/// (4M + 3 - sqrt(8M^2 + 8M + 1)) / (4 (M+1)^2).
double rho_threshold(int M);

enum class BaselineAmeKind { Mf, DecMmse, GmlEquicorr };

/// Equal-power equicorrelated AME of the classical detectors:
///   Mf:          max^2 { 0, 1 - (K-1) rho }
///   DecMmse:     [1 + (K-2) rho - (K-1) rho^2] / [1 + (K-2) rho]
///   GmlEquicorr: min { 1, 2 (1 - rho) }
double baseline_ame(BaselineAmeKind kind, int K, double rho);

/// y^T A eps <= (b - 2 eps)^T (H - T) eps: the half space containing the
/// fixed-point region of the error signal b - 2 eps.
bool halfspace_check(const Channel& ch, const Observation& obs, const BitVector& b,
                     const ErrorVector& eps, const ThresholdVector& T);

/// Vertex of that region: y = (R A - A^-1 T)(b - 2 eps).
Eigen::VectorXd vertex(const Channel& ch, const BitVector& b, const ErrorVector& eps,
                       const ThresholdVector& T);

}  // namespace lasmud
