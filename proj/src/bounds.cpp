#include "lasmud/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lasmud {

double q_function(double x) {
    double q = 0.5 * std::erfc(x / std::numbers::sqrt2);
    if (q < 1e-300) q = 1e-300;
    if (q >= 1.0) q = std::nextafter(1.0, 0.0);
    return q;
}

std::string to_string(DetectorTag tag) {
    switch (tag) {
        case DetectorTag::LasWithT: return "las";
        case DetectorTag::Lml: return "lml";
        case DetectorTag::Gml: return "gml";
    }
    return "lml";
}

namespace {

double quad_form(const Eigen::MatrixXd& M, const ErrorVector& eps) {
    double q = 0.0;
    const auto idx = eps.support_indices();
    for (int i : idx)
        for (int j : idx) q += eps.entry(i) * M(i, j) * eps.entry(j);
    return q;
}

double diag_quad(const Eigen::VectorXd& t, const ErrorVector& eps) {
    double q = 0.0;
    for (int i : eps.support_indices()) q += t[i];
    return q;
}

ThresholdVector a_squared_thresholds(const Channel& ch) {
    ThresholdVector tv;
    tv.t = ch.A.cwiseProduct(ch.A);
    tv.regime = ThresholdRegime::ExactTimeInvariant;
    return tv;
}

void require_matching_set(const Channel& ch, const IndecomposableSet& F) {
    if (F.fingerprint != channel_fingerprint(ch))
        throw std::invalid_argument("error-vector set was built for a different channel");
}

}  // namespace

UserBound ber_bound(const Channel& ch, const IndecomposableSet& F, DetectorTag tag,
                    const std::optional<ThresholdVector>& T, double sigma, int user) {
    require_matching_set(ch, F);
    if (!(sigma > 0.0)) throw std::invalid_argument("ber_bound needs sigma > 0");
    if (user < 0 || user >= ch.K) throw std::invalid_argument("user out of range");
    if (tag == DetectorTag::LasWithT && !T)
        throw std::invalid_argument("the generic detector bound needs thresholds");

    const ThresholdVector thr =
        tag == DetectorTag::LasWithT ? *T : a_squared_thresholds(ch);

    UserBound ub;
    ub.user = user;
    for (int v : F.by_user[user]) {
        const ErrorVector& eps = F.vectors[v];
        const double eHe = quad_form(ch.H, eps);
        if (!(eHe > 0.0))
            throw std::domain_error("eps^T H eps <= 0 on an indecomposable vector; "
                                    "channel is broken");
        BoundTerm term;
        term.eps = eps;
        term.weight = eps.weight();
        if (tag == DetectorTag::Gml) {
            term.q_argument = std::sqrt(eHe) / sigma;
        } else {
            const double num = 2.0 * eHe - diag_quad(thr.t, eps);
            term.q_argument = num / (sigma * std::sqrt(eHe));
        }
        term.q_value = q_function(term.q_argument);
        if (term.q_argument < 0.0) ++ub.negative_arg_terms;
        ub.bound += std::ldexp(term.q_value, -term.weight);  // 2^-w * Q
        ub.terms.push_back(std::move(term));
    }
    return ub;
}

BoundReport ber_bound_all(const Channel& ch, const IndecomposableSet& F, DetectorTag tag,
                          const std::optional<ThresholdVector>& T, double sigma) {
    BoundReport r;
    r.tag = tag;
    r.sigma = sigma;
    if (tag == DetectorTag::LasWithT)
        r.thresholds = T;
    else if (tag == DetectorTag::Lml)
        r.thresholds = a_squared_thresholds(ch);
    for (int k = 0; k < ch.K; ++k) r.per_user.push_back(ber_bound(ch, F, tag, T, sigma, k));
    return r;
}

ErrorDistances distances(const Channel& ch, const ErrorVector& eps,
                         const ThresholdVector& T) {
    if (eps.support == 0) throw std::invalid_argument("error vector must be nonzero");
    const double eHe = quad_form(ch.H, eps);
    if (!(eHe > 0.0)) throw std::domain_error("eps^T H eps <= 0");
    const double root = std::sqrt(eHe);
    const double eTe = diag_quad(T.t, eps);
    const double eA2e = diag_quad(ch.A.cwiseProduct(ch.A), eps);
    ErrorDistances d;
    d.d_gml = root;
    d.d_las = (2.0 * eHe - eTe) / root;
    d.delta_las = (eHe - eTe) / root;
    d.delta_lml = (eHe - eA2e) / root;
    return d;
}

UserAme ame_lower_bound(const Channel& ch, const IndecomposableSet& F,
                        const ThresholdVector& T, int user) {
    require_matching_set(ch, F);
    if (user < 0 || user >= ch.K) throw std::invalid_argument("user out of range");
    UserAme res;
    res.user = user;
    res.lower_bound = std::numeric_limits<double>::infinity();
    for (int v : F.by_user[user]) {
        const ErrorVector& eps = F.vectors[v];
        const double eHe = quad_form(ch.H, eps);
        if (!(eHe > 0.0)) throw std::domain_error("eps^T H eps <= 0");
        const double num = std::max(0.0, 2.0 * eHe - diag_quad(T.t, eps));
        const double ratio = num / (ch.A[user] * std::sqrt(eHe));
        if (ratio * ratio < res.lower_bound) {
            res.lower_bound = ratio * ratio;
            res.argmin = eps;
        }
    }
    return res;
}

bool unit_ame_condition(const Channel& ch, const IndecomposableSet& F,
                        const ThresholdVector& T, int user, AmeVariant variant) {
    require_matching_set(ch, F);
    for (int v : F.by_user[user]) {
        const ErrorVector& eps = F.vectors[v];
        const double eHe = quad_form(ch.H, eps);
        if (!(eHe > 0.0)) throw std::domain_error("eps^T H eps <= 0");
        const double lhs = variant == AmeVariant::Gml
                               ? std::sqrt(eHe)
                               : (2.0 * eHe - diag_quad(T.t, eps)) / std::sqrt(eHe);
        if (!(lhs >= ch.A[user])) return false;
    }
    return true;
}

double equicorr_ame_gplas(int M, double rho) {
    if (M < 1) throw std::invalid_argument("group size must be >= 1");
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must be in [0, 1)");
    const double pair = 2.0 * std::max(0.0, 1.0 - (M + 1) * rho) /
                        std::sqrt(2.0 * (1.0 - rho));
    const double m = std::min(1.0, pair);
    return m * m;
}

double rho_threshold(int M) {
    if (M < 1) throw std::invalid_argument("group size must be >= 1");
    const double m = M;
    return (4.0 * m + 3.0 - std::sqrt(8.0 * m * m + 8.0 * m + 1.0)) /
           (4.0 * (m + 1.0) * (m + 1.0));
}

double baseline_ame(BaselineAmeKind kind, int K, double rho) {
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    if (K > 1 && !(rho > -1.0 / (K - 1) && rho < 1.0))
        throw std::invalid_argument("rho outside the positive-definite interval");
    switch (kind) {
        case BaselineAmeKind::Mf: {
            const double v = std::max(0.0, 1.0 - (K - 1) * rho);
            return v * v;
        }
        case BaselineAmeKind::DecMmse:
            return (1.0 + (K - 2) * rho - (K - 1) * rho * rho) / (1.0 + (K - 2) * rho);
        case BaselineAmeKind::GmlEquicorr:
            return std::min(1.0, 2.0 * (1.0 - rho));
    }
    return 0.0;
}

bool halfspace_check(const Channel& ch, const Observation& obs, const BitVector& b,
                     const ErrorVector& eps, const ThresholdVector& T) {
    const Eigen::VectorXd e = eps.to_real();
    const Eigen::VectorXd u = b.cast<double>() - 2.0 * e;
    const double lhs = obs.y.dot(ch.A.cwiseProduct(e));
    const double rhs = u.dot(ch.H * e - T.t.cwiseProduct(e));
    return lhs <= rhs;
}

Eigen::VectorXd vertex(const Channel& ch, const BitVector& b, const ErrorVector& eps,
                       const ThresholdVector& T) {
    const Eigen::VectorXd u = b.cast<double>() - 2.0 * eps.to_real();
    return ch.R * ch.A.cwiseProduct(u) - T.t.cwiseQuotient(ch.A).cwiseProduct(u);
}

}  // namespace lasmud
