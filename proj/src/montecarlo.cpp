#include "lasmud/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <omp.h>
#include <set>
#include <stdexcept>

#include "lasmud/bounds.hpp"
#include "lasmud/error_vectors.hpp"
#include "lasmud/rng.hpp"

namespace lasmud {

std::string to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::Mf: return "mf";
        case BaselineKind::Decorrelator: return "decorrelator";
        case BaselineKind::Mmse: return "mmse";
        case BaselineKind::Gml: return "gml";
    }
    return "mf";
}

std::string to_string(InitialKind k) {
    switch (k) {
        case InitialKind::AllPlus: return "all-plus";
        case InitialKind::Random: return "random";
        case InitialKind::Mf: return "mf";
        case InitialKind::Decorrelator: return "decorrelator";
        case InitialKind::Mmse: return "mmse";
        case InitialKind::UserSupplied: return "user";
    }
    return "mf";
}

DetectorSpec DetectorSpec::make_baseline(BaselineKind k) {
    DetectorSpec d;
    d.baseline = k;
    d.label = to_string(k);
    return d;
}

DetectorSpec DetectorSpec::make_las(Schedule sched, InitialKind init, std::string label) {
    DetectorSpec d;
    d.label = label.empty() ? to_string(sched.kind) + "(" + to_string(init) + ")"
                            : std::move(label);
    d.schedule = std::move(sched);
    d.initial = init;
    return d;
}

namespace {

constexpr long kChunk = 4096;  // target_errors mode stops on these boundaries

struct Totals {
    std::vector<long> bit_errors;
    long vector_errors = 0;
    long flips = 0;
    long steps = 0;
    long convergence_failures = 0;

    explicit Totals(int K = 0) : bit_errors(K, 0) {}
    void add(const Totals& o) {
        for (std::size_t k = 0; k < bit_errors.size(); ++k) bit_errors[k] += o.bit_errors[k];
        vector_errors += o.vector_errors;
        flips += o.flips;
        steps += o.steps;
        convergence_failures += o.convergence_failures;
    }
};

BitVector random_bits(std::mt19937_64& eng, int K) {
    const std::uint64_t word = eng();
    BitVector b(K);
    for (int k = 0; k < K; ++k) b[k] = (word >> k) & 1u ? 1 : -1;
    return b;
}

Observation draw_observation(const Channel& ch, const BitVector& b, double sigma,
                             std::mt19937_64& eng) {
    Observation obs;
    obs.sigma = sigma;
    obs.y = ch.R * ch.A.cwiseProduct(b.cast<double>());
    if (sigma > 0.0) {
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd xi(ch.K);
        for (int i = 0; i < ch.K; ++i) xi[i] = normal(eng);
        obs.y += sigma * (ch.noise_factor * xi);
    }
    return obs;
}

BitVector initial_vector(const Channel& ch, const Observation& obs, const DetectorSpec& d,
                         std::uint64_t seed, long trial, std::size_t det_index) {
    switch (d.initial) {
        case InitialKind::AllPlus: return BitVector::Constant(ch.K, 1);
        case InitialKind::Random: {
            auto eng = stream_engine(seed, static_cast<std::uint64_t>(trial),
                                     0x1000 + det_index);
            return random_bits(eng, ch.K);
        }
        case InitialKind::Mf: return mf_detect(obs);
        case InitialKind::Decorrelator: return decorrelator_detect(ch, obs);
        case InitialKind::Mmse: return mmse_detect(ch, obs);
        case InitialKind::UserSupplied: return d.b0;
    }
    return mf_detect(obs);
}

BitVector detect_one(const Channel& ch, const Observation& obs, const DetectorSpec& d,
                     std::uint64_t seed, long trial, std::size_t det_index,
                     Totals& totals) {
    if (d.baseline) {
        switch (*d.baseline) {
            case BaselineKind::Mf: return mf_detect(obs);
            case BaselineKind::Decorrelator: return decorrelator_detect(ch, obs);
            case BaselineKind::Mmse: return mmse_detect(ch, obs);
            case BaselineKind::Gml: return gml_bruteforce(ch, obs);
        }
    }
    const BitVector b0 = initial_vector(ch, obs, d, seed, trial, det_index);
    RunOptions opts;
    opts.max_periods = d.max_periods;
    const DetectionResult res = run_las(ch, obs, *d.schedule, b0, opts);
    totals.flips += res.flips;
    totals.steps += res.steps;
    if (!res.converged) ++totals.convergence_failures;
    return res.fixed_point;
}

void run_trial(const Channel& ch, const SimConfig& cfg, long trial,
               std::vector<Totals>& totals) {
    BitVector b_common;
    Observation obs_common;
    if (cfg.common_randomness) {
        auto eng = stream_engine(cfg.seed, static_cast<std::uint64_t>(trial));
        b_common = random_bits(eng, ch.K);
        obs_common = draw_observation(ch, b_common, cfg.sigma, eng);
    }
    for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
        BitVector b = b_common;
        Observation obs = obs_common;
        if (!cfg.common_randomness) {
            auto eng = stream_engine(cfg.seed, static_cast<std::uint64_t>(trial), d + 1);
            b = random_bits(eng, ch.K);
            obs = draw_observation(ch, b, cfg.sigma, eng);
        }
        const BitVector bhat =
            detect_one(ch, obs, cfg.detectors[d], cfg.seed, trial, d, totals[d]);
        bool any = false;
        for (int k = 0; k < ch.K; ++k) {
            if (bhat[k] != b[k]) {
                ++totals[d].bit_errors[k];
                any = true;
            }
        }
        if (any) ++totals[d].vector_errors;
    }
}

void validate_config(const Channel& ch, const SimConfig& cfg) {
    if ((cfg.trials > 0) == (cfg.target_errors > 0))
        throw std::invalid_argument("exactly one of trials/target_errors must be set");
    if (cfg.sigma < 0.0) throw std::invalid_argument("sigma must be set and >= 0");
    if (cfg.detectors.empty()) throw std::invalid_argument("no detectors configured");
    for (const auto& d : cfg.detectors) {
        if (d.baseline && d.schedule)
            throw std::invalid_argument("detector cannot be both baseline and search");
        if (!d.baseline && !d.schedule)
            throw std::invalid_argument("detector needs a baseline kind or a schedule");
        if (d.baseline && *d.baseline == BaselineKind::Gml && ch.K > 24)
            throw std::invalid_argument("brute-force baseline refused for K > 24");
        if (d.schedule && d.schedule->K != ch.K)
            throw std::invalid_argument("schedule/channel user count mismatch");
        if (d.initial == InitialKind::UserSupplied && d.b0.size() != ch.K)
            throw std::invalid_argument("user-supplied initial has wrong length");
    }
}

std::vector<SimResult> finalize(const Channel& ch, const SimConfig& cfg,
                                const std::vector<Totals>& totals, long trials) {
    std::vector<SimResult> out;
    const double n = static_cast<double>(trials);
    for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
        SimResult r;
        r.label = cfg.detectors[d].label;
        r.trials = trials;
        r.vector_errors = totals[d].vector_errors;
        r.ver = totals[d].vector_errors / n;
        r.ver_se = std::sqrt(r.ver * (1.0 - r.ver) / n);
        r.bfr = totals[d].flips / (n * ch.K);
        r.mean_steps = totals[d].steps / n;
        r.convergence_failures = totals[d].convergence_failures;
        for (int k = 0; k < ch.K; ++k) {
            UserStat u;
            u.user = k;
            u.snr_db = cfg.sigma > 0.0
                           ? 10.0 * std::log10(ch.A[k] * ch.A[k] / (cfg.sigma * cfg.sigma))
                           : std::numeric_limits<double>::infinity();
            u.bit_errors = totals[d].bit_errors[k];
            u.ber = totals[d].bit_errors[k] / n;
            u.se = std::sqrt(u.ber * (1.0 - u.ber) / n);
            r.per_user.push_back(u);
        }
        out.push_back(std::move(r));
    }
    return out;
}

/// Runs trials [first, first+count) in parallel and merges into `global`.
void run_block(const Channel& ch, const SimConfig& cfg, long first, long count,
               std::vector<Totals>& global) {
    const int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel num_threads(nthreads)
    {
        std::vector<Totals> local(cfg.detectors.size(), Totals(ch.K));
#pragma omp for schedule(static)
        for (long t = first; t < first + count; ++t) run_trial(ch, cfg, t, local);
#pragma omp critical
        for (std::size_t d = 0; d < local.size(); ++d) global[d].add(local[d]);
    }
}

bool targets_met(const std::vector<Totals>& totals, long target) {
    return std::all_of(totals.begin(), totals.end(),
                       [target](const Totals& t) { return t.vector_errors >= target; });
}

}  // namespace

std::vector<SimResult> estimate(const Channel& ch, const SimConfig& cfg) {
    validate_config(ch, cfg);
    std::vector<Totals> totals(cfg.detectors.size(), Totals(ch.K));
    long trials = 0;
    if (cfg.trials > 0) {
        trials = cfg.trials;
        run_block(ch, cfg, 0, trials, totals);
    } else {
        const long cap = cfg.max_trials > 0 ? cfg.max_trials : (1L << 26);
        while (trials < cap && !targets_met(totals, cfg.target_errors)) {
            const long count = std::min(kChunk, cap - trials);
            run_block(ch, cfg, trials, count, totals);
            trials += count;
        }
    }
    return finalize(ch, cfg, totals, trials);
}

std::vector<SimResult> estimate_serial(const Channel& ch, const SimConfig& cfg) {
    validate_config(ch, cfg);
    std::vector<Totals> totals(cfg.detectors.size(), Totals(ch.K));
    long trials = 0;
    if (cfg.trials > 0) {
        trials = cfg.trials;
        for (long t = 0; t < trials; ++t) run_trial(ch, cfg, t, totals);
    } else {
        const long cap = cfg.max_trials > 0 ? cfg.max_trials : (1L << 26);
        while (trials < cap && !targets_met(totals, cfg.target_errors)) {
            const long count = std::min(kChunk, cap - trials);
            for (long t = trials; t < trials + count; ++t) run_trial(ch, cfg, t, totals);
            trials += count;
        }
    }
    return finalize(ch, cfg, totals, trials);
}

namespace {

Schedule rotating_schedule(const Channel& ch, long index) {
    switch (index % 3) {
        case 0: return make_slas_circular(ch.K);
        case 1: return make_plas(ch.K);
        default: {
            std::vector<std::vector<int>> groups;
            for (int k = 0; k < ch.K; k += 2) {
                std::vector<int> g{k};
                if (k + 1 < ch.K) g.push_back(k + 1);
                groups.push_back(std::move(g));
            }
            return make_gplas(ch.K, groups);
        }
    }
}

double log_uniform(std::mt19937_64& eng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(eng));
}

void note(AuditReport& rep, const std::string& what) {
    ++rep.violations;
    if (rep.details.size() < 16) rep.details.push_back(what);
}

}  // namespace

AuditReport audit_ascent(const Channel& ch, const AuditConfig& cfg) {
    AuditReport rep;
    rep.suite = "ascent";
    const int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
    long checks = 0, descent = 0, weak_flip = 0, drift = 0, nonconv = 0;

#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads) \
    reduction(+ : checks, descent, weak_flip, drift, nonconv)
    for (long r = 0; r < cfg.samples; ++r) {
        auto eng = stream_engine(cfg.seed, static_cast<std::uint64_t>(r));
        const BitVector b = random_bits(eng, ch.K);
        const double sigma = log_uniform(eng, 0.05, 2.0);
        const Observation obs = draw_observation(ch, b, sigma, eng);
        const Schedule sched = rotating_schedule(ch, r);
        const BitVector b0 = (r & 1) ? mf_detect(obs) : random_bits(eng, ch.K);

        std::vector<std::vector<double>> slot_t;
        for (const auto& L : sched.period) slot_t.push_back(thresholds_for_set(ch, L));

        DetectorState st = init_state(ch, obs, b0);
        double f = likelihood(ch, obs, b0);
        const long max_periods = 64L * ch.K;
        bool converged = false;
        std::vector<int> flipped;
        for (long period = 0; period < max_periods && !converged; ++period) {
            long flips_in_period = 0;
            for (std::size_t s = 0; s < sched.period.size(); ++s) {
                const DetectorState pre = st;
                const int n = las_step(st, ch, sched.period[s], slot_t[s], &flipped);
                const double df = likelihood_delta(ch, pre, flipped);
                ++checks;
                if (df < -1e-9 * std::max(1.0, std::abs(f))) ++descent;
                if (n > 0 && !(df > 0.0)) ++weak_flip;
                f += df;
                flips_in_period += n;
            }
            const Eigen::VectorXd exact = gradient(ch, obs, st.b);
            if ((st.g - exact).cwiseAbs().maxCoeff() > 1e-9) ++drift;
            converged = flips_in_period == 0;
        }
        if (!converged) ++nonconv;
    }
    rep.checks = checks;
    rep.violations = descent + weak_flip + drift + nonconv;
    if (descent) rep.details.push_back(std::to_string(descent) + " likelihood descents");
    if (weak_flip) rep.details.push_back(std::to_string(weak_flip) + " non-strict flips");
    if (drift) rep.details.push_back(std::to_string(drift) + " gradient drifts");
    if (nonconv) rep.details.push_back(std::to_string(nonconv) + " convergence failures");
    return rep;
}

AuditReport audit_regions(const Channel& ch, const AuditConfig& cfg) {
    if (ch.K > 4)
        throw std::invalid_argument("region audit enumerates all initials; K <= 4 only");
    AuditReport rep;
    rep.suite = "regions";
    const Schedule slas = make_slas_circular(ch.K);
    const Schedule plas = make_plas(ch.K);
    const ThresholdVector t_slas = effective_thresholds(ch, slas);
    const ThresholdVector t_plas = effective_thresholds(ch, plas);
    const std::uint64_t n_states = std::uint64_t{1} << ch.K;
    const int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();

    long checks = 0, v_gml = 0, v_nest = 0, v_self = 0, v_unique = 0;

#pragma omp parallel for schedule(dynamic, 64) num_threads(nthreads) \
    reduction(+ : checks, v_gml, v_nest, v_self, v_unique)
    for (long s = 0; s < cfg.samples; ++s) {
        auto eng = stream_engine(cfg.seed, static_cast<std::uint64_t>(s));
        const BitVector b = random_bits(eng, ch.K);
        const double sigma = log_uniform(eng, 0.1, 2.0);
        const Observation obs = draw_observation(ch, b, sigma, eng);

        auto pack = [&](const BitVector& v) {
            std::uint64_t m = 0;
            for (int k = 0; k < ch.K; ++k)
                if (v[k] > 0) m |= std::uint64_t{1} << k;
            return m;
        };
        auto unpack = [&](std::uint64_t m) {
            BitVector v(ch.K);
            for (int k = 0; k < ch.K; ++k) v[k] = (m >> k) & 1u ? 1 : -1;
            return v;
        };

        std::set<std::uint64_t> psi_slas, psi_plas;
        bool self_ok = true;
        for (std::uint64_t i = 0; i < n_states; ++i) {
            const BitVector b0 = unpack(i);
            const DetectionResult rs = run_las(ch, obs, slas, b0, {});
            const DetectionResult rp = run_las(ch, obs, plas, b0, {});
            psi_slas.insert(pack(rs.fixed_point));
            psi_plas.insert(pack(rp.fixed_point));
            if (!fixed_point_region_check(ch, obs, rs.fixed_point, t_slas) ||
                !wslas_region_check(ch, obs, rs.fixed_point) ||
                !fixed_point_region_check(ch, obs, rp.fixed_point, t_plas))
                self_ok = false;
        }
        ++checks;
        if (!self_ok) ++v_self;

        const BitVector gml = gml_bruteforce(ch, obs);
        if (!psi_slas.count(pack(gml))) ++v_gml;

        for (std::uint64_t m : psi_slas) {
            if (!fixed_point_region_check(ch, obs, unpack(m), t_plas)) {
                ++v_nest;
                break;
            }
        }

        for (const auto* tv : {&t_slas, &t_plas}) {
            if (!unique_fixed_point_check(ch, obs, *tv)) continue;
            // region-characterized fixed-point set must be exactly {sgn(y)}
            const std::uint64_t want = pack(mf_detect(obs));
            bool ok = true;
            for (std::uint64_t i = 0; i < n_states; ++i) {
                const bool in_region = fixed_point_region_check(ch, obs, unpack(i), *tv);
                if (in_region != (i == want)) ok = false;
            }
            const auto& psi = tv == &t_slas ? psi_slas : psi_plas;
            if (psi.size() != 1 || *psi.begin() != want) ok = false;
            if (!ok) ++v_unique;
        }
    }
    rep.checks = checks;
    rep.violations = v_gml + v_nest + v_self + v_unique;
    if (v_gml) rep.details.push_back(std::to_string(v_gml) + " gml-not-in-psi");
    if (v_nest) rep.details.push_back(std::to_string(v_nest) + " psi-nesting");
    if (v_self) rep.details.push_back(std::to_string(v_self) + " self-region");
    if (v_unique) rep.details.push_back(std::to_string(v_unique) + " unique-fixed-point");
    return rep;
}

AuditReport audit_containment(const Channel& ch, const AuditConfig& cfg) {
    if (ch.K > 16)
        throw std::invalid_argument("containment audit is exponential in K; K <= 16 only");
    AuditReport rep;
    rep.suite = "containment";
    const int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
    long checks = 0, v_lemma3 = 0, v_lemma4 = 0, v_nodecomp = 0, rejected = 0;

#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads) \
    reduction(+ : checks, v_lemma3, v_lemma4, v_nodecomp, rejected)
    for (long s = 0; s < cfg.samples; ++s) {
        auto eng = stream_engine(cfg.seed, static_cast<std::uint64_t>(s));
        const BitVector b = random_bits(eng, ch.K);

        // admissible error vector: eps = b on a random nonempty support
        std::uniform_int_distribution<std::uint64_t> mask_dist(
            1, (std::uint64_t{1} << ch.K) - 1);
        ErrorVector eps;
        eps.K = ch.K;
        eps.support = mask_dist(eng);
        for (int k = 0; k < ch.K; ++k)
            if ((eps.support >> k) & 1u && b[k] > 0) eps.plus |= std::uint64_t{1} << k;

        const Schedule sched = rotating_schedule(ch, s);
        const ThresholdVector T = effective_thresholds(ch, sched);

        BitVector target(ch.K);
        for (int k = 0; k < ch.K; ++k) target[k] = b[k] - 2 * eps.entry(k);

        // rejection-sample y inside the fixed-point region of b - 2 eps
        Observation obs;
        bool inside = false;
        for (int attempt = 0; attempt < 200 && !inside; ++attempt) {
            const double sigma = log_uniform(eng, 0.1, 1.0);
            obs = draw_observation(ch, target, sigma, eng);
            inside = fixed_point_region_check(ch, obs, target, T);
        }
        if (!inside) {
            ++rejected;
            continue;
        }
        ++checks;

        if (!halfspace_check(ch, obs, b, eps, T)) ++v_lemma3;

        if (!is_indecomposable(ch, eps)) {
            // eps in E_k for the lowest affected user; find eps* in F_k with
            // nonnegative residual energy by brute-force sub-support search
            const int k = std::countr_zero(eps.support);
            ErrorVector best;
            bool found = false;
            const std::uint64_t sub_space = eps.support;
            for (std::uint64_t sub = sub_space; sub != 0 && !found;
                 sub = (sub - 1) & sub_space) {
                if (!((sub >> k) & 1u) || sub == eps.support) continue;
                ErrorVector cand;
                cand.K = ch.K;
                cand.support = sub;
                cand.plus = eps.plus & sub;
                ErrorVector resid;
                resid.K = ch.K;
                resid.support = eps.support & ~sub;
                resid.plus = eps.plus & ~sub;
                if (!is_indecomposable(ch, cand)) continue;
                double rHr = 0.0;
                for (int i : resid.support_indices())
                    for (int j : resid.support_indices())
                        rHr += resid.entry(i) * ch.H(i, j) * resid.entry(j);
                if (rHr >= 0.0) {
                    best = cand;
                    found = true;
                }
            }
            if (!found)
                ++v_nodecomp;
            else if (!halfspace_check(ch, obs, b, best, T))
                ++v_lemma4;
        }
    }
    rep.checks = checks;
    rep.violations = v_lemma3 + v_lemma4 + v_nodecomp;
    if (v_lemma3) rep.details.push_back(std::to_string(v_lemma3) + " half-space misses");
    if (v_lemma4)
        rep.details.push_back(std::to_string(v_lemma4) + " sub-vector half-space misses");
    if (v_nodecomp) rep.details.push_back(std::to_string(v_nodecomp) + " no decomposition");
    if (rejected)
        rep.details.push_back(std::to_string(rejected) + " samples skipped (region miss)");
    return rep;
}

AuditReport audit_error_monotonicity(const Channel& ch, const AuditConfig& cfg) {
    AuditReport rep;
    rep.suite = "monotonicity";
    const Schedule slas = make_slas_circular(ch.K);
    const int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();

    // initial detectors compared against the SLAS run they seed
    enum { kMf = 0, kDec = 1, kRandom = 2, kInitials = 3 };
    long init_err[kInitials] = {0, 0, 0};
    long las_err[kInitials] = {0, 0, 0};

#pragma omp parallel num_threads(nthreads)
    {
        long local_init[kInitials] = {0, 0, 0};
        long local_las[kInitials] = {0, 0, 0};
#pragma omp for schedule(static)
        for (long t = 0; t < cfg.samples; ++t) {
            auto eng = stream_engine(cfg.seed, static_cast<std::uint64_t>(t));
            const BitVector b = random_bits(eng, ch.K);
            const Observation obs = draw_observation(ch, b, cfg.sigma, eng);
            BitVector inits[kInitials];
            inits[kMf] = mf_detect(obs);
            inits[kDec] = decorrelator_detect(ch, obs);
            inits[kRandom] = random_bits(eng, ch.K);
            for (int i = 0; i < kInitials; ++i) {
                if (inits[i] != b) ++local_init[i];
                const DetectionResult r = run_las(ch, obs, slas, inits[i], {});
                if (r.fixed_point != b) ++local_las[i];
            }
        }
#pragma omp critical
        for (int i = 0; i < kInitials; ++i) {
            init_err[i] += local_init[i];
            las_err[i] += local_las[i];
        }
    }

    const double n = static_cast<double>(cfg.samples);
    const char* names[kInitials] = {"mf", "decorrelator", "random"};
    for (int i = 0; i < kInitials; ++i) {
        ++rep.checks;
        const double p_init = init_err[i] / n, p_las = las_err[i] / n;
        const double se = std::sqrt(p_init * (1.0 - p_init) / n +
                                    p_las * (1.0 - p_las) / n);
        if (p_las > p_init + 3.0 * se)
            note(rep, std::string("ver(slas from ") + names[i] + ") = " +
                          std::to_string(p_las) + " > ver(" + names[i] + ") = " +
                          std::to_string(p_init) + " + 3 se");
        rep.details.push_back(std::string(names[i]) + ": init " + std::to_string(p_init) +
                              " -> slas " + std::to_string(p_las));
    }
    return rep;
}

}  // namespace lasmud
