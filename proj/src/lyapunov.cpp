#include "ellattr/lyapunov.hpp"

#include <algorithm>
#include <cmath>

#include "ellattr/errors.hpp"
#include "ellattr/parallel.hpp"

namespace ellattr {

exponent_report make_exponent_report(int degree, double integral_mean, double integral_se,
                                     std::uint64_t samples, std::uint64_t critical_hits) {
    exponent_report r;
    r.degree = degree;
    r.log_degree = std::log(double(degree));
    r.chi1 = 0.5 * r.log_degree;
    r.integral_mean = integral_mean;
    r.integral_se = integral_se;
    r.samples = samples;
    r.chi2 = 0.5 * integral_mean - r.chi1;
    r.chi2_se = 0.5 * integral_se;
    r.criterion_met = integral_mean + 3.0 * integral_se < r.log_degree;
    r.critical_hits = critical_hits;
    return r;
}

integral_result integral_log_jac(const rational_map& f, const curve_embedding& E,
                                 std::uint64_t n, rng_stream& rng, int threads) {
    if (n < 1000) throw error("integral_log_jac needs at least 1000 samples");

    // quick invariance gate; the full check is the caller's responsibility
    {
        rng_stream pre = rng.substream(~0ull);
        const auto sample = E.sample_mu_c(pre, 32);
        std::vector<proj_point> pts;
        for (const auto& [t, p] : sample) pts.push_back(p);
        invariance_report rep;
        try {
            rep = verify_curve_invariance(f, E.defining_poly(), pts);
        } catch (const near_indeterminacy_error&) {
            throw not_invariant_error("curve meets the indeterminacy set of the map");
        }
        if (rep.max_residual > 1e-6)
            throw not_invariant_error("curve is not invariant under the map (max residual " +
                                      std::to_string(rep.max_residual) + ")");
    }

    constexpr std::uint64_t chunk = 4096;
    const std::size_t n_chunks = std::size_t((n + chunk - 1) / chunk);
    std::vector<mean_accumulator> accs(n_chunks);
    std::vector<std::uint64_t> crits(n_chunks, 0);

    const auto& L = E.torus();
    for_chunks(std::size_t(n), chunk, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        rng_stream sub = rng.substream(c);
        mean_accumulator acc;
        std::uint64_t crit = 0;
        for (std::size_t i = b; i < e; ++i) {
            const cplx t = sub.uniform() * L.omega1() + sub.uniform() * L.omega2();
            double v;
            try {
                v = log_jacobian_fs(f, E.psi(t));
            } catch (const near_indeterminacy_error&) {
                throw not_invariant_error(
                    "map evaluation hit an indeterminacy point on the curve");
            }
            if (is_critical(v)) {
                ++crit;
                continue;
            }
            acc.add(v);
        }
        accs[c] = acc;
        crits[c] = crit;
    });

    integral_result out;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        out.acc.merge(accs[c]);
        out.critical_hits += crits[c];
    }
    if (double(out.critical_hits) > 1e-3 * double(n))
        throw too_many_critical_hits_error(
            "more than 0.1% of the samples hit critical points (" +
            std::to_string(out.critical_hits) + " of " + std::to_string(n) +
            "); log Jac is not integrable enough to trust the estimate");
    return out;
}

exponent_report transverse_exponent(const rational_map& f, const curve_embedding& E,
                                    std::uint64_t n, rng_stream& rng, int threads) {
    const integral_result r = integral_log_jac(f, E, n, rng, threads);
    return make_exponent_report(f.degree(), r.acc.mean(), r.acc.standard_error(), r.acc.count(),
                                r.critical_hits);
}

std::vector<proj_point> orbit_on_curve(const curve_embedding& E, const torus_map_fit& fit,
                                       cplx t0, std::size_t n) {
    if (!(fit.rms_residual < 1e-6))
        throw fit_residual_error("torus fit residual " + std::to_string(fit.rms_residual) +
                                 " too large for orbit generation");
    std::vector<proj_point> orbit;
    orbit.reserve(n);
    const auto& L = E.torus();
    cplx t = L.reduce(t0);
    for (std::size_t k = 0; k < n; ++k) {
        orbit.push_back(E.psi(t));
        t = L.reduce(fit.a * t + fit.b);
    }
    return orbit;
}

std::pair<double, double> birkhoff_log_jac(const rational_map& f, const curve_embedding& E,
                                           const torus_map_fit& fit, cplx t0, std::size_t n) {
    if (!(fit.rms_residual < 1e-6))
        throw fit_residual_error("torus fit residual too large");
    const auto& L = E.torus();
    cplx t = L.reduce(t0);

    // batch means over 100 batches give the standard error of an ergodic
    // average with fast-decaying correlations
    const std::size_t n_batches = std::min<std::size_t>(100, std::max<std::size_t>(2, n / 100));
    mean_accumulator total;
    mean_accumulator batches;
    mean_accumulator current;
    const std::size_t batch_len = n / n_batches;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = log_jacobian_fs(f, E.psi(t));
        if (!is_critical(v)) {
            total.add(v);
            current.add(v);
        }
        if (current.count() >= batch_len) {
            batches.add(current.mean());
            current = mean_accumulator();
        }
        t = L.reduce(fit.a * t + fit.b);
    }
    if (current.count() > batch_len / 2) batches.add(current.mean());
    const double se = batches.count() > 1 ? batches.standard_error() : 0.0;
    return {total.mean(), se};
}

namespace {

struct qr_step {
    cplx q[2][2];
    double r11, r22;
};

// QR of a 2x2 complex matrix by modified Gram-Schmidt, R diagonal positive.
qr_step qr2(const mat2& m) {
    qr_step out;
    const double r11 = std::sqrt(std::norm(m.a) + std::norm(m.c));
    out.r11 = r11;
    if (r11 < 1e-300) return out;
    const cplx q10 = m.a / r11, q11 = m.c / r11;
    const cplx r12 = std::conj(q10) * m.b + std::conj(q11) * m.d;
    const cplx w0 = m.b - r12 * q10, w1 = m.d - r12 * q11;
    const double r22 = std::sqrt(std::norm(w0) + std::norm(w1));
    out.r22 = r22;
    out.q[0][0] = q10;
    out.q[1][0] = q11;
    if (r22 >= 1e-300) {
        out.q[0][1] = w0 / r22;
        out.q[1][1] = w1 / r22;
    }
    return out;
}

mat2 mul(const mat2& x, const mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
}

// sin of the angle between the complex lines spanned by (u0,u1) and (w0,w1)
double sin_angle(cplx u0, cplx u1, cplx w0, cplx w1) {
    const double nu = std::sqrt(std::norm(u0) + std::norm(u1));
    const double nw = std::sqrt(std::norm(w0) + std::norm(w1));
    const double cross = std::abs(u0 * w1 - u1 * w0) / (nu * nw);
    return std::min(1.0, cross);
}

// most-contracted input direction of a 2x2 product: the eigenvector of
// M^H M for its smaller eigenvalue
void weakest_direction(const mat2& m, cplx& v0, cplx& v1) {
    const double a = std::norm(m.a) + std::norm(m.c);
    const cplx b = std::conj(m.a) * m.b + std::conj(m.c) * m.d;
    const double d = std::norm(m.b) + std::norm(m.d);
    const double tr = a + d;
    const double disc = std::sqrt(std::max(0.0, 0.25 * (a - d) * (a - d) + std::norm(b)));
    const double lam_min = 0.5 * tr - disc;
    // (A - lam I) v = 0
    if (std::abs(b) > 1e-300) {
        v0 = b;
        v1 = cplx(lam_min - a, 0.0);
    } else if (a <= d) {
        v0 = 1.0;
        v1 = 0.0;
    } else {
        v0 = 0.0;
        v1 = 1.0;
    }
}

}  // namespace

cocycle_report cocycle_exponents(const rational_map& f, const std::vector<proj_point>& orbit,
                                 int reorthonormalize_every) {
    if (orbit.size() < 100) throw inconsistent_orbit_error("orbit shorter than 100 points");
    if (reorthonormalize_every < 1) reorthonormalize_every = 1;
    const std::size_t n = orbit.size() - 1;

    // consistency: each point is the image of the previous one
    for (std::size_t k = 0; k < n; ++k) {
        proj_point img;
        try {
            img = eval_map(f, orbit[k]);
        } catch (const near_indeterminacy_error&) {
            throw inconsistent_orbit_error("orbit passes through an indeterminacy point at step " +
                                           std::to_string(k));
        }
        if (fs_distance(img, orbit[k + 1]) > 1e-8)
            throw inconsistent_orbit_error("orbit step " + std::to_string(k) +
                                           " is not the image of its predecessor");
    }

    std::vector<mat2> ms(n);
    for (std::size_t k = 0; k < n; ++k)
        ms[k] = chart_jacobian(f, orbit[k], orbit[k].max_chart(), orbit[k + 1].max_chart());

    cocycle_report rep;
    rep.steps = n;

    cplx q00 = 1.0, q01 = 0.0, q10 = 0.0, q11 = 1.0;
    double s1 = 0.0, s2 = 0.0;
    mean_accumulator log_jac;

    // checkpoints for the angle diagnostic
    const std::size_t window = 40;
    const std::size_t stride = std::max<std::size_t>(1, n / 64);

    mat2 pending{1.0, 0.0, 0.0, 1.0};
    int pending_count = 0;
    for (std::size_t k = 0; k < n; ++k) {
        pending = mul(ms[k], pending);
        if (++pending_count < reorthonormalize_every && k + 1 < n) continue;

        const mat2 b{pending.a * q00 + pending.b * q10, pending.a * q01 + pending.b * q11,
                     pending.c * q00 + pending.d * q10, pending.c * q01 + pending.d * q11};
        const qr_step qr = qr2(b);
        if (qr.r11 < 1e-300 || qr.r22 < 1e-300)
            throw critical_point_on_orbit_error("cocycle became singular at step " +
                                                std::to_string(k));
        s1 += std::log(qr.r11);
        s2 += std::log(qr.r22);
        q00 = qr.q[0][0];
        q10 = qr.q[1][0];
        q01 = qr.q[0][1];
        q11 = qr.q[1][1];
        pending = {1.0, 0.0, 0.0, 1.0};
        pending_count = 0;

        // angle diagnostic at checkpoints: fast direction = leading forward
        // column, slow direction from the windowed product ahead of k
        const std::size_t kk = k + 1;
        if (kk % stride == 0 && kk + window <= n) {
            mat2 prod{1.0, 0.0, 0.0, 1.0};
            double rescale = 0.0;
            for (std::size_t j = kk; j < kk + window; ++j) {
                prod = mul(ms[j], prod);
                const double m = std::abs(prod.a) + std::abs(prod.b) + std::abs(prod.c) +
                                 std::abs(prod.d);
                if (m > 1e100) {
                    prod = {prod.a / m, prod.b / m, prod.c / m, prod.d / m};
                    rescale += std::log(m);
                }
            }
            (void)rescale;
            cplx v0, v1;
            weakest_direction(prod, v0, v1);
            const double s = sin_angle(q00, q10, v0, v1);
            if (s > 0.0)
                rep.angle_diagnostic.emplace_back(kk, std::log(s) / double(kk));
        }
    }

    for (std::size_t k = 0; k < n; ++k) {
        const double v = log_jacobian_fs(f, orbit[k]);
        if (!is_critical(v)) log_jac.add(v);
    }
    rep.mean_log_jac = log_jac.mean();

    double l1 = s1 / double(n), l2 = s2 / double(n);
    if (l1 < l2) std::swap(l1, l2);
    if (std::abs(l1 - l2) < 10.0 / double(n)) {
        const double m = 0.5 * (l1 + l2);
        rep.lambda1 = rep.lambda2 = m;
        rep.m1 = 2;
        rep.m2 = 0;
    } else {
        rep.lambda1 = l1;
        rep.lambda2 = l2;
        rep.m1 = rep.m2 = 1;
    }
    return rep;
}

}  // namespace ellattr
