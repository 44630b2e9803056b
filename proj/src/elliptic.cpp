#include "ellattr/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include "ellattr/errors.hpp"

namespace ellattr {

namespace {

constexpr double pi = 3.14159265358979323846264338327950288;

// theta_1..4(v, q) and theta_1'(v, q) by the defining series. The nome
// satisfies |q| <= exp(-pi sqrt(3)/2) ~ 0.0658 after lattice reduction, so a
// handful of terms reaches full double precision.
struct theta_values {
    cplx t1, t2, t3, t4, d1;
};

theta_values thetas(cplx v, cplx q) {
    theta_values th{0.0, 0.0, 1.0, 1.0, 0.0};
    const cplx q2 = q * q;
    const cplx q14 = std::exp(0.25 * std::log(q));

    // q^{(n+1/2)^2} = q^{1/4} * q^{n(n+1)};  q^{n^2}
    cplx q_tri = 1.0;   // q^{n(n+1)}
    cplx q_sq = 1.0;    // q^{n^2}
    cplx q_tri_step = q2;   // q^{2(n+1)}
    cplx q_sq_step = q;     // q^{2n+1}
    for (int n = 0; n < 40; ++n) {
        const cplx qe = q14 * q_tri;
        const double sgn = (n % 2) ? -1.0 : 1.0;
        const cplx arg = double(2 * n + 1) * v;
        th.t1 += 2.0 * sgn * qe * std::sin(arg);
        th.t2 += 2.0 * qe * std::cos(arg);
        th.d1 += 2.0 * sgn * double(2 * n + 1) * qe * std::cos(arg);
        if (n >= 1) {
            q_sq *= q_sq_step;
            q_sq_step *= q2;
            th.t3 += 2.0 * q_sq * std::cos(2.0 * double(n) * v);
            th.t4 += 2.0 * sgn * q_sq * std::cos(2.0 * double(n) * v);
        }
        q_tri *= q_tri_step;
        q_tri_step *= q2;
        if (std::abs(qe) < 1e-24) break;
    }
    return th;
}

}  // namespace

lattice::lattice(cplx omega1, cplx omega2) : w1_(omega1), w2_(omega2) {
    if (std::abs(w1_) < 1e-300 || std::abs(w2_) < 1e-300)
        throw degenerate_lattice_error("zero period");
    cplx tau = w2_ / w1_;
    if (std::abs(tau.imag()) < 1e-6)
        throw degenerate_lattice_error("periods are (nearly) linearly dependent: Im(w2/w1) = " +
                                       std::to_string(tau.imag()));
    if (tau.imag() < 0) w2_ = -w2_;  // same lattice, normalized orientation

    // Lagrange-Gauss reduction of the basis
    cplx a = w1_, b = w2_;
    for (int it = 0; it < 64; ++it) {
        const double m = std::round((b * std::conj(a)).real() / std::norm(a));
        b -= m * a;
        if (std::abs(b) < std::abs(a))
            std::swap(a, b);
        else
            break;
    }
    if ((b / a).imag() < 0) b = -b;
    r1_ = a;
    r2_ = b;
    if ((r2_ / r1_).imag() > 200.0)
        throw degenerate_lattice_error(
            "period ratio too extreme for double precision (Im tau > 200 after reduction)");
    compute_invariants();
}

void lattice::compute_invariants() {
    const cplx tau = r2_ / r1_;
    q_ = std::exp(cplx(0.0, pi) * tau);
    const cplx qt = q_ * q_;  // exp(2 pi i tau)

    // Eisenstein series in Lambert form
    cplx e4 = 1.0, e6 = 1.0;
    cplx qn = qt;
    for (int n = 1; n < 64; ++n) {
        const double n3 = double(n) * double(n) * double(n);
        e4 += 240.0 * n3 * qn / (1.0 - qn);
        e6 -= 504.0 * n3 * double(n) * double(n) * qn / (1.0 - qn);
        qn *= qt;
        if (std::abs(qn) < 1e-22) break;
    }
    const cplx pref = 2.0 * pi / r1_;
    const cplx p2 = pref * pref;
    inv_.g2 = p2 * p2 * e4 / 12.0;
    inv_.g3 = p2 * p2 * p2 * e6 / 216.0;
    inv_.discriminant = inv_.g2 * inv_.g2 * inv_.g2 - 27.0 * inv_.g3 * inv_.g3;

    const auto th0 = thetas(0.0, q_);
    null2_ = th0.t2;
    null3_ = th0.t3;
    null4_ = th0.t4;
}

cplx lattice::reduce(cplx t) const {
    const double det = r1_.real() * r2_.imag() - r1_.imag() * r2_.real();
    const double alpha = (t.real() * r2_.imag() - t.imag() * r2_.real()) / det;
    const double beta = (r1_.real() * t.imag() - r1_.imag() * t.real()) / det;
    cplx best = t - std::round(alpha) * r1_ - std::round(beta) * r2_;
    // the rounded cell corner is not always the nearest lattice point
    double bm = std::abs(best);
    for (int dm = -1; dm <= 1; ++dm)
        for (int dn = -1; dn <= 1; ++dn) {
            const cplx cand = best - double(dm) * r1_ - double(dn) * r2_;
            const double m = std::abs(cand);
            if (m < bm) {
                bm = m;
                best = cand;
            }
        }
    return best;
}

double lattice::diameter() const {
    return std::max(std::abs(w1_ + w2_), std::abs(w1_ - w2_));
}

std::pair<cplx, cplx> lattice::wp(cplx t) const {
    const cplx tr = reduce(t);
    if (std::abs(tr) < 1e-8) throw near_pole_error();

    // half-period convention: periods (2W1, 2W3) = (r1, r2)
    const cplx W1 = 0.5 * r1_;
    const cplx v = pi * tr / (2.0 * W1);
    const auto th = thetas(v, q_);
    const cplx d10 = null2_ * null3_ * null4_;  // Jacobi: theta1'(0)

    const cplx pref = pi / (2.0 * W1);
    const cplx frac = null2_ * null3_ * th.t4 / th.t1;
    const cplx n2_4 = null2_ * null2_ * null2_ * null2_;
    const cplx n3_4 = null3_ * null3_ * null3_ * null3_;
    const cplx P = pref * pref * (frac * frac - (n2_4 + n3_4) / 3.0);
    const cplx Pp = -2.0 * pref * pref * pref * th.t2 * th.t3 * th.t4 * d10 * d10 /
                    (th.t1 * th.t1 * th.t1);
    return {P, Pp};
}

weierstrass_data invariants_from_lattice(const lattice& L) { return L.invariants(); }

// ---------------------------------------------------------------------------

curve_embedding::curve_embedding(lattice L) : lattice_(std::move(L)) {
    const auto& inv = lattice_.invariants();
    if (std::abs(inv.discriminant) <
        1e-12 * std::max(std::pow(std::abs(inv.g2), 3.0), std::norm(inv.g3)))
        throw degenerate_lattice_error("vanishing discriminant (singular cubic)");

    std::vector<hom_poly::term> terms;
    terms.push_back({{0, 2, 1}, 1.0});
    terms.push_back({{3, 0, 0}, -4.0});
    if (inv.g2 != cplx(0.0)) terms.push_back({{1, 0, 2}, inv.g2});
    if (inv.g3 != cplx(0.0)) terms.push_back({{0, 0, 3}, inv.g3});
    poly_ = hom_poly::from_terms(std::move(terms));
}

proj_point curve_embedding::psi(cplx t) const {
    const cplx tr = lattice_.reduce(t);
    if (std::abs(tr) < 1e-8) return proj_point::normalize({0.0, 1.0, 0.0});
    auto [P, Pp] = lattice_.wp(tr);
    if (std::abs(Pp) > 1.0) {
        // near the pole wp' dominates; rescaling by 1/wp' keeps every entry finite
        return proj_point::normalize({P / Pp, 1.0, 1.0 / Pp});
    }
    return proj_point::normalize({P, Pp, 1.0});
}

std::vector<std::pair<cplx, proj_point>> curve_embedding::sample_mu_c(rng_stream& rng,
                                                                      std::size_t n) const {
    std::vector<std::pair<cplx, proj_point>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = rng.uniform();
        const double r = rng.uniform();
        const cplx t = s * lattice_.omega1() + r * lattice_.omega2();
        out.emplace_back(t, psi(t));
    }
    return out;
}

void curve_embedding::build_grid(int res) const {
    grid_.clear();
    grid_.reserve(std::size_t(res) * std::size_t(res));
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
            const cplx t = (i + 0.5) / double(res) * lattice_.omega1() +
                           (j + 0.5) / double(res) * lattice_.omega2();
            grid_.emplace_back(t, psi(t));
        }
    grid_res_ = res;
}

cplx curve_embedding::newton_from(cplx seed, cplx x_target, cplx y_target, bool& ok) const {
    cplx t = seed;
    ok = false;
    const double xs = std::max(1.0, std::abs(x_target));
    for (int it = 0; it < 60; ++it) {
        std::pair<cplx, cplx> w;
        try {
            w = lattice_.wp(t);
        } catch (const near_pole_error&) {
            return t;
        }
        const cplx d = w.first - x_target;
        if (std::abs(d) <= 1e-12 * xs) {
            ok = true;
            break;
        }
        if (std::abs(w.second) < 1e-290) return t;  // derivative vanished (half-period)
        t -= d / w.second;
    }
    if (!ok) return t;
    // pick the branch of +-t by matching wp'
    auto w = lattice_.wp(t);
    if (std::abs(w.second - y_target) > std::abs(w.second + y_target)) {
        t = -t;
        w = lattice_.wp(t);
    }
    ok = std::abs(w.first - x_target) <= 1e-9 * xs &&
         std::abs(w.second - y_target) <= 1e-7 * std::max(1.0, std::abs(y_target));
    return lattice_.reduce(t);
}

cplx curve_embedding::psi_inverse(const proj_point& q, const cplx* seed) const {
    // near [0:1:0] the point is a pole image; t ~ the lattice itself
    if (std::abs(q[2]) < 1e-14 && std::abs(q[0]) < 1e-7) return cplx(0.0);

    if (std::abs(q[2]) < 1e-14)
        throw inversion_failure_error("point at infinity is not on the affine curve chart");
    const cplx x = q[0] / q[2];
    const cplx y = q[1] / q[2];

    bool ok = false;
    if (seed) {
        const cplx t = newton_from(*seed, x, y, ok);
        if (ok) return t;
    }
    if (std::abs(x) > 1e4) {
        // image close to the pole: wp ~ 1/t^2 seeds Newton directly
        const cplx t0 = std::sqrt(1.0 / x);
        for (const cplx cand : {t0, -t0}) {
            const cplx t = newton_from(cand, x, y, ok);
            if (ok) return t;
        }
    }
    for (const int res : {24, 64}) {
        if (grid_res_ < res) build_grid(res);
        // seed at the grid point closest to q in the chordal metric
        std::size_t best = 0;
        double bd = 2.0;
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double d = fs_distance(grid_[i].second, q);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        const cplx t = newton_from(grid_[best].first, x, y, ok);
        if (ok) return t;
    }
    throw inversion_failure_error("Newton stagnated inverting the curve parametrization");
}

// ---------------------------------------------------------------------------

torus_map_fit fit_torus_map_fn(const std::function<proj_point(const proj_point&)>& step,
                               const curve_embedding& E, int n_anchors, int expected_degree) {
    if (n_anchors < 8) n_anchors = 8;
    const auto& L = E.torus();
    const double eps = 1e-5 * L.diameter();

    // deterministic anchors; stream fixed so the fit is reproducible
    rng_stream rng(0x70f1u, std::uint64_t(n_anchors));
    std::vector<cplx> ts, tps;
    std::vector<cplx> slopes;
    for (int i = 0; i < n_anchors; ++i) {
        const cplx t = rng.uniform() * L.omega1() + rng.uniform() * L.omega2();
        const cplx tp = E.psi_inverse(step(E.psi(t)));
        const cplx tq = E.psi_inverse(step(E.psi(t + eps)), &tp);
        ts.push_back(t);
        tps.push_back(tp);
        slopes.push_back((tq - tp) / eps);
    }

    // the lift is exactly affine, so local slopes all estimate a; take the
    // componentwise median to shrug off any bad inversion
    auto med = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    std::vector<double> sre, sim;
    for (const cplx s : slopes) {
        sre.push_back(s.real());
        sim.push_back(s.imag());
    }
    cplx a(med(sre), med(sim));

    // unwrap the lattice offsets and refine (a, b) by least squares
    cplx b = L.reduce(tps[0] - a * ts[0]);
    for (int pass = 0; pass < 2; ++pass) {
        // solve min sum |tp_i - gamma_i - a t_i - b|^2 with gamma_i in the lattice
        cplx s_t(0), s_1(0), s_tt(0), s_ty(0), s_y(0);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const cplx resid = tps[i] - (a * ts[i] + b);
            const cplx y = tps[i] - (resid - L.reduce(resid));  // unwrapped image
            s_t += ts[i];
            s_tt += std::norm(ts[i]);
            s_ty += std::conj(ts[i]) * y;
            s_y += y;
            s_1 += 1.0;
        }
        // normal equations for  [a b] of  y ~ a t + b  (complex linear LS)
        const cplx det = s_tt * s_1 - std::conj(s_t) * s_t;
        if (std::abs(det) < 1e-30) break;
        const cplx a_new = (s_ty * s_1 - std::conj(s_t) * s_y) / det;
        const cplx b_new = (s_tt * s_y - s_t * s_ty) / det;
        a = a_new;
        b = b_new;
    }

    torus_map_fit fit;
    fit.a = a;
    fit.b = L.reduce(b);
    fit.abs_a_sq = std::norm(a);
    fit.map_degree = expected_degree;

    // rms of psi(a t + b) against the true images over fresh samples
    rng_stream rng2(0x70f2u, std::uint64_t(n_anchors));
    double ss = 0.0;
    const int n_check = std::max(64, n_anchors);
    for (int i = 0; i < n_check; ++i) {
        const cplx t = rng2.uniform() * L.omega1() + rng2.uniform() * L.omega2();
        const double d = fs_distance(E.psi(a * t + fit.b), step(E.psi(t)));
        ss += d * d;
    }
    fit.rms_residual = std::sqrt(ss / n_check);

    if (std::abs(fit.abs_a_sq - double(expected_degree)) > 0.05)
        throw degree_mismatch_error("|a|^2 = " + std::to_string(fit.abs_a_sq) +
                                    " does not match the map degree " +
                                    std::to_string(expected_degree));
    return fit;
}

torus_map_fit fit_torus_map(const rational_map& f, const curve_embedding& E, int n_anchors) {
    // invariance pre-check on a deterministic sample
    rng_stream rng(0x70f0u, 0);
    const auto sample = E.sample_mu_c(rng, 64);
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

    return fit_torus_map_fn([&f](const proj_point& p) { return eval_map(f, p); }, E, n_anchors,
                            f.degree());
}

double pair_separation(const torus_map_fit& fit, const curve_embedding& E, cplx t, cplx dt,
                       int horizon) {
    if (std::abs(dt) < 1e-12) throw degenerate_pair_error();
    const auto& L = E.torus();
    cplx u = L.reduce(t);
    cplx v = L.reduce(t + dt);
    double best = 0.0;
    for (int n = 0; n <= horizon; ++n) {
        best = std::max(best, fs_distance(E.psi(u), E.psi(v)));
        u = L.reduce(fit.a * u + fit.b);
        v = L.reduce(fit.a * v + fit.b);
    }
    return best;
}

separation_report separation_probe(const torus_map_fit& fit, const curve_embedding& E,
                                   int n_pairs, int horizon, rng_stream& rng) {
    const auto& L = E.torus();
    const double max_off = L.diameter() / 100.0;
    separation_report rep;
    rep.beta_hat = 2.0;
    for (int i = 0; i < n_pairs; ++i) {
        const cplx t = rng.uniform() * L.omega1() + rng.uniform() * L.omega2();
        const double ang = 2.0 * pi * rng.uniform();
        double mag = max_off * rng.uniform();
        if (mag < 1e-10) mag = 1e-10;
        const cplx dt = mag * std::exp(cplx(0.0, ang));
        const double sep = pair_separation(fit, E, t, dt, horizon);
        if (sep < rep.beta_hat) {
            rep.beta_hat = sep;
            rep.worst_t = t;
            rep.worst_offset = dt;
        }
    }
    return rep;
}

}  // namespace ellattr
