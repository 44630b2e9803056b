#include "ellattr/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ellattr/basin.hpp"
#include "ellattr/errors.hpp"
#include "ellattr/kernels/kernels.hpp"
#include "ellattr/lyapunov.hpp"
#include "ellattr/stats.hpp"

namespace ellattr::cli {

using nlohmann::json;

namespace {

constexpr const char* version_string = "0.1.0";

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double require_number(const json& j, const std::string& ptr) {
    if (!j.is_number()) throw schema_error(ptr, "expected a number");
    return j.get<double>();
}

cplx read_complex_pair(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.size() != 2)
        throw schema_error(ptr, "expected [re, im]");
    return {require_number(j[0], ptr + "/0"), require_number(j[1], ptr + "/1")};
}

// -- univariate helpers for sampling points on a polynomial curve ----------

using upoly = std::vector<cplx>;  // coefficients, ascending

upoly umul(const upoly& a, const upoly& b) {
    upoly out(a.size() + b.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

upoly upow(const upoly& a, int k) {
    upoly out{cplx(1.0)};
    for (int i = 0; i < k; ++i) out = umul(out, a);
    return out;
}

cplx ueval(const upoly& p, cplx s) {
    cplx acc(0.0);
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * s + p[i];
    return acc;
}

// restriction of P to the line t -> p + t q, as a univariate polynomial
upoly restrict_to_line(const hom_poly& P, const std::array<cplx, 3>& p,
                       const std::array<cplx, 3>& q) {
    upoly acc(std::size_t(P.degree()) + 1, cplx(0.0));
    for (const auto& term : P.terms()) {
        upoly m{term.coeff};
        for (int v = 0; v < 3; ++v) {
            const int e = term.exps[std::size_t(v)];
            if (e) m = umul(m, upow(upoly{p[std::size_t(v)], q[std::size_t(v)]}, e));
        }
        for (std::size_t i = 0; i < m.size(); ++i) acc[i] += m[i];
    }
    return acc;
}

// Durand-Kerner root finder for the line restrictions (degree <= 32)
std::vector<cplx> uroots(upoly p) {
    while (!p.empty() && std::abs(p.back()) < 1e-14) p.pop_back();
    if (p.size() < 2) return {};
    const int deg = int(p.size()) - 1;
    for (auto& c : p) c /= p.back();
    const std::size_t nroots = std::size_t(deg);
    std::vector<cplx> r(nroots);
    cplx seed(0.4, 0.9), acc(1.0);
    for (auto& x : r) {
        acc *= seed;
        x = acc;
    }
    for (int it = 0; it < 200; ++it) {
        double moved = 0.0;
        for (int k = 0; k < deg; ++k) {
            cplx denom(1.0);
            for (int j = 0; j < deg; ++j)
                if (j != k) denom *= r[std::size_t(k)] - r[std::size_t(j)];
            if (std::abs(denom) < 1e-280) continue;
            const cplx delta = ueval(p, r[std::size_t(k)]) / denom;
            r[std::size_t(k)] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-13) break;
    }
    return r;
}

// points on {P = 0} by intersecting with random projective lines
std::vector<proj_point> sample_curve_points(const hom_poly& P, std::size_t n, rng_stream& rng) {
    std::vector<proj_point> out;
    const double scale = P.coeff_scale();
    for (int guard = 0; out.size() < n && guard < 4000; ++guard) {
        const proj_point a = sample_fs_uniform(rng);
        const proj_point b = sample_fs_uniform(rng);
        const upoly u = restrict_to_line(P, a.coords(), b.coords());
        for (const cplx root : uroots(u)) {
            std::array<cplx, 3> z;
            for (int i = 0; i < 3; ++i) z[std::size_t(i)] = a[i] + root * b[i];
            proj_point pt;
            try {
                pt = proj_point::normalize(z);
            } catch (const zero_vector_error&) {
                continue;
            }
            if (std::abs(P.eval(pt.coords())) / scale < 1e-10) {
                out.push_back(pt);
                if (out.size() == n) break;
            }
        }
    }
    if (out.empty()) throw error("failed to sample any points on the curve");
    return out;
}

std::vector<proj_point> curve_points(const system_spec& spec, std::size_t n, rng_stream& rng) {
    if (spec.embedding) {
        std::vector<proj_point> pts;
        for (const auto& [t, p] : spec.embedding->sample_mu_c(rng, n)) pts.push_back(p);
        return pts;
    }
    return sample_curve_points(spec.curve_poly, n, rng);
}

// ---------------------------------------------------------------------------

struct run_options {
    std::string spec_path;
    std::uint64_t samples = 0;  // 0 = subcommand default
    int horizon = -1;
    double eps = -1.0;
    int consecutive = -1;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    bool skip_check = false;
    std::string out_path;
    std::string slice_text;
};

json check_report(const system_spec& spec, rng_stream& rng, bool& pass) {
    json j;
    std::vector<proj_point> pts = curve_points(spec, 200, rng);
    bool inv_ok = false;
    try {
        const invariance_report rep = verify_curve_invariance(spec.map, spec.curve_poly, pts);
        j["invariance"] = {{"max_residual", rep.max_residual},
                           {"mean_residual", rep.mean_residual},
                           {"n_points", rep.n_points},
                           {"pass", rep.max_residual <= 1e-8}};
        inv_ok = rep.max_residual <= 1e-8;
    } catch (const near_indeterminacy_error& e) {
        j["invariance"] = {{"pass", false}, {"error", e.what()}};
    }
    const double clearance = check_curve_avoids_indeterminacy(spec.map, pts);
    const bool avoid_ok = clearance > indeterminacy_clearance;
    j["indeterminacy_avoidance"] = {{"min_image_norm", clearance},
                                    {"threshold", indeterminacy_clearance},
                                    {"pass", avoid_ok}};
    pass = inv_ok && avoid_ok;
    j["pass"] = pass;
    return j;
}

json fit_to_json(const torus_map_fit& fit) {
    return {{"a", {fit.a.real(), fit.a.imag()}},
            {"b", {fit.b.real(), fit.b.imag()}},
            {"abs_a_sq", fit.abs_a_sq},
            {"map_degree", fit.map_degree},
            {"rms_residual", fit.rms_residual}};
}

json exponents_to_json(const exponent_report& r) {
    return {{"degree", r.degree},
            {"chi1", r.chi1},
            {"chi2", r.chi2},
            {"chi2_se", r.chi2_se},
            {"integral_log_jac", {{"mean", r.integral_mean}, {"se", r.integral_se},
                                  {"samples", r.samples}}},
            {"log_degree", r.log_degree},
            {"criterion", "<mu_C, log Jac f> + 3*SE < log(degree)"},
            {"criterion_met", r.criterion_met},
            {"critical_hits", r.critical_hits}};
}

json basin_to_json(const basin_estimate& e) {
    return {{"fraction", e.fraction},
            {"ci99", {e.ci99.lo, e.ci99.hi}},
            {"n", e.n},
            {"horizon", e.horizon},
            {"eps", e.eps},
            {"consecutive", e.consecutive},
            {"captured", e.captured},
            {"undecided", e.undecided},
            {"near_indeterminacy", e.near_indeterminacy},
            {"note", "undecided orbits are not counted; the fraction is a lower bound"}};
}

slice_spec parse_slice(const std::string& text) {
    slice_spec s;
    if (text.empty()) return s;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw schema_error("/slice", e.what());
    }
    if (const json* c = find(j, "chart")) {
        if (!c->is_number_integer() || c->get<int>() < 0 || c->get<int>() > 2)
            throw schema_error("/slice/chart", "chart must be 0, 1 or 2");
        s.chart = c->get<int>();
    }
    if (const json* f = find(j, "fix")) s.fixed = read_complex_pair(*f, "/slice/fix");
    if (const json* w = find(j, "window")) {
        if (!w->is_array() || w->size() != 4)
            throw schema_error("/slice/window", "expected [re_min, re_max, im_min, im_max]");
        s.re_min = require_number((*w)[0], "/slice/window/0");
        s.re_max = require_number((*w)[1], "/slice/window/1");
        s.im_min = require_number((*w)[2], "/slice/window/2");
        s.im_max = require_number((*w)[3], "/slice/window/3");
        if (!(s.re_min < s.re_max) || !(s.im_min < s.im_max))
            throw schema_error("/slice/window", "window must be nonempty");
    }
    if (const json* r = find(j, "resolution")) {
        if (!r->is_number_integer() || r->get<int>() < 1 || r->get<int>() > 4096)
            throw schema_error("/slice/resolution", "resolution must be in [1, 4096]");
        s.resolution = r->get<int>();
    }
    return s;
}

}  // namespace

system_spec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read spec file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw schema_error("", std::string("invalid JSON: ") + e.what());
    }

    const json* jdeg = find(j, "degree");
    if (!jdeg || !jdeg->is_number_integer())
        throw schema_error("/degree", "expected an integer map degree");
    const int degree = jdeg->get<int>();
    if (degree < 2) throw schema_error("/degree", "map degree must be at least 2");

    const json* jmap = find(j, "map");
    if (!jmap || !jmap->is_array() || jmap->size() != 3)
        throw schema_error("/map", "expected an array of three polynomial strings");
    std::array<std::string, 3> texts;
    std::array<std::optional<hom_poly>, 3> comps;
    for (int i = 0; i < 3; ++i) {
        const json& ji = (*jmap)[std::size_t(i)];
        if (!ji.is_string()) throw schema_error("/map/" + std::to_string(i), "expected a string");
        texts[std::size_t(i)] = ji.get<std::string>();
        comps[std::size_t(i)] = hom_poly::parse(texts[std::size_t(i)]);
        if (comps[std::size_t(i)]->degree() != degree)
            throw schema_error("/map/" + std::to_string(i),
                               "component degree " + std::to_string(comps[std::size_t(i)]->degree()) +
                                   " does not match the declared degree " + std::to_string(degree));
    }

    const json* jcurve = find(j, "curve");
    if (!jcurve || !jcurve->is_object()) throw schema_error("/curve", "expected an object");
    const json* jkind = find(*jcurve, "kind");
    if (!jkind || !jkind->is_string())
        throw schema_error("/curve/kind", "expected \"weierstrass_lattice\" or \"polynomial\"");
    const std::string kind = jkind->get<std::string>();

    std::optional<curve_embedding> embedding;
    hom_poly curve_poly;
    system_spec::curve_kind ck;
    if (kind == "weierstrass_lattice") {
        ck = system_spec::curve_kind::weierstrass_lattice;
        const json* w1 = find(*jcurve, "omega1");
        const json* w2 = find(*jcurve, "omega2");
        if (!w1 || !w2) throw schema_error("/curve", "lattice curves need omega1 and omega2");
        const cplx o1 = read_complex_pair(*w1, "/curve/omega1");
        const cplx o2 = read_complex_pair(*w2, "/curve/omega2");
        if (std::abs(o1) < 1e-300) throw schema_error("/curve/omega1", "zero period");
        if (!((o2 / o1).imag() > 0))
            throw schema_error("/curve/omega2", "Im(omega2/omega1) must be positive");
        try {
            embedding.emplace(lattice(o1, o2));
        } catch (const degenerate_lattice_error& e) {
            throw schema_error("/curve", e.what());
        }
        curve_poly = embedding->defining_poly();
    } else if (kind == "polynomial") {
        ck = system_spec::curve_kind::polynomial;
        const json* jt = find(*jcurve, "text");
        if (!jt || !jt->is_string()) throw schema_error("/curve/text", "expected a string");
        curve_poly = hom_poly::parse(jt->get<std::string>());
        if (curve_poly.degree() < 1)
            throw schema_error("/curve/text", "curve polynomial must have degree >= 1");
    } else {
        throw schema_error("/curve/kind", "unknown curve kind: " + kind);
    }

    system_spec spec{degree,
                     texts,
                     rational_map({std::move(*comps[0]), std::move(*comps[1]),
                                   std::move(*comps[2])}),
                     ck,
                     std::move(embedding),
                     std::move(curve_poly)};

    if (const json* jd = find(j, "defaults")) {
        if (!jd->is_object()) throw schema_error("/defaults", "expected an object");
        if (const json* v = find(*jd, "seed")) {
            if (!v->is_number_unsigned()) throw schema_error("/defaults/seed", "expected a nonnegative integer");
            spec.seed = v->get<std::uint64_t>();
        }
        if (const json* v = find(*jd, "samples")) {
            if (!v->is_number_unsigned()) throw schema_error("/defaults/samples", "expected a nonnegative integer");
            spec.samples = v->get<std::uint64_t>();
        }
        if (const json* v = find(*jd, "horizon")) {
            if (!v->is_number_integer()) throw schema_error("/defaults/horizon", "expected an integer");
            spec.horizon = v->get<int>();
        }
        if (const json* v = find(*jd, "eps")) {
            spec.eps = require_number(*v, "/defaults/eps");
        }
        if (const json* v = find(*jd, "consecutive")) {
            if (!v->is_number_integer()) throw schema_error("/defaults/consecutive", "expected an integer");
            spec.consecutive = v->get<int>();
        }
    }
    return spec;
}

namespace {

json make_parameters(const run_options& opt) {
    json p;
    p["spec_file"] = opt.spec_path;
    p["seed"] = opt.seed;
    p["threads"] = opt.threads;
    p["skip_check"] = opt.skip_check;
    return p;
}

int run_command(const std::string& command, run_options opt, std::ostream& out,
                std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    system_spec spec = load_spec(opt.spec_path);

    if (!opt.seed_given) {
        if (spec.seed) {
            opt.seed = *spec.seed;
        } else {
            std::random_device rd;
            opt.seed = (std::uint64_t(rd()) << 32) ^ rd();
        }
    }
    if (opt.samples == 0 && spec.samples) opt.samples = *spec.samples;
    if (opt.horizon < 0 && spec.horizon) opt.horizon = *spec.horizon;
    if (opt.eps < 0 && spec.eps) opt.eps = *spec.eps;
    if (opt.consecutive < 0 && spec.consecutive) opt.consecutive = *spec.consecutive;
    // subcommand defaults
    if (opt.samples == 0) opt.samples = (command == "fit-torus") ? 32 : 100000;
    if (opt.horizon < 0) opt.horizon = (command == "fit-torus") ? 40 : ((command == "check") ? 0 : 200);
    if (opt.eps < 0) opt.eps = 1e-4;
    if (opt.consecutive < 0) opt.consecutive = 5;

    const bool needs_lattice = (command == "fit-torus" || command == "exponents");
    if (needs_lattice && !spec.embedding) {
        err << command << " requires a weierstrass_lattice curve\n";
        return 1;
    }

    rng_stream rng(opt.seed);
    json report;
    report["command"] = command;
    report["version"] = version_string;
    report["kernel_backend"] = kernels::active().name;
    report["parameters"] = make_parameters(opt);
    report["parameters"]["samples"] = opt.samples;
    report["parameters"]["horizon"] = opt.horizon;
    report["parameters"]["eps"] = opt.eps;
    report["parameters"]["consecutive"] = opt.consecutive;
    report["degree"] = spec.degree;

    int exit_code = 0;
    bool check_pass = true;
    try {
        if (command == "check" || !opt.skip_check) {
            rng_stream check_rng = rng.substream(0xC);
            report["check"] = check_report(spec, check_rng, check_pass);
            if (!check_pass) exit_code = 2;
        }

        if (check_pass && command != "check") {
            if (command == "fit-torus") {
                const torus_map_fit fit =
                    fit_torus_map(spec.map, *spec.embedding, int(opt.samples));
                json res = fit_to_json(fit);
                rng_stream probe_rng = rng.substream(0x5e);
                const separation_report sep =
                    separation_probe(fit, *spec.embedding, 200, opt.horizon, probe_rng);
                res["separation"] = {{"beta_hat", sep.beta_hat},
                                     {"pairs", 200},
                                     {"horizon", opt.horizon},
                                     {"worst_t", {sep.worst_t.real(), sep.worst_t.imag()}},
                                     {"worst_offset",
                                      {sep.worst_offset.real(), sep.worst_offset.imag()}}};
                report["results"] = res;
            } else if (command == "exponents") {
                rng_stream mc_rng = rng.substream(0xE);
                const exponent_report rep =
                    transverse_exponent(spec.map, *spec.embedding, opt.samples, mc_rng,
                                        opt.threads);
                report["results"] = exponents_to_json(rep);
            } else if (command == "basin") {
                basin_target target(spec.curve_poly);
                rng_stream mc_rng = rng.substream(0xB);
                const basin_estimate est =
                    basin_measure(spec.map, target, opt.samples, opt.horizon, opt.eps,
                                  opt.consecutive, mc_rng, opt.threads);
                report["results"] = basin_to_json(est);
            } else if (command == "render") {
                const slice_spec slice = parse_slice(opt.slice_text);
                if (opt.out_path.empty()) opt.out_path = "basin.ppm";
                basin_target target(spec.curve_poly);
                const render_counts rc =
                    render_basin_slice(spec.map, target, slice, opt.horizon, opt.eps,
                                       opt.consecutive, opt.out_path, opt.threads);
                report["results"] = {{"out", opt.out_path},
                                     {"resolution", slice.resolution},
                                     {"chart", slice.chart},
                                     {"fix", {slice.fixed.real(), slice.fixed.imag()}},
                                     {"window", {slice.re_min, slice.re_max, slice.im_min,
                                                 slice.im_max}},
                                     {"captured", rc.captured},
                                     {"undecided", rc.undecided},
                                     {"near_indeterminacy", rc.near_indeterminacy}};
            }
        }
    } catch (const not_invariant_error& e) {
        report["error"] = e.what();
        exit_code = 2;
    } catch (const too_many_critical_hits_error& e) {
        report["error"] = e.what();
        exit_code = 2;
    }

    report["status"] = exit_code == 0 ? "ok" : "verification_failed";
    const auto t1 = std::chrono::steady_clock::now();
    report["wall_time_s"] = std::chrono::duration<double>(t1 - t0).count();
    out << report.dump(2) << "\n";
    return exit_code;
}

}  // namespace

int execute(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lyapunov exponents, attractor criterion and basin measurement for rational "
                 "self-maps of the projective plane with an invariant elliptic curve"};
    app.require_subcommand(1);

    run_options opt;
    std::string command;
    for (const char* name : {"check", "fit-torus", "exponents", "basin", "render"}) {
        CLI::App* sub = app.add_subcommand(
            name, std::string(name) + " the system described by a spec file");
        sub->add_option("spec", opt.spec_path, "JSON system-definition file")->required();
        sub->add_option("--samples", opt.samples, "sample count (fit-torus: anchor count)");
        sub->add_option("--horizon", opt.horizon, "orbit horizon");
        sub->add_option("--eps", opt.eps, "capture threshold");
        sub->add_option("--consecutive", opt.consecutive, "consecutive sub-eps hits for capture");
        sub->add_option("--seed", opt.seed, "random seed")->each([&](const std::string&) {
            opt.seed_given = true;
        });
        sub->add_option("--threads", opt.threads, "worker cap (0 = hardware)");
        sub->add_flag("--skip-check", opt.skip_check, "skip the invariance gate");
        sub->add_option("--out", opt.out_path, "output path (render)");
        sub->add_option("--slice", opt.slice_text, "slice JSON (render)");
        sub->callback([&command, name] { command = name; });
    }

    try {
        std::vector<std::string> args(argv.rbegin(), argv.rend());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 1;
    }

    try {
        return run_command(command, opt, out, err);
    } catch (const syntax_error& e) {
        err << "line 1, column " << (e.position + 1) << ": " << e.what() << "\n";
        return 1;
    } catch (const schema_error& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const error& e) {
        err << e.what() << "\n";
        return 1;
    }
}

}  // namespace ellattr::cli
