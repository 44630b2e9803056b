#include "ellattr/basin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ellattr/errors.hpp"
#include "ellattr/parallel.hpp"

namespace ellattr {

basin_target::basin_target(const hom_poly& curve) : curve_(curve) {
    scale_ = curve.coeff_scale();
    packed_.push_back(kernels::packed_poly::pack(curve));
    for (int v = 0; v < 3; ++v) {
        const hom_poly d = curve.partial(v);
        packed_.push_back(d.is_zero() ? kernels::packed_poly{} : kernels::packed_poly::pack(d));
    }
}

basin_target::basin_target(std::vector<proj_point> points) : points_(std::move(points)) {
    if (points_.empty()) throw empty_sample_error();
    for (const auto& p : points_)
        for (int i = 0; i < 3; ++i) {
            target_coords_.push_back(p[i].real());
            target_coords_.push_back(p[i].imag());
        }
}

double basin_target::proximity(const proj_point& p) const {
    kernels::point_batch b(1);
    b.set(0, p.coords());
    double out;
    if (curve_) {
        kernels::active().curve_proximity(packed_.data(), scale_, b, &out);
    } else {
        kernels::active().point_proximity(target_coords_.data(), points_.size(), b, &out);
    }
    return out;
}

double curve_proximity(const proj_point& p, const basin_target& target) {
    return target.proximity(p);
}

orbit_classifier::orbit_classifier(const rational_map& f, const basin_target& target, int horizon,
                                   double eps, int consecutive)
    : target_(&target), horizon_(horizon), eps_(eps), consecutive_(consecutive) {
    if (horizon_ < 10) throw error("classifier horizon must be at least 10");
    if (consecutive_ < 3 || consecutive_ > 200)
        throw error("classifier needs between 3 and 200 consecutive hits");
    for (int i = 0; i < 3; ++i) map_.push_back(kernels::packed_poly::pack(f.component(i)));
}

void orbit_classifier::proximity_batch(const kernels::point_batch& pts, double* out) const {
    if (target_->is_curve())
        kernels::active().curve_proximity(target_->packed_.data(), target_->scale_, pts, out);
    else
        kernels::active().point_proximity(target_->target_coords_.data(),
                                          target_->points_.size(), pts, out);
}

std::vector<orbit_class> orbit_classifier::classify(kernels::point_batch& pts) const {
    const std::size_t n = pts.size();
    std::vector<orbit_class> out(n);
    std::vector<std::uint8_t> run(n, 0);         // current sub-eps run length
    std::vector<std::uint8_t> on_target0(n, 0);  // run started at step 0
    std::vector<std::uint8_t> decided(n, 0);
    std::vector<double> prox(n);
    std::vector<std::uint8_t> flag(n, 0);

    std::size_t remaining = n;
    for (int step = 0; step <= horizon_ && remaining; ++step) {
        proximity_batch(pts, prox.data());
        for (std::size_t i = 0; i < n; ++i) {
            if (decided[i]) continue;
            // runs that began on the target keep a 10x cushion against
            // finite-precision drift of the iterated parametrization
            const double thr = (run[i] > 0 && on_target0[i]) ? 10.0 * eps_ : eps_;
            if (prox[i] < thr) {
                if (run[i] == 0 && step == 0) on_target0[i] = 1;
                if (++run[i] >= consecutive_) {
                    out[i].tag = orbit_tag::attracted;
                    out[i].steps_to_capture = step - consecutive_ + 1;
                    decided[i] = 1;
                    --remaining;
                }
            } else {
                run[i] = 0;
                on_target0[i] = 0;
            }
        }
        if (!remaining || step == horizon_) break;
        kernels::active().map_step(map_.data(), 1e-12, pts, flag.data());
        for (std::size_t i = 0; i < n; ++i) {
            if (decided[i] || !flag[i]) continue;
            out[i].tag = orbit_tag::near_indeterminacy_hit;
            decided[i] = 1;
            --remaining;
        }
    }
    return out;
}

orbit_class orbit_classifier::classify_one(const proj_point& p) const {
    kernels::point_batch b(1);
    b.set(0, p.coords());
    return classify(b)[0];
}

orbit_class classify_orbit(const rational_map& f, const proj_point& p, const basin_target& target,
                           int horizon, double eps, int consecutive) {
    return orbit_classifier(f, target, horizon, eps, consecutive).classify_one(p);
}

basin_estimate basin_measure(const rational_map& f, const basin_target& target, std::uint64_t n,
                             int horizon, double eps, int consecutive, rng_stream& rng,
                             int threads) {
    if (n < 1000) throw error("basin_measure needs at least 1000 samples");
    const orbit_classifier cls(f, target, horizon, eps, consecutive);

    constexpr std::size_t chunk = 1024;
    const std::size_t n_chunks = std::size_t((n + chunk - 1) / chunk);
    std::vector<render_counts> counts(n_chunks);

    for_chunks(std::size_t(n), chunk, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        rng_stream sub = rng.substream(c);
        kernels::point_batch batch(e - b);
        for (std::size_t i = 0; i < e - b; ++i)
            batch.set(i, sample_fs_uniform(sub).coords());
        const auto classes = cls.classify(batch);
        render_counts rc;
        for (const auto& oc : classes) {
            if (oc.tag == orbit_tag::attracted)
                ++rc.captured;
            else if (oc.tag == orbit_tag::undecided)
                ++rc.undecided;
            else
                ++rc.near_indeterminacy;
        }
        counts[c] = rc;
    });

    basin_estimate est;
    est.n = n;
    est.horizon = horizon;
    est.eps = eps;
    est.consecutive = consecutive;
    for (const auto& rc : counts) {
        est.captured += rc.captured;
        est.undecided += rc.undecided;
        est.near_indeterminacy += rc.near_indeterminacy;
    }
    est.fraction = double(est.captured) / double(n);
    est.ci99 = wilson_interval(est.captured, n, z_99);
    return est;
}

render_counts render_basin_slice(const rational_map& f, const basin_target& target,
                                 const slice_spec& slice, int horizon, double eps, int consecutive,
                                 const std::string& out_path, int threads) {
    const int res = slice.resolution;
    if (res < 1 || res > 4096) throw error("render resolution must be in [1, 4096]");
    const orbit_classifier cls(f, target, horizon, eps, consecutive);

    std::vector<orbit_class> classes(std::size_t(res) * std::size_t(res));
    // one chunk per pixel row
    for_chunks(std::size_t(res), 1, threads, [&](std::size_t row, std::size_t, std::size_t) {
        kernels::point_batch batch{std::size_t(res)};
        // row 0 is the top of the image (largest imaginary part)
        const double v_im = slice.im_max - (double(row) + 0.5) / res * (slice.im_max - slice.im_min);
        for (int col = 0; col < res; ++col) {
            const double u_re =
                slice.re_min + (double(col) + 0.5) / res * (slice.re_max - slice.re_min);
            chart_coords cc;
            cc.chart = slice.chart;
            cc.u = cplx(u_re, v_im);
            cc.v = slice.fixed;
            batch.set(std::size_t(col), from_chart(cc).coords());
        }
        const auto row_classes = cls.classify(batch);
        std::copy(row_classes.begin(), row_classes.end(),
                  classes.begin() + std::ptrdiff_t(row) * res);
    });

    render_counts rc;
    std::vector<unsigned char> img(std::size_t(res) * std::size_t(res) * 3);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        unsigned char* px = &img[3 * i];
        switch (classes[i].tag) {
            case orbit_tag::attracted: {
                ++rc.captured;
                const int s = classes[i].steps_to_capture;
                // earlier capture renders brighter; integer math keeps it exact
                const int g = 64 + int((std::int64_t(191) * (horizon - s)) / horizon);
                px[0] = 0;
                px[1] = (unsigned char)g;
                px[2] = 0;
                break;
            }
            case orbit_tag::undecided:
                ++rc.undecided;
                px[0] = 20;
                px[1] = 20;
                px[2] = 60;
                break;
            case orbit_tag::near_indeterminacy_hit:
                ++rc.near_indeterminacy;
                px[0] = 180;
                px[1] = 30;
                px[2] = 30;
                break;
        }
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw io_error("cannot open " + out_path + " for writing");
    out << "P6\n" << res << " " << res << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data()), std::streamsize(img.size()));
    if (!out) throw io_error("write failed for " + out_path);
    return rc;
}

}  // namespace ellattr
