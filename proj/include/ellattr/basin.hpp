#ifndef ELLATTR_BASIN_HPP
#define ELLATTR_BASIN_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ellattr/kernels/kernels.hpp"
#include "ellattr/polynomials.hpp"
#include "ellattr/projective.hpp"
#include "ellattr/ratmap.hpp"
#include "ellattr/rng.hpp"
#include "ellattr/stats.hpp"

namespace ellattr {

/// Attraction target: an algebraic curve {P = 0} with first-order distance
/// proxy |P| / ||grad P||, or a finite point set with exact chordal distance.
class basin_target {
public:
    explicit basin_target(const hom_poly& curve);
    explicit basin_target(std::vector<proj_point> points);

    bool is_curve() const { return curve_.has_value(); }
    const hom_poly& curve() const { return *curve_; }
    const std::vector<proj_point>& points() const { return points_; }

    /// Proximity of one point (same arithmetic as the batch kernels).
    double proximity(const proj_point& p) const;

private:
    std::optional<hom_poly> curve_;
    std::vector<proj_point> points_;

    friend class orbit_classifier;
    std::vector<kernels::packed_poly> packed_;  // P, Px, Py, Pz for curves
    std::vector<double> target_coords_;         // 6 doubles per point target
    double scale_ = 1.0;
};

enum class orbit_tag : std::uint8_t {
    attracted = 0,
    undecided = 1,
    near_indeterminacy_hit = 2,
};

struct orbit_class {
    orbit_tag tag = orbit_tag::undecided;
    int steps_to_capture = -1;  // first index of the capturing run, -1 if none
};

/// Batch orbit classifier; capture means proximity < eps at K consecutive
/// iterates within the horizon (with a 10 eps cushion for runs that start on
/// the target at step 0). All arithmetic goes through the runtime-selected
/// batch kernels; a width-1 batch reproduces scalar classification exactly.
class orbit_classifier {
public:
    orbit_classifier(const rational_map& f, const basin_target& target, int horizon, double eps,
                     int consecutive);

    /// Classify a batch in place (pts is consumed as scratch).
    std::vector<orbit_class> classify(kernels::point_batch& pts) const;

    orbit_class classify_one(const proj_point& p) const;

    int horizon() const { return horizon_; }
    double eps() const { return eps_; }
    int consecutive() const { return consecutive_; }

private:
    std::vector<kernels::packed_poly> map_;
    const basin_target* target_;
    int horizon_;
    double eps_;
    int consecutive_;

    void proximity_batch(const kernels::point_batch& pts, double* out) const;
};

/// Spec-level single-orbit classification (N >= 10, K >= 3).
orbit_class classify_orbit(const rational_map& f, const proj_point& p, const basin_target& target,
                           int horizon, double eps, int consecutive);

double curve_proximity(const proj_point& p, const basin_target& target);

struct basin_estimate {
    double fraction = 0.0;
    interval ci99;
    std::uint64_t n = 0;
    int horizon = 0;
    double eps = 0.0;
    int consecutive = 0;
    std::uint64_t captured = 0;
    std::uint64_t undecided = 0;
    std::uint64_t near_indeterminacy = 0;
};

/// Monte Carlo measure of the basin over FS-uniform samples. Undecided
/// orbits are never counted as escaped, so the estimate is a lower bound.
/// Deterministic for a fixed seed at any thread count.
basin_estimate basin_measure(const rational_map& f, const basin_target& target, std::uint64_t n,
                             int horizon, double eps, int consecutive, rng_stream& rng,
                             int threads = 1);

struct slice_spec {
    int chart = 2;
    cplx fixed;          // the v coordinate of the slice
    double re_min = -2.0, re_max = 2.0;
    double im_min = -2.0, im_max = 2.0;
    int resolution = 512;
};

struct render_counts {
    std::uint64_t captured = 0;
    std::uint64_t undecided = 0;
    std::uint64_t near_indeterminacy = 0;
};

/// Render one affine slice of the basin to a binary P6 pixel map (8-bit RGB,
/// row-major, no comments). Capture time maps to shade; bit-exact for fixed
/// inputs. Throws io_error when the file cannot be written.
render_counts render_basin_slice(const rational_map& f, const basin_target& target,
                                 const slice_spec& slice, int horizon, double eps, int consecutive,
                                 const std::string& out_path, int threads = 1);

}  // namespace ellattr

#endif
