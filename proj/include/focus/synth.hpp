/**
 * @file synth.hpp
 * @brief Synthetic training/test data with known descriptive, distracting
 *        and constant directions.
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "focus/errors.hpp"
#include "focus/random.hpp"
#include "focus/set_collection.hpp"

namespace focus::synth {

// ---------------------------------------------------------------------------
// Axis-aligned Gaussian sets
// ---------------------------------------------------------------------------

/// Set m (1-based) draws x ~ N((scale*m, 1, -1), diag(2, 1, 0)).
struct AnalyticSpec {
    std::size_t m_sets = 10;
    std::size_t n_per_set = 100;
    std::uint64_t seed = 1;
    double scale = 3.0;

    void validate() const {
        if (m_sets < 2) throw ConfigError("analytic data needs at least 2 sets");
        if (n_per_set < 2) throw ConfigError("analytic data needs at least 2 points per set");
        if (!std::isfinite(scale)) throw ConfigError("scale must be finite");
    }
};

namespace detail {

inline Eigen::MatrixXd analytic_block(Rng& rng, double e1_mean, std::size_t n) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 3);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        x(i, 0) = e1_mean + std::sqrt(2.0) * rng.normal();
        x(i, 1) = 1.0 + rng.normal();
        x(i, 2) = -1.0;
    }
    return x;
}

}  // namespace detail

inline SetCollection gen_analytic(const AnalyticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    SetCollection out;
    for (std::size_t m = 1; m <= spec.m_sets; ++m)
        out.sets.push_back(detail::analytic_block(rng, spec.scale * static_cast<double>(m), spec.n_per_set));
    return out;
}

struct LabelledMatrix {
    Eigen::MatrixXd points;
    Eigen::VectorXd labels;  ///< 1 = planted anomaly
};

/**
 * Test points from an unseen context (set index M+1). The last
 * `n_anomalies` rows are moved off the constant plane x3 = -1 by
 * `offset`, a deviation that must survive the learned mapping.
 */
inline LabelledMatrix gen_analytic_test(const AnalyticSpec& spec, std::size_t n_normal, std::size_t n_anomalies,
                                        double offset = 1.0) {
    spec.validate();
    Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    const double e1_mean = spec.scale * static_cast<double>(spec.m_sets + 1);
    LabelledMatrix out;
    out.points = detail::analytic_block(rng, e1_mean, n_normal + n_anomalies);
    out.labels = Eigen::VectorXd::Zero(out.points.rows());
    for (auto i = static_cast<Eigen::Index>(n_normal); i < out.points.rows(); ++i) {
        out.points(i, 2) += offset;
        out.labels[i] = 1.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Silhouette images with illumination gradients
// ---------------------------------------------------------------------------

enum class ShapeFamily { Rectangle, Disc, Cross, Triangle, Ring, BrokenRing };

/// Which families the training classes are drawn from.
enum class ShapeGenerator { Mixed, Rectangles, Discs, Crosses };

/// Shape in a [-1, 1]^2 frame; params are family-specific extents.
struct ShapeClass {
    ShapeFamily family = ShapeFamily::Rectangle;
    double a = 0.5;
    double b = 0.3;
    double cx = 0.0;
    double cy = 0.0;
    double gap_angle = 0.0;      ///< BrokenRing: direction of the gap
    double gap_half_width = 0.3; ///< BrokenRing: half-angle of the gap, radians
};

struct IlluminationSpec {
    std::size_t side = 28;
    double amp_sigma = 0.5;
    double fraction_lit = 0.5;
    std::uint64_t seed = 1;
    std::size_t m_sets = 40;
    std::size_t n_per_set = 20;
    std::size_t n_test_normal = 190;
    std::size_t n_test_anomalies = 10;
    double background = 0.35;
    double foreground = 0.65;
    /// Lit training images come in pairs (a, theta), (-a, theta), so each
    /// set's mean carries no gradient. Marginally every amplitude is still
    /// N(0, amp_sigma^2).
    bool antithetic = true;

    void validate() const {
        if (side < 2) throw ConfigError("image side must be at least 2");
        if (!(fraction_lit >= 0.0 && fraction_lit <= 1.0)) throw ConfigError("fraction_lit must lie in [0, 1]");
        if (!(amp_sigma >= 0.0) || !std::isfinite(amp_sigma)) throw ConfigError("amp_sigma must be finite and >= 0");
        if (m_sets < 1 || n_per_set < 1) throw ConfigError("need at least one set with one image");
        if (!(background >= 0.0 && background <= 1.0 && foreground >= 0.0 && foreground <= 1.0))
            throw ConfigError("pixel levels must lie in [0, 1]");
    }
};

/// Placement of a class in one image: rotation about the frame centre, then optional mirror in x.
struct Pose {
    double angle = 0.0;
    bool flip = false;
};

inline bool inside(const ShapeClass& s, double x, double y) {
    x -= s.cx;
    y -= s.cy;
    switch (s.family) {
        case ShapeFamily::Rectangle: return std::abs(x) <= s.a && std::abs(y) <= s.b;
        case ShapeFamily::Disc: return x * x / (s.a * s.a) + y * y / (s.b * s.b) <= 1.0;
        case ShapeFamily::Cross:
            return (std::abs(x) <= s.a && std::abs(y) <= s.b) || (std::abs(x) <= s.b && std::abs(y) <= s.a);
        case ShapeFamily::Triangle:
            // apex up, base at y = -b, half-width a at the base
            return y >= -s.b && y <= s.b && std::abs(x) <= s.a * (s.b - y) / (2.0 * s.b);
        case ShapeFamily::Ring:
        case ShapeFamily::BrokenRing: {
            const double r2 = x * x + y * y;
            if (r2 > s.a * s.a || r2 < s.b * s.b) return false;
            if (s.family == ShapeFamily::Ring) return true;
            const double off = std::remainder(std::atan2(y, x) - s.gap_angle, 2.0 * std::numbers::pi);
            return std::abs(off) > s.gap_half_width;
        }
    }
    return false;
}

/// Row-major side*side image; pixel (r, c) samples the frame at its centre.
inline Eigen::VectorXd render(const ShapeClass& shape, const Pose& pose, std::size_t side, double background,
                              double foreground) {
    const auto n = static_cast<Eigen::Index>(side);
    Eigen::VectorXd img(n * n);
    const double cs = std::cos(pose.angle), sn = std::sin(pose.angle);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            double x = (2.0 * (static_cast<double>(c) + 0.5) / static_cast<double>(side)) - 1.0;
            double y = 1.0 - (2.0 * (static_cast<double>(r) + 0.5) / static_cast<double>(side));
            if (pose.flip) x = -x;
            // inverse rotation maps the image point back into the shape frame
            const double xs = cs * x + sn * y;
            const double ys = -sn * x + cs * y;
            img[r * n + c] = inside(shape, xs, ys) ? foreground : background;
        }
    return img;
}

/**
 * Renders with the silhouette translated so its foreground centre of mass
 * sits at the image centre (as MNIST digits are). Discrete masks only get
 * close, so the translation is refined a few times.
 */
inline Eigen::VectorXd render_centred(ShapeClass shape, const Pose& pose, std::size_t side, double background,
                                      double foreground) {
    const auto n = static_cast<Eigen::Index>(side);
    const double centre = 0.5 * static_cast<double>(side - 1);
    const double to_frame = 2.0 / static_cast<double>(side);
    const double cs = std::cos(pose.angle), sn = std::sin(pose.angle);
    Eigen::VectorXd img;
    for (int iter = 0; iter < 4; ++iter) {
        img = render(shape, pose, side, background, foreground);
        double mass = 0.0, mr = 0.0, mc = 0.0;
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) {
                const double w = img[r * n + c] - background;
                mass += w;
                mr += w * static_cast<double>(r);
                mc += w * static_cast<double>(c);
            }
        if (!(std::abs(mass) > 0.0)) break;
        // image-plane offset of the centroid, mapped back into the shape frame
        double dx = (mc / mass - centre) * to_frame;
        double dy = -(mr / mass - centre) * to_frame;
        if (pose.flip) dx = -dx;
        shape.cx -= cs * dx + sn * dy;
        shape.cy -= -sn * dx + cs * dy;
    }
    return img;
}

/**
 * Zero-mean planar ramp a * (cos(theta) c + sin(theta) r) / (side - 1).
 * At theta = 0 the ramp rises by exactly `amplitude` across the columns.
 */
inline Eigen::VectorXd illumination_gradient(std::size_t side, double amplitude, double angle) {
    const auto n = static_cast<Eigen::Index>(side);
    Eigen::VectorXd g(n * n);
    const double denom = static_cast<double>(side - 1);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            g[r * n + c] = amplitude * (std::cos(angle) * static_cast<double>(c) + std::sin(angle) * static_cast<double>(r)) / denom;
    g.array() -= g.mean();
    return g;
}

/// Adds the gradient and clips to [0, 1].
inline Eigen::VectorXd illuminate(const Eigen::VectorXd& image, std::size_t side, double amplitude, double angle) {
    return (image + illumination_gradient(side, amplitude, angle)).cwiseMax(0.0).cwiseMin(1.0);
}

/// Orthonormal basis (side^2 x 3) of {constant, column ramp, row ramp}: every unclipped gradient lies in it.
inline Eigen::MatrixXd illumination_plane_basis(std::size_t side) {
    const auto n = static_cast<Eigen::Index>(side);
    Eigen::MatrixXd basis(n * n, 3);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            basis(r * n + c, 0) = 1.0;
            basis(r * n + c, 1) = static_cast<double>(c);
            basis(r * n + c, 2) = static_cast<double>(r);
        }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n * n, 3);
}

/// Norm of the projection of unit(v) onto span(basis) (basis orthonormal).
inline double alignment(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis) {
    return (basis.transpose() * v).norm() / v.norm();
}

struct ImageDataset {
    SetCollection train;
    Eigen::MatrixXd test;    ///< rows are flattened images
    Eigen::VectorXd labels;  ///< 1 = held-out anomaly class
    std::vector<ShapeClass> classes;  ///< one entry per training set
};

namespace detail {

inline ShapeFamily family_for(ShapeGenerator gen, std::size_t i) {
    switch (gen) {
        case ShapeGenerator::Rectangles: return ShapeFamily::Rectangle;
        case ShapeGenerator::Discs: return ShapeFamily::Disc;
        case ShapeGenerator::Crosses: return ShapeFamily::Cross;
        case ShapeGenerator::Mixed: break;
    }
    constexpr ShapeFamily cycle[] = {ShapeFamily::Rectangle, ShapeFamily::Disc, ShapeFamily::Cross};
    return cycle[i % 3];
}

inline ShapeClass random_class(Rng& rng, ShapeFamily family) {
    ShapeClass s;
    s.family = family;
    switch (family) {
        case ShapeFamily::Rectangle:
            s.a = rng.uniform(0.25, 0.7);
            s.b = rng.uniform(0.15, 0.5);
            break;
        case ShapeFamily::Disc:
            s.a = rng.uniform(0.3, 0.7);
            s.b = rng.uniform(0.2, 0.6);
            break;
        case ShapeFamily::Cross:
            s.a = rng.uniform(0.5, 0.8);
            s.b = rng.uniform(0.12, 0.25);
            break;
        case ShapeFamily::Triangle:
            s.a = rng.uniform(0.6, 0.9);
            s.b = rng.uniform(0.4, 0.7);
            break;
        case ShapeFamily::Ring:
        case ShapeFamily::BrokenRing:
            s.a = rng.uniform(0.55, 0.8);
            s.b = s.a - rng.uniform(0.2, 0.3);
            break;
    }
    s.cx = rng.uniform(-0.25, 0.25);
    s.cy = rng.uniform(-0.25, 0.25);
    return s;
}

struct Lighting {
    bool lit = false;
    double amplitude = 0.0;
    double angle = 0.0;
};

inline Lighting draw_lighting(Rng& rng, const IlluminationSpec& spec) {
    Lighting l;
    l.lit = rng.uniform() < spec.fraction_lit;
    l.amplitude = rng.normal(0.0, spec.amp_sigma);
    l.angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return l;
}

inline Eigen::VectorXd lit_image(const Eigen::VectorXd& base, const Lighting& l, std::size_t side) {
    return l.lit ? illuminate(base, side, l.amplitude, l.angle) : base;
}

/// Lighting for one training set; lit draws are mirrored in amplitude when antithetic.
inline std::vector<Lighting> set_lighting(Rng& rng, const IlluminationSpec& spec) {
    std::vector<Lighting> out;
    out.reserve(spec.n_per_set);
    while (out.size() < spec.n_per_set) {
        auto l = draw_lighting(rng, spec);
        if (spec.antithetic && out.size() + 1 == spec.n_per_set) l.lit = false;  // no room for a partner
        out.push_back(l);
        if (spec.antithetic && l.lit && out.size() < spec.n_per_set) {
            l.amplitude = -l.amplitude;
            out.push_back(l);
        }
    }
    return out;
}

}  // namespace detail

/**
 * Training sets: base classes drawn from `generator`, each expanded into
 * its eight 90-degree rotations and mirror images, one set per variant,
 * until m_sets sets exist. Every image in a set shares the silhouette; a
 * `fraction_lit` share also carries a random gradient.
 *
 * Test split: a held-out ring class in its four rotations (normal) mixed
 * with the same ring broken by a gap at a random position (anomalies), lit
 * independently per image, rows shuffled.
 */
inline ImageDataset gen_images(const IlluminationSpec& spec, ShapeGenerator generator = ShapeGenerator::Mixed) {
    spec.validate();
    Rng rng(spec.seed);
    ImageDataset out;
    const double half_pi = std::numbers::pi / 2.0;

    ShapeClass base;
    for (std::size_t m = 0; m < spec.m_sets; ++m) {
        if (m % 8 == 0) base = detail::random_class(rng, detail::family_for(generator, m / 8));
        const Pose pose{half_pi * static_cast<double>(m % 4), (m % 8) >= 4};
        const Eigen::VectorXd img = render_centred(base, pose, spec.side, spec.background, spec.foreground);
        const auto lighting = detail::set_lighting(rng, spec);
        Eigen::MatrixXd set(static_cast<Eigen::Index>(spec.n_per_set), img.size());
        for (Eigen::Index i = 0; i < set.rows(); ++i)
            set.row(i) = detail::lit_image(img, lighting[static_cast<std::size_t>(i)], spec.side).transpose();
        out.train.sets.push_back(std::move(set));
        out.classes.push_back(base);
    }

    ShapeClass normal_class = detail::random_class(rng, ShapeFamily::BrokenRing);
    normal_class.gap_angle = 0.0;
    const std::size_t total = spec.n_test_normal + spec.n_test_anomalies;
    const auto pixels = static_cast<Eigen::Index>(spec.side * spec.side);
    Eigen::MatrixXd test(static_cast<Eigen::Index>(total), pixels);
    Eigen::VectorXd labels(static_cast<Eigen::Index>(total));
    for (std::size_t i = 0; i < total; ++i) {
        const bool anomaly = i >= spec.n_test_normal;
        const Pose pose{half_pi * static_cast<double>(rng.below(4)), false};
        ShapeClass shape = normal_class;
        // anomalies have the gap half-way between the normal gap positions
        const double jitter = rng.uniform(-0.25, 0.25);
        if (anomaly) shape.gap_angle = 0.5 * half_pi + jitter;
        const Eigen::VectorXd img = render_centred(shape, pose, spec.side, spec.background, spec.foreground);
        test.row(static_cast<Eigen::Index>(i)) = detail::lit_image(img, detail::draw_lighting(rng, spec), spec.side).transpose();
        labels[static_cast<Eigen::Index>(i)] = anomaly ? 1.0 : 0.0;
    }
    // Fisher-Yates so anomalies are not clustered at the end.
    for (std::size_t i = total; i > 1; --i) {
        const auto j = static_cast<Eigen::Index>(rng.below(i));
        const auto last = static_cast<Eigen::Index>(i - 1);
        test.row(last).swap(test.row(j));
        std::swap(labels[last], labels[j]);
    }
    out.test = std::move(test);
    out.labels = std::move(labels);
    return out;
}

}  // namespace focus::synth
