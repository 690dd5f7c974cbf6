#pragma once

// Test objects: weighted indicators of balls/disks and compactly supported C^2 bumps, with
// exact circular (2D) and spherical (3D) means.

#include "polymean/core.hpp"

#include <limits>
#include <vector>

namespace polymean {

enum class Profile { indicator, smooth_bump };

template <std::size_t D>
struct Component {
    Vec<D> center{};
    double radius = 1.0;
    double amplitude = 1.0;
    Profile profile = Profile::smooth_bump;
};

template <std::size_t D>
struct Phantom {
    std::vector<Component<D>> components;
};

namespace detail {

// Radial profile of one component at distance rho from its center.
inline double radial_value(Profile p, double R, double rho) {
    if (rho >= R) return 0.0;
    if (p == Profile::indicator) return 1.0;
    const double u = 1.0 - rho * rho / (R * R);
    return u * u * u;
}

// Mean over the circle of radius r whose center is at distance d from the component center.
inline double circle_mean(Profile p, double R, double d, double r) {
    if (r == 0.0 || d == 0.0) return radial_value(p, R, d + r);
    if (r + d <= R) {
        if (p == Profile::indicator) return 1.0;
    }
    if (r >= R + d || r <= d - R) return 0.0;
    const double kappa = (R * R - d * d - r * r) / (2.0 * d * r);
    if (p == Profile::indicator) {
        if (kappa >= 1.0) return 1.0;
        return std::acos(std::clamp(-kappa, -1.0, 1.0)) / kPi;
    }
    const double theta0 = kappa >= 1.0 ? 0.0 : std::acos(std::clamp(kappa, -1.0, 1.0));
    const double A = 1.0 - (d * d + r * r) / (R * R);
    const double B = -2.0 * d * r / (R * R);
    const double s = std::sin(theta0);
    const double i0 = kPi - theta0;
    const double i1 = -s;
    const double i2 = 0.5 * (kPi - theta0) - 0.25 * std::sin(2.0 * theta0);
    const double i3 = -(s - s * s * s / 3.0);
    return (A * A * A * i0 + 3.0 * A * A * B * i1 + 3.0 * A * B * B * i2 + B * B * B * i3) / kPi;
}

// Mean over the sphere of radius r whose center is at distance d from the component center.
inline double sphere_mean(Profile p, double R, double d, double r) {
    if (r == 0.0 || d == 0.0) return radial_value(p, R, d + r);
    if (r >= R + d || r <= d - R) return 0.0;
    const double lo = std::abs(d - r);
    if (p == Profile::indicator) {
        if (r + d <= R) return 1.0;
        return (R * R - lo * lo) / (4.0 * d * r);
    }
    if (r + d <= R && 2.0 * d * r < 1e-3 * R * R) {
        // The integrand is a cubic in the cosine; 4-point Gauss-Legendre is exact and avoids
        // the cancellation in the antiderivative form.
        static constexpr double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                        0.8611363115940526};
        static constexpr double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                        0.3478548451374538};
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += w[k] * radial_value(p, R, std::sqrt(d * d + r * r + 2.0 * d * r * x[k]));
        return 0.5 * s;
    }
    auto antiderivative = [R](double rho) {
        const double u = 1.0 - rho * rho / (R * R);
        return -(R * R / 8.0) * u * u * u * u;
    };
    const double hi = std::min(d + r, R);
    return (antiderivative(hi) - antiderivative(lo)) / (2.0 * d * r);
}

}  // namespace detail

template <std::size_t D>
double eval(const Phantom<D>& ph, const Vec<D>& x) {
    double v = 0.0;
    for (const auto& c : ph.components) v += c.amplitude * detail::radial_value(c.profile, c.radius, norm(x - c.center));
    return v;
}

inline double circular_mean(const Phantom<2>& ph, const Vec<2>& y, double r) {
    require(r >= 0.0, ErrorKind::invalid_argument, "radius must be non-negative");
    double v = 0.0;
    for (const auto& c : ph.components) v += c.amplitude * detail::circle_mean(c.profile, c.radius, norm(y - c.center), r);
    return v;
}

inline double spherical_mean(const Phantom<3>& ph, const Vec<3>& y, double r) {
    require(r >= 0.0, ErrorKind::invalid_argument, "radius must be non-negative");
    double v = 0.0;
    for (const auto& c : ph.components) v += c.amplitude * detail::sphere_mean(c.profile, c.radius, norm(y - c.center), r);
    return v;
}

template <std::size_t D>
double mean(const Phantom<D>& ph, const Vec<D>& y, double r) {
    if constexpr (D == 2)
        return circular_mean(ph, y, r);
    else
        return spherical_mean(ph, y, r);
}

/// Smooth test object inside the square (-1,1)^2.
inline Phantom<2> smooth_phantom_2d() {
    return {{{{0.15, -0.1}, 0.6, 1.0, Profile::smooth_bump},
             {{-0.45, 0.4}, 0.35, 0.7, Profile::smooth_bump},
             {{0.5, 0.45}, 0.3, -0.5, Profile::smooth_bump},
             {{-0.35, -0.55}, 0.25, 0.6, Profile::smooth_bump}}};
}

/// Smooth test object inside the cube (-1,1)^3.
inline Phantom<3> smooth_phantom_3d() {
    return {{{{0.1, -0.15, 0.1}, 0.6, 1.0, Profile::smooth_bump},
             {{-0.45, 0.4, -0.2}, 0.35, 0.7, Profile::smooth_bump},
             {{0.45, 0.45, 0.35}, 0.3, -0.5, Profile::smooth_bump}}};
}

/// Smooth object inside the right-isosceles triangle with legs of length a on the axes.
inline Phantom<2> smooth_phantom_triangle(double a = 1.0) {
    return {{{{0.3 * a, 0.28 * a}, 0.2 * a, 1.0, Profile::smooth_bump},
             {{0.55 * a, 0.15 * a}, 0.12 * a, 0.6, Profile::smooth_bump},
             {{0.14 * a, 0.6 * a}, 0.11 * a, -0.4, Profile::smooth_bump}}};
}

/// The right-isosceles object carried to an arbitrary triangle by the affine map taking
/// (0,0), (1,0), (0,1) to v0, v1, v2. Radii scale with sqrt(area) and stay clear of the edges.
inline Phantom<2> smooth_phantom_triangle(const Vec<2>& v0, const Vec<2>& v1, const Vec<2>& v2) {
    const Vec<2> e1 = v1 - v0, e2 = v2 - v0;
    const double scale = std::sqrt(std::abs(e1[0] * e2[1] - e1[1] * e2[0]));
    const std::array<Vec<2>, 3> v{v0, v1, v2};
    auto clearance = [&](const Vec<2>& c) {
        double m = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 3; ++k) {
            const Vec<2> p = v[k], q = v[(k + 1) % 3];
            const Vec<2> t = q - p;
            m = std::min(m, std::abs(t[0] * (c[1] - p[1]) - t[1] * (c[0] - p[0])) / norm(t));
        }
        return m;
    };
    Phantom<2> ph = smooth_phantom_triangle(1.0);
    for (auto& c : ph.components) {
        c.center = v0 + c.center[0] * e1 + c.center[1] * e2;
        c.radius = std::min(c.radius * scale, 0.95 * clearance(c.center));
    }
    return ph;
}

/// 25 indicator balls centered in the plane x3 = 0 on a 5x5 grid, radii varying 0.08 to 0.15.
inline Phantom<3> ball_grid_phantom() {
    Phantom<3> ph;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const double r = 0.08 + 0.07 * ((i * 5 + j) % 8) / 7.0;
            ph.components.push_back({{0.32 * (i - 2), 0.32 * (j - 2), 0.0}, r, 1.0, Profile::indicator});
        }
    return ph;
}

/// Indicator ball of radius 0.08 centered at (1.1, 0, 0), just outside the unit cube.
inline Component<3> exterior_ball() { return {{1.1, 0.0, 0.0}, 0.08, 1.0, Profile::indicator}; }

}  // namespace polymean
