#ifndef ROBINBAND_GEOMETRY_HPP
#define ROBINBAND_GEOMETRY_HPP

#include <functional>
#include <vector>

#include "robinband/errors.hpp"

namespace robinband::geometry {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {c * x, c * y}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const;
};

// Closed C^2 boundary, resampled to uniform arc length. Node i sits at
// s_i = i * ds with ds = total_length / n; the curve wraps periodically.
//
// Sign conventions: nu(s) is the outward unit normal, the map into the
// domain is x = M(s) - t nu(s), and the curvature sign makes a
// counterclockwise circle of radius r have k = +1/r, so the collar
// Jacobian is a(s,t) = 1 - t k(s).
class BoundaryCurve {
  public:
    static BoundaryCurve from_points(const std::vector<Vec2>& closed_polyline,
                                     int n_resample = 512);
    static BoundaryCurve circle(double r, int n = 512);
    static BoundaryCurve ellipse(double a, double b, int n = 1024);
    static BoundaryCurve square(double side, int n = 1024); // rounded corners

    int n() const { return static_cast<int>(nodes_.size()); }
    double total_length() const { return length_; }
    double ds() const { return length_ / n(); }
    bool counterclockwise() const { return ccw_; }

    const std::vector<Vec2>& samples() const { return nodes_; }
    const std::vector<double>& curvature_samples() const { return curv_; }

    Vec2 point(double s) const;
    Vec2 tangent(double s) const; // unit
    Vec2 normal(double s) const;  // outward unit
    double curvature(double s) const;
    double max_abs_curvature() const;

    // Alternative curvature from spline second derivatives (cross-check).
    double curvature_spline(double s) const;

    // Discrete turning number integral (should be 2*pi for a simple ccw curve).
    double total_turning() const;

  private:
    struct Spline {
        // periodic cubic splines for x(s) and y(s)
        std::vector<double> s;      // knots, uniform, s[0] = 0
        std::vector<double> px, py; // values
        std::vector<double> mx, my; // second derivatives
        double period = 0.0;
        Vec2 eval(double t) const;
        Vec2 deriv(double t) const;
        Vec2 deriv2(double t) const;
    };

    void finalize(); // tangents, curvature, orientation

    std::vector<Vec2> nodes_;
    std::vector<double> curv_;
    Spline spline_;
    double length_ = 0.0;
    bool ccw_ = true;
};

double curvature(const BoundaryCurve& curve, double s);

// Tubular collar with injective coordinates. t0 starts at 0.5/max|k| and
// is halved until a nearest-neighbor audit passes.
struct TubularCoords {
    BoundaryCurve curve;
    double t0 = 0.0;

    static TubularCoords build(BoundaryCurve curve, double t0_request = 0.0);
};

struct BoundaryPoint {
    double s;
    double t;
};

BoundaryPoint to_boundary_coords(const TubularCoords& tc, Vec2 x);
Vec2 from_boundary_coords(const TubularCoords& tc, double s, double t);

// Normalized vector potential on a collar window in (s,t) coordinates:
// second component identically zero, first equals -B0 t + beta(s,t).
struct GaugeField {
    std::vector<double> s_nodes;
    std::vector<double> t_nodes;
    std::vector<double> A1;   // row-major, [it * ns + is]
    std::vector<double> beta; // A1 + B0 * t
    double B0 = 0.0;
    double S0 = 0.0;

    double at(int is, int it) const {
        return A1[static_cast<size_t>(it) * s_nodes.size() + is];
    }
    double beta_at(int is, int it) const {
        return beta[static_cast<size_t>(it) * s_nodes.size() + is];
    }
    double sup_beta() const;

    // Discrete curl -d A1/dt on the window (A2 = 0); should match
    // (1 - t k) * B within discretization error.
    double curl_at(int is, int it) const;
};

GaugeField gauge_normalize(const TubularCoords& tc,
                           const std::function<Vec2(Vec2)>& A_xy, double S0,
                           double S1, double S2, double T, int ns = 65,
                           int nt = 49);

} // namespace robinband::geometry

#endif
