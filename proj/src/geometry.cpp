#include "robinband/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace robinband::geometry {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

// Periodic cubic spline second derivatives on a uniform knot grid.
// The cyclic tridiagonal system is reduced to the leading block plus the
// wrap unknown (two Thomas sweeps).
std::vector<double> periodic_spline_m(const std::vector<double>& h,
                                      const std::vector<double>& y) {
    const int n = static_cast<int>(y.size());
    std::vector<double> a(n), b(n), c(n), d(n);
    for (int i = 0; i < n; ++i) {
        const double hm = h[(i + n - 1) % n];
        const double hp = h[i];
        a[i] = hm / 6.0;
        b[i] = (hm + hp) / 3.0;
        c[i] = hp / 6.0;
        const double ym = y[(i + n - 1) % n];
        const double yp = y[(i + 1) % n];
        d[i] = (yp - y[i]) / hp - (y[i] - ym) / hm;
    }
    const int m = n - 1;
    std::vector<double> rhs1(d.begin(), d.begin() + m), rhs2(m, 0.0);
    rhs2[0] = -a[0];
    rhs2[m - 1] -= c[m - 1];
    auto solve_block = [&](std::vector<double> rhs) {
        std::vector<double> bb(b.begin(), b.begin() + m), x(m);
        for (int i = 1; i < m; ++i) {
            const double w = a[i] / bb[i - 1];
            bb[i] -= w * c[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        x[m - 1] = rhs[m - 1] / bb[m - 1];
        for (int i = m - 2; i >= 0; --i)
            x[i] = (rhs[i] - c[i] * x[i + 1]) / bb[i];
        return x;
    };
    const auto x1 = solve_block(rhs1);
    const auto x2 = solve_block(rhs2);
    const double num = d[n - 1] - c[n - 1] * x1[0] - a[n - 1] * x1[m - 1];
    const double den = b[n - 1] + c[n - 1] * x2[0] + a[n - 1] * x2[m - 1];
    const double mn1 = num / den;
    std::vector<double> out(n);
    for (int i = 0; i < m; ++i) out[i] = x1[i] + mn1 * x2[i];
    out[n - 1] = mn1;
    return out;
}

} // namespace

double Vec2::norm() const { return std::sqrt(x * x + y * y); }

Vec2 BoundaryCurve::Spline::eval(double t) const {
    const int n = static_cast<int>(px.size());
    double u = std::fmod(t, period);
    if (u < 0.0) u += period;
    const double h = period / n;
    int i = std::min(static_cast<int>(u / h), n - 1);
    const double a = (s[i] + h - u) / h;
    const double b = (u - s[i]) / h;
    auto piece = [&](const std::vector<double>& p, const std::vector<double>& m) {
        const int j = (i + 1) % n;
        return a * p[i] + b * p[j] +
               ((a * a * a - a) * m[i] + (b * b * b - b) * m[j]) * h * h / 6.0;
    };
    return {piece(px, mx), piece(py, my)};
}

Vec2 BoundaryCurve::Spline::deriv(double t) const {
    const int n = static_cast<int>(px.size());
    double u = std::fmod(t, period);
    if (u < 0.0) u += period;
    const double h = period / n;
    int i = std::min(static_cast<int>(u / h), n - 1);
    const double a = (s[i] + h - u) / h;
    const double b = (u - s[i]) / h;
    auto piece = [&](const std::vector<double>& p, const std::vector<double>& m) {
        const int j = (i + 1) % n;
        return (p[j] - p[i]) / h +
               (-(3.0 * a * a - 1.0) * m[i] + (3.0 * b * b - 1.0) * m[j]) * h /
                   6.0;
    };
    return {piece(px, mx), piece(py, my)};
}

Vec2 BoundaryCurve::Spline::deriv2(double t) const {
    const int n = static_cast<int>(px.size());
    double u = std::fmod(t, period);
    if (u < 0.0) u += period;
    const double h = period / n;
    int i = std::min(static_cast<int>(u / h), n - 1);
    const double a = (s[i] + h - u) / h;
    const double b = (u - s[i]) / h;
    const int j = (i + 1) % n;
    return {a * mx[i] + b * mx[j], a * my[i] + b * my[j]};
}

BoundaryCurve BoundaryCurve::from_points(const std::vector<Vec2>& input,
                                         int n_resample) {
    std::vector<Vec2> pts = input;
    if (pts.size() >= 2 && (pts.front() - pts.back()).norm() <
                               1e-9 * (1.0 + pts.front().norm()))
        pts.pop_back(); // drop duplicated closing point
    if (pts.size() < 8) throw DegenerateCurve("need at least 8 samples");

    const int np = static_cast<int>(pts.size());
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, p.norm());
    for (int i = 0; i < np; ++i) {
        const double step = (pts[(i + 1) % np] - pts[i]).norm();
        if (step < 1e-12 * std::max(1.0, scale))
            throw DegenerateCurve("consecutive samples coincide");
    }

    // Chord-parametrized periodic spline through the input points.
    Spline chord;
    chord.period = np;
    chord.s.resize(np);
    chord.px.resize(np);
    chord.py.resize(np);
    std::vector<double> hu(np, 1.0), vx(np), vy(np);
    for (int i = 0; i < np; ++i) {
        chord.s[i] = i;
        chord.px[i] = vx[i] = pts[i].x;
        chord.py[i] = vy[i] = pts[i].y;
    }
    chord.mx = periodic_spline_m(hu, vx);
    chord.my = periodic_spline_m(hu, vy);

    // Arc length along the chord spline by composite Simpson.
    const int sub = 8;
    const int total_sub = np * sub;
    std::vector<double> cum(total_sub + 1, 0.0);
    const double du = static_cast<double>(np) / total_sub;
    for (int i = 0; i < total_sub; ++i) {
        const double u0 = i * du, u1 = (i + 1) * du;
        const double f0 = chord.deriv(u0).norm();
        const double fm = chord.deriv(0.5 * (u0 + u1)).norm();
        const double f1 = chord.deriv(u1).norm();
        cum[i + 1] = cum[i] + du / 6.0 * (f0 + 4.0 * fm + f1);
    }
    const double length = cum[total_sub];

    // Resample at uniform arc length.
    BoundaryCurve curve;
    curve.length_ = length;
    curve.nodes_.resize(n_resample);
    int seg = 0;
    for (int k = 0; k < n_resample; ++k) {
        const double target = length * k / n_resample;
        while (seg + 1 < total_sub && cum[seg + 1] < target) ++seg;
        const double f =
            (target - cum[seg]) / std::max(1e-300, cum[seg + 1] - cum[seg]);
        const double u = (seg + f) * du;
        curve.nodes_[k] = chord.eval(u);
    }

    // Final spline through the uniform arc-length nodes.
    curve.spline_.period = length;
    curve.spline_.s.resize(n_resample);
    curve.spline_.px.resize(n_resample);
    curve.spline_.py.resize(n_resample);
    std::vector<double> hs(n_resample, length / n_resample), sx(n_resample),
        sy(n_resample);
    for (int i = 0; i < n_resample; ++i) {
        curve.spline_.s[i] = length * i / n_resample;
        curve.spline_.px[i] = sx[i] = curve.nodes_[i].x;
        curve.spline_.py[i] = sy[i] = curve.nodes_[i].y;
    }
    curve.spline_.mx = periodic_spline_m(hs, sx);
    curve.spline_.my = periodic_spline_m(hs, sy);

    curve.finalize();
    return curve;
}

void BoundaryCurve::finalize() {
    const int n = this->n();
    const double d = ds();

    double area2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2& p = nodes_[i];
        const Vec2& q = nodes_[(i + 1) % n];
        area2 += p.x * q.y - p.y * q.x;
    }
    ccw_ = area2 > 0.0;

    // Centered-difference tangents, then curvature from the tangent sweep.
    // Sign: k = T' . nu_in, so a ccw circle of radius r has k = +1/r.
    std::vector<Vec2> tang(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 dp = nodes_[(i + 1) % n] - nodes_[(i + n - 1) % n];
        tang[i] = dp * (1.0 / dp.norm());
    }
    curv_.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 dT =
            (tang[(i + 1) % n] - tang[(i + n - 1) % n]) * (1.0 / (2.0 * d));
        const Vec2 nu_in = ccw_ ? Vec2{-tang[i].y, tang[i].x}
                                : Vec2{tang[i].y, -tang[i].x};
        curv_[i] = dT.dot(nu_in);
    }
}

BoundaryCurve BoundaryCurve::circle(double r, int n) {
    std::vector<Vec2> pts(n);
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * kPi * i / n;
        pts[i] = {r * std::cos(a), r * std::sin(a)};
    }
    return from_points(pts, n);
}

BoundaryCurve BoundaryCurve::ellipse(double a, double b, int n) {
    const int np = std::max(2 * n, 256);
    std::vector<Vec2> pts(np);
    for (int i = 0; i < np; ++i) {
        const double t = 2.0 * kPi * i / np;
        pts[i] = {a * std::cos(t), b * std::sin(t)};
    }
    return from_points(pts, n);
}

BoundaryCurve BoundaryCurve::square(double side, int n) {
    // Corners rounded at 2% of the side; the collar machinery needs C^2.
    const double r = 0.02 * side;
    const double c = 0.5 * side - r;
    const double hs = 0.5 * side;
    std::vector<Vec2> pts;
    const int per_side = 128, per_corner = 48;
    auto arc = [&](Vec2 center, double a0, double a1) {
        for (int i = 0; i < per_corner; ++i) {
            const double a = a0 + (a1 - a0) * i / per_corner;
            pts.push_back(
                {center.x + r * std::cos(a), center.y + r * std::sin(a)});
        }
    };
    auto edge = [&](Vec2 p, Vec2 q) {
        for (int i = 0; i < per_side; ++i) {
            const double f = static_cast<double>(i) / per_side;
            pts.push_back({p.x + f * (q.x - p.x), p.y + f * (q.y - p.y)});
        }
    };
    edge({-c, -hs}, {c, -hs});
    arc({c, -c}, -kPi / 2, 0.0);
    edge({hs, -c}, {hs, c});
    arc({c, c}, 0.0, kPi / 2);
    edge({c, hs}, {-c, hs});
    arc({-c, c}, kPi / 2, kPi);
    edge({-hs, c}, {-hs, -c});
    arc({-c, -c}, kPi, 3 * kPi / 2);
    return from_points(pts, n);
}

Vec2 BoundaryCurve::point(double s) const { return spline_.eval(s); }

Vec2 BoundaryCurve::tangent(double s) const {
    Vec2 d = spline_.deriv(s);
    return d * (1.0 / d.norm());
}

Vec2 BoundaryCurve::normal(double s) const {
    const Vec2 t = tangent(s);
    return ccw_ ? Vec2{t.y, -t.x} : Vec2{-t.y, t.x};
}

double BoundaryCurve::curvature(double s) const {
    const int n = this->n();
    double u = std::fmod(s, length_);
    if (u < 0.0) u += length_;
    const double d = ds();
    const int i = std::min(static_cast<int>(u / d), n - 1);
    const double f = (u - i * d) / d;
    return (1.0 - f) * curv_[i] + f * curv_[(i + 1) % n];
}

double BoundaryCurve::curvature_spline(double s) const {
    const Vec2 d1 = spline_.deriv(s);
    const Vec2 d2 = spline_.deriv2(s);
    const double cross = d1.x * d2.y - d1.y * d2.x;
    const double sp = d1.norm();
    const double k_ccw = cross / (sp * sp * sp);
    return ccw_ ? k_ccw : -k_ccw;
}

double BoundaryCurve::max_abs_curvature() const {
    double m = 0.0;
    for (double k : curv_) m = std::max(m, std::abs(k));
    return m;
}

double BoundaryCurve::total_turning() const {
    double sum = 0.0;
    for (double k : curv_) sum += k * ds();
    return sum;
}

double curvature(const BoundaryCurve& curve, double s) {
    if (curve.n() < 8) throw DegenerateCurve("curve has fewer than 8 samples");
    return curve.curvature(s);
}

TubularCoords TubularCoords::build(BoundaryCurve curve, double t0_request) {
    const double kmax = curve.max_abs_curvature();
    double t0 = t0_request > 0.0 ? t0_request : 0.5 / std::max(kmax, 1e-12);
    t0 = std::min(t0, 0.25 * curve.total_length());
    if (t0_request > 0.0 && 1.0 - t0 * kmax <= 0.0)
        throw Error("TubularCoords: requested depth violates 1 - t0 max|k| > 0");

    const int n = curve.n();
    const auto& nodes = curve.samples();
    for (int attempt = 0; attempt < 40; ++attempt) {
        // Nearest-neighbor audit: the closest boundary node to a collar
        // point at depth t must be (near) its own foot point.
        bool ok = 1.0 - t0 * kmax > 0.0;
        const double t = 0.98 * t0;
        const double slack = 1.5 * curve.ds();
        for (int i = 0; i < n && ok; i += 2) {
            const double s = curve.total_length() * i / n;
            const Vec2 p = curve.point(s) - curve.normal(s) * t;
            for (int j = 0; j < n; ++j) {
                if ((p - nodes[j]).norm() < t - slack) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) return {std::move(curve), t0};
        t0 *= 0.5;
    }
    throw Error("TubularCoords: no injective collar depth found");
}

BoundaryPoint to_boundary_coords(const TubularCoords& tc, Vec2 x) {
    const auto& c = tc.curve;
    const int n = c.n();
    int best = 0;
    double bd = (x - c.samples()[0]).norm();
    for (int i = 1; i < n; ++i) {
        const double d = (x - c.samples()[i]).norm();
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    // Newton on (x - M(s)) . M'(s) = 0 from the nearest node.
    double s = c.total_length() * best / n;
    for (int it = 0; it < 60; ++it) {
        const Vec2 m = c.point(s);
        const Vec2 t = c.tangent(s);
        const double g = (x - m).dot(t);
        const double tproj = -(x - m).dot(c.normal(s));
        const double gp = -(1.0 - c.curvature(s) * tproj);
        const double step = g / gp;
        s -= step;
        if (std::abs(step) < 1e-14 * std::max(1.0, c.total_length())) break;
    }
    double u = std::fmod(s, c.total_length());
    if (u < 0.0) u += c.total_length();
    const Vec2 m = c.point(u);
    const double dist = (x - m).norm();
    if ((x - m).dot(c.normal(u)) > 1e-9 * std::max(1.0, dist))
        throw OutsideCollar("point lies outside the domain");
    if (dist >= tc.t0) throw OutsideCollar("distance exceeds the collar depth");
    return {u, dist};
}

Vec2 from_boundary_coords(const TubularCoords& tc, double s, double t) {
    if (t < 0.0) throw Error("from_boundary_coords: negative distance");
    if (t >= tc.t0) throw OutsideCollar("distance exceeds the collar depth");
    return tc.curve.point(s) - tc.curve.normal(s) * t;
}

double GaugeField::sup_beta() const {
    double m = 0.0;
    for (double b : beta) m = std::max(m, std::abs(b));
    return m;
}

double GaugeField::curl_at(int is, int it) const {
    const int nt = static_cast<int>(t_nodes.size());
    const double dt = t_nodes[1] - t_nodes[0];
    if (it == 0) return -(at(is, 1) - at(is, 0)) / dt;
    if (it == nt - 1) return -(at(is, nt - 1) - at(is, nt - 2)) / dt;
    return -(at(is, it + 1) - at(is, it - 1)) / (2.0 * dt);
}

GaugeField gauge_normalize(const TubularCoords& tc,
                           const std::function<Vec2(Vec2)>& A_xy, double S0,
                           double S1, double S2, double T, int ns, int nt) {
    if (T >= tc.t0) throw WindowTooDeep("window deeper than the collar");
    if (!(S1 <= S0 && S0 <= S2))
        throw Error("gauge_normalize: S0 outside window");
    const auto& c = tc.curve;

    GaugeField g;
    g.S0 = S0;
    g.s_nodes.resize(ns);
    g.t_nodes.resize(nt);
    for (int i = 0; i < ns; ++i) g.s_nodes[i] = S1 + (S2 - S1) * i / (ns - 1);
    for (int j = 0; j < nt; ++j) g.t_nodes[j] = T * j / (nt - 1);

    // Pulled-back components: with x = M(s) - t nu(s),
    //   At1 = (1 - t k) A . T,   At2 = -A . nu.
    std::vector<double> At1(static_cast<size_t>(ns) * nt),
        At2(static_cast<size_t>(ns) * nt);
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < ns; ++i) {
            const double s = g.s_nodes[i], t = g.t_nodes[j];
            const Vec2 x = c.point(s) - c.normal(s) * t;
            const Vec2 A = A_xy(x);
            At1[static_cast<size_t>(j) * ns + i] =
                (1.0 - t * c.curvature(s)) * A.dot(c.tangent(s));
            At2[static_cast<size_t>(j) * ns + i] = -A.dot(c.normal(s));
        }

    const Vec2 x0 = c.point(S0);
    const double eps = 1e-6 * std::max(1.0, x0.norm());
    g.B0 = (A_xy({x0.x + eps, x0.y}).y - A_xy({x0.x - eps, x0.y}).y) /
               (2.0 * eps) -
           (A_xy({x0.x, x0.y + eps}).x - A_xy({x0.x, x0.y - eps}).x) /
               (2.0 * eps);

    // Gauge phi(s,t) = int_0^t At2(s,.) + g0(s) with g0'(s) = At1(s,0)
    // kills the second component and zeroes A1_bar on t = 0:
    //   A1_bar(s,t) = At1(s,t) - At1(s,0) - int_0^t d_s At2(s,.) d tau.
    const double dsn = (S2 - S1) / (ns - 1);
    const double dtn = T / (nt - 1);
    g.A1.assign(static_cast<size_t>(ns) * nt, 0.0);
    g.beta.assign(static_cast<size_t>(ns) * nt, 0.0);
    auto ds_At2 = [&](int i, int j) {
        const size_t row = static_cast<size_t>(j) * ns;
        if (i == 0) return (At2[row + 1] - At2[row]) / dsn;
        if (i == ns - 1) return (At2[row + ns - 1] - At2[row + ns - 2]) / dsn;
        return (At2[row + i + 1] - At2[row + i - 1]) / (2.0 * dsn);
    };
    for (int i = 0; i < ns; ++i) {
        double integral = 0.0;
        double prev = ds_At2(i, 0);
        for (int j = 1; j < nt; ++j) {
            const double cur = ds_At2(i, j);
            integral += 0.5 * dtn * (prev + cur);
            prev = cur;
            const size_t id = static_cast<size_t>(j) * ns + i;
            g.A1[id] = At1[id] - At1[i] - integral;
        }
    }
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < ns; ++i) {
            const size_t id = static_cast<size_t>(j) * ns + i;
            g.beta[id] = g.A1[id] + g.B0 * g.t_nodes[j];
        }
    return g;
}

} // namespace robinband::geometry
