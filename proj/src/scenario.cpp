#include "egokit/scenario.hpp"

#include <cmath>
#include <vector>

#include "egokit/rng.hpp"

namespace egokit {

namespace {

// Synthetic power model: drive term + acceleration term + cornering drag.
constexpr double kPowerV = 60.0;       // W per m/s
constexpr double kPowerAccel = 40.0;   // W per m/s^2
constexpr double kPowerSteer = 150.0;  // W per rad per m/s
constexpr double kWheelbase = 1.0;     // m; steering = atan(kappa * wheelbase)

struct Vec2 {
    double x = 0.0, y = 0.0;
};

struct Piece {
    bool arc = false;
    double len = 0.0;
    Vec2 start;
    double heading0 = 0.0;
    // Arcs only:
    Vec2 center;
    double radius = 0.0;
    double kappa_peak = 0.0;
    double ramp = 0.0;
};

double trapezoid(double u, double len, double ramp, double peak) {
    if (u < 0.0 || u > len) return 0.0;
    if (u < ramp) return peak * u / ramp;
    if (u > len - ramp) return peak * (len - u) / ramp;
    return peak;
}

// Rounded-rectangle perimeter, anticlockwise, starting on the bottom
// straight. Corner arcs carry a trapezoidal curvature profile whose integral
// is exactly pi/2, so the reported steering returns to zero on straights.
struct PathModel {
    std::vector<Piece> pieces;
    double total = 0.0;
    double speed = 0.0;          // straight cruise
    double corner_speed = 0.0;   // on arcs
    double accel = 0.0;

    static PathModel build(const ScenarioParams& p) {
        PathModel m;
        m.speed = p.speed;
        m.corner_speed = 0.5 * p.speed;
        m.accel = 0.5 * p.speed;   // ramp rate between cruise and corner speed

        const double r = m.corner_speed / p.corner_rate;
        if (r >= std::min(p.half_x, p.half_y)) {
            throw InvalidParams("scenario: corner radius does not fit the rectangle");
        }
        const double lens[4] = {2.0 * p.half_x - 2.0 * r, 2.0 * p.half_y - 2.0 * r,
                                2.0 * p.half_x - 2.0 * r, 2.0 * p.half_y - 2.0 * r};
        Vec2 pos{-p.half_x + r, -p.half_y};
        double heading = 0.0;
        for (int side = 0; side < 4; ++side) {
            Piece st;
            st.len = lens[side];
            st.start = pos;
            st.heading0 = heading;
            m.pieces.push_back(st);
            pos.x += lens[side] * std::cos(heading);
            pos.y += lens[side] * std::sin(heading);

            Piece arc;
            arc.arc = true;
            arc.radius = r;
            arc.len = M_PI * r / 2.0;
            arc.start = pos;
            arc.heading0 = heading;
            arc.center = {pos.x - r * std::sin(heading), pos.y + r * std::cos(heading)};
            arc.ramp = std::min(0.25 * arc.len, 0.5);
            arc.kappa_peak = (M_PI / 2.0) / (arc.len - arc.ramp);
            m.pieces.push_back(arc);

            heading += M_PI / 2.0;
            pos = {arc.center.x + r * std::sin(heading), arc.center.y - r * std::cos(heading)};
        }
        for (const auto& piece : m.pieces) m.total += piece.len;
        return m;
    }

    std::pair<const Piece*, double> locate(double s) const {
        double u = std::fmod(s, total);
        if (u < 0.0) u += total;
        for (const auto& piece : pieces) {
            if (u <= piece.len) return {&piece, u};
            u -= piece.len;
        }
        return {&pieces.back(), pieces.back().len};
    }

    Vec2 point(double s) const {
        const auto [piece, u] = locate(s);
        if (!piece->arc) {
            return {piece->start.x + u * std::cos(piece->heading0),
                    piece->start.y + u * std::sin(piece->heading0)};
        }
        const double phi0 = piece->heading0 - M_PI / 2.0;
        const double phi = phi0 + u / piece->radius;
        return {piece->center.x + piece->radius * std::cos(phi),
                piece->center.y + piece->radius * std::sin(phi)};
    }

    double heading(double s) const {
        const auto [piece, u] = locate(s);
        return piece->arc ? piece->heading0 + u / piece->radius : piece->heading0;
    }

    double kappa(double s) const {
        const auto [piece, u] = locate(s);
        return piece->arc ? trapezoid(u, piece->len, piece->ramp, piece->kappa_peak) : 0.0;
    }

    bool on_arc(double s) const { return locate(s).first->arc; }

    // Speed profile: corner speed on arcs, trapezoidal ramps on straights.
    double envelope(double s) const {
        const auto [piece, u] = locate(s);
        if (piece->arc) return corner_speed;
        const double from_start = std::sqrt(corner_speed * corner_speed + 2.0 * accel * u);
        const double to_end =
            std::sqrt(corner_speed * corner_speed + 2.0 * accel * (piece->len - u));
        return std::min({speed, from_start, to_end});
    }
};

struct Sampled {
    std::vector<double> s;          // steering, rad (noiseless)
    std::vector<double> v;          // m/s
    std::vector<double> p;          // W
    Odometry odom;
    std::vector<GtClass> labels;

    void record(double steer, double vel, Vec2 pos, double heading, GtClass label) {
        s.push_back(steer);
        v.push_back(vel);
        odom.x.push_back(pos.x);
        odom.y.push_back(pos.y);
        odom.heading.push_back(heading);
        labels.push_back(label);
    }

    void finish_power(double dt) {
        p.resize(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) {
            const double vdot = k == 0 ? 0.0 : (v[k] - v[k - 1]) / dt;
            p[k] = kPowerV * v[k] + kPowerAccel * std::abs(vdot) +
                   kPowerSteer * std::abs(s[k]) * v[k];
        }
    }
};

SensorSeries assemble(const Sampled& run, const ScenarioParams& params) {
    const auto k = run.s.size();
    SensorSeries series;
    series.channels = {"S", "V", "P"};
    series.timestamps.resize(k);
    series.values.resize(k, 3);
    for (std::size_t i = 0; i < k; ++i) {
        series.timestamps[i] = static_cast<double>(i) * params.dt;
        series.values(i, 0) = run.s[i];
        series.values(i, 1) = run.v[i];
        series.values(i, 2) = run.p[i];
    }

    Rng rng(params.seed);
    for (int c = 0; c < 3; ++c) {
        const double range =
            series.values.col(c).maxCoeff() - series.values.col(c).minCoeff();
        const double sigma = params.noise_frac[c] * range;
        if (sigma <= 0.0) continue;
        for (std::size_t i = 0; i < k; ++i) {
            series.values(i, c) += sigma * rng.normal();
        }
    }
    series.validate();
    return series;
}

double steer_of(double kappa) { return std::atan(kappa * kWheelbase); }

}  // namespace

void ScenarioParams::validate() const {
    if (half_x <= 0.0 || half_y <= 0.0) throw InvalidParams("scenario: extents must be positive");
    if (speed <= 0.0) throw InvalidParams("scenario: speed must be positive");
    if (corner_rate <= 0.0) throw InvalidParams("scenario: corner rate must be positive");
    if (dt <= 0.0 || dt > 0.5) throw InvalidParams("scenario: dt must be in (0, 0.5]");
    if (laps < 1) throw InvalidParams("scenario: laps must be >= 1");
    for (double f : noise_frac) {
        if (f < 0.0) throw InvalidParams("scenario: noise fraction must be >= 0");
    }
    if (obstacle_frac <= 0.0 || obstacle_frac >= 1.0) {
        throw InvalidParams("scenario: obstacle fraction must be in (0,1)");
    }
}

PerimeterRun gen_perimeter(const ScenarioParams& params) {
    params.validate();
    const PathModel path = PathModel::build(params);

    Sampled run;
    const double end = static_cast<double>(params.laps) * path.total;
    double s = 0.0;
    while (s < end) {
        const double v = path.envelope(s);
        run.record(steer_of(path.kappa(s)), v, path.point(s), path.heading(s),
                   GtClass::StraightMotion);
        s += v * params.dt;
    }
    run.finish_power(params.dt);

    PerimeterRun out;
    out.series = assemble(run, params);
    out.odom = std::move(run.odom);
    return out;
}

UturnRun gen_uturn(const ScenarioParams& params) {
    params.validate();
    const PathModel path = PathModel::build(params);

    const double u_speed = 0.15 * params.speed;
    const double u_rate = params.corner_rate;
    const double u_radius = u_speed / u_rate;
    const double u_arc = M_PI * u_radius;
    const double u_ramp = std::min(0.25 * u_arc, 0.5);
    const double u_kappa = M_PI / (u_arc - u_ramp);

    const double first_straight = path.pieces.front().len;
    const double s_obs = params.obstacle_frac * first_straight;
    const double stop_dist =
        (params.speed * params.speed - u_speed * u_speed) / (2.0 * path.accel);
    if (stop_dist >= s_obs) {
        throw InvalidParams("scenario: obstacle too close to brake for the U-turn");
    }

    Sampled run;

    // Forward along the perimeter until the obstacle; braking enters the
    // in-training corner-speed band first (EnteringUturn), then the unseen
    // crawl band (UturnExecution).
    double s = 0.0;
    while (s < s_obs) {
        const double brake =
            std::sqrt(u_speed * u_speed + 2.0 * path.accel * (s_obs - s));
        const double v = std::min(path.envelope(s), brake);
        GtClass label = GtClass::StraightMotion;
        if (brake < params.speed) {
            label = v > path.corner_speed + 1e-9 ? GtClass::EnteringUturn
                                                 : GtClass::UturnExecution;
        }
        run.record(steer_of(path.kappa(s)), v, path.point(s), path.heading(s), label);
        s += v * params.dt;
    }

    // Tight 180-degree left turn.
    const double h0 = path.heading(s_obs);
    const Vec2 anchor = path.point(s_obs);
    const Vec2 center{anchor.x - u_radius * std::sin(h0), anchor.y + u_radius * std::cos(h0)};
    double u = 0.0;
    while (u < u_arc) {
        const double phi = h0 - M_PI / 2.0 + u / u_radius;
        const Vec2 pos{center.x + u_radius * std::cos(phi),
                       center.y + u_radius * std::sin(phi)};
        run.record(steer_of(trapezoid(u, u_arc, u_ramp, u_kappa)), u_speed, pos,
                   h0 + u / u_radius, GtClass::UturnExecution);
        u += u_speed * params.dt;
    }

    // One full lap in the reverse direction: the same path traversed with
    // flipped curvature, so every corner becomes an inverse curve.
    double rs = 0.0;
    bool exit_done = false;
    while (rs < path.total) {
        const double s_at = s_obs - rs;
        const double accel_env = std::sqrt(u_speed * u_speed + 2.0 * path.accel * rs);
        const double v = std::min(path.envelope(s_at), accel_env);
        const bool arc = path.on_arc(s_at);
        if (arc) exit_done = true;
        GtClass label;
        if (!exit_done) {
            if (v < path.corner_speed - 1e-9) {
                label = GtClass::UturnExecution;
            } else if (v < params.speed * (1.0 - 1e-9)) {
                label = GtClass::ExitingUturn;
            } else {
                exit_done = true;
                label = GtClass::StraightMotion;
            }
        } else {
            label = arc ? GtClass::InverseCurve : GtClass::StraightMotion;
        }
        run.record(steer_of(-path.kappa(s_at)), v, path.point(s_at),
                   path.heading(s_at) + M_PI, label);
        rs += v * params.dt;
    }

    run.finish_power(params.dt);

    UturnRun out;
    out.series = assemble(run, params);
    out.odom = std::move(run.odom);
    out.gt.classes = std::move(run.labels);
    return out;
}

}  // namespace egokit
