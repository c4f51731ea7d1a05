#pragma once

#include <array>
#include <cstdint>

#include "egokit/eval.hpp"
#include "egokit/signal.hpp"

namespace egokit {

// Synthetic stand-in for the vehicle dataset: rectangular perimeter laps for
// training and a U-turn run with per-tick ground truth for testing. Channels
// are S (steering angle, rad), V (rotor velocity, m/s), P (power, W).
struct ScenarioParams {
    double half_x = 10.0;     // rectangle half-extents [m]
    double half_y = 6.0;
    double speed = 2.0;       // nominal speed [m/s]
    double corner_rate = 0.8; // corner turn rate [rad/s]
    double dt = 0.1;          // [s]
    int laps = 10;
    // Noise std per channel as a fraction of that channel's noiseless
    // dynamic range.
    std::array<double, 3> noise_frac = {0.02, 0.02, 0.02};
    double obstacle_frac = 0.6;   // fraction along the first straight
    std::uint64_t seed = 0;

    void validate() const;
};

struct Odometry {
    std::vector<double> x, y, heading;
};

struct PerimeterRun {
    SensorSeries series;
    Odometry odom;
};

struct UturnRun {
    SensorSeries series;
    Odometry odom;
    GroundTruth gt;
};

// Anticlockwise rectangular laps with rounded corners: steering is exactly
// zero on straights (before noise) and peaks on the corner arcs, velocity
// dips at corners, power is a smooth function of v, |dv/dt| and |steer|*v.
PerimeterRun gen_perimeter(const ScenarioParams& params);

// Perimeter motion until the obstacle point, a tight 180-degree turn, then
// one full lap in the reverse direction where every corner becomes an
// inverse curve. Ground truth emitted per tick.
UturnRun gen_uturn(const ScenarioParams& params);

}  // namespace egokit
