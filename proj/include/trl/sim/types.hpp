#pragma once

#include <cmath>

namespace trl::sim {

inline constexpr double kPi = 3.14159265358979323846;

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
    double norm_sq() const { return x * x + y * y; }
};

// Heading convention: psi = 0 points along +y and increases clockwise, so the
// world velocity is (v sin psi, v cos psi).
struct VehicleState {
    double x = 0.0;       // m
    double y = 0.0;       // m
    double v = 0.0;       // m/s, forward speed, never negative
    double psi = 0.0;     // rad, in (-pi, pi]
    double length = 5.0;  // m
    double width = 2.0;   // m

    Vec2 pos() const { return {x, y}; }
    double vx() const { return v * std::sin(psi); }
    double vy() const { return v * std::cos(psi); }
};

struct ControlCommand {
    double accel = 0.0;  // m/s^2
    double delta = 0.0;  // rad, front wheel angle, positive steers clockwise
};

struct LateralGains {
    double kp_heading = 2.0;  // 1/s
    double kp_lateral = 0.5;  // 1/s
};

struct LateralLimits {
    double delta_max = kPi / 3.0;  // rad
    double v_eps = 0.1;            // m/s, avoids division by a standstill speed
    double preview_time = 0.5;     // s, lane heading is sampled this far ahead
};

struct IdmParams {
    double a_max = 6.0;      // m/s^2
    double b_comf = 3.0;     // m/s^2, comfortable braking magnitude
    double time_gap = 1.5;   // s
    double d0 = 7.0;         // m, standstill gap
    double accel_exp = 4.0;  // free-road exponent
    double v_desired = 10.0; // m/s
};

}  // namespace trl::sim
