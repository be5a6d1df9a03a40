#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace schex {

// Base class for hard failures. Pipeline-level findings that need human
// review (odd groups, pin collisions, ...) are data, not exceptions; see
// resolve.hpp and pipeline.hpp.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

class AnnotationConflict : public Error {
public:
    explicit AnnotationConflict(const std::string& msg) : Error(msg) {}
};

class RenderGiveUp : public Error {
public:
    explicit RenderGiveUp(const std::string& msg) : Error(msg) {}
};

// Image-space pixel coordinate. row grows downward, col grows rightward.
struct PixelCoord {
    int row = 0;
    int col = 0;

    auto operator<=>(const PixelCoord&) const = default;
};

enum class Connectivity { Four = 4, Eight = 8 };

// Ink traversal connectivity. 8-connectivity so wires that meet boxes or
// each other diagonally after binarization still count as touching.
inline constexpr Connectivity kDefaultConnectivity = Connectivity::Eight;

// Ink = sample < threshold (dark strokes on light paper).
inline constexpr int kDefaultThreshold = 128;

// Window size used to localize wire crossings; tunable per run.
inline constexpr int kDefaultKernel = 5;

// Manhattan radius of the local window used to estimate the direction a
// wire leaves a component or a blocked intersection.
inline constexpr int kContactWindowRadius = 5;

// Two intersection arms closer than this in angle cannot be paired
// reliably; the group escalates to ArmAmbiguity.
inline constexpr double kArmAngleMinSepDeg = 15.0;

// Angle measured counterclockwise from +x with screen-up = 90 degrees,
// i.e. the usual math convention applied to image coordinates where row
// grows downward.
inline double angle_from_delta(double dcol, double drow) {
    double deg = std::atan2(-drow, dcol) * 180.0 / 3.14159265358979323846;
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg -= 360.0;
    return deg;
}

inline double normalize_deg(double deg) {
    deg = std::fmod(deg, 360.0);
    if (deg < 0.0) deg += 360.0;
    return deg;
}

// Circular distance between two angles, in [0, 180].
inline double angle_distance_deg(double a, double b) {
    double d = std::fabs(normalize_deg(a) - normalize_deg(b));
    return d > 180.0 ? 360.0 - d : d;
}

}  // namespace schex
