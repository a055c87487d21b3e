#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "playlab/geometry.hpp"

namespace playlab {

struct CameraPose {
    Vec3 position;
    float yaw_deg = 0.0f;   // 0 looks along +z, increases toward +x
    float pitch_deg = 0.0f; // positive looks up
    float vertical_fov_deg = 60.0f;
    int width = 128;
    int height = 128;
};

struct CameraBasis {
    Vec3 right, up, forward;
};

inline CameraBasis camera_basis(const CameraPose& pose) {
    const float yaw = pose.yaw_deg * kDegToRad;
    const float pitch = pose.pitch_deg * kDegToRad;
    const float cy = std::cos(yaw), sy = std::sin(yaw);
    const float cp = std::cos(pitch), sp = std::sin(pitch);
    CameraBasis basis;
    basis.forward = {cp * sy, sp, cp * cy};
    basis.right = {cy, 0.0f, -sy};
    basis.up = cross(basis.forward, basis.right);
    return basis;
}

struct ProjectedPoint {
    float px, py; // pixel coordinates, origin top-left
    float depth;  // eye-space depth along the forward axis
};

// Pinhole projection of a world point; nullopt when at or behind the eye.
inline std::optional<ProjectedPoint> project_point(const CameraPose& pose, const Vec3& world) {
    const CameraBasis basis = camera_basis(pose);
    const Vec3 d = world - pose.position;
    const float z = dot(d, basis.forward);
    if (z <= 1e-6f) return std::nullopt;
    const float tan_half_v = std::tan(0.5f * pose.vertical_fov_deg * kDegToRad);
    const float tan_half_h = tan_half_v * static_cast<float>(pose.width) / static_cast<float>(pose.height);
    const float ndc_x = dot(d, basis.right) / (z * tan_half_h);
    const float ndc_y = dot(d, basis.up) / (z * tan_half_v);
    return ProjectedPoint{(ndc_x + 1.0f) * 0.5f * static_cast<float>(pose.width),
                          (1.0f - ndc_y) * 0.5f * static_cast<float>(pose.height), z};
}

// Unit ray through a pixel center in camera space (x right, y up, z forward).
inline Vec3 pixel_ray_camera(int width, int height, float vertical_fov_deg, float px, float py) {
    const float tan_half_v = std::tan(0.5f * vertical_fov_deg * kDegToRad);
    const float tan_half_h = tan_half_v * static_cast<float>(width) / static_cast<float>(height);
    const float ndc_x = 2.0f * px / static_cast<float>(width) - 1.0f;
    const float ndc_y = 1.0f - 2.0f * py / static_cast<float>(height);
    return normalized({ndc_x * tan_half_h, ndc_y * tan_half_v, 1.0f});
}

// Angular distance in degrees between two pixel directions under the pinhole
// model; used for gaze-contingent resampling.
inline float pixel_eccentricity_deg(int width, int height, float vertical_fov_deg,
                                    float gaze_x, float gaze_y, float px, float py) {
    const Vec3 a = pixel_ray_camera(width, height, vertical_fov_deg, gaze_x, gaze_y);
    const Vec3 b = pixel_ray_camera(width, height, vertical_fov_deg, px, py);
    const float c = std::clamp(dot(a, b), -1.0f, 1.0f);
    return std::acos(c) * kRadToDeg;
}

} // namespace playlab
