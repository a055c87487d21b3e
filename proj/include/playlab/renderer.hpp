#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "playlab/camera.hpp"
#include "playlab/image.hpp"
#include "playlab/worldgen.hpp"

namespace playlab {

// Agent-to-object distance multiplier; 1.0 is the far baseline, 0.7 "closer".
struct DistanceFactor {
    float factor = 1.0f;
};

struct RenderConfig {
    int width = 128;
    int height = 128;
    float vertical_fov_deg = 60.0f;
    float near_plane = 0.05f;
    float far_plane = 50.0f; // void depth clamps here
};

// One rendered observation plus everything downstream stages need: true
// eye-space depth, the gaze point, the focus distance, labels, and a
// per-pixel object-id mask (-1 where no placed object covers the pixel).
struct RetinalFrame {
    Image rgb;
    std::vector<float> depth;
    std::array<int, 2> gaze_px{0, 0};
    float focus_depth = 0.0f;
    float vertical_fov_deg = 60.0f;
    int object_label = -1;
    int background_label = -1;
    int location_label = -1;
    std::vector<int32_t> object_id;

    int width() const { return rgb.width; }
    int height() const { return rgb.height; }
};

// An object instance to draw this frame.
struct RenderPlacement {
    const TriMesh* mesh = nullptr;
    Vec3 position;
    float azimuth_deg = 0.0f;
    int object_id = 0; // written into the id channel
};

// Object world position after the closeness rescale.
Vec3 scaled_object_position(const Vec3& agent_eye, const Vec3& slot_position, float factor);

// Aims the camera at the (distance-rescaled) slot position, then applies the
// saccade offset on top. At zero offset the object centroid projects to the
// image center.
CameraPose pose_camera(const Vec3& agent_eye, const ObjectSlot& slot, float saccade_yaw_deg,
                       float saccade_pitch_deg, DistanceFactor distance,
                       const RenderConfig& cfg);

struct FrameLabels {
    int object_label = -1;
    int background_label = -1;
    int location_label = -1;
};

// Z-buffered flat-shaded rasterization of scene geometry plus placements.
// Bit-exact deterministic for identical inputs; a frame is always computed
// sequentially.
RetinalFrame render_view(const SceneGraph& scene, const std::vector<RenderPlacement>& placements,
                         const CameraPose& pose, const RenderConfig& cfg, float focus_depth,
                         const FrameLabels& labels = {});

// Frame dump for golden tests: 8-bit PPM plus raw little-endian float depth.
void dump_frame(const RetinalFrame& frame, const std::string& ppm_path,
                const std::string& depth_path);

} // namespace playlab
