#include "playlab/renderer.hpp"

#include <algorithm>
#include <cmath>

#include "playlab/error.hpp"

namespace playlab {

namespace {

constexpr Vec3 kLightDir{0.35f, -0.85f, 0.4f}; // normalized at use
constexpr float kAmbient = 0.35f;
constexpr float kDiffuse = 0.65f;

struct RasterTarget {
    int width, height;
    std::vector<float>* depth;
    Image* rgb;
    std::vector<int32_t>* ids;
};

struct CameraFrame {
    CameraBasis basis;
    Vec3 position;
    float tan_half_h, tan_half_v;
    int width, height;
    float near_plane, far_plane;

    Vec3 to_camera(const Vec3& world) const {
        const Vec3 d = world - position;
        return {dot(d, basis.right), dot(d, basis.up), dot(d, basis.forward)};
    }
};

struct ScreenVertex {
    float x, y, inv_z;
};

ScreenVertex to_screen(const CameraFrame& cam, const Vec3& c) {
    const float inv_z = 1.0f / c.z;
    return {(c.x * inv_z / cam.tan_half_h + 1.0f) * 0.5f * static_cast<float>(cam.width),
            (1.0f - c.y * inv_z / cam.tan_half_v) * 0.5f * static_cast<float>(cam.height), inv_z};
}

void raster_triangle(const RasterTarget& target, const ScreenVertex& a, const ScreenVertex& b,
                     const ScreenVertex& c, const Vec3& color, int32_t id, float far_plane) {
    const float area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (std::fabs(area) < 1e-12f) return;
    const float inv_area = 1.0f / area;

    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x, b.x, c.x}))));
    const int x1 = std::min(target.width - 1, static_cast<int>(std::ceil(std::max({a.x, b.x, c.x}))));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y, b.y, c.y}))));
    const int y1 = std::min(target.height - 1, static_cast<int>(std::ceil(std::max({a.y, b.y, c.y}))));
    if (x0 > x1 || y0 > y1) return;

    for (int y = y0; y <= y1; ++y) {
        const float py = static_cast<float>(y) + 0.5f;
        for (int x = x0; x <= x1; ++x) {
            const float px = static_cast<float>(x) + 0.5f;
            // Signed barycentric coordinates; sign of `area` handles winding.
            const float w0 = ((b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x)) * inv_area;
            const float w1 = ((c.x - b.x) * (py - b.y) - (c.y - b.y) * (px - b.x)) * inv_area;
            const float w2 = 1.0f - w0 - w1;
            if (w0 < 0.0f || w1 < 0.0f || w2 < 0.0f) continue;
            // Perspective-correct depth: 1/z interpolates linearly in screen
            // space. w1 weights vertex a, w2 vertex b, w0 vertex c.
            const float inv_z = w1 * a.inv_z + w2 * b.inv_z + w0 * c.inv_z;
            if (inv_z <= 0.0f) continue;
            const float z = std::min(1.0f / inv_z, far_plane);
            const size_t px_idx = static_cast<size_t>(y) * target.width + x;
            if (z >= (*target.depth)[px_idx]) continue;
            (*target.depth)[px_idx] = z;
            target.rgb->data[px_idx * 3 + 0] = color.x;
            target.rgb->data[px_idx * 3 + 1] = color.y;
            target.rgb->data[px_idx * 3 + 2] = color.z;
            (*target.ids)[px_idx] = id;
        }
    }
}

// Clips a camera-space triangle against z >= near, then rasterizes the
// resulting fan. Room floors and walls routinely extend behind the eye.
void draw_triangle(const CameraFrame& cam, const RasterTarget& target, const Vec3& w0,
                   const Vec3& w1, const Vec3& w2, const Vec3& albedo, int32_t id) {
    const Vec3 n = cross(w1 - w0, w2 - w0);
    const float len = length(n);
    if (len <= 0.0f) return;
    // Two-sided flat shading: interiors are viewed from both orientations.
    const float lambert = std::fabs(dot(n, normalized(kLightDir))) / len;
    const Vec3 color{std::min(1.0f, albedo.x * (kAmbient + kDiffuse * lambert)),
                     std::min(1.0f, albedo.y * (kAmbient + kDiffuse * lambert)),
                     std::min(1.0f, albedo.z * (kAmbient + kDiffuse * lambert))};

    Vec3 cam_pts[3] = {cam.to_camera(w0), cam.to_camera(w1), cam.to_camera(w2)};

    Vec3 clipped[4];
    int n_clipped = 0;
    for (int i = 0; i < 3; ++i) {
        const Vec3& cur = cam_pts[i];
        const Vec3& nxt = cam_pts[(i + 1) % 3];
        const bool cur_in = cur.z >= cam.near_plane;
        const bool nxt_in = nxt.z >= cam.near_plane;
        if (cur_in) clipped[n_clipped++] = cur;
        if (cur_in != nxt_in) {
            const float t = (cam.near_plane - cur.z) / (nxt.z - cur.z);
            clipped[n_clipped++] = cur + (nxt - cur) * t;
        }
    }
    if (n_clipped < 3) return;

    ScreenVertex sv[4];
    for (int i = 0; i < n_clipped; ++i) sv[i] = to_screen(cam, clipped[i]);
    for (int i = 1; i + 1 < n_clipped; ++i)
        raster_triangle(target, sv[0], sv[i], sv[i + 1], color, id, cam.far_plane);
}

void draw_mesh(const CameraFrame& cam, const RasterTarget& target, const TriMesh& mesh,
               int32_t id) {
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& face = mesh.faces[f];
        draw_triangle(cam, target, mesh.vertices[static_cast<size_t>(face[0])],
                      mesh.vertices[static_cast<size_t>(face[1])],
                      mesh.vertices[static_cast<size_t>(face[2])], mesh.face_albedo[f], id);
    }
}

} // namespace

Vec3 scaled_object_position(const Vec3& agent_eye, const Vec3& slot_position, float factor) {
    return agent_eye + (slot_position - agent_eye) * factor;
}

CameraPose pose_camera(const Vec3& agent_eye, const ObjectSlot& slot, float saccade_yaw_deg,
                       float saccade_pitch_deg, DistanceFactor distance,
                       const RenderConfig& cfg) {
    if (distance.factor <= 0.0f || distance.factor > 1.5f)
        throw ConfigError("pose_camera: distance factor outside (0, 1.5]");
    const Vec3 target = scaled_object_position(agent_eye, slot.position, distance.factor);
    const Vec3 d = target - agent_eye;
    const float dist = length(d);
    if (dist < 1e-5f) throw StateError("pose_camera: agent coincides with the object");
    if (dist > cfg.far_plane) throw StateError("pose_camera: object beyond the far plane");

    CameraPose pose;
    pose.position = agent_eye;
    pose.yaw_deg = std::atan2(d.x, d.z) * kRadToDeg + saccade_yaw_deg;
    pose.pitch_deg =
        std::atan2(d.y, std::sqrt(d.x * d.x + d.z * d.z)) * kRadToDeg + saccade_pitch_deg;
    pose.pitch_deg = std::clamp(pose.pitch_deg, -89.0f, 89.0f);
    pose.vertical_fov_deg = cfg.vertical_fov_deg;
    pose.width = cfg.width;
    pose.height = cfg.height;
    return pose;
}

RetinalFrame render_view(const SceneGraph& scene, const std::vector<RenderPlacement>& placements,
                         const CameraPose& pose, const RenderConfig& cfg, float focus_depth,
                         const FrameLabels& labels) {
    RetinalFrame frame;
    frame.rgb = Image(pose.width, pose.height, 3);
    frame.depth.assign(static_cast<size_t>(pose.width) * pose.height, cfg.far_plane);
    frame.object_id.assign(static_cast<size_t>(pose.width) * pose.height, -1);
    frame.gaze_px = {pose.width / 2, pose.height / 2};
    frame.focus_depth = focus_depth;
    frame.vertical_fov_deg = pose.vertical_fov_deg;
    frame.object_label = labels.object_label;
    frame.background_label = labels.background_label;
    frame.location_label = labels.location_label;

    for (size_t i = 0; i < frame.rgb.pixel_count(); ++i) {
        frame.rgb.data[i * 3 + 0] = scene.void_color.x;
        frame.rgb.data[i * 3 + 1] = scene.void_color.y;
        frame.rgb.data[i * 3 + 2] = scene.void_color.z;
    }

    CameraFrame cam;
    cam.basis = camera_basis(pose);
    cam.position = pose.position;
    cam.tan_half_v = std::tan(0.5f * pose.vertical_fov_deg * kDegToRad);
    cam.tan_half_h = cam.tan_half_v * static_cast<float>(pose.width) / static_cast<float>(pose.height);
    cam.width = pose.width;
    cam.height = pose.height;
    cam.near_plane = cfg.near_plane;
    cam.far_plane = cfg.far_plane;

    RasterTarget target{pose.width, pose.height, &frame.depth, &frame.rgb, &frame.object_id};

    draw_mesh(cam, target, scene.static_geometry, -1);

    TriMesh instance;
    for (const auto& placement : placements) {
        if (placement.mesh == nullptr) throw InputError("render_view: placement without mesh");
        instance = *placement.mesh;
        instance.rotate_y(placement.azimuth_deg);
        instance.translate(placement.position);
        draw_mesh(cam, target, instance, placement.object_id);
    }
    return frame;
}

void dump_frame(const RetinalFrame& frame, const std::string& ppm_path,
                const std::string& depth_path) {
    write_ppm(ppm_path, frame.rgb);
    write_depth_raw(depth_path, frame.depth);
}

} // namespace playlab
