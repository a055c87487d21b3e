#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "playlab/geometry.hpp"

namespace playlab {

// Triangle soup with flat per-face albedo. All scene and toy geometry is
// assembled from these; the renderer never interpolates vertex attributes.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<Vec3> face_albedo; // one RGB per face

    size_t face_count() const { return faces.size(); }

    void append(const TriMesh& other);
    void transform(const std::function<Vec3(const Vec3&)>& fn);
    void translate(const Vec3& offset);
    // Rotation about the +y axis through the origin, angle in degrees.
    void rotate_y(float degrees);

    Vec3 centroid_bounds() const; // center of the axis-aligned bounding box
    float bounding_radius() const; // max vertex distance from origin
};

// Primitive builders. Shapes are centered at the origin; `albedo` fills every
// face. Segment counts are chosen for desk-scale render resolutions.
TriMesh make_box(const Vec3& half_extents, const Vec3& albedo);
TriMesh make_sphere(float radius, const Vec3& albedo, int rings = 8, int segments = 12);
TriMesh make_cylinder(float radius, float half_height, const Vec3& albedo, int segments = 12);
TriMesh make_cone(float radius, float half_height, const Vec3& albedo, int segments = 12);

// Horizontal rectangle in the y = `y` plane spanning [x0,x1]x[z0,z1], split
// into nx*nz cells of two triangles each; cell albedo comes from the callback.
TriMesh make_grid_floor(float x0, float z0, float x1, float z1, float y, int nx, int nz,
                        const std::function<Vec3(int, int)>& cell_albedo);

// Vertical rectangle wall. `origin` is one bottom corner, `along` the bottom
// edge direction (length = wall width), `height` the vertical extent.
TriMesh make_grid_wall(const Vec3& origin, const Vec3& along, float height, int nu, int nv,
                       const std::function<Vec3(int, int)>& cell_albedo);

} // namespace playlab
