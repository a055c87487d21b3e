#include "playlab/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace playlab {

void TriMesh::append(const TriMesh& other) {
    const int base = static_cast<int>(vertices.size());
    vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
    faces.reserve(faces.size() + other.faces.size());
    for (const auto& f : other.faces)
        faces.push_back({f[0] + base, f[1] + base, f[2] + base});
    face_albedo.insert(face_albedo.end(), other.face_albedo.begin(), other.face_albedo.end());
}

void TriMesh::transform(const std::function<Vec3(const Vec3&)>& fn) {
    for (auto& v : vertices) v = fn(v);
}

void TriMesh::translate(const Vec3& offset) {
    for (auto& v : vertices) v += offset;
}

void TriMesh::rotate_y(float degrees) {
    const float a = degrees * kDegToRad;
    const float c = std::cos(a), s = std::sin(a);
    for (auto& v : vertices)
        v = {c * v.x + s * v.z, v.y, -s * v.x + c * v.z};
}

Vec3 TriMesh::centroid_bounds() const {
    if (vertices.empty()) return {};
    Vec3 lo = vertices[0], hi = vertices[0];
    for (const auto& v : vertices) {
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
    }
    return (lo + hi) * 0.5f;
}

float TriMesh::bounding_radius() const {
    float r2 = 0.0f;
    for (const auto& v : vertices) r2 = std::max(r2, dot(v, v));
    return std::sqrt(r2);
}

TriMesh make_box(const Vec3& h, const Vec3& albedo) {
    TriMesh m;
    m.vertices = {
        {-h.x, -h.y, -h.z}, {h.x, -h.y, -h.z}, {h.x, h.y, -h.z}, {-h.x, h.y, -h.z},
        {-h.x, -h.y, h.z},  {h.x, -h.y, h.z},  {h.x, h.y, h.z},  {-h.x, h.y, h.z},
    };
    const int quads[6][4] = {
        {0, 1, 2, 3}, {5, 4, 7, 6}, {4, 0, 3, 7}, {1, 5, 6, 2}, {3, 2, 6, 7}, {4, 5, 1, 0},
    };
    for (const auto& q : quads) {
        m.faces.push_back({q[0], q[1], q[2]});
        m.faces.push_back({q[0], q[2], q[3]});
        m.face_albedo.push_back(albedo);
        m.face_albedo.push_back(albedo);
    }
    return m;
}

TriMesh make_sphere(float radius, const Vec3& albedo, int rings, int segments) {
    TriMesh m;
    // Ring vertices plus the two poles.
    for (int r = 1; r < rings; ++r) {
        const float phi = static_cast<float>(M_PI) * static_cast<float>(r) / static_cast<float>(rings);
        for (int s = 0; s < segments; ++s) {
            const float theta = 2.0f * static_cast<float>(M_PI) * static_cast<float>(s) / static_cast<float>(segments);
            m.vertices.push_back({radius * std::sin(phi) * std::cos(theta),
                                  radius * std::cos(phi),
                                  radius * std::sin(phi) * std::sin(theta)});
        }
    }
    const int top = static_cast<int>(m.vertices.size());
    m.vertices.push_back({0.0f, radius, 0.0f});
    const int bottom = top + 1;
    m.vertices.push_back({0.0f, -radius, 0.0f});

    auto ring_vertex = [&](int r, int s) { return (r - 1) * segments + (s % segments); };
    for (int s = 0; s < segments; ++s) {
        m.faces.push_back({top, ring_vertex(1, s + 1), ring_vertex(1, s)});
        m.face_albedo.push_back(albedo);
        m.faces.push_back({bottom, ring_vertex(rings - 1, s), ring_vertex(rings - 1, s + 1)});
        m.face_albedo.push_back(albedo);
    }
    for (int r = 1; r < rings - 1; ++r)
        for (int s = 0; s < segments; ++s) {
            const int a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
            const int c = ring_vertex(r + 1, s + 1), d = ring_vertex(r + 1, s);
            m.faces.push_back({a, b, c});
            m.faces.push_back({a, c, d});
            m.face_albedo.push_back(albedo);
            m.face_albedo.push_back(albedo);
        }
    return m;
}

namespace {

TriMesh make_radial(float radius_bottom, float radius_top, float half_height, const Vec3& albedo,
                    int segments) {
    TriMesh m;
    for (int s = 0; s < segments; ++s) {
        const float theta = 2.0f * static_cast<float>(M_PI) * static_cast<float>(s) / static_cast<float>(segments);
        const float c = std::cos(theta), sn = std::sin(theta);
        m.vertices.push_back({radius_bottom * c, -half_height, radius_bottom * sn});
        if (radius_top > 0.0f)
            m.vertices.push_back({radius_top * c, half_height, radius_top * sn});
    }
    const int stride = radius_top > 0.0f ? 2 : 1;
    const int apex = static_cast<int>(m.vertices.size());
    if (radius_top <= 0.0f) m.vertices.push_back({0.0f, half_height, 0.0f});
    const int bottom_center = static_cast<int>(m.vertices.size());
    m.vertices.push_back({0.0f, -half_height, 0.0f});
    const int top_center = static_cast<int>(m.vertices.size());
    if (radius_top > 0.0f) m.vertices.push_back({0.0f, half_height, 0.0f});

    for (int s = 0; s < segments; ++s) {
        const int b0 = s * stride, b1 = ((s + 1) % segments) * stride;
        if (radius_top > 0.0f) {
            const int t0 = b0 + 1, t1 = b1 + 1;
            m.faces.push_back({b0, b1, t1});
            m.faces.push_back({b0, t1, t0});
            m.face_albedo.push_back(albedo);
            m.face_albedo.push_back(albedo);
            m.faces.push_back({top_center, t0, t1});
            m.face_albedo.push_back(albedo);
        } else {
            m.faces.push_back({b0, b1, apex});
            m.face_albedo.push_back(albedo);
        }
        m.faces.push_back({bottom_center, b1, b0});
        m.face_albedo.push_back(albedo);
    }
    return m;
}

} // namespace

TriMesh make_cylinder(float radius, float half_height, const Vec3& albedo, int segments) {
    return make_radial(radius, radius, half_height, albedo, segments);
}

TriMesh make_cone(float radius, float half_height, const Vec3& albedo, int segments) {
    return make_radial(radius, 0.0f, half_height, albedo, segments);
}

TriMesh make_grid_floor(float x0, float z0, float x1, float z1, float y, int nx, int nz,
                        const std::function<Vec3(int, int)>& cell_albedo) {
    TriMesh m;
    const float dx = (x1 - x0) / static_cast<float>(nx);
    const float dz = (z1 - z0) / static_cast<float>(nz);
    for (int iz = 0; iz < nz; ++iz)
        for (int ix = 0; ix < nx; ++ix) {
            const int base = static_cast<int>(m.vertices.size());
            const float ax = x0 + dx * static_cast<float>(ix);
            const float az = z0 + dz * static_cast<float>(iz);
            m.vertices.push_back({ax, y, az});
            m.vertices.push_back({ax + dx, y, az});
            m.vertices.push_back({ax + dx, y, az + dz});
            m.vertices.push_back({ax, y, az + dz});
            m.faces.push_back({base, base + 1, base + 2});
            m.faces.push_back({base, base + 2, base + 3});
            const Vec3 albedo = cell_albedo(ix, iz);
            m.face_albedo.push_back(albedo);
            m.face_albedo.push_back(albedo);
        }
    return m;
}

TriMesh make_grid_wall(const Vec3& origin, const Vec3& along, float height, int nu, int nv,
                       const std::function<Vec3(int, int)>& cell_albedo) {
    TriMesh m;
    const Vec3 du = along * (1.0f / static_cast<float>(nu));
    const Vec3 dv{0.0f, height / static_cast<float>(nv), 0.0f};
    for (int iv = 0; iv < nv; ++iv)
        for (int iu = 0; iu < nu; ++iu) {
            const int base = static_cast<int>(m.vertices.size());
            const Vec3 a = origin + du * static_cast<float>(iu) + dv * static_cast<float>(iv);
            m.vertices.push_back(a);
            m.vertices.push_back(a + du);
            m.vertices.push_back(a + du + dv);
            m.vertices.push_back(a + dv);
            m.faces.push_back({base, base + 1, base + 2});
            m.faces.push_back({base, base + 2, base + 3});
            const Vec3 albedo = cell_albedo(iu, iv);
            m.face_albedo.push_back(albedo);
            m.face_albedo.push_back(albedo);
        }
    return m;
}

} // namespace playlab
