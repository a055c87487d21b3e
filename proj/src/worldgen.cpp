#include "playlab/worldgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <ostream>
#include <sstream>

#include "playlab/error.hpp"

namespace playlab {

const char* tier_name(BackgroundTier tier) {
    switch (tier) {
        case BackgroundTier::White: return "white";
        case BackgroundTier::EmptyRoom: return "empty_room";
        case BackgroundTier::Parquet: return "parquet";
        case BackgroundTier::FullRoom: return "full_room";
    }
    return "unknown";
}

BackgroundTier tier_from_name(const std::string& name) {
    if (name == "white") return BackgroundTier::White;
    if (name == "empty_room") return BackgroundTier::EmptyRoom;
    if (name == "parquet") return BackgroundTier::Parquet;
    if (name == "full_room") return BackgroundTier::FullRoom;
    throw ConfigError("unknown background tier '" + name + "'");
}

namespace {

Vec3 hsv_to_rgb(float h, float s, float v) {
    h = h - std::floor(h);
    const float i = std::floor(h * 6.0f);
    const float f = h * 6.0f - i;
    const float p = v * (1.0f - s);
    const float q = v * (1.0f - s * f);
    const float t = v * (1.0f - s * (1.0f - f));
    switch (static_cast<int>(i) % 6) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

uint32_t cell_hash(uint64_t id, int u, int v) {
    return static_cast<uint32_t>(Rng::splitmix64(
        id ^ (static_cast<uint64_t>(static_cast<uint32_t>(u)) << 32) ^ static_cast<uint32_t>(v)));
}

enum class Pattern { Checker, HStripes, VStripes, Noise, Parquet };

struct Texture {
    uint64_t id = 0;
    Pattern pattern = Pattern::Checker;
    Vec3 color_a, color_b;
    int period = 2;

    Vec3 cell(int u, int v) const {
        switch (pattern) {
            case Pattern::Checker: return ((u / period + v / period) % 2 == 0) ? color_a : color_b;
            case Pattern::HStripes: return (v / period % 2 == 0) ? color_a : color_b;
            case Pattern::VStripes: return (u / period % 2 == 0) ? color_a : color_b;
            case Pattern::Noise: {
                const float t = static_cast<float>(cell_hash(id, u, v) & 0xffff) / 65535.0f;
                return color_a * (1.0f - t) + color_b * t;
            }
            case Pattern::Parquet: {
                // Staggered planks: rows shift by half a plank length.
                const int row = v;
                const int plank = (u + (row % 2) * period / 2) / period;
                const bool alt = ((plank + row * 3) % 2) == 0;
                Vec3 base = alt ? color_a : color_b;
                const float jitter = 0.92f + 0.08f * static_cast<float>(cell_hash(id, plank, row) & 0xff) / 255.0f;
                return base * jitter;
            }
        }
        return color_a;
    }
};

Texture make_texture(Rng& rng, Pattern pattern, uint64_t id) {
    Texture tex;
    tex.id = id;
    tex.pattern = pattern;
    const float hue = static_cast<float>(rng.uniform());
    if (pattern == Pattern::Parquet) {
        tex.color_a = hsv_to_rgb(0.08f, 0.55f, 0.55f + 0.1f * static_cast<float>(rng.uniform()));
        tex.color_b = hsv_to_rgb(0.07f, 0.45f, 0.35f + 0.1f * static_cast<float>(rng.uniform()));
        tex.period = 4;
    } else {
        tex.color_a = hsv_to_rgb(hue, 0.25f + 0.35f * static_cast<float>(rng.uniform()),
                                 0.55f + 0.35f * static_cast<float>(rng.uniform()));
        tex.color_b = hsv_to_rgb(hue + 0.35f + 0.3f * static_cast<float>(rng.uniform()),
                                 0.25f + 0.35f * static_cast<float>(rng.uniform()),
                                 0.3f + 0.3f * static_cast<float>(rng.uniform()));
        tex.period = 2 + static_cast<int>(rng.uniform_int(3));
    }
    return tex;
}

constexpr int kWallCellsU = 16;
constexpr int kWallCellsV = 6;
constexpr int kFloorCells = 32;

void add_room(SceneGraph& scene, const Vec3& center, BackgroundTier tier, Rng& rng) {
    if (tier == BackgroundTier::White) return; // white tier is pure void

    const float x0 = center.x - kRoomHalfSize, x1 = center.x + kRoomHalfSize;
    const float z0 = center.z - kRoomHalfSize, z1 = center.z + kRoomHalfSize;

    // Floor.
    if (tier >= BackgroundTier::Parquet) {
        Texture floor_tex = make_texture(rng, Pattern::Parquet, rng.next_u64());
        scene.texture_ids.push_back(floor_tex.id);
        scene.static_geometry.append(make_grid_floor(
            x0, z0, x1, z1, center.y, kFloorCells, kFloorCells,
            [&](int u, int v) { return floor_tex.cell(u, v); }));
    } else {
        scene.static_geometry.append(make_grid_floor(
            x0, z0, x1, z1, center.y, 1, 1, [](int, int) { return Vec3{0.55f, 0.55f, 0.55f}; }));
    }

    // Ceiling (faces point down into the room; shading is two-sided anyway).
    scene.static_geometry.append(make_grid_floor(
        x0, z0, x1, z1, center.y + kRoomHeight, 1, 1,
        [](int, int) { return Vec3{0.85f, 0.85f, 0.85f}; }));

    // Walls.
    const Vec3 corners[4] = {{x0, center.y, z0}, {x1, center.y, z0}, {x1, center.y, z1}, {x0, center.y, z1}};
    for (int w = 0; w < 4; ++w) {
        const Vec3 origin = corners[w];
        const Vec3 along = corners[(w + 1) % 4] - corners[w];
        if (tier == BackgroundTier::FullRoom) {
            const Pattern patterns[4] = {Pattern::Checker, Pattern::HStripes, Pattern::VStripes,
                                         Pattern::Noise};
            Texture wall_tex = make_texture(rng, patterns[rng.uniform_int(4)], rng.next_u64());
            scene.texture_ids.push_back(wall_tex.id);
            scene.static_geometry.append(make_grid_wall(
                origin, along, kRoomHeight, kWallCellsU, kWallCellsV,
                [&](int u, int v) { return wall_tex.cell(u, v); }));
        } else {
            scene.static_geometry.append(make_grid_wall(
                origin, along, kRoomHeight, 1, 1,
                [](int, int) { return Vec3{0.75f, 0.75f, 0.75f}; }));
        }
    }

    // Furniture-like clutter, FullRoom only.
    if (tier == BackgroundTier::FullRoom) {
        const int pieces = 3 + static_cast<int>(rng.uniform_int(4));
        for (int i = 0; i < pieces; ++i) {
            const float angle = static_cast<float>(rng.uniform(0.0, 2.0 * M_PI));
            const float radius = static_cast<float>(rng.uniform(2.9, 3.6));
            const float hw = static_cast<float>(rng.uniform(0.2, 0.45));
            const float hh = static_cast<float>(rng.uniform(0.3, 0.8));
            const Vec3 albedo = hsv_to_rgb(static_cast<float>(rng.uniform()),
                                           0.35f + 0.45f * static_cast<float>(rng.uniform()),
                                           0.35f + 0.45f * static_cast<float>(rng.uniform()));
            TriMesh piece = rng.uniform() < 0.5 ? make_box({hw, hh, hw}, albedo)
                                                : make_cylinder(hw, hh, albedo, 10);
            piece.translate({center.x + radius * std::sin(angle), center.y + hh,
                             center.z + radius * std::cos(angle)});
            scene.texture_ids.push_back(rng.next_u64());
            scene.static_geometry.append(piece);
        }
    }
}

struct PrimitiveSpec {
    int type = 0; // 0 sphere, 1 box, 2 cylinder, 3 cone
    float scale = 0.0f;
    float elongation = 1.0f;
    Vec3 offset;
};

std::array<float, 8> descriptor_from(const std::vector<PrimitiveSpec>& prims) {
    std::array<float, 8> d{};
    std::array<int, 4> counts{};
    for (const auto& p : prims) counts[p.type]++;
    const float n = static_cast<float>(prims.size());
    for (int t = 0; t < 4; ++t) d[t] = static_cast<float>(counts[t]) / n;
    d[4] = (n - 4.0f) / 6.0f;
    float mean_scale = 0.0f, mean_elong = 0.0f;
    for (const auto& p : prims) {
        mean_scale += p.scale;
        mean_elong += p.elongation;
    }
    mean_scale /= n;
    mean_elong /= n;
    float var_scale = 0.0f;
    for (const auto& p : prims) var_scale += (p.scale - mean_scale) * (p.scale - mean_scale);
    d[5] = mean_scale / 0.5f;
    d[6] = std::sqrt(var_scale / n) / 0.25f;
    d[7] = (mean_elong - 0.5f) / 2.0f;
    return d;
}

} // namespace

float shape_distance(const ToyObject& a, const ToyObject& b) {
    float s = 0.0f;
    for (size_t i = 0; i < a.shape_descriptor.size(); ++i) {
        const float d = a.shape_descriptor[i] - b.shape_descriptor[i];
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<ToyObject> generate_object_catalog(int catalog_size, double textured_fraction,
                                               uint64_t seed) {
    if (catalog_size < 2) throw ConfigError("generate_object_catalog: catalog_size must be >= 2");
    if (textured_fraction < 0.0 || textured_fraction > 1.0)
        throw ConfigError("generate_object_catalog: textured_fraction must be in [0,1]");

    Rng rng = Rng(seed).child("catalog");
    const int n_textured =
        static_cast<int>(std::lround(textured_fraction * static_cast<double>(catalog_size)));

    std::vector<ToyObject> catalog;
    std::vector<std::vector<PrimitiveSpec>> all_specs;
    catalog.reserve(static_cast<size_t>(catalog_size));

    for (int cls = 0; cls < catalog_size; ++cls) {
        ToyObject toy;
        toy.class_id = cls;
        toy.textured = cls < n_textured;

        std::vector<PrimitiveSpec> prims;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            prims.clear();
            const int n_prims = 4 + static_cast<int>(rng.uniform_int(7)); // 4..10
            for (int i = 0; i < n_prims; ++i) {
                PrimitiveSpec p;
                p.type = static_cast<int>(rng.uniform_int(4));
                p.scale = static_cast<float>(rng.uniform(0.1, 0.5));
                p.elongation = static_cast<float>(rng.uniform(0.5, 2.5));
                if (i == 0) {
                    p.scale = static_cast<float>(rng.uniform(0.3, 0.5)); // body
                    p.offset = {0.0f, 0.0f, 0.0f};
                } else {
                    const float theta = static_cast<float>(rng.uniform(0.0, 2.0 * M_PI));
                    const float phi = static_cast<float>(std::acos(rng.uniform(-1.0, 1.0)));
                    const float r = prims[0].scale * 0.9f;
                    p.offset = {r * std::sin(phi) * std::cos(theta), r * std::cos(phi),
                                r * std::sin(phi) * std::sin(theta)};
                }
                prims.push_back(p);
            }
            toy.shape_descriptor = descriptor_from(prims);
            bool distinct = true;
            for (const auto& other : catalog)
                if (shape_distance(toy, other) < kShapeDistinctThreshold) {
                    distinct = false;
                    break;
                }
            if (distinct) break;
            if (attempt == 999)
                throw StateError("generate_object_catalog: could not find a distinct shape");
        }

        // Palette: untextured toys use one albedo for every face.
        const Vec3 base = hsv_to_rgb(static_cast<float>(rng.uniform()),
                                     0.55f + 0.35f * static_cast<float>(rng.uniform()),
                                     0.5f + 0.4f * static_cast<float>(rng.uniform()));
        const Vec3 accent = hsv_to_rgb(static_cast<float>(rng.uniform()),
                                       0.55f + 0.35f * static_cast<float>(rng.uniform()),
                                       0.5f + 0.4f * static_cast<float>(rng.uniform()));

        toy.primitive_count = static_cast<int>(prims.size());
        toy.primitive_type_counts = {};
        for (size_t i = 0; i < prims.size(); ++i) {
            const auto& p = prims[i];
            toy.primitive_type_counts[p.type]++;
            const Vec3 color = (toy.textured && i % 2 == 1) ? accent : base;
            TriMesh prim;
            switch (p.type) {
                case 0: prim = make_sphere(p.scale, color); break;
                case 1: prim = make_box({p.scale * 0.8f, p.scale * 0.8f * p.elongation, p.scale * 0.8f}, color); break;
                case 2: prim = make_cylinder(p.scale * 0.7f, p.scale * 0.7f * p.elongation, color); break;
                default: prim = make_cone(p.scale * 0.8f, p.scale * 0.8f * p.elongation, color); break;
            }
            if (toy.textured && p.type == 0) {
                // Banded recolor across sphere rings so texture survives any pose.
                for (size_t f = 0; f < prim.face_albedo.size(); ++f)
                    if ((f / 12) % 2 == 1) prim.face_albedo[f] = accent;
            }
            prim.translate(p.offset);
            toy.mesh.append(prim);
        }

        // Recenter and normalize to the standard toy size.
        const Vec3 c = toy.mesh.centroid_bounds();
        toy.mesh.translate({-c.x, -c.y, -c.z});
        const float r = toy.mesh.bounding_radius();
        if (r > 0.0f) {
            const float s = kToyRadius / r;
            toy.mesh.transform([s](const Vec3& v) { return v * s; });
        }
        all_specs.push_back(prims);
        catalog.push_back(std::move(toy));
    }
    return catalog;
}

SceneGraph build_house(int n_locations, BackgroundTier tier,
                       const std::vector<int>& slots_per_location, uint64_t seed) {
    if (n_locations < 1) throw ConfigError("build_house: n_locations must be >= 1");
    if (static_cast<int>(slots_per_location.size()) != n_locations)
        throw ConfigError("build_house: slots_per_location length must equal n_locations");
    for (const int s : slots_per_location)
        if (s < 2 || s > 6)
            throw ConfigError("build_house: slot count " + std::to_string(s) +
                              " outside [2, 6]");

    SceneGraph scene;
    scene.tier = tier;
    scene.seed = seed;
    scene.void_color = tier == BackgroundTier::White ? Vec3{1.0f, 1.0f, 1.0f}
                                                     : Vec3{0.02f, 0.02f, 0.02f};
    Rng rng = Rng(seed).child("house");

    int background_counter = 0;
    for (int loc = 0; loc < n_locations; ++loc) {
        PlayLocation location;
        location.id = loc;
        location.center = {kLocationSpacing * static_cast<float>(loc), 0.0f, 0.0f};

        const int n_slots = slots_per_location[static_cast<size_t>(loc)];
        const float base_angle = static_cast<float>(rng.uniform(0.0, 360.0));
        for (int k = 0; k < n_slots; ++k) {
            // Equal angular spacing keeps every pair of slots out of one view.
            const float a = (base_angle + 360.0f * static_cast<float>(k) / static_cast<float>(n_slots)) * kDegToRad;
            ObjectSlot slot;
            slot.position = {location.center.x + kSlotRadius * std::sin(a),
                             location.center.y + kSlotHeight,
                             location.center.z + kSlotRadius * std::cos(a)};
            slot.facing = normalized(Vec3{location.center.x, location.center.y + kAgentEyeHeight,
                                          location.center.z} -
                                     slot.position);
            slot.background_id = background_counter++;
            location.slots.push_back(slot);
        }
        add_room(scene, location.center, tier, rng);
        scene.locations.push_back(std::move(location));
    }
    scene.total_background_count = background_counter;
    return scene;
}

PlaySample sample_play_location(const SceneGraph& scene, const std::vector<ToyObject>& catalog,
                                Rng& rng) {
    if (scene.locations.empty()) throw StateError("sample_play_location: scene has no locations");
    size_t max_slots = 0;
    for (const auto& loc : scene.locations) max_slots = std::max(max_slots, loc.slots.size());
    if (catalog.size() < max_slots)
        throw ConfigError("sample_play_location: catalog smaller than the largest slot count");

    PlaySample sample;
    sample.location_index = static_cast<int>(rng.uniform_int(scene.locations.size()));
    const auto& loc = scene.locations[static_cast<size_t>(sample.location_index)];

    // Partial Fisher-Yates: objects drawn without replacement.
    std::vector<int> indices(catalog.size());
    std::iota(indices.begin(), indices.end(), 0);
    for (size_t k = 0; k < loc.slots.size(); ++k) {
        const size_t j = k + rng.uniform_int(indices.size() - k);
        std::swap(indices[k], indices[j]);
        sample.placements.push_back({indices[k], static_cast<int>(k), 0.0f});
    }
    sample.initial_slot = static_cast<int>(rng.uniform_int(loc.slots.size()));
    return sample;
}

namespace {

uint64_t hash_bytes(uint64_t h, const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t geometry_checksum(const TriMesh& mesh) {
    uint64_t h = 1469598103934665603ull;
    h = hash_bytes(h, mesh.vertices.data(), mesh.vertices.size() * sizeof(Vec3));
    h = hash_bytes(h, mesh.faces.data(), mesh.faces.size() * sizeof(mesh.faces[0]));
    h = hash_bytes(h, mesh.face_albedo.data(), mesh.face_albedo.size() * sizeof(Vec3));
    return h;
}

void print_float(std::ostream& out, float v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
    out << buf;
}

} // namespace

void serialize_scene(const SceneGraph& scene, std::ostream& out) {
    out << "[scene]\n";
    out << "format_version = 1\n";
    out << "seed = " << scene.seed << "\n";
    out << "tier = " << tier_name(scene.tier) << "\n";
    out << "locations = " << scene.locations.size() << "\n";
    out << "total_backgrounds = " << scene.total_background_count << "\n";
    out << "geometry_vertices = " << scene.static_geometry.vertices.size() << "\n";
    out << "geometry_faces = " << scene.static_geometry.face_count() << "\n";
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(geometry_checksum(scene.static_geometry)));
    out << "geometry_checksum = " << hex << "\n";
    for (const auto& loc : scene.locations) {
        out << "\n[location " << loc.id << "]\n";
        out << "center = ";
        print_float(out, loc.center.x); out << " ";
        print_float(out, loc.center.y); out << " ";
        print_float(out, loc.center.z); out << "\n";
        out << "slots = " << loc.slots.size() << "\n";
        for (size_t k = 0; k < loc.slots.size(); ++k) {
            const auto& s = loc.slots[k];
            out << "slot_" << k << " = ";
            print_float(out, s.position.x); out << " ";
            print_float(out, s.position.y); out << " ";
            print_float(out, s.position.z); out << " ";
            print_float(out, s.facing.x); out << " ";
            print_float(out, s.facing.y); out << " ";
            print_float(out, s.facing.z); out << " ";
            out << s.background_id << "\n";
        }
    }
    out << "\n[textures]\n";
    out << "count = " << scene.texture_ids.size() << "\n";
    for (size_t i = 0; i < scene.texture_ids.size(); ++i) {
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(scene.texture_ids[i]));
        out << "texture_" << i << " = " << hex << "\n";
    }
}

std::string serialize_scene(const SceneGraph& scene) {
    std::ostringstream out;
    serialize_scene(scene, out);
    return out.str();
}

uint64_t scene_checksum(const SceneGraph& scene) {
    const std::string text = serialize_scene(scene);
    return Rng::hash_str(text);
}

} // namespace playlab
