#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "playlab/mesh.hpp"
#include "playlab/rng.hpp"

namespace playlab {

// Background complexity ladder, ordered by feature count.
enum class BackgroundTier { White = 0, EmptyRoom = 1, Parquet = 2, FullRoom = 3 };

const char* tier_name(BackgroundTier tier);
BackgroundTier tier_from_name(const std::string& name);

struct ObjectSlot {
    Vec3 position;
    Vec3 facing;       // unit vector the placed object faces (toward the agent)
    int background_id; // globally unique across the scene
};

struct PlayLocation {
    int id = 0;
    Vec3 center; // floor point; the agent's eye sits above this
    std::vector<ObjectSlot> slots;
};

struct SceneGraph {
    BackgroundTier tier = BackgroundTier::White;
    std::vector<PlayLocation> locations;
    TriMesh static_geometry;           // rooms and clutter for all locations
    std::vector<uint64_t> texture_ids; // identity of every generated surface pattern
    int total_background_count = 0;
    uint64_t seed = 0;
    Vec3 void_color{1.0f, 1.0f, 1.0f}; // pixels that hit no geometry
};

struct ToyObject {
    int class_id = 0;
    bool textured = false;
    TriMesh mesh; // assembled primitives, recentered, bounding radius kToyRadius
    float azimuth = 0.0f;
    int primitive_count = 0;
    std::array<int, 4> primitive_type_counts{}; // sphere, box, cylinder, cone
    std::array<float, 8> shape_descriptor{};    // normalized counts + proportions
};

inline constexpr float kAgentEyeHeight = 0.5f;  // meters above the location center
inline constexpr float kSlotRadius = 2.0f;      // baseline agent-to-object distance
inline constexpr float kSlotHeight = 0.5f;      // toy centroid height
inline constexpr float kToyRadius = 0.25f;      // toy bounding radius
inline constexpr float kRoomHalfSize = 4.0f;
inline constexpr float kRoomHeight = 3.0f;
inline constexpr float kLocationSpacing = 20.0f;
inline constexpr float kShapeDistinctThreshold = 0.15f;

// L2 distance between shape descriptors; classes must exceed the threshold.
float shape_distance(const ToyObject& a, const ToyObject& b);

// Builds `catalog_size` pairwise-distinct toys; round(textured_fraction * n)
// of them carry a multi-color face pattern, the rest a single uniform albedo.
std::vector<ToyObject> generate_object_catalog(int catalog_size, double textured_fraction,
                                               uint64_t seed);

// Builds a house of `n_locations` rooms of the requested tier. Every slot
// gets a globally unique background id; textures and clutter depend on seed.
SceneGraph build_house(int n_locations, BackgroundTier tier,
                       const std::vector<int>& slots_per_location, uint64_t seed);

struct Placement {
    int catalog_index = 0; // index into the catalog passed at sampling time
    int slot = 0;
    float azimuth = 0.0f; // current orientation, degrees
};

struct PlaySample {
    int location_index = 0;
    std::vector<Placement> placements; // one per slot, classes never repeat
    int initial_slot = 0;
};

PlaySample sample_play_location(const SceneGraph& scene, const std::vector<ToyObject>& catalog,
                                Rng& rng);

// Versioned key = value section dump; deterministic per (config, seed).
void serialize_scene(const SceneGraph& scene, std::ostream& out);
std::string serialize_scene(const SceneGraph& scene);
uint64_t scene_checksum(const SceneGraph& scene);

} // namespace playlab
