// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_SCENE_H
#define EYEVOL_SCENE_H

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eyevol/bvh.h"
#include "eyevol/envmap.h"
#include "eyevol/eye_model.h"
#include "eyevol/field.h"
#include "eyevol/gaze.h"
#include "eyevol/lighting.h"
#include "eyevol/render.h"
#include "eyevol/warp.h"

namespace eyevol {

// Declarative scene description (JSON, versioned; asset paths relative to the
// config file).
struct SceneConfig {
    struct Frame {
        int id = 0;
        Rigid6 pose;
        Vec3 head_rotation{0, 0, 0};  // axis-angle
        std::optional<Vec3> light_direction;
        double light_distance = 1000.0;
    };
    struct WarpSpec {
        std::string type = "identity";  // identity | rigid | lattice
        std::map<int, Rigid6> rigid_frames;
        std::string path;  // lattice
    };
    struct FieldSpec {
        std::string type = "voxel";  // voxel | analytic
        std::string path;
        std::string name;
    };
    struct MovingLightSpec {
        std::string coeffs_path;
        double ref_distance = 1000.0;
    };
    struct CameraSpec {
        std::string id;
        Camera camera;
    };

    int version = 1;
    EyeShapeParams shape;
    std::string vertex_offsets_path;
    Rigid6 global_pose;
    std::vector<Frame> frames;
    WarpSpec warp;
    FieldSpec field;
    std::string env_path;
    double env_scale = 1.0;
    int sh_order = kSpecularOrder;
    std::optional<MovingLightSpec> moving_light;
    std::vector<CameraSpec> cameras;
    SamplingConfig sampling;
    uint64_t seed = 1;
    bool sclera_ior_zero = false;
    bool shadow_branch_enabled = true;
    double ior = kCorneaIor;
    double clip_half_width = 100.0;
    Vec3 interior_offset = kDefaultInteriorOffset;

    void validate() const;

    static SceneConfig parse(const std::string& json_text);
    std::string serialize() const;

    static SceneConfig load(const std::string& path);
    void save(const std::string& path) const;
};

// A posed frame ready to render (owns the posed mesh and its BVH).
struct FrameInstance {
    std::unique_ptr<TriMesh> mesh;
    std::unique_ptr<Bvh> bvh;
    FrameGeometry geom;
};

// Config plus materialized assets.
class Scene {
public:
    static Scene load(const std::string& config_path);

    const SceneConfig& config() const { return config_; }
    RenderConfig render_config() const;

    const SceneConfig::Frame& frame(int id) const;
    EyePose pose_for_frame(int id) const;  // global o per-frame
    std::map<int, EyePose> all_poses() const;

    LightingContext lighting_for_frame(int id) const;
    // Lighting with a replacement environment (and optional light override).
    LightingContext lighting_with_env(std::shared_ptr<const EnvMap> env, int frame_id,
                                      std::optional<MovingLight> moving_override) const;

    FrameInstance instantiate_frame(int id) const;
    // Gaze-interpolated instance; also reports the blend and pose used.
    FrameInstance instantiate_gaze(const Vec3& target, GazeBlend* blend_out = nullptr,
                                   EyePose* pose_out = nullptr) const;

    const Camera& camera(const std::string& id) const;
    const TriMesh& canonical_mesh() const { return canonical_mesh_; }
    const GazeSphere& gaze_sphere() const;
    const WarpField& warp() const { return *warp_; }
    const RadianceField& field() const { return *field_; }
    std::shared_ptr<const EnvMap> env() const { return env_; }
    const ShCoefficients& env_coeffs() const { return env_coeffs_; }
    std::optional<MovingLight> moving_light_for_frame(int id) const;

private:
    SceneConfig config_;
    TriMesh canonical_mesh_;
    std::shared_ptr<WarpField> warp_;
    std::shared_ptr<RadianceField> field_;
    std::shared_ptr<EnvMap> env_;
    ShCoefficients env_coeffs_{kSpecularOrder, 3};
    std::optional<ShCoefficients> light_coeffs_;
    double light_ref_distance_ = 1000.0;
    mutable std::optional<GazeSphere> gaze_sphere_;

    FrameInstance instantiate(const EyePose& pose,
                              std::function<Vec3(const Vec3&)> periocular) const;
};

}  // namespace eyevol

#endif
