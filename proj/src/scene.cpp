// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/scene.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace eyevol {

using json = nlohmann::json;
namespace fs = std::filesystem;

// -----------------------------------------------------------------------------
// JSON (de)serialization
// -----------------------------------------------------------------------------

static json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

static Vec3 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw std::runtime_error("config: expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

static json rigid_to_json(const Rigid6& r) {
    return {{"rotation", vec_to_json(r.rotation)}, {"translation", vec_to_json(r.translation)}};
}

static Rigid6 rigid_from_json(const json& j) {
    Rigid6 r;
    if (j.contains("rotation")) r.rotation = vec_from_json(j["rotation"]);
    if (j.contains("translation")) r.translation = vec_from_json(j["translation"]);
    return r;
}

SceneConfig SceneConfig::parse(const std::string& text) {
    json j = json::parse(text);
    SceneConfig cfg;
    cfg.version = j.value("version", 1);
    if (cfg.version != 1) throw std::runtime_error("config: unsupported version");

    if (j.contains("eye")) {
        const json& eye = j["eye"];
        if (eye.contains("shape")) {
            const json& s = eye["shape"];
            cfg.shape.b = s.value("b", cfg.shape.b);
            cfg.shape.c = s.value("c", cfg.shape.c);
            cfg.shape.d = s.value("d", cfg.shape.d);
            cfg.shape.theta_mod = s.value("theta_mod", cfg.shape.theta_mod);
            cfg.shape.theta_offset = s.value("theta_offset", cfg.shape.theta_offset);
            cfg.vertex_offsets_path = s.value("vertex_offsets", "");
        }
        if (eye.contains("global_pose")) cfg.global_pose = rigid_from_json(eye["global_pose"]);
    }
    for (const json& f : j.value("frames", json::array())) {
        SceneConfig::Frame frame;
        frame.id = f.at("id").get<int>();
        if (f.contains("pose")) frame.pose = rigid_from_json(f["pose"]);
        if (f.contains("head_rotation")) frame.head_rotation = vec_from_json(f["head_rotation"]);
        if (f.contains("light")) {
            frame.light_direction = vec_from_json(f["light"]["direction"]);
            frame.light_distance = f["light"].value("distance", 1000.0);
        }
        cfg.frames.push_back(frame);
    }
    if (j.contains("warp")) {
        const json& w = j["warp"];
        cfg.warp.type = w.value("type", "identity");
        if (cfg.warp.type == "rigid")
            for (const json& f : w.value("frames", json::array()))
                cfg.warp.rigid_frames[f.at("id").get<int>()] = rigid_from_json(f);
        if (cfg.warp.type == "lattice") cfg.warp.path = w.at("path").get<std::string>();
    }
    if (j.contains("field")) {
        const json& f = j["field"];
        cfg.field.type = f.value("type", "voxel");
        if (cfg.field.type == "voxel") cfg.field.path = f.at("path").get<std::string>();
        if (cfg.field.type == "analytic") cfg.field.name = f.at("name").get<std::string>();
    }
    if (j.contains("environment")) {
        const json& e = j["environment"];
        cfg.env_path = e.at("path").get<std::string>();
        cfg.env_scale = e.value("scale", 1.0);
        cfg.sh_order = e.value("sh_order", kSpecularOrder);
        if (e.contains("moving_light") && !e["moving_light"].is_null()) {
            SceneConfig::MovingLightSpec ml;
            ml.coeffs_path = e["moving_light"].at("coeffs").get<std::string>();
            ml.ref_distance = e["moving_light"].value("ref_distance", 1000.0);
            cfg.moving_light = ml;
        }
    }
    for (const json& c : j.value("cameras", json::array())) {
        SceneConfig::CameraSpec spec;
        spec.id = c.at("id").get<std::string>();
        Camera& cam = spec.camera;
        cam.fx = c.at("fx").get<double>();
        cam.fy = c.at("fy").get<double>();
        cam.cx = c.at("cx").get<double>();
        cam.cy = c.at("cy").get<double>();
        cam.width = c.at("width").get<int>();
        cam.height = c.at("height").get<int>();
        const json& r = c.at("rotation");
        if (!r.is_array() || r.size() != 9)
            throw std::runtime_error("config: camera rotation must be 9 row-major values");
        for (int i = 0; i < 3; i++)
            for (int k = 0; k < 3; k++) cam.rotation(i, k) = r[3 * i + k].get<double>();
        cam.translation = vec_from_json(c.at("translation"));
        cfg.cameras.push_back(spec);
    }
    if (j.contains("sampling")) {
        const json& s = j["sampling"];
        cfg.sampling.n_coarse = s.value("coarse", 64);
        cfg.sampling.n_fine = s.value("fine", 64);
        cfg.sampling.jitter = s.value("jitter", true);
        cfg.seed = s.value("seed", uint64_t(1));
    }
    if (j.contains("flags")) {
        cfg.sclera_ior_zero = j["flags"].value("sclera_ior_zero", false);
        cfg.shadow_branch_enabled = j["flags"].value("shadow_branch_enabled", true);
    }
    cfg.ior = j.value("ior", kCorneaIor);
    cfg.clip_half_width = j.value("clip_half_width", 100.0);
    if (j.contains("interior_offset")) cfg.interior_offset = vec_from_json(j["interior_offset"]);
    return cfg;
}

std::string SceneConfig::serialize() const {
    json j;
    j["version"] = version;
    json shape_j = {{"b", shape.b},
                    {"c", shape.c},
                    {"d", shape.d},
                    {"theta_mod", shape.theta_mod},
                    {"theta_offset", shape.theta_offset}};
    if (!vertex_offsets_path.empty()) shape_j["vertex_offsets"] = vertex_offsets_path;
    j["eye"] = {{"shape", shape_j}, {"global_pose", rigid_to_json(global_pose)}};
    j["frames"] = json::array();
    for (const auto& f : frames) {
        json fj = {{"id", f.id},
                   {"pose", rigid_to_json(f.pose)},
                   {"head_rotation", vec_to_json(f.head_rotation)}};
        if (f.light_direction)
            fj["light"] = {{"direction", vec_to_json(*f.light_direction)},
                           {"distance", f.light_distance}};
        j["frames"].push_back(fj);
    }
    json warp_j = {{"type", warp.type}};
    if (warp.type == "rigid") {
        warp_j["frames"] = json::array();
        for (const auto& [id, r] : warp.rigid_frames) {
            json rj = rigid_to_json(r);
            rj["id"] = id;
            warp_j["frames"].push_back(rj);
        }
    }
    if (warp.type == "lattice") warp_j["path"] = warp.path;
    j["warp"] = warp_j;
    json field_j = {{"type", field.type}};
    if (field.type == "voxel") field_j["path"] = field.path;
    if (field.type == "analytic") field_j["name"] = field.name;
    j["field"] = field_j;
    json env_j = {{"path", env_path}, {"scale", env_scale}, {"sh_order", sh_order}};
    if (moving_light)
        env_j["moving_light"] = {{"coeffs", moving_light->coeffs_path},
                                 {"ref_distance", moving_light->ref_distance}};
    j["environment"] = env_j;
    j["cameras"] = json::array();
    for (const auto& spec : cameras) {
        const Camera& cam = spec.camera;
        json r = json::array();
        for (int i = 0; i < 3; i++)
            for (int k = 0; k < 3; k++) r.push_back(cam.rotation(i, k));
        j["cameras"].push_back({{"id", spec.id},
                                {"fx", cam.fx},
                                {"fy", cam.fy},
                                {"cx", cam.cx},
                                {"cy", cam.cy},
                                {"width", cam.width},
                                {"height", cam.height},
                                {"rotation", r},
                                {"translation", vec_to_json(cam.translation)}});
    }
    j["sampling"] = {{"coarse", sampling.n_coarse},
                     {"fine", sampling.n_fine},
                     {"jitter", sampling.jitter},
                     {"seed", seed}};
    j["flags"] = {{"sclera_ior_zero", sclera_ior_zero},
                  {"shadow_branch_enabled", shadow_branch_enabled}};
    j["ior"] = ior;
    j["clip_half_width"] = clip_half_width;
    j["interior_offset"] = vec_to_json(interior_offset);
    return j.dump(2) + "\n";
}

void SceneConfig::validate() const {
    shape.validate();
    if (frames.empty()) throw std::runtime_error("config: no frames");
    std::set<int> ids;
    for (const auto& f : frames)
        if (!ids.insert(f.id).second)
            throw std::runtime_error("config: duplicate frame id " + std::to_string(f.id));
    if (cameras.empty()) throw std::runtime_error("config: no cameras");
    for (const auto& c : cameras) c.camera.validate();
    if (env_path.empty()) throw std::runtime_error("config: no environment map");
    if (!(env_scale > 0)) throw std::runtime_error("config: env scale must be positive");
    if (sh_order < 0 || sh_order < kSpecularOrder)
        throw std::runtime_error("config: sh_order must be at least the specular order");
    if (sampling.n_coarse < 1) throw std::runtime_error("config: coarse samples must be >= 1");
    if (field.type != "voxel" && field.type != "analytic")
        throw std::runtime_error("config: unknown field type " + field.type);
    if (warp.type != "identity" && warp.type != "rigid" && warp.type != "lattice")
        throw std::runtime_error("config: unknown warp type " + warp.type);
    if (warp.type == "rigid")
        for (const auto& f : frames)
            if (!warp.rigid_frames.count(f.id))
                throw std::runtime_error("config: rigid warp missing frame " + std::to_string(f.id));
}

SceneConfig SceneConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse(text);
}

void SceneConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("config: cannot open for write " + path);
    out << serialize();
}

// -----------------------------------------------------------------------------
// Scene
// -----------------------------------------------------------------------------

Scene Scene::load(const std::string& config_path) {
    Scene scene;
    scene.config_ = SceneConfig::load(config_path);
    SceneConfig& cfg = scene.config_;
    fs::path base = fs::path(config_path).parent_path();
    auto resolve = [&base](const std::string& p) { return (base / p).string(); };

    if (!cfg.vertex_offsets_path.empty()) {
        std::ifstream in(resolve(cfg.vertex_offsets_path));
        if (!in) throw std::runtime_error("config: cannot open " + cfg.vertex_offsets_path);
        double v;
        while (in >> v) cfg.shape.vertex_offsets.push_back(v);
    }
    cfg.validate();

    scene.canonical_mesh_ = generate_mesh(cfg.shape);

    if (cfg.warp.type == "identity") {
        scene.warp_ = std::make_shared<IdentityWarp>();
    } else if (cfg.warp.type == "rigid") {
        auto rigid = std::make_shared<RigidWarp>();
        for (const auto& [id, r] : cfg.warp.rigid_frames) rigid->set_frame(id, r);
        scene.warp_ = rigid;
    } else {
        scene.warp_ = std::make_shared<LatticeWarp>(LatticeWarp::load(resolve(cfg.warp.path)));
        for (const auto& f : cfg.frames)
            if (!scene.warp_->has_frame(f.id))
                throw std::runtime_error("config: lattice warp missing frame " +
                                         std::to_string(f.id));
    }

    if (cfg.field.type == "voxel") {
        scene.field_ = std::make_shared<VoxelShField>(VoxelShField::load(resolve(cfg.field.path)));
    } else {
        scene.field_ = make_named_field(cfg.field.name);
    }

    scene.env_ = std::make_shared<EnvMap>(load_envmap(resolve(cfg.env_path)));
    scene.env_coeffs_ = project_env_to_sh(*scene.env_, cfg.sh_order);

    if (cfg.moving_light) {
        scene.light_coeffs_ = load_sh_text(resolve(cfg.moving_light->coeffs_path));
        if (scene.light_coeffs_->channels != 3 || scene.light_coeffs_->max_order != cfg.sh_order)
            throw std::runtime_error("config: moving-light coefficients must be RGB at sh_order");
        scene.light_ref_distance_ = cfg.moving_light->ref_distance;
    }
    return scene;
}

RenderConfig Scene::render_config() const {
    RenderConfig rc;
    rc.sampling = config_.sampling;
    rc.seed = config_.seed;
    rc.ior = config_.ior;
    rc.sclera_ior_zero = config_.sclera_ior_zero;
    rc.shadow_branch_enabled = config_.shadow_branch_enabled;
    rc.interior_offset = config_.interior_offset;
    rc.clip_half_width = config_.clip_half_width;
    return rc;
}

const SceneConfig::Frame& Scene::frame(int id) const {
    for (const auto& f : config_.frames)
        if (f.id == id) return f;
    throw std::runtime_error("unknown frame id " + std::to_string(id));
}

EyePose Scene::pose_for_frame(int id) const {
    EyePose pose;
    pose.global = config_.global_pose;
    pose.per_frame = frame(id).pose;
    return pose;
}

std::map<int, EyePose> Scene::all_poses() const {
    std::map<int, EyePose> poses;
    for (const auto& f : config_.frames) poses[f.id] = pose_for_frame(f.id);
    return poses;
}

std::optional<MovingLight> Scene::moving_light_for_frame(int id) const {
    const auto& f = frame(id);
    if (!light_coeffs_ || !f.light_direction) return std::nullopt;
    MovingLight ml;
    ml.coeffs_at_ref = *light_coeffs_;
    ml.ref_distance = light_ref_distance_;
    ml.direction = *f.light_direction;
    ml.distance = f.light_distance;
    return ml;
}

LightingContext Scene::lighting_for_frame(int id) const {
    const auto& f = frame(id);
    return assemble_lighting(env_, env_coeffs_, moving_light_for_frame(id),
                             rotation_from_axis_angle(f.head_rotation), config_.env_scale);
}

LightingContext Scene::lighting_with_env(std::shared_ptr<const EnvMap> env, int frame_id,
                                         std::optional<MovingLight> moving_override) const {
    const auto& f = frame(frame_id);
    return assemble_lighting(std::move(env), config_.sh_order,
                             moving_override ? moving_override : moving_light_for_frame(frame_id),
                             rotation_from_axis_angle(f.head_rotation), config_.env_scale);
}

FrameInstance Scene::instantiate(const EyePose& pose,
                                 std::function<Vec3(const Vec3&)> periocular) const {
    FrameInstance inst;
    inst.mesh = std::make_unique<TriMesh>(apply_pose(canonical_mesh_, pose));
    inst.bvh = std::make_unique<Bvh>(*inst.mesh);
    inst.geom.bvh = inst.bvh.get();
    inst.geom.field = field_.get();
    inst.geom.periocular_warp = std::move(periocular);
    inst.geom.pose = pose;
    inst.geom.eye_center = pose.apply(Vec3{0, 0, 0});
    return inst;
}

FrameInstance Scene::instantiate_frame(int id) const {
    EyePose pose = pose_for_frame(id);
    const WarpField* warp = warp_.get();
    return instantiate(pose, [warp, id](const Vec3& p) { return warp_point(*warp, id, p); });
}

const GazeSphere& Scene::gaze_sphere() const {
    if (!gaze_sphere_) gaze_sphere_ = build_gaze_sphere(all_poses());
    return *gaze_sphere_;
}

FrameInstance Scene::instantiate_gaze(const Vec3& target, GazeBlend* blend_out,
                                      EyePose* pose_out) const {
    GazeBlend blend = locate_gaze(gaze_sphere(), target);
    EyePose pose = interpolate_pose(blend, all_poses(), target);
    if (blend_out) *blend_out = blend;
    if (pose_out) *pose_out = pose;
    const WarpField* warp = warp_.get();
    return instantiate(pose,
                       [warp, blend](const Vec3& p) { return blend_warp(blend, *warp, p); });
}

const Camera& Scene::camera(const std::string& id) const {
    for (const auto& spec : config_.cameras)
        if (spec.id == id) return spec.camera;
    throw std::runtime_error("unknown camera id " + id);
}

}  // namespace eyevol
