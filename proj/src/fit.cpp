// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/fit.h"

#include <Eigen/Dense>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "eyevol/bvh.h"
#include "eyevol/parallel.h"
#include "eyevol/rng.h"

#include "json.hpp"

namespace eyevol {

using json = nlohmann::json;

// -----------------------------------------------------------------------------
// Losses
// -----------------------------------------------------------------------------

static double luminance(const Rgb& c) { return 0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b; }

bool pixel_masked(const Rgb& target, bool is_sclera, double luminance_threshold) {
    return is_sclera && luminance(target) > luminance_threshold;
}

double loss_image(const Image3f& rendered, const Image3f& target,
                  const std::vector<uint8_t>* sclera_mask, double luminance_threshold) {
    if (rendered.width != target.width || rendered.height != target.height)
        throw std::invalid_argument("loss_image: dimension mismatch");
    if (sclera_mask && int(sclera_mask->size()) != rendered.width * rendered.height)
        throw std::invalid_argument("loss_image: mask size mismatch");
    double sum = 0;
    int64_t used = 0;
    for (int y = 0; y < rendered.height; y++)
        for (int x = 0; x < rendered.width; x++) {
            Rgb t = target.at(x, y);
            bool is_sclera = sclera_mask && (*sclera_mask)[size_t(y) * rendered.width + x] != 0;
            if (pixel_masked(t, is_sclera, luminance_threshold)) continue;
            Rgb r = rendered.at(x, y);
            for (int ch = 0; ch < 3; ch++) {
                double d = srgb_encode(r[ch]) - srgb_encode(t[ch]);
                sum += d * d;
            }
            used++;
        }
    if (used == 0) throw std::runtime_error("loss_image: every pixel is masked");
    return sum / double(used);
}

double loss_nonneg(const std::vector<FieldSample>& samples, int n_dirs, uint64_t seed,
                   bool squared) {
    if (n_dirs < 1) throw std::invalid_argument("loss_nonneg: n_dirs must be >= 1");
    if (samples.empty()) return 0;
    Rng rng(seed);
    std::vector<ShCoefficients> bases;
    bases.reserve(n_dirs);
    for (int i = 0; i < n_dirs; i++) bases.push_back(eval_sh_basis(rng.unit_vector(), kSpecularOrder));
    double sum = 0;
    for (const auto& s : samples) {
        for (const auto& basis : bases) {
            double response = 0;
            for (size_t i = 0; i < basis.values.size(); i++)
                response += basis.values[i] * s.specular_sh.values[i];
            double neg = -std::fmin(0.0, response);
            sum += squared ? neg * neg : neg;
        }
    }
    return sum / (double(samples.size()) * n_dirs);
}

double loss_spec(const std::vector<FieldSample>& samples) {
    if (samples.empty()) return 0;
    double sum = 0;
    for (const auto& s : samples) {
        double c2 = 0;
        for (double v : s.specular_sh.values) c2 += v * v;
        sum += c2 / double(s.specular_sh.values.size());
    }
    return sum / double(samples.size());
}

double loss_offsets(const EyeShapeParams& params) {
    double sum = 0;
    for (double o : params.vertex_offsets) sum += o * o;
    return sum;
}

double total_loss(const LossParts& parts, const LossWeights& weights) {
    return weights.lambda_im * parts.image + weights.lambda_noneg * parts.nonneg +
           weights.lambda_spec * parts.spec + weights.lambda_off * parts.offsets;
}

// -----------------------------------------------------------------------------
// fit_voxel_sh
// -----------------------------------------------------------------------------
// The pixel model is linear in the transfer coefficients: for pixel p under
// condition k and channel ch,
//   C = sum_v [ gA_{p,v,ch} (d_v . e_{k,ch}) + gB_{p,v} (s_v . e_{k,ch}) ] + b_{p,k,ch}
// where gA folds contribution weight, trilinear weight, and albedo; gB folds
// contribution and trilinear weight; and b is the reflected-ray environment
// terminal. Geometry factors are condition-independent, so each voxel's
// normal system assembles from per-camera SH Gram blocks scaled by per-voxel
// scalars, and voxels are swept Gauss-Seidel style until the residual stops
// improving.

namespace {

struct VoxelEntry {
    int slot;
    int group;
    float ga[3];
    float gb;
};

struct CameraGroup {
    Camera camera;
    std::vector<std::pair<int, int>> obs;  // (observation index, lighting id)
};

bool same_camera(const Camera& a, const Camera& b) {
    if (a.fx != b.fx || a.fy != b.fy || a.cx != b.cx || a.cy != b.cy || a.width != b.width ||
        a.height != b.height)
        return false;
    for (int i = 0; i < 3; i++) {
        if (a.translation[i] != b.translation[i]) return false;
        for (int j = 0; j < 3; j++)
            if (a.rotation(i, j) != b.rotation(i, j)) return false;
    }
    return true;
}

}  // namespace

void FitReport::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("fit report: cannot open " + path);
    out.precision(12);
    out << "equations " << equations << "\n";
    out << "voxels_fitted " << voxels_fitted << "\n";
    out << "rounds_run " << rounds_run << "\n";
    out << "initial_residual " << (residuals.empty() ? 0.0 : residuals.front()) << "\n";
    out << "final_residual " << (residuals.empty() ? 0.0 : residuals.back()) << "\n";
    out << "seconds_trace " << seconds_trace << "\n";
    out << "seconds_solve " << seconds_solve << "\n";
    for (size_t i = 0; i < residuals.size(); i++)
        out << "residual_round_" << i << " " << residuals[i] << "\n";

    json j;
    j["equations"] = equations;
    j["voxels_fitted"] = voxels_fitted;
    j["rounds_run"] = rounds_run;
    j["residuals"] = residuals;
    j["seconds_trace"] = seconds_trace;
    j["seconds_solve"] = seconds_solve;
    std::ofstream jout(path + ".json");
    jout << j.dump(2) << "\n";
}

VoxelShField fit_voxel_sh(const FitScene& scene, const std::vector<Observation>& observations,
                          const std::vector<LightingContext>& lighting, const FitOptions& options,
                          FitReport* report) {
    using clock = std::chrono::steady_clock;
    if (!scene.geometry) throw std::invalid_argument("fit_voxel_sh: no geometry field");
    if (observations.empty()) throw std::invalid_argument("fit_voxel_sh: no observations");
    const VoxelShField& grid = *scene.geometry;
    const int nd = (kDiffuseOrder + 1) * (kDiffuseOrder + 1);
    const int ns = (kSpecularOrder + 1) * (kSpecularOrder + 1);
    const int ntot = nd + ns;
    const int K = int(lighting.size());
    for (const auto& ctx : lighting)
        if (ctx.env_sh.max_order != kSpecularOrder)
            throw std::invalid_argument("fit_voxel_sh: lighting SH order must match the specular order");
    for (const auto& obs : observations)
        if (obs.lighting_id < 0 || obs.lighting_id >= K)
            throw std::invalid_argument("fit_voxel_sh: lighting id out of range");

    double ridge = options.ridge;
    if (ridge < 0) ridge = K >= ntot ? 0.0 : options.lambda_spec;

    // Group observations by camera; geometry rows are shared within a group.
    std::vector<CameraGroup> groups;
    for (size_t oi = 0; oi < observations.size(); oi++) {
        const auto& obs = observations[oi];
        int gi = -1;
        for (size_t g = 0; g < groups.size(); g++)
            if (same_camera(groups[g].camera, obs.camera)) {
                gi = int(g);
                break;
            }
        if (gi < 0) {
            groups.push_back({obs.camera, {}});
            gi = int(groups.size()) - 1;
        }
        groups[gi].obs.push_back({int(oi), obs.lighting_id});
    }

    FrameGeometry geom;
    geom.bvh = scene.bvh;
    geom.field = scene.geometry;
    geom.periocular_warp = scene.periocular_warp;
    geom.pose = scene.pose;
    geom.eye_center = scene.pose.apply(Vec3{0, 0, 0});

    // ---- trace pass: per-pixel sparse rows -------------------------------
    auto t0 = clock::now();
    struct SlotInfo {
        int group;
        int x, y;
        float terminal_weight;
        Vec3 reflected_dir;
    };
    std::vector<SlotInfo> slots;
    std::vector<std::vector<VoxelEntry>> per_voxel(grid.voxel_count());
    std::vector<int> slot_uindex;  // dense index into u for slots with entries, else -1

    for (size_t g = 0; g < groups.size(); g++) {
        const Camera& cam = groups[g].camera;
        cam.validate();
        int npix = cam.width * cam.height;
        std::vector<std::vector<VoxelEntry>> pixel_rows(npix);
        std::vector<SlotInfo> pixel_slots(npix);
        std::vector<uint8_t> keep(npix, 1);

        // A pixel is dropped when any observation of this camera masks it.
        for (const auto& [oi, k] : groups[g].obs) {
            const auto& obs = observations[oi];
            if (obs.sclera_mask.empty()) continue;
            for (int p = 0; p < npix; p++) {
                Rgb t = obs.target.at(p % cam.width, p / cam.width);
                if (pixel_masked(t, obs.sclera_mask[p] != 0, options.luminance_threshold))
                    keep[p] = 0;
            }
        }

        parallel_for(0, npix, [&](int64_t p) {
            if (!keep[p]) return;
            int x = int(p % cam.width), y = int(p / cam.width);
            Ray ray = camera_ray(cam, x, y);
            apply_clip_range(ray, geom.eye_center, scene.cfg.clip_half_width);
            SplitRays split;
            if (geom.bvh) {
                split = split_ray(ray, *geom.bvh, scene.cfg.ior, scene.cfg.sclera_ior_zero);
            } else {
                split.pre = ray;
            }
            RayContribution rc = trace_ray_contribution(split, geom, scene.cfg,
                                                        mix_seed(scene.cfg.seed, uint64_t(p)));
            pixel_slots[p] = {int(g), x, y, float(rc.reflected_terminal_weight), rc.reflected_dir};

            // Accumulate per-voxel (gA per channel, gB) for this pixel.
            std::map<int, std::array<double, 4>> row;
            int idx[8];
            double w[8];
            for (const auto& s : rc.samples) {
                if (s.weight == 0) continue;
                int count = grid.gather(s.canonical, idx, w);
                for (int i = 0; i < count; i++) {
                    auto& acc = row[idx[i]];
                    double ww = s.weight * w[i];
                    acc[0] += ww * s.fs.albedo.r;
                    acc[1] += ww * s.fs.albedo.g;
                    acc[2] += ww * s.fs.albedo.b;
                    acc[3] += ww;
                }
            }
            auto& entries = pixel_rows[p];
            entries.reserve(row.size());
            // slot temporarily holds the voxel id until slots are assigned.
            for (const auto& [v, acc] : row)
                entries.push_back(VoxelEntry{v, int(g),
                                             {float(acc[0]), float(acc[1]), float(acc[2])},
                                             float(acc[3])});
        }, scene.cfg.threads);

        // Sequential slot assignment (deterministic).
        for (int p = 0; p < npix; p++) {
            if (!keep[p]) continue;
            int slot_id = int(slots.size());
            slots.push_back(pixel_slots[p]);
            for (auto& e : pixel_rows[p]) {
                int voxel = e.slot;
                e.slot = slot_id;
                per_voxel[voxel].push_back(e);
            }
        }
    }
    int n_slots = int(slots.size());

    // Dense u indices for slots that touch any voxel.
    slot_uindex.assign(n_slots, -1);
    {
        std::vector<uint8_t> touched(n_slots, 0);
        for (const auto& list : per_voxel)
            for (const auto& e : list) touched[e.slot] = 1;
        int u = 0;
        for (int s = 0; s < n_slots; s++)
            if (touched[s]) slot_uindex[s] = u++;
    }
    int n_u = 0;
    for (int s = 0; s < n_slots; s++) n_u = std::max(n_u, slot_uindex[s] + 1);

    // ---- per-group SH Gram blocks and projected residuals ----------------
    // e_{k,ch} are the environment coefficients; G[g][ch] = sum_k e e^T over
    // the group's observed conditions.
    std::vector<std::array<Eigen::MatrixXd, 3>> gram(groups.size());
    std::vector<Eigen::VectorXd> env(3 * K, Eigen::VectorXd(ns));
    for (int k = 0; k < K; k++)
        for (int ch = 0; ch < 3; ch++)
            for (int i = 0; i < ns; i++) env[3 * k + ch][i] = lighting[k].env_sh.channel(ch)[i];
    for (size_t g = 0; g < groups.size(); g++)
        for (int ch = 0; ch < 3; ch++) {
            gram[g][ch] = Eigen::MatrixXd::Zero(ns, ns);
            for (const auto& [oi, k] : groups[g].obs)
                gram[g][ch] += env[3 * k + ch] * env[3 * k + ch].transpose();
        }

    // u[uidx][ch] = sum_k residual * e_{k,ch}; starts from residual = y - b.
    std::vector<Eigen::VectorXd> u(size_t(n_u) * 3, Eigen::VectorXd::Zero(ns));
    double residual2 = 0;
    int64_t equations = 0;
    for (size_t g = 0; g < groups.size(); g++) {
        for (const auto& [oi, k] : groups[g].obs) {
            const auto& obs = observations[oi];
            for (int s = 0; s < n_slots; s++) {
                if (slots[s].group != int(g)) continue;
                Rgb y = obs.target.at(slots[s].x, slots[s].y);
                Rgb b{0, 0, 0};
                if (slots[s].terminal_weight != 0)
                    b = lighting[k].terminal_radiance(slots[s].reflected_dir) *
                        double(slots[s].terminal_weight);
                for (int ch = 0; ch < 3; ch++) {
                    double r = y[ch] - b[ch];
                    residual2 += r * r;
                    if (slot_uindex[s] >= 0) u[size_t(slot_uindex[s]) * 3 + ch] += r * env[3 * k + ch];
                }
                equations += 3;
            }
        }
    }
    double seconds_trace = std::chrono::duration<double>(clock::now() - t0).count();

    // ---- Gauss-Seidel sweeps over voxels ----------------------------------
    t0 = clock::now();
    std::vector<int> fitted;
    for (int v = 0; v < grid.voxel_count(); v++) {
        double total = 0;
        for (const auto& e : per_voxel[v])
            total += std::fabs(e.ga[0]) + std::fabs(e.ga[1]) + std::fabs(e.ga[2]) + e.gb;
        if (total > 1e-10) fitted.push_back(v);
    }

    std::vector<Eigen::VectorXd> x(grid.voxel_count());
    for (int v : fitted) x[v] = Eigen::VectorXd::Zero(ntot);

    std::vector<double> residuals{residual2};
    int rounds_run = 0;
    for (int round = 0; round < options.rounds; round++) {
        for (int v : fitted) {
            const auto& entries = per_voxel[v];

            // Per-group scalar moments of the geometry factors.
            std::vector<std::array<double, 7>> mom(groups.size(), {0, 0, 0, 0, 0, 0, 0});
            for (const auto& e : entries) {
                auto& m = mom[e.group];
                for (int ch = 0; ch < 3; ch++) {
                    m[ch] += double(e.ga[ch]) * e.ga[ch];         // SA
                    m[3 + ch] += double(e.ga[ch]) * e.gb;          // SAB
                }
                m[6] += double(e.gb) * e.gb;                       // SB
            }

            Eigen::MatrixXd N = Eigen::MatrixXd::Zero(ntot, ntot);
            for (size_t g = 0; g < groups.size(); g++)
                for (int ch = 0; ch < 3; ch++) {
                    const auto& m = mom[g];
                    const Eigen::MatrixXd& G = gram[g][ch];
                    if (m[ch] != 0) N.topLeftCorner(nd, nd) += m[ch] * G.topLeftCorner(nd, nd);
                    if (m[3 + ch] != 0) {
                        N.topRightCorner(nd, ns) += m[3 + ch] * G.topRows(nd);
                        N.bottomLeftCorner(ns, nd) += m[3 + ch] * G.leftCols(nd);
                    }
                    if (m[6] != 0) N.bottomRightCorner(ns, ns) += m[6] * G;
                }

            // Gradient g = A^T r from the projected residuals.
            Eigen::VectorXd grad = Eigen::VectorXd::Zero(ntot);
            for (const auto& e : entries) {
                for (int ch = 0; ch < 3; ch++) {
                    const Eigen::VectorXd& us = u[size_t(slot_uindex[e.slot]) * 3 + ch];
                    if (e.ga[ch] != 0) grad.head(nd) += double(e.ga[ch]) * us.head(nd);
                    grad.tail(ns) += double(e.gb) * us;
                }
            }

            Eigen::VectorXd rhs = grad + N * x[v];
            Eigen::VectorXd solution;
            if (ridge > 0) {
                Eigen::MatrixXd M = N;
                M.diagonal().tail(ns).array() += ridge;
                solution = M.ldlt().solve(rhs);
            } else {
                Eigen::FullPivLU<Eigen::MatrixXd> lu(N);
                if (lu.rank() < ntot)
                    throw std::runtime_error(
                        "fit_voxel_sh: rank-deficient system for voxel " + std::to_string(v) +
                        "; add lighting conditions or enable the ridge");
                solution = lu.solve(rhs);
            }
            // Positivity of the 0th-degree coefficients by projection.
            solution[0] = std::fmax(solution[0], options.zeroth_floor);
            solution[nd] = std::fmax(solution[nd], options.zeroth_floor);

            Eigen::VectorXd delta = solution - x[v];
            if (delta.lpNorm<Eigen::Infinity>() < 1e-300) continue;
            double dres = -2.0 * delta.dot(grad) + delta.dot(N * delta);
            if (dres >= 0) continue;  // projection made it worse; keep monotone
            x[v] = solution;
            residual2 += dres;

            // Update projected residuals of this voxel's pixels.
            std::vector<std::array<Eigen::VectorXd, 3>> vd(groups.size()), vs(groups.size());
            std::vector<uint8_t> have(groups.size(), 0);
            for (const auto& e : entries) {
                if (!have[e.group]) {
                    for (int ch = 0; ch < 3; ch++) {
                        vd[e.group][ch] = gram[e.group][ch].leftCols(nd) * delta.head(nd);
                        vs[e.group][ch] = gram[e.group][ch] * delta.tail(ns);
                    }
                    have[e.group] = 1;
                }
                for (int ch = 0; ch < 3; ch++) {
                    Eigen::VectorXd& us = u[size_t(slot_uindex[e.slot]) * 3 + ch];
                    us -= double(e.ga[ch]) * vd[e.group][ch] + double(e.gb) * vs[e.group][ch];
                }
            }
        }
        residuals.push_back(residual2);
        rounds_run = round + 1;
        double prev = residuals[residuals.size() - 2];
        if (prev - residual2 < options.tol * std::fmax(prev, 1.0)) break;
    }
    double seconds_solve = std::chrono::duration<double>(clock::now() - t0).count();

    // ---- write out the fitted field ---------------------------------------
    VoxelShField out = grid;  // keeps sigma and albedo
    for (int v : fitted) {
        int k = v / (grid.nx() * grid.ny());
        int j = (v / grid.nx()) % grid.ny();
        int i = v % grid.nx();
        FieldSample s = out.voxel(i, j, k);
        for (int n = 0; n < nd; n++) s.diffuse_sh.values[n] = x[v][n];
        for (int n = 0; n < ns; n++) s.specular_sh.values[n] = x[v][nd + n];
        out.set_voxel(i, j, k, s);
    }
    out.enforce_constraints(options.zeroth_floor);

    if (report) {
        report->residuals = residuals;
        report->rounds_run = rounds_run;
        report->equations = equations;
        report->voxels_fitted = int(fitted.size());
        report->seconds_trace = seconds_trace;
        report->seconds_solve = seconds_solve;
    }
    return out;
}

// -----------------------------------------------------------------------------
// refine_eye_pose
// -----------------------------------------------------------------------------

namespace {

struct PoseParams {
    std::vector<double> theta;
    bool with_shape;

    static PoseParams pack(const EyePose& pose, const EyeShapeParams& shape, bool with_shape) {
        PoseParams p;
        p.with_shape = with_shape;
        p.theta = {pose.per_frame.rotation.x,    pose.per_frame.rotation.y,
                   pose.per_frame.rotation.z,    pose.per_frame.translation.x,
                   pose.per_frame.translation.y, pose.per_frame.translation.z};
        if (with_shape) {
            p.theta.push_back(shape.b);
            p.theta.push_back(shape.c);
            p.theta.push_back(shape.d);
            p.theta.push_back(shape.theta_mod);
            p.theta.push_back(shape.theta_offset);
        }
        return p;
    }

    void unpack(const EyePose& base_pose, const EyeShapeParams& base_shape, EyePose& pose,
                EyeShapeParams& shape) const {
        pose = base_pose;
        pose.per_frame.rotation = {theta[0], theta[1], theta[2]};
        pose.per_frame.translation = {theta[3], theta[4], theta[5]};
        shape = base_shape;
        if (with_shape) {
            shape.b = std::fmax(theta[6], 0.5);
            shape.c = std::fmax(theta[7], shape.b * 0.1);
            shape.d = clamp(theta[8], 0.0, shape.c * 0.99);
            shape.theta_mod = clamp(theta[9], 1.0, 3.0);
            shape.theta_offset = clamp(theta[10], -0.5, 1.5);
        }
    }
};

}  // namespace

void PoseRefineResult::write_report(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("pose report: cannot open " + path);
    out.precision(12);
    out << "converged " << (converged ? 1 : 0) << "\n";
    out << "iterations " << iterations << "\n";
    out << "initial_loss " << initial_loss << "\n";
    out << "final_loss " << final_loss << "\n";
    json j;
    j["converged"] = converged;
    j["iterations"] = iterations;
    j["initial_loss"] = initial_loss;
    j["final_loss"] = final_loss;
    j["pose"] = {{"rotation", {pose.per_frame.rotation.x, pose.per_frame.rotation.y,
                               pose.per_frame.rotation.z}},
                 {"translation", {pose.per_frame.translation.x, pose.per_frame.translation.y,
                                  pose.per_frame.translation.z}}};
    std::ofstream jout(path + ".json");
    jout << j.dump(2) << "\n";
}

PoseRefineResult refine_eye_pose(const EyePose& initial, const PoseFitScene& scene,
                                 const std::vector<Observation>& observations,
                                 const std::vector<LightingContext>& lighting,
                                 const PoseRefineOptions& options) {
    if (!scene.field) throw std::invalid_argument("refine_eye_pose: no radiance field");
    if (observations.empty()) throw std::invalid_argument("refine_eye_pose: no observations");

    // Canonical mesh cache: rebuilt only when shape parameters change.
    EyeShapeParams cached_shape = scene.shape;
    TriMesh base_mesh = generate_mesh(cached_shape);

    auto eval = [&](const PoseParams& p) {
        EyePose pose;
        EyeShapeParams shape;
        p.unpack(initial, scene.shape, pose, shape);
        if (p.with_shape &&
            (shape.b != cached_shape.b || shape.c != cached_shape.c || shape.d != cached_shape.d ||
             shape.theta_mod != cached_shape.theta_mod ||
             shape.theta_offset != cached_shape.theta_offset)) {
            cached_shape = shape;
            base_mesh = generate_mesh(shape);
        }
        TriMesh posed = apply_pose(base_mesh, pose);
        Bvh bvh(posed);
        FrameGeometry geom;
        geom.bvh = &bvh;
        geom.field = scene.field;
        geom.periocular_warp = scene.periocular_warp;
        geom.pose = pose;
        geom.eye_center = pose.apply(Vec3{0, 0, 0});
        double sum = 0;
        for (const auto& obs : observations) {
            Image3f img = render_image(obs.camera, geom, lighting[obs.lighting_id], scene.cfg);
            sum += loss_image(img, obs.target, obs.sclera_mask.empty() ? nullptr : &obs.sclera_mask,
                              options.luminance_threshold);
        }
        double image_term = sum / double(observations.size());
        return options.weights.lambda_im * image_term +
               options.weights.lambda_off * loss_offsets(shape);
    };

    PoseParams p = PoseParams::pack(initial, scene.shape, options.refine_shape);
    int n = int(p.theta.size());
    std::vector<double> fd_step(n), scale(n);
    for (int i = 0; i < n; i++) {
        bool rot = i < 3;
        bool shape_param = i >= 6;
        fd_step[i] = shape_param ? 1e-3 : (rot ? options.fd_step_rotation : options.fd_step_translation);
        scale[i] = shape_param ? 0.1 : (rot ? options.scale_rotation : options.scale_translation);
    }

    PoseRefineResult result;
    double loss = eval(p);
    result.initial_loss = loss;
    bool stopped_on_criterion = false;
    int iter = 0;
    for (; iter < options.max_iterations; iter++) {
        if (loss < 1e-14) {
            stopped_on_criterion = true;
            break;
        }
        // Central-difference gradient.
        std::vector<double> grad(n);
        double gnorm2 = 0;
        for (int i = 0; i < n; i++) {
            PoseParams plus = p, minus = p;
            plus.theta[i] += fd_step[i];
            minus.theta[i] -= fd_step[i];
            grad[i] = (eval(plus) - eval(minus)) / (2 * fd_step[i]);
            gnorm2 += grad[i] * scale[i] * grad[i] * scale[i];
        }
        if (std::sqrt(gnorm2) < options.grad_tol) {
            stopped_on_criterion = true;
            break;
        }

        // Scaled steepest descent with backtracking.
        double step = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 24; bt++) {
            PoseParams trial = p;
            for (int i = 0; i < n; i++) trial.theta[i] -= step * scale[i] * scale[i] * grad[i];
            double l2 = eval(trial);
            if (l2 < loss) {
                double improvement = (loss - l2) / std::fmax(loss, 1e-300);
                p = trial;
                loss = l2;
                accepted = true;
                if (improvement < options.tol_rel) stopped_on_criterion = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            stopped_on_criterion = true;  // descent stalled at FD resolution
            break;
        }
        if (stopped_on_criterion) {
            iter++;
            break;
        }
    }

    p.unpack(initial, scene.shape, result.pose, result.shape);
    result.iterations = iter;
    result.final_loss = loss;
    result.converged = stopped_on_criterion && loss <= options.loss_tolerance;
    return result;
}

}  // namespace eyevol
