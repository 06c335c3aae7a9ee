// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_FIT_H
#define EYEVOL_FIT_H

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eyevol/camera.h"
#include "eyevol/field.h"
#include "eyevol/image.h"
#include "eyevol/lighting.h"
#include "eyevol/render.h"

namespace eyevol {

struct LossWeights {
    double lambda_im = 1.0;
    double lambda_noneg = 1e-2;
    double lambda_spec = 5e-4;
    double lambda_off = 1e-6;
};

// One captured/synthesized view: a camera, the lighting condition it was
// taken under (index into a LightingContext list), and the target image.
// sclera_mask, when nonempty, marks sclera pixels (nonzero = sclera).
struct Observation {
    Camera camera;
    int lighting_id = 0;
    Image3f target;
    std::vector<uint8_t> sclera_mask;
};

inline constexpr double kScleraLuminanceThreshold = 0.9;  // linear radiance

// True when the pixel is masked out: marked sclera and brighter than the
// luminance threshold (Rec. 709 luminance of the target).
bool pixel_masked(const Rgb& target, bool is_sclera, double luminance_threshold);

// Mean over unmasked pixels of the channel-summed squared sRGB difference.
double loss_image(const Image3f& rendered, const Image3f& target,
                  const std::vector<uint8_t>* sclera_mask = nullptr,
                  double luminance_threshold = kScleraLuminanceThreshold);

// Negative-response penalty on the specular transfer, averaged over samples
// and n_dirs seeded random directions; squared form by default, linear
// behind the flag.
double loss_nonneg(const std::vector<FieldSample>& samples, int n_dirs = 10, uint64_t seed = 0,
                   bool squared = true);

// Mean over samples of the order-normalized squared specular coefficients.
double loss_spec(const std::vector<FieldSample>& samples);

// Sum of squared per-vertex offsets.
double loss_offsets(const EyeShapeParams& params);

struct LossParts {
    double image = 0;
    double nonneg = 0;
    double spec = 0;
    double offsets = 0;
};

double total_loss(const LossParts& parts, const LossWeights& weights);

// -----------------------------------------------------------------------------
// Voxel SH transfer fitting
// -----------------------------------------------------------------------------

// Fixed geometry the fit renders against: the posed eye surface, the known
// density/albedo grid, and the periocular warp. cfg's sampling and seed must
// match the renders the observations were produced with.
struct FitScene {
    const Bvh* bvh = nullptr;
    EyePose pose;
    std::function<Vec3(const Vec3&)> periocular_warp;
    const VoxelShField* geometry = nullptr;
    RenderConfig cfg;
};

struct FitOptions {
    int rounds = 8;
    // Ridge on the specular block; negative = automatic (0 when the lighting
    // set determines the per-voxel system, lambda_spec otherwise).
    double ridge = -1.0;
    double lambda_spec = 5e-4;
    double zeroth_floor = 1e-6;
    double tol = 1e-12;  // relative residual improvement to keep sweeping
    double luminance_threshold = kScleraLuminanceThreshold;
};

struct FitReport {
    std::vector<double> residuals;  // squared residual after each sweep; [0] = initial
    int rounds_run = 0;
    int64_t equations = 0;
    int voxels_fitted = 0;
    double seconds_trace = 0;
    double seconds_solve = 0;

    void write(const std::string& path) const;
};

// Recovers per-voxel diffuse/specular transfer coefficients from >= K
// lighting conditions by per-voxel linear least squares (block coordinate
// descent over voxels, exact per-voxel solves). Density and albedo are taken
// from scene.geometry; the per-pixel radiance model is linear in the transfer
// coefficients as long as no shading clamp is active in the data.
VoxelShField fit_voxel_sh(const FitScene& scene, const std::vector<Observation>& observations,
                          const std::vector<LightingContext>& lighting,
                          const FitOptions& options = {}, FitReport* report = nullptr);

// -----------------------------------------------------------------------------
// Photometric eyeball pose refinement
// -----------------------------------------------------------------------------

struct PoseFitScene {
    EyeShapeParams shape;
    const RadianceField* field = nullptr;
    std::function<Vec3(const Vec3&)> periocular_warp;
    RenderConfig cfg;
};

struct PoseRefineOptions {
    int max_iterations = 80;
    double fd_step_rotation = 1e-3;     // rad
    double fd_step_translation = 1e-2;  // mm
    // Per-parameter step scaling of the descent direction.
    double scale_rotation = 3e-2;
    double scale_translation = 1.0;
    double tol_rel = 1e-9;        // relative loss improvement
    double grad_tol = 1e-10;      // scaled gradient norm
    double loss_tolerance = 1e-5; // "converged" additionally requires final loss below this
    bool refine_shape = false;
    LossWeights weights;
    double luminance_threshold = kScleraLuminanceThreshold;
};

struct PoseRefineResult {
    EyePose pose;
    EyeShapeParams shape;
    bool converged = false;
    int iterations = 0;
    double initial_loss = 0;
    double final_loss = 0;

    void write_report(const std::string& path) const;
};

// Finite-difference gradient descent on the image loss over the per-frame
// 6-DoF pose (optionally also b, c, d, theta_mod, theta_offset). Returns
// best-so-far with converged = false when the descent stalls above
// loss_tolerance.
PoseRefineResult refine_eye_pose(const EyePose& initial, const PoseFitScene& scene,
                                 const std::vector<Observation>& observations,
                                 const std::vector<LightingContext>& lighting,
                                 const PoseRefineOptions& options = {});

}  // namespace eyevol

#endif
