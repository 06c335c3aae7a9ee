// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/render.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eyevol/parallel.h"

namespace eyevol {

std::vector<double> sample_ray(const Ray& ray, int n_coarse, int n_fine,
                               const std::vector<double>* coarse_weights, uint64_t seed,
                               bool jitter) {
    if (n_coarse < 1) throw std::invalid_argument("sample_ray: n_coarse must be >= 1");
    double span = ray.t_far - ray.t_near;
    if (!(span > 0)) throw std::invalid_argument("sample_ray: degenerate t range");

    double stratum = span / n_coarse;
    std::vector<double> positions(n_coarse);
    {
        Rng rng = Rng::for_stream(seed, 0);
        for (int i = 0; i < n_coarse; i++) {
            double u = jitter ? rng.uniform() : 0.5;
            positions[i] = ray.t_near + (i + u) * stratum;
        }
    }
    if (!coarse_weights || n_fine <= 0) return positions;

    if (int(coarse_weights->size()) != n_coarse)
        throw std::invalid_argument("sample_ray: weight count must match n_coarse");

    // Piecewise-constant inverse CDF over the coarse strata.
    std::vector<double> cdf(n_coarse + 1, 0.0);
    for (int i = 0; i < n_coarse; i++) {
        double w = (*coarse_weights)[i];
        cdf[i + 1] = cdf[i] + std::fmax(w, 0.0);
    }
    double total = cdf.back();
    bool uniform_fallback = !(total > 0);

    Rng rng = Rng::for_stream(seed, 1);
    positions.reserve(size_t(n_coarse) + n_fine);
    for (int j = 0; j < n_fine; j++) {
        double u = (j + (jitter ? rng.uniform() : 0.5)) / n_fine;
        if (uniform_fallback) {
            positions.push_back(ray.t_near + u * span);
            continue;
        }
        double target = u * total;
        int bin = int(std::upper_bound(cdf.begin(), cdf.end() - 1, target) - cdf.begin()) - 1;
        bin = int(clamp(double(bin), 0.0, double(n_coarse - 1)));
        double w = cdf[bin + 1] - cdf[bin];
        double frac = w > 0 ? (target - cdf[bin]) / w : 0.5;
        positions.push_back(ray.t_near + (bin + frac) * stratum);
    }
    std::sort(positions.begin(), positions.end());
    return positions;
}

Rgb shade_sample(const FieldSample& fs, const LightingContext& ctx) {
    Rgb diffuse = integrate_radiance(fs.diffuse_sh, ctx.env_sh);
    Rgb specular = integrate_radiance(fs.specular_sh, ctx.env_sh);
    diffuse = {std::fmax(diffuse.r, 0.0), std::fmax(diffuse.g, 0.0), std::fmax(diffuse.b, 0.0)};
    specular = {std::fmax(specular.r, 0.0), std::fmax(specular.g, 0.0), std::fmax(specular.b, 0.0)};
    return diffuse * fs.albedo + specular;
}

Rgb accumulate(const RaySampleSet& samples) {
    double transmittance = 1.0;
    Rgb color;
    for (size_t i = 0; i < samples.size(); i++) {
        double alpha = std::exp(-samples.sigma[i] * samples.delta[i]);
        color += samples.color[i] * (transmittance * (1.0 - alpha));
        transmittance *= alpha;
    }
    // Terminal sample: infinite opacity (alpha = 0), fixed color.
    color += samples.terminal_color * transmittance;
    return color;
}

std::vector<double> contribution_weights(const RaySampleSet& samples) {
    std::vector<double> weights(samples.size());
    double transmittance = 1.0;
    for (size_t i = 0; i < samples.size(); i++) {
        double alpha = std::exp(-samples.sigma[i] * samples.delta[i]);
        weights[i] = transmittance * (1.0 - alpha);
        transmittance *= alpha;
    }
    return weights;
}

namespace {

using PointMap = std::function<Vec3(const Vec3&)>;

// One traced segment: sorted samples with field values, before shading.
struct Segment {
    std::vector<double> delta;
    std::vector<RayContribution::Sample> samples;  // weight holds alpha for now
};

// Samples and queries one ray segment; the coarse pass drives the fine
// pass's importance histogram. Sample weights are left as the per-segment
// transparencies alpha_i = exp(-sigma delta); the caller turns them into
// contribution weights.
Segment trace_segment(const Ray& ray, const FrameGeometry& geom, const RenderConfig& cfg,
                      const PointMap& to_canonical, uint64_t seed) {
    Segment seg;
    if (!(ray.t_far - ray.t_near > 0)) return seg;

    auto evaluate = [&](const std::vector<double>& positions, Segment& out) {
        out.samples.clear();
        out.samples.reserve(positions.size());
        out.delta.resize(positions.size());
        for (size_t i = 0; i < positions.size(); i++) {
            out.delta[i] = (i + 1 < positions.size() ? positions[i + 1] : ray.t_far) - positions[i];
            RayContribution::Sample s;
            s.world = ray.at(positions[i]);
            s.canonical = to_canonical ? to_canonical(s.world) : s.world;
            s.view_dir = ray.dir;
            FieldQuery q;
            q.world_point = s.world;
            q.canonical_point = s.canonical;
            q.view_dir = ray.dir;
            q.shadow_branch_enabled = cfg.shadow_branch_enabled;
            s.fs = geom.field->query(q);
            s.weight = std::exp(-s.fs.sigma * out.delta[i]);  // alpha
            out.samples.push_back(std::move(s));
        }
    };

    std::vector<double> coarse =
        sample_ray(ray, cfg.sampling.n_coarse, 0, nullptr, seed, cfg.sampling.jitter);
    evaluate(coarse, seg);
    if (cfg.sampling.n_fine > 0) {
        std::vector<double> weights(seg.samples.size());
        double transmittance = 1.0;
        for (size_t i = 0; i < seg.samples.size(); i++) {
            weights[i] = transmittance * (1.0 - seg.samples[i].weight);
            transmittance *= seg.samples[i].weight;
        }
        std::vector<double> merged = sample_ray(ray, cfg.sampling.n_coarse, cfg.sampling.n_fine,
                                                &weights, seed, cfg.sampling.jitter);
        Segment fine;
        evaluate(merged, fine);
        return fine;
    }
    return seg;
}

}  // namespace

RayContribution trace_ray_contribution(const SplitRays& split, const FrameGeometry& geom,
                                       const RenderConfig& cfg, uint64_t pixel_seed) {
    const PointMap& periocular = geom.periocular_warp;
    RayContribution rc;

    if (!split.hit) {
        Segment seg = trace_segment(split.pre, geom, cfg, periocular, mix_seed(pixel_seed, 0));
        double transmittance = 1.0;
        for (auto& s : seg.samples) {
            double alpha = s.weight;
            s.weight = transmittance * (1.0 - alpha);
            transmittance *= alpha;
            rc.samples.push_back(std::move(s));
        }
        return rc;  // black terminal
    }

    // Reflected ray, rendered against the environment terminal.
    Segment refl;
    double f = split.fresnel_f;
    if (split.reflected) {
        refl = trace_segment(*split.reflected, geom, cfg, periocular, mix_seed(pixel_seed, 1));
        rc.reflected_dir = split.reflected->dir;
    }
    Segment pre = trace_segment(split.pre, geom, cfg, periocular, mix_seed(pixel_seed, 0));
    Segment refr;
    if (split.refracted) {
        PointMap interior = [&geom, &cfg](const Vec3& p) {
            return eye_interior_transform(geom.pose, p, cfg.interior_offset);
        };
        refr = trace_segment(*split.refracted, geom, cfg, interior, mix_seed(pixel_seed, 2));
    }

    // Combined ray: pre samples, the merge at k (last pre-intersect sample),
    // then the refracted samples, black terminal. The merge contributes
    // T_k ((1-a_k) c_k + f a_k C_refl) and updates T *= a_k (1-f): the
    // alpha-composited combined sample, exact for any a_k and f.
    double transmittance = 1.0;
    size_t n = pre.samples.size();
    for (size_t i = 0; i + 1 < n; i++) {
        double alpha = pre.samples[i].weight;
        pre.samples[i].weight = transmittance * (1.0 - alpha);
        transmittance *= alpha;
        rc.samples.push_back(std::move(pre.samples[i]));
    }
    double alpha_k = 1.0;
    if (n >= 1) {
        alpha_k = pre.samples[n - 1].weight;
        pre.samples[n - 1].weight = transmittance * (1.0 - alpha_k);
        rc.samples.push_back(std::move(pre.samples[n - 1]));
    }
    // Reflected radiance enters behind sample k with weight T_k f a_k.
    double reflected_scale = transmittance * f * alpha_k;
    double refl_transmittance = 1.0;
    for (auto& s : refl.samples) {
        double alpha = s.weight;
        s.weight = reflected_scale * refl_transmittance * (1.0 - alpha);
        refl_transmittance *= alpha;
        if (s.weight != 0) rc.samples.push_back(std::move(s));
    }
    rc.reflected_terminal_weight = reflected_scale * refl_transmittance;
    transmittance *= alpha_k * (1.0 - f);
    for (auto& s : refr.samples) {
        double alpha = s.weight;
        s.weight = transmittance * (1.0 - alpha);
        transmittance *= alpha;
        rc.samples.push_back(std::move(s));
    }
    return rc;
}

Rgb render_ray(const SplitRays& split, const FrameGeometry& geom, const LightingContext& ctx,
               const RenderConfig& cfg, uint64_t pixel_seed) {
    RayContribution rc = trace_ray_contribution(split, geom, cfg, pixel_seed);
    Rgb color;
    for (const auto& s : rc.samples) color += shade_sample(s.fs, ctx) * s.weight;
    if (rc.reflected_terminal_weight != 0)
        color += ctx.terminal_radiance(rc.reflected_dir) * rc.reflected_terminal_weight;
    return color;
}

void apply_clip_range(Ray& ray, const Vec3& eye_center, double clip_half_width) {
    double t_center = dot(eye_center - ray.origin, ray.dir);
    ray.t_near = std::fmax(t_center - clip_half_width, 0.0);
    ray.t_far = std::fmax(t_center + clip_half_width, ray.t_near + 1e-6);
}

Image3f render_image(const Camera& camera, const FrameGeometry& geom, const LightingContext& ctx,
                     const RenderConfig& cfg) {
    camera.validate();
    if (!geom.field) throw std::invalid_argument("render_image: no radiance field");
    Image3f img(camera.width, camera.height);

    parallel_for(
        0, int64_t(camera.width) * camera.height,
        [&](int64_t index) {
            int x = int(index % camera.width);
            int y = int(index / camera.width);
            try {
                Ray ray = camera_ray(camera, x, y);
                apply_clip_range(ray, geom.eye_center, cfg.clip_half_width);
                SplitRays split;
                if (geom.bvh) {
                    split = split_ray(ray, *geom.bvh, cfg.ior, cfg.sclera_ior_zero);
                } else {
                    split.pre = ray;
                }
                img.set(x, y, render_ray(split, geom, ctx, cfg, mix_seed(cfg.seed, uint64_t(index))));
            } catch (const std::exception& e) {
                throw std::runtime_error("render_image: pixel (" + std::to_string(x) + ", " +
                                         std::to_string(y) + "): " + e.what());
            }
        },
        cfg.threads);
    return img;
}

}  // namespace eyevol
