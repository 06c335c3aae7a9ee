// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/sh.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eyevol {

// -----------------------------------------------------------------------------
// Basis convention
// -----------------------------------------------------------------------------
// Real, orthonormal SH without the Condon-Shortley phase:
//
//   Y_{l,0}  =              K(l, 0)   P_l^0(cos theta)
//   Y_{l,m}  = sqrt(2) K(l, m)  cos( m phi) P_l^m (cos theta)   (m > 0)
//   Y_{l,m}  = sqrt(2) K(l,|m|) sin(|m|phi) P_l^|m|(cos theta)  (m < 0)
//
//   K(l, m)  = sqrt( (2l+1) (l-m)! / (4 pi (l+m)!) )
//
// with associated Legendre P_l^m built from the phase-free recurrences
//   P_m^m     = (2m-1)!! (sin theta)^m
//   P_{m+1}^m = cos theta (2m+1) P_m^m
//   P_l^m     = ( cos theta (2l-1) P_{l-1}^m - (l+m-1) P_{l-2}^m ) / (l-m).
//
// The rotation recursion below assumes exactly this convention; band 1 is
// proportional to (y, z, x) in that order.

ShCoefficients::ShCoefficients(int order, int nchannels) : max_order(order), channels(nchannels) {
    if (order < 0) throw std::invalid_argument("sh: negative order");
    if (nchannels != 1 && nchannels != 3) throw std::invalid_argument("sh: channels must be 1 or 3");
    values.assign(size_t(nchannels) * (order + 1) * (order + 1), 0.0);
}

ShCoefficients& ShCoefficients::operator+=(const ShCoefficients& o) {
    if (o.max_order != max_order || o.channels != channels)
        throw std::invalid_argument("sh: shape mismatch in +=");
    for (size_t i = 0; i < values.size(); i++) values[i] += o.values[i];
    return *this;
}

ShCoefficients ShCoefficients::operator*(double s) const {
    ShCoefficients r = *this;
    for (auto& v : r.values) v *= s;
    return r;
}

ShCoefficients eval_sh_basis(const Vec3& dir, int max_order) {
    double len = norm(dir);
    if (std::fabs(len - 1.0) > 1e-3)
        throw std::invalid_argument("eval_sh_basis: direction is not unit length");
    Vec3 d = dir / len;

    ShCoefficients out(max_order, 1);
    int n = max_order + 1;

    double ct = clamp(d.z, -1.0, 1.0);  // cos theta
    double st = std::sqrt(std::fmax(0.0, 1.0 - ct * ct));

    // P[m][l] for m <= l, packed as P_l^m at index(l, m-th table).
    // Column m of the Legendre table, built on the fly.
    std::vector<double> plm(size_t(n) * n, 0.0);
    auto P = [&plm, n](int l, int m) -> double& { return plm[size_t(m) * n + l]; };
    for (int m = 0; m < n; m++) {
        // P_m^m = (2m-1)!! st^m
        double pmm = 1.0;
        for (int k = 1; k <= m; k++) pmm *= (2 * k - 1) * st;
        P(m, m) = pmm;
        if (m + 1 < n) P(m + 1, m) = ct * (2 * m + 1) * pmm;
        for (int l = m + 2; l < n; l++)
            P(l, m) = (ct * (2 * l - 1) * P(l - 1, m) - (l + m - 1) * P(l - 2, m)) / (l - m);
    }

    // cos(m phi), sin(m phi) by recurrence; phi measured from +x.
    double cp1, sp1;
    if (st < 1e-300) {
        cp1 = 1.0;
        sp1 = 0.0;
    } else {
        cp1 = d.x / st;
        sp1 = d.y / st;
    }
    std::vector<double> cosm(n), sinm(n);
    cosm[0] = 1.0;
    sinm[0] = 0.0;
    for (int m = 1; m < n; m++) {
        cosm[m] = cosm[m - 1] * cp1 - sinm[m - 1] * sp1;
        sinm[m] = sinm[m - 1] * cp1 + cosm[m - 1] * sp1;
    }

    const double inv4pi = 1.0 / (4.0 * M_PI);
    for (int l = 0; l <= max_order; l++) {
        for (int m = 0; m <= l; m++) {
            // K^2 = (2l+1)/(4pi) * (l-m)!/(l+m)!
            double ratio = 1.0;
            for (int k = l - m + 1; k <= l + m; k++) ratio /= k;
            double K = std::sqrt((2 * l + 1) * inv4pi * ratio);
            if (m == 0) {
                out.at(l, 0) = K * P(l, 0);
            } else {
                double base = M_SQRT2 * K * P(l, m);
                out.at(l, m) = base * cosm[m];
                out.at(l, -m) = base * sinm[m];
            }
        }
    }
    return out;
}

ShCoefficients project_env_to_sh(const EnvMap& env, int max_order) {
    if (env.width() <= 0 || env.height() <= 0)
        throw std::invalid_argument("project_env_to_sh: empty environment map");
    ShCoefficients out(max_order, 3);
    int nc = out.coeffs_per_channel();
    for (int iy = 0; iy < env.height(); iy++) {
        double dw = env.texel_solid_angle(iy);
        for (int ix = 0; ix < env.width(); ix++) {
            Rgb e = env.radiance.at(ix, iy);
            if (!std::isfinite(e.r) || !std::isfinite(e.g) || !std::isfinite(e.b))
                throw std::runtime_error("project_env_to_sh: non-finite texel (" +
                                         std::to_string(ix) + ", " + std::to_string(iy) + ")");
            ShCoefficients basis = eval_sh_basis(env.texel_direction(ix, iy), max_order);
            for (int i = 0; i < nc; i++) {
                double yw = basis.values[i] * dw;
                out.values[i] += yw * e.r;
                out.values[nc + i] += yw * e.g;
                out.values[2 * nc + i] += yw * e.b;
            }
        }
    }
    return out;
}

// -----------------------------------------------------------------------------
// Rotation (recursive per-band construction)
// -----------------------------------------------------------------------------
// Each band's rotation block is built from the band-1 block and the previous
// band following Ivanic & Ruseckas' recurrence (with the published erratum's
// u/v/w tables). Entries are addressed by (m, m') in [-l, l].

namespace {

struct BandMatrix {
    int l = 0;
    std::vector<double> v;  // (2l+1)^2 row-major

    explicit BandMatrix(int band) : l(band), v(size_t(2 * band + 1) * (2 * band + 1), 0.0) {}
    double& at(int m, int n) { return v[size_t(m + l) * (2 * l + 1) + (n + l)]; }
    double at(int m, int n) const { return v[size_t(m + l) * (2 * l + 1) + (n + l)]; }
};

double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

// Centered band-1 access used by the recursion's P helper.
double P(int i, int a, int b, int l, const std::vector<BandMatrix>& bands) {
    const BandMatrix& r1 = bands[1];
    const BandMatrix& rp = bands[l - 1];
    if (b == l) return r1.at(i, 1) * rp.at(a, l - 1) - r1.at(i, -1) * rp.at(a, -l + 1);
    if (b == -l) return r1.at(i, 1) * rp.at(a, -l + 1) + r1.at(i, -1) * rp.at(a, l - 1);
    return r1.at(i, 0) * rp.at(a, b);
}

double U(int m, int n, int l, const std::vector<BandMatrix>& bands) {
    return P(0, m, n, l, bands);
}

double V(int m, int n, int l, const std::vector<BandMatrix>& bands) {
    if (m == 0) return P(1, 1, n, l, bands) + P(-1, -1, n, l, bands);
    if (m > 0)
        return P(1, m - 1, n, l, bands) * std::sqrt(1 + delta(m, 1)) -
               P(-1, -m + 1, n, l, bands) * (1 - delta(m, 1));
    return P(1, m + 1, n, l, bands) * (1 - delta(m, -1)) +
           P(-1, -m - 1, n, l, bands) * std::sqrt(1 + delta(m, -1));
}

double W(int m, int n, int l, const std::vector<BandMatrix>& bands) {
    if (m > 0) return P(1, m + 1, n, l, bands) + P(-1, -m - 1, n, l, bands);
    return P(1, m - 1, n, l, bands) - P(-1, -m + 1, n, l, bands);  // m < 0; w = 0 when m = 0
}

}  // namespace

ShRotation sh_rotation_matrix(const Mat3& rotation, int max_order) {
    if (!is_rotation_matrix(rotation))
        throw std::invalid_argument("sh_rotation_matrix: input is not a rotation");

    std::vector<BandMatrix> bands;
    bands.reserve(max_order + 1);
    bands.emplace_back(0);
    bands[0].at(0, 0) = 1.0;

    if (max_order >= 1) {
        // Band 1 is the 3x3 rotation permuted to the basis order (y, z, x).
        BandMatrix b1(1);
        static const int perm[3] = {1, 2, 0};
        for (int i = 0; i < 3; i++)
            for (int j = 0; j < 3; j++) b1.at(i - 1, j - 1) = rotation(perm[i], perm[j]);
        bands.push_back(std::move(b1));
    }

    for (int l = 2; l <= max_order; l++) {
        BandMatrix bl(l);
        for (int m = -l; m <= l; m++) {
            for (int n = -l; n <= l; n++) {
                double denom = (std::abs(n) == l) ? double(2 * l) * (2 * l - 1)
                                                  : double(l + n) * (l - n);
                double dm0 = delta(m, 0);
                double u = std::sqrt(double(l + m) * (l - m) / denom);
                double v = 0.5 * std::sqrt((1 + dm0) * (l + std::abs(m) - 1) * (l + std::abs(m)) / denom) *
                           (1 - 2 * dm0);
                double w = -0.5 * std::sqrt(double(l - std::abs(m) - 1) * (l - std::abs(m)) / denom) *
                           (1 - dm0);
                double e = 0;
                if (u != 0) e += u * U(m, n, l, bands);
                if (v != 0) e += v * V(m, n, l, bands);
                if (w != 0) e += w * W(m, n, l, bands);
                bl.at(m, n) = e;
            }
        }
        bands.push_back(std::move(bl));
    }

    ShRotation out;
    out.max_order = max_order;
    out.blocks.reserve(max_order + 1);
    for (auto& b : bands) out.blocks.push_back(std::move(b.v));
    return out;
}

ShCoefficients ShRotation::apply(const ShCoefficients& coeffs) const {
    if (coeffs.max_order != max_order)
        throw std::invalid_argument("ShRotation::apply: order mismatch");
    ShCoefficients out(coeffs.max_order, coeffs.channels);
    for (int c = 0; c < coeffs.channels; c++) {
        const double* src = coeffs.channel(c);
        double* dst = out.channel(c);
        for (int l = 0; l <= max_order; l++) {
            int sz = 2 * l + 1;
            int base = l * l;
            const double* blk = blocks[l].data();
            for (int i = 0; i < sz; i++) {
                double s = 0;
                for (int j = 0; j < sz; j++) s += blk[size_t(i) * sz + j] * src[base + j];
                dst[base + i] = s;
            }
        }
    }
    return out;
}

ShCoefficients rotate_env_coeffs(const ShCoefficients& coeffs, const Mat3& rotation) {
    return sh_rotation_matrix(rotation, coeffs.max_order).apply(coeffs);
}

ShCoefficients rotate_env_coeffs(const ShCoefficients& coeffs, const ShRotation& rotation) {
    return rotation.apply(coeffs);
}

Rgb integrate_radiance(const ShCoefficients& transfer, const ShCoefficients& env) {
    if (transfer.channels != 1)
        throw std::invalid_argument("integrate_radiance: transfer must be monochrome");
    if (env.channels != 3) throw std::invalid_argument("integrate_radiance: env must be RGB");
    if (transfer.max_order > env.max_order)
        throw std::invalid_argument("integrate_radiance: transfer order exceeds env order");
    int n = transfer.coeffs_per_channel();
    Rgb out;
    const double* t = transfer.channel(0);
    for (int c = 0; c < 3; c++) {
        const double* e = env.channel(c);
        double s = 0;
        for (int i = 0; i < n; i++) s += t[i] * e[i];
        if (c == 0) out.r = s;
        else if (c == 1) out.g = s;
        else out.b = s;
    }
    return out;
}

ShCoefficients point_light_sh(const Vec3& dir, const ShCoefficients& radiance_coeffs_at_ref,
                              double ref_distance, double distance) {
    if (distance <= 0) throw std::invalid_argument("point_light_sh: distance must be positive");
    Mat3 r = rotation_between(Vec3{0, 0, 1}, normalize(dir)).to_matrix();
    ShCoefficients rotated = rotate_env_coeffs(radiance_coeffs_at_ref, r);
    double falloff = (ref_distance / distance) * (ref_distance / distance);
    return rotated * falloff;
}

void save_sh_text(const std::string& path, const ShCoefficients& coeffs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("sh: cannot open for write: " + path);
    out << "sh-coeffs v1 order=" << coeffs.max_order << " channels=" << coeffs.channels << "\n";
    out.precision(17);
    for (int l = 0; l <= coeffs.max_order; l++)
        for (int m = -l; m <= l; m++) {
            out << l << " " << m;
            for (int c = 0; c < coeffs.channels; c++) out << " " << coeffs.at(l, m, c);
            out << "\n";
        }
    if (!out) throw std::runtime_error("sh: write failed: " + path);
}

ShCoefficients load_sh_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("sh: cannot open: " + path);
    std::string header;
    std::getline(in, header);
    int order = -1, channels = 0;
    {
        std::istringstream hs(header);
        std::string tag, ver, kv;
        hs >> tag >> ver;
        if (tag != "sh-coeffs" || ver != "v1")
            throw std::runtime_error("sh: bad header in " + path);
        while (hs >> kv) {
            if (kv.rfind("order=", 0) == 0) order = std::stoi(kv.substr(6));
            else if (kv.rfind("channels=", 0) == 0) channels = std::stoi(kv.substr(9));
        }
    }
    if (order < 0 || (channels != 1 && channels != 3))
        throw std::runtime_error("sh: bad header fields in " + path);
    ShCoefficients coeffs(order, channels);
    int l, m;
    while (in >> l >> m) {
        if (l < 0 || l > order || m < -l || m > l)
            throw std::runtime_error("sh: out-of-range (l, m) in " + path);
        for (int c = 0; c < channels; c++)
            if (!(in >> coeffs.at(l, m, c))) throw std::runtime_error("sh: truncated line in " + path);
    }
    return coeffs;
}

}  // namespace eyevol
