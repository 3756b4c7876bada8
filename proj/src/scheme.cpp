#include "mmf/scheme.hpp"

#include <cmath>
#include <stdexcept>

namespace mmf {

namespace {

int mirror(int i, int n) {
    if (i < 0) return 0;
    if (i >= n) return n - 1;
    return i;
}

Eigen::Vector3d pixel(const MultiChannelImage& img, int x, int y) {
    const Vec v = img.value(mirror(x, img.nx), mirror(y, img.ny), 0);
    return {v.c[0], v.c[1], v.c[2]};
}

Eigen::Matrix3d frame_from_patch(const Eigen::Vector3d P[3][3], double h,
                                 Eigen::Vector3d* lambdas) {
    const Eigen::Vector3d ux = (P[2][1] - P[0][1]) / (2.0 * h);
    const Eigen::Vector3d uy = (P[1][2] - P[1][0]) / (2.0 * h);
    const Eigen::Matrix3d C = ux * ux.transpose() + uy * uy.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(C);
    auto sign_fix = [](Eigen::Vector3d v) {
        int lead = 0;
        for (int r = 1; r < 3; ++r)
            if (std::abs(v(r)) > std::abs(v(lead))) lead = r;
        if (v(lead) < 0) v = -v;
        return v;
    };
    const double lam0 = std::max(es.eigenvalues()(2), 0.0);
    // Eigenvectors of the near-null tail are arbitrary up to rotation within
    // their subspace, so take them from the solver only while the eigenvalue
    // is meaningfully nonzero and complete the rest deterministically from
    // the canonical axes (Gram-Schmidt against the columns already chosen).
    int kept = 0;
    Eigen::Matrix3d Q;
    for (int k = 0; k < 3; ++k) {
        if (lambdas) (*lambdas)(k) = es.eigenvalues()(2 - k);
        if (es.eigenvalues()(2 - k) > 1e-10 * lam0 && lam0 > 0.0) {
            Q.col(k) = sign_fix(es.eigenvectors().col(2 - k));
            ++kept;
        }
    }
    for (int k = kept; k < 3; ++k) {
        Eigen::Vector3d best = Eigen::Vector3d::Zero();
        double best_n = -1.0;
        for (int axis = 0; axis < 3; ++axis) {
            Eigen::Vector3d v = Eigen::Vector3d::Unit(axis);
            for (int j = 0; j < k; ++j) v -= Q.col(j).dot(v) * Q.col(j);
            if (v.norm() > best_n) {
                best_n = v.norm();
                best = v;
            }
        }
        Q.col(k) = sign_fix(best / best_n);
    }
    return Q;
}

// Minmod: when the one-sided differences disagree in sign, keep their sum in
// the larger-magnitude slot and zero the other.
void minmod(double& p, double& m) {
    if (p * m < 0.0) {
        const double sum = p + m;
        if (std::abs(p) >= std::abs(m)) {
            p = sum;
            m = 0.0;
        } else {
            m = sum;
            p = 0.0;
        }
    }
}

// One-sided derivative in direction (d1,d2): each term uses the one-sided
// x/y difference whose side matches the sign of its coefficient.
double onesided_dir(double d1, double d2, double xp, double xm, double yp, double ym,
                    bool plus) {
    const double tx = (d1 >= 0.0) == plus ? xp : xm;
    const double ty = (d2 >= 0.0) == plus ? yp : ym;
    return d1 * tx + d2 * ty;
}

Eigen::Vector3d step_pixel(const MultiChannelImage& img, int x, int y,
                           const SchemeConfig& cfg) {
    Eigen::Vector3d P[3][3];
    for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) P[dx + 1][dy + 1] = pixel(img, x + dx, y + dy);

    const double h = cfg.h, h2 = h * h;
    const Eigen::Vector3d lap =
        (P[2][1] + P[0][1] + P[1][2] + P[1][0] - 4.0 * P[1][1]) / h2;

    const Eigen::Matrix3d Q = frame_from_patch(P, h, nullptr);
    Eigen::Vector3d R[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) R[i][j] = Q.transpose() * P[i][j];

    const Eigen::Vector3d hux = (R[2][1] - R[0][1]) / (2.0 * h);
    const Eigen::Vector3d huy = (R[1][2] - R[1][0]) / (2.0 * h);
    const Eigen::Vector3d huxx = (R[2][1] - 2.0 * R[1][1] + R[0][1]) / h2;
    const Eigen::Vector3d huyy = (R[1][2] - 2.0 * R[1][1] + R[1][0]) / h2;
    const Eigen::Vector3d huxy =
        (R[2][2] - R[2][0] - R[0][2] + R[0][0]) / (4.0 * h2);

    // The directional branch must not be decided by roundoff: measure the
    // gradient against the value spread of the whole patch.
    double range = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) range = std::max(range, (R[i][j] - R[1][1]).norm());
    double c = 1.0, s = 0.0;
    const double gn = std::hypot(hux(0), huy(0));
    if (gn > 1e-8 * range / h) {
        c = hux(0) / gn;
        s = huy(0) / gn;
    }

    const Eigen::Vector3d ueta = c * hux + s * huy;
    const Eigen::Vector3d uxi = -s * hux + c * huy;
    const Eigen::Vector3d uee = c * c * huxx + 2.0 * c * s * huxy + s * s * huyy;
    const Eigen::Vector3d uxx_dir = s * s * huxx - 2.0 * c * s * huxy + c * c * huyy;
    const Eigen::Vector3d uex =
        c * s * (huyy - huxx) + (c * c - s * s) * huxy;

    Eigen::Vector3d z2 = Eigen::Vector3d::Zero();
    z2(0) = 2.0 * uxx_dir(0);
    z2(1) = 2.0 * uee(1);

    // One-sided differences for the two channels used in z3.
    double xp[2], xm[2], yp[2], ym[2];
    for (int ch = 0; ch < 2; ++ch) {
        xp[ch] = (R[2][1](ch) - R[1][1](ch)) / h;
        xm[ch] = (R[1][1](ch) - R[0][1](ch)) / h;
        yp[ch] = (R[1][2](ch) - R[1][1](ch)) / h;
        ym[ch] = (R[1][1](ch) - R[1][0](ch)) / h;
        minmod(xp[ch], xm[ch]);
        minmod(yp[ch], ym[ch]);
    }
    const double ueta_p = onesided_dir(c, s, xp[0], xm[0], yp[0], ym[0], true);
    const double ueta_m = onesided_dir(c, s, xp[0], xm[0], yp[0], ym[0], false);
    const double vxi_p = onesided_dir(-s, c, xp[1], xm[1], yp[1], ym[1], true);
    const double vxi_m = onesided_dir(-s, c, xp[1], xm[1], yp[1], ym[1], false);

    const double Rv =
        2.0 * uex(1) * uxi(1) / (vxi_p * vxi_p + vxi_m * vxi_m + 2.0 * cfg.eps);
    const double Ru =
        2.0 * uex(0) * ueta(0) / (ueta_p * ueta_p + ueta_m * ueta_m + 2.0 * cfg.eps);

    Eigen::Vector3d z3 = Eigen::Vector3d::Zero();
    z3(0) = Rv * (Rv > 0.0 ? ueta_m : ueta_p);
    z3(1) = Ru * (Ru > 0.0 ? vxi_m : vxi_p);

    // The Laplacian term is rotation invariant, so it is taken in the original
    // value coordinates; the anisotropic parts are rotated back.
    return P[1][1] + cfg.tau * ((1.0 - cfg.anti_diffusion) * lap + Q * (z2 - z3));
}

}  // namespace

PatchFrame patch_frame(const MultiChannelImage& img, int x, int y, const SchemeConfig& cfg) {
    Eigen::Vector3d P[3][3];
    for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) P[dx + 1][dy + 1] = pixel(img, x + dx, y + dy);
    PatchFrame fr;
    fr.Q = frame_from_patch(P, cfg.h, &fr.lambdas);
    Eigen::Vector3d R[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) R[i][j] = fr.Q.transpose() * P[i][j];
    const double gx = (R[2][1](0) - R[0][1](0)) / (2.0 * cfg.h);
    const double gy = (R[1][2](0) - R[1][0](0)) / (2.0 * cfg.h);
    double range = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) range = std::max(range, (R[i][j] - R[1][1]).norm());
    const double gn = std::hypot(gx, gy);
    if (gn > 1e-8 * range / cfg.h) {
        fr.c = gx / gn;
        fr.s = gy / gn;
    } else {
        fr.degenerate = true;
    }
    return fr;
}

MultiChannelImage scheme_step(const MultiChannelImage& img, const SchemeConfig& cfg,
                              ExecutionPolicy policy) {
    if (img.channels != 3) throw std::invalid_argument("scheme needs 3 channels");
    if (img.dims != 2 || img.nx < 3 || img.ny < 3)
        throw std::invalid_argument("scheme needs a planar image of size >= 3x3");
    MultiChannelImage out = img;
    const bool par = policy == ExecutionPolicy::Parallel;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
    for (int y = 0; y < img.ny; ++y)
        for (int x = 0; x < img.nx; ++x) {
            const Eigen::Vector3d v = step_pixel(img, x, y, cfg);
            out.set_value(x, y, 0, Vec(v(0), v(1), v(2)));
        }
    (void)par;
    return out;
}

MultiChannelImage evolve(const MultiChannelImage& img, const SchemeConfig& cfg,
                         ExecutionPolicy policy) {
    MultiChannelImage cur = img;
    for (int k = 0; k < cfg.steps; ++k) cur = scheme_step(cur, cfg, policy);
    return cur;
}

}  // namespace mmf
