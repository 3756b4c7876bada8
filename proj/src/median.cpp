#include "mmf/median.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mmf {

namespace {

constexpr double kStepFloorRel = 1e-13;

Eigen::MatrixXd covariance_about_mean(const PointCloud& cloud, Vec* mean_out) {
    const int n = cloud.dim;
    Vec mean = Vec::zero(n);
    for (const Vec& p : cloud.pts) mean += p;
    mean *= 1.0 / double(cloud.size());
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (const Vec& p : cloud.pts) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) C(i, j) += (p[i] - mean[i]) * (p[j] - mean[j]);
    }
    C /= double(cloud.size());
    if (mean_out) *mean_out = mean;
    return C;
}

// Eigenvalues ascending from Eigen; we want descending.
void eigen_descending(const Eigen::MatrixXd& C, Eigen::MatrixXd& P, Eigen::VectorXd& lam) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    const int n = int(C.rows());
    P.resize(n, n);
    lam.resize(n);
    for (int i = 0; i < n; ++i) {
        lam(i) = es.eigenvalues()(n - 1 - i);
        P.col(i) = es.eigenvectors().col(n - 1 - i);
    }
}

// Rank of the cloud's covariance relative to its largest eigenvalue.
int cloud_rank(const PointCloud& cloud, Eigen::MatrixXd* P_out = nullptr,
               Eigen::VectorXd* lam_out = nullptr, Vec* mean_out = nullptr) {
    Eigen::MatrixXd C = covariance_about_mean(cloud, mean_out);
    Eigen::MatrixXd P;
    Eigen::VectorXd lam;
    eigen_descending(C, P, lam);
    int rank = 0;
    const double tol = 1e-18 * std::max(lam(0), 0.0);
    for (int i = 0; i < cloud.dim; ++i)
        if (lam(i) > tol && lam(i) > 0.0) ++rank;
    if (P_out) *P_out = P;
    if (lam_out) *lam_out = lam;
    return rank;
}

struct EvalResult {
    double f = 0.0;
    Vec g;
    double residual = 0.0;  // subgradient residual; equals |g| for smooth objectives
};

// Gradient descent with backtracking line search (plain decrease acceptance).
// Step for the next iteration is seeded from the Barzilai-Borwein spectral
// estimate when available, which keeps the iteration count manageable on
// ill-conditioned clouds; backtracking preserves monotone decrease.
SolverReport descend(const std::function<EvalResult(const Vec&, bool)>& eval, Vec x0,
                     double diam, double gscale, const SolverConfig& cfg,
                     bool polish = false) {
    SolverReport rep;
    rep.minimiser = x0;
    if (diam <= 0.0) {
        rep.converged = true;
        return rep;
    }
    const double step_floor = kStepFloorRel * diam;
    const double tol = cfg.grad_tol * gscale;

    Vec x = x0;
    EvalResult cur = eval(x, true);
    double step = cfg.initial_step * diam;
    Vec prev_x, prev_g;
    bool have_prev = false;

    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        if (cur.residual <= tol) {
            rep.converged = true;
            break;
        }
        const double gn = cur.g.norm();
        if (gn == 0.0) break;
        Vec d = cur.g * (-1.0 / gn);

        double s = step;
        if (have_prev) {
            Vec dx = x - prev_x, dg = cur.g - prev_g;
            const double den = dg.norm2();
            const double num = std::fabs(dx.dot(dg));
            if (den > 0.0 && num > 0.0) s = (num / den) * gn;
        }
        s = std::min(s, 10.0 * diam);
        s = std::max(s, step_floor);

        bool accepted = false;
        Vec xt;
        EvalResult trial;
        bool trial_has_grad = true;
        // Near a shallow smoothed minimum the true decrease drops below the
        // roundoff level of the objective sum; in polish mode fall back to
        // comparing gradient norms inside that noise band.
        const double slack = polish ? 1e-14 * std::fabs(cur.f) : 0.0;
        while (s >= step_floor) {
            xt = x + s * d;
            trial = eval(xt, trial_has_grad);
            if (trial.f < cur.f - slack) {
                accepted = true;
                break;
            }
            if (polish && std::fabs(trial.f - cur.f) <= slack) {
                if (!trial_has_grad) trial = eval(xt, true);
                trial_has_grad = true;
                if (trial.residual < cur.residual) {
                    accepted = true;
                    break;
                }
            }
            trial_has_grad = false;  // objective-only probes while shrinking
            s *= cfg.shrink;
        }
        if (!accepted) break;  // step collapse: flat to machine precision
        if (!trial_has_grad) trial = eval(xt, true);
        prev_x = x;
        prev_g = cur.g;
        have_prev = true;
        x = xt;
        cur = trial;
        step = s * cfg.grow;
    }
    rep.minimiser = x;
    rep.iterations = it;
    rep.final_grad_norm = cur.g.norm();
    if (cur.residual <= tol) rep.converged = true;
    return rep;
}

// ---- L1 -------------------------------------------------------------------

EvalResult l1_eval(const Vec& x, const PointCloud& cloud, double floor) {
    EvalResult r;
    r.g = Vec::zero(cloud.dim);
    int skipped = 0;
    for (const Vec& p : cloud.pts) {
        Vec d = x - p;
        double dist = d.norm();
        r.f += dist;
        if (dist < floor) {
            ++skipped;
            continue;
        }
        r.g += d * (1.0 / dist);
    }
    // Each skipped term contributes a unit ball to the subdifferential.
    const double gn = r.g.norm();
    r.residual = skipped > 0 ? std::max(0.0, gn - double(skipped)) : gn;
    return r;
}

// Exact solution for rank<=1 clouds: univariate median along the principal
// axis; midpoint of the flat interval for even counts.
SolverReport l1_collinear(const PointCloud& cloud, const Eigen::MatrixXd& P, const Vec& mean,
                          double diam) {
    const int n = cloud.dim;
    Vec axis = Vec::zero(n);
    for (int i = 0; i < n; ++i) axis[i] = P(i, 0);
    std::vector<double> t(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) t[i] = (cloud.pts[i] - mean).dot(axis);
    std::sort(t.begin(), t.end());
    const std::size_t N = t.size();
    SolverReport rep;
    double ts;
    if (N % 2 == 1) {
        ts = t[N / 2];
    } else {
        const double a = t[N / 2 - 1], b = t[N / 2];
        ts = 0.5 * (a + b);
        if (b - a > 1e-12 * std::max(diam, 1.0)) rep.degenerate = true;
    }
    rep.minimiser = mean + ts * axis;
    rep.converged = true;
    return rep;
}

// ---- Oja brute-force kernels ---------------------------------------------

// Fused objective+gradient, k=2 on 2D data. eps2 > 0 replaces |cr| by
// sqrt(cr^2 + eps2): the smoothed surrogate used by the continuation polish.
EvalResult oja2_brute_2d(const Vec& x, const PointCloud& cloud, double vf, bool want_grad,
                         double eps2 = 0.0) {
    const std::size_t N = cloud.size();
    std::vector<double> ax(N), ay(N);
    for (std::size_t i = 0; i < N; ++i) {
        ax[i] = cloud.pts[i][0] - x[0];
        ay[i] = cloud.pts[i][1] - x[1];
    }
    EvalResult r;
    r.g = Vec::zero(2);
    double F = 0.0, gx = 0.0, gy = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double fi = 0.0, gxi = 0.0, gyi = 0.0;
        const double aix = ax[i], aiy = ay[i];
        for (std::size_t j = i + 1; j < N; ++j) {
            const double cr = aix * ay[j] - aiy * ax[j];
            if (eps2 > 0.0) {
                const double m = std::sqrt(cr * cr + eps2);
                fi += m;
                if (want_grad) {
                    const double s = 0.5 * cr / m;
                    gxi += s * (aiy - ay[j]);
                    gyi += s * (ax[j] - aix);
                }
                continue;
            }
            const double ab = std::fabs(cr);
            fi += ab;
            if (want_grad && ab >= vf) {
                const double s = cr > 0 ? 0.5 : -0.5;
                gxi += s * (aiy - ay[j]);
                gyi += s * (ax[j] - aix);
            }
        }
        F += fi;
        gx += gxi;
        gy += gyi;
    }
    r.f = 0.5 * F;
    r.g[0] = gx;
    r.g[1] = gy;
    r.residual = r.g.norm();
    return r;
}

// Fused objective+gradient, k=2 on 3D data (triangle areas of 3D points).
EvalResult oja2_brute_3d(const Vec& x, const PointCloud& cloud, double vf, bool want_grad,
                         bool parallel, double eps2 = 0.0) {
    const std::size_t N = cloud.size();
    std::vector<double> ax(N), ay(N), az(N);
    for (std::size_t i = 0; i < N; ++i) {
        ax[i] = cloud.pts[i][0] - x[0];
        ay[i] = cloud.pts[i][1] - x[1];
        az[i] = cloud.pts[i][2] - x[2];
    }
    const double vf2 = vf * vf;
    std::vector<double> rowF(N, 0.0), rowGx(N, 0.0), rowGy(N, 0.0), rowGz(N, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
#endif
    for (std::ptrdiff_t ii = 0; ii < std::ptrdiff_t(N); ++ii) {
        const std::size_t i = std::size_t(ii);
        const double aix = ax[i], aiy = ay[i], aiz = az[i];
        double fi = 0.0, gx = 0.0, gy = 0.0, gz = 0.0;
        for (std::size_t j = i + 1; j < N; ++j) {
            const double cx = aiy * az[j] - aiz * ay[j];
            const double cy = aiz * ax[j] - aix * az[j];
            const double cz = aix * ay[j] - aiy * ax[j];
            const double n2 = cx * cx + cy * cy + cz * cz;
            if (eps2 <= 0.0 && n2 < vf2) continue;
            const double inv = 1.0 / std::sqrt(n2 + eps2);
            fi += n2 * inv;
            if (want_grad) {
                const double dx = aix - ax[j], dy = aiy - ay[j], dz = aiz - az[j];
                gx += inv * (dy * cz - dz * cy);
                gy += inv * (dz * cx - dx * cz);
                gz += inv * (dx * cy - dy * cx);
            }
        }
        rowF[i] = fi;
        rowGx[i] = gx;
        rowGy[i] = gy;
        rowGz[i] = gz;
    }
    EvalResult r;
    r.g = Vec::zero(3);
    double F = 0.0, gx = 0.0, gy = 0.0, gz = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        F += rowF[i];
        gx += rowGx[i];
        gy += rowGy[i];
        gz += rowGz[i];
    }
    r.f = 0.5 * F;
    r.g[0] = 0.5 * gx;
    r.g[1] = 0.5 * gy;
    r.g[2] = 0.5 * gz;
    r.residual = r.g.norm();
    return r;
}

// Fused objective+gradient, k=3 (tetrahedron volumes).
EvalResult oja3_brute(const Vec& x, const PointCloud& cloud, double vf, bool want_grad,
                      bool parallel, double eps2 = 0.0) {
    const std::size_t N = cloud.size();
    std::vector<double> ax(N), ay(N), az(N);
    for (std::size_t i = 0; i < N; ++i) {
        ax[i] = cloud.pts[i][0] - x[0];
        ay[i] = cloud.pts[i][1] - x[1];
        az[i] = cloud.pts[i][2] - x[2];
    }
    const double vol_floor6 = 6.0 * vf;
    std::vector<double> rowF(N, 0.0), rowGx(N, 0.0), rowGy(N, 0.0), rowGz(N, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
#endif
    for (std::ptrdiff_t ii = 0; ii < std::ptrdiff_t(N); ++ii) {
        const std::size_t i = std::size_t(ii);
        double fi = 0.0, gx = 0.0, gy = 0.0, gz = 0.0;
        for (std::size_t j = i + 1; j < N; ++j) {
            // cross of a_j and a_k reused via expansion: det = a_i . (a_j x a_k)
            const double bx = ax[j], by = ay[j], bz = az[j];
            const double ix_ = ax[i], iy_ = ay[i], iz_ = az[i];
            // precompute a_i x a_j
            const double ijx = iy_ * bz - iz_ * by;
            const double ijy = iz_ * bx - ix_ * bz;
            const double ijz = ix_ * by - iy_ * bx;
            for (std::size_t k = j + 1; k < N; ++k) {
                const double cxk = ax[k], cyk = ay[k], czk = az[k];
                const double det = ijx * cxk + ijy * cyk + ijz * czk;
                const double ad =
                    eps2 > 0.0 ? std::sqrt(det * det + eps2) : std::fabs(det);
                fi += ad;
                if (want_grad && (eps2 > 0.0 || ad >= vol_floor6)) {
                    const double s = eps2 > 0.0 ? det / ad : (det > 0 ? 1.0 : -1.0);
                    // b x c + c x a + a x b with a=a_i, b=a_j, c=a_k
                    const double sx = (by * czk - bz * cyk) + (cyk * iz_ - czk * iy_) + ijx;
                    const double sy = (bz * cxk - bx * czk) + (czk * ix_ - cxk * iz_) + ijy;
                    const double sz = (bx * cyk - by * cxk) + (cxk * iy_ - cyk * ix_) + ijz;
                    gx -= s * sx;
                    gy -= s * sy;
                    gz -= s * sz;
                }
            }
        }
        rowF[i] = fi;
        rowGx[i] = gx;
        rowGy[i] = gy;
        rowGz[i] = gz;
    }
    EvalResult r;
    r.g = Vec::zero(3);
    double F = 0.0, gx = 0.0, gy = 0.0, gz = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        F += rowF[i];
        gx += rowGx[i];
        gy += rowGy[i];
        gz += rowGz[i];
    }
    r.f = F / 6.0;
    r.g[0] = gx / 6.0;
    r.g[1] = gy / 6.0;
    r.g[2] = gz / 6.0;
    r.residual = r.g.norm();
    return r;
}

// Exact O(N log N) evaluation of the same pair sums for k=2 on 2D data:
// sort directions around the candidate; for each point, the positive-cross
// partners occupy the open angular window (theta, theta+pi), so prefix vector
// sums give the objective and window counts give the gradient sign weights.
EvalResult oja2_fast_2d(const Vec& x, const PointCloud& cloud, double len_floor) {
    const std::size_t N = cloud.size();
    struct Entry {
        double th, ax, ay;
    };
    std::vector<Entry> e;
    e.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double axv = cloud.pts[i][0] - x[0];
        const double ayv = cloud.pts[i][1] - x[1];
        if (axv * axv + ayv * ayv < len_floor * len_floor) continue;  // coincident: no signal
        e.push_back({std::atan2(ayv, axv), axv, ayv});
    }
    const std::size_t M = e.size();
    EvalResult r;
    r.g = Vec::zero(2);
    if (M < 2) {
        r.residual = 0.0;
        return r;
    }
    std::sort(e.begin(), e.end(), [](const Entry& a, const Entry& b) { return a.th < b.th; });
    std::vector<double> th(2 * M), px(2 * M + 1, 0.0), py(2 * M + 1, 0.0);
    for (std::size_t i = 0; i < M; ++i) {
        th[i] = e[i].th;
        th[i + M] = e[i].th + 2.0 * M_PI;
    }
    for (std::size_t i = 0; i < 2 * M; ++i) {
        px[i + 1] = px[i] + e[i % M].ax;
        py[i + 1] = py[i] + e[i % M].ay;
    }
    const double Tx = px[M], Ty = py[M];
    double F = 0.0, gx = 0.0, gy = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        // open window (th_i, th_i + pi)
        const auto lo = std::upper_bound(th.begin() + long(i), th.end(), th[i]) - th.begin();
        const auto hi = std::lower_bound(th.begin() + lo, th.end(), th[i] + M_PI) - th.begin();
        const double Sx = px[hi] - px[lo], Sy = py[hi] - py[lo];
        const long cnt_pos = hi - lo;
        const long eq = lo - long(i) - 1;  // same-direction partners: cross exactly 0
        const long cnt_neg = long(M) - 1 - cnt_pos - eq;
        F += e[i].ax * (2.0 * Sy - Ty) - e[i].ay * (2.0 * Sx - Tx);
        const double w = double(cnt_pos - cnt_neg);
        gx -= 0.5 * w * e[i].ay;  // 1/2 * w * perp(a), perp(p)=(p_y,-p_x), sign from
        gy += 0.5 * w * e[i].ax;  //   d|cross|/dx = sign * perp(a_i - a_j)
    }
    r.f = 0.25 * F;
    r.g[0] = gx;
    r.g[1] = gy;
    r.residual = r.g.norm();
    return r;
}

double oja_gscale(const PointCloud& cloud, int k, double diam) {
    const double N = double(cloud.size());
    if (k == 2) return 0.25 * N * (N - 1.0) * diam;
    return N * (N - 1.0) * (N - 2.0) / 12.0 * diam * diam;
}

constexpr std::size_t kFastOjaThreshold = 600;

EvalResult oja_eval(const Vec& x, const PointCloud& cloud, int k, const SolverConfig& cfg,
                    double diam, bool want_grad, double eps2 = 0.0) {
    const double vf = cfg.volume_floor_rel * std::pow(diam, double(k));
    if (k == 2 && cloud.dim == 2) {
        if (eps2 <= 0.0 && cfg.use_fast_oja2 && cloud.size() >= kFastOjaThreshold)
            return oja2_fast_2d(x, cloud, cfg.volume_floor_rel * diam);
        return oja2_brute_2d(x, cloud, vf, want_grad, eps2);
    }
    if (k == 2) return oja2_brute_3d(x, cloud, vf, want_grad, cfg.parallel, eps2);
    return oja3_brute(x, cloud, vf, want_grad, cfg.parallel, eps2);
}

}  // namespace

Vec WhiteningTransform::apply(const Vec& x) const {
    Vec y = Vec::zero(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) y[i] += W[i][j] * (x[j] - mean[j]);
    return y;
}

Vec WhiteningTransform::invert(const Vec& y) const {
    Vec x = mean;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) x[i] += Winv[i][j] * y[j];
    return x;
}

Vec componentwise_median(const PointCloud& cloud) {
    Vec m = Vec::zero(cloud.dim);
    std::vector<double> t(cloud.size());
    for (int c = 0; c < cloud.dim; ++c) {
        for (std::size_t i = 0; i < cloud.size(); ++i) t[i] = cloud.pts[i][c];
        const std::size_t mid = t.size() / 2;
        std::nth_element(t.begin(), t.begin() + long(mid), t.end());
        double v = t[mid];
        if (t.size() % 2 == 0) {
            double lo = *std::max_element(t.begin(), t.begin() + long(mid));
            v = 0.5 * (lo + v);
        }
        m[c] = v;
    }
    return m;
}

Vec medoid(const PointCloud& cloud) {
    const std::size_t N = cloud.size();
    std::size_t best = 0;
    double best_sum = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < N; ++j) s += (cloud.pts[i] - cloud.pts[j]).norm();
        if (s < best_sum) {  // strict: ties keep the lowest index
            best_sum = s;
            best = i;
        }
    }
    return cloud.pts[best];
}

double l1_objective(const Vec& x, const PointCloud& cloud) {
    double f = 0.0;
    for (const Vec& p : cloud.pts) f += (x - p).norm();
    return f;
}

Vec l1_gradient(const Vec& x, const PointCloud& cloud, double distance_floor) {
    return l1_eval(x, cloud, distance_floor).g;
}

double oja_objective(const Vec& x, const PointCloud& cloud, int k) {
    SolverConfig cfg;
    cfg.use_fast_oja2 = false;
    return oja_eval(x, cloud, k, cfg, cloud.diameter(), false).f;
}

Vec oja_gradient(const Vec& x, const PointCloud& cloud, int k, double volume_floor) {
    if (k == 2 && cloud.dim == 2) return oja2_brute_2d(x, cloud, volume_floor, true).g;
    if (k == 2) return oja2_brute_3d(x, cloud, volume_floor, true, false).g;
    return oja3_brute(x, cloud, volume_floor, true, false).g;
}

SolverReport l1_median(const PointCloud& cloud, const SolverConfig& cfg) {
    const double diam = cloud.diameter();
    if (diam <= 0.0) {
        SolverReport rep;
        rep.minimiser = cloud.pts.front();
        rep.converged = true;
        return rep;
    }
    Eigen::MatrixXd P;
    Eigen::VectorXd lam;
    Vec mean;
    const int rank = cloud_rank(cloud, &P, &lam, &mean);
    if (rank <= 1) return l1_collinear(cloud, P, mean, diam);

    const double floor = cfg.distance_floor_rel * diam;
    auto eval = [&](const Vec& x, bool) { return l1_eval(x, cloud, floor); };

    // The minimiser often sits at a data point, where the objective is not
    // differentiable and descent cannot reach the gradient tolerance. The
    // optimality of each data point is decidable directly from the
    // subgradient residual, so scan them first.
    const double tol = cfg.grad_tol * double(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const EvalResult at = l1_eval(cloud.pts[i], cloud, floor);
        if (at.residual <= tol) {
            SolverReport rep;
            rep.minimiser = cloud.pts[i];
            rep.final_grad_norm = at.residual;
            rep.converged = true;
            return rep;
        }
    }
    // Polish-mode acceptance: near the smooth minimum the per-step decrease
    // drops below the roundoff of the distance sum before the gradient
    // tolerance is met.
    return descend(eval, componentwise_median(cloud), diam, double(cloud.size()), cfg, true);
}

SolverReport oja_median(const PointCloud& cloud, int k, const SolverConfig& cfg) {
    const double diam = cloud.diameter();
    SolverReport rep;
    if (diam <= 0.0) {
        rep.minimiser = cloud.pts.front();
        rep.converged = true;
        return rep;
    }
    const int rank = cloud_rank(cloud);
    const int needed = k;  // k independent directions needed for nonzero simplices
    if (rank < needed) {
        rep.minimiser = componentwise_median(cloud);
        rep.degenerate = true;
        return rep;
    }

    PointCloud work = cloud;
    WhiteningTransform T;
    bool whitened = false;
    if (k == cloud.dim) {  // affine equivariance permits solving in whitened coordinates
        T = covariance_whitening(cloud);
        if (!T.degenerate) {
            whitened = true;
            for (Vec& p : work.pts) p = T.apply(p);
        }
    }
    // Whitened clouds of affinely related inputs are rotations of each other,
    // so the scale reference in that frame must be rotation invariant (the
    // bounding-box diagonal is not): use the diameter of the smallest
    // enclosing sphere about the centroid.
    double wdiam = diam;
    if (whitened) {
        Vec centroid = Vec::zero(work.dim);
        for (const Vec& p : work.pts) centroid += p;
        centroid *= 1.0 / double(work.size());
        double r2 = 0.0;
        for (const Vec& p : work.pts) r2 = std::max(r2, (p - centroid).norm2());
        wdiam = 2.0 * std::sqrt(r2);
    }
    auto eval = [&](const Vec& x, bool want_grad) {
        return oja_eval(x, work, k, cfg, wdiam, want_grad);
    };
    const double gscale = oja_gscale(work, k, wdiam);

    // For small planar clouds the piecewise linear objective can be minimised
    // exactly: the minimum is attained at an intersection of two lines through
    // data-point pairs, so enumerating those intersections finds it. When the
    // minimising set is a whole flat cell of the line arrangement, the tied
    // candidates are resolved toward the point of the cell nearest the
    // centroid; the perpendicular feet from the centroid onto the lines (and
    // the centroid itself) are added as candidates so that point is among
    // them. Both the objective values and the distances are rotation
    // invariant in the whitened frame, so the selection stays affine
    // equivariant.
    if (work.dim == 2 && k == 2 && work.size() <= 32) {
        Vec centre = Vec::zero(2);
        for (const Vec& p : work.pts) centre += p;
        centre *= 1.0 / double(work.size());
        struct Line {
            Vec p, d;
        };
        std::vector<Line> lines;
        for (std::size_t i = 0; i < work.size(); ++i)
            for (std::size_t j = i + 1; j < work.size(); ++j) {
                const Vec d = work.pts[j] - work.pts[i];
                if (d.norm() > 1e-12 * wdiam) lines.push_back({work.pts[i], d});
            }
        std::vector<Vec> cand;
        cand.reserve(lines.size() * (lines.size() + 1) / 2 + 1);
        for (std::size_t a = 0; a < lines.size(); ++a)
            for (std::size_t b = a + 1; b < lines.size(); ++b) {
                const double cr = cross2(lines[a].d, lines[b].d);
                if (std::fabs(cr) <= 1e-12 * lines[a].d.norm() * lines[b].d.norm()) continue;
                const double t = cross2(lines[b].p - lines[a].p, lines[b].d) / cr;
                cand.push_back(lines[a].p + t * lines[a].d);
            }
        for (const Line& L : lines) {
            const double t = (centre - L.p).dot(L.d) / L.d.norm2();
            cand.push_back(L.p + t * L.d);
        }
        cand.push_back(centre);
        std::vector<double> fs(cand.size());
        double fmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cand.size(); ++i) {
            fs[i] = oja_eval(cand[i], work, k, cfg, wdiam, false).f;
            fmin = std::min(fmin, fs[i]);
        }
        const double nn = double(work.size() * work.size());
        const double ftol = 1e-12 * fmin + 1e-14 * nn * wdiam * wdiam;
        std::size_t best = 0;
        double bestd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cand.size(); ++i) {
            if (fs[i] > fmin + ftol) continue;
            const double dd = (cand[i] - centre).norm();
            if (dd < bestd) {
                bestd = dd;
                best = i;
            }
        }
        for (std::size_t i = 0; i < cand.size(); ++i)
            if (fs[i] <= fmin + ftol && (cand[i] - cand[best]).norm() > 1e-7 * wdiam)
                rep.flat = true;
        rep.minimiser = cand[best];
        rep.converged = true;
        rep.final_grad_norm = 0.0;
        if (whitened) rep.minimiser = T.invert(rep.minimiser);
        return rep;
    }

    rep = descend(eval, componentwise_median(work), wdiam, gscale, cfg);

    // The objective is piecewise linear, which causes two failure modes for
    // plain descent: it can jam on a kink away from the minimiser, and the
    // minimising set can be a whole flat cell of the line arrangement, in
    // which case any interior point reports a zero gradient. Polish by
    // minimising smoothed surrogates sqrt(cr^2 + eps^2) with shrinking eps,
    // warm-starting each stage. The final eps stays positive: the smoothed
    // problem has a unique minimiser, so the returned point is a canonical
    // selection from the flat set. Combined with pre-whitening (which turns
    // affinely related clouds into rotations of each other, leaving the
    // relative eps unchanged) this keeps the selection affine equivariant.
    {
        const double simplex_scale = std::pow(wdiam, double(k == 3 ? 3 : 2));
        Vec xc = rep.minimiser;
        SolverConfig pcfg = cfg;
        pcfg.max_iters = 300;
        pcfg.initial_step = 1e-3;
        for (double er : {1e-3, 1e-4, 1e-5, 1e-6}) {
            const double eps = er * simplex_scale;
            // On a flat cell the smoothed gradient scales like eps^2, so the
            // stage tolerance has to shrink along with it or later stages
            // stop at their warm start.
            pcfg.grad_tol = cfg.grad_tol * er * er * 1e6;
            auto ev = [&](const Vec& xx, bool wg) {
                return oja_eval(xx, work, k, pcfg, wdiam, wg, eps * eps);
            };
            const SolverReport r2 = descend(ev, xc, wdiam, gscale, pcfg, true);
            xc = r2.minimiser;
            rep.iterations += r2.iterations;
        }
        rep.minimiser = xc;
        // Residual floor: descent localises the minimiser to within the step
        // floor, where a gradient of size curvature x step_floor remains; that
        // much is indistinguishable from optimal and is subtracted before the
        // tolerance test. The curvature along the gradient is probed with one
        // extra evaluation.
        const double eps_last = 1e-6 * simplex_scale;
        const double eps2 = eps_last * eps_last;
        const EvalResult e0 = oja_eval(xc, work, k, pcfg, wdiam, true, eps2);
        double res_floor = 0.0;
        const double gn0 = e0.g.norm();
        if (gn0 > 0.0) {
            const double delta = 1e3 * kStepFloorRel * wdiam;
            const EvalResult e1 =
                oja_eval(xc + (delta / gn0) * e0.g, work, k, pcfg, wdiam, true, eps2);
            const double curv = (e1.g - e0.g).norm() / delta;
            res_floor = 10.0 * curv * kStepFloorRel * wdiam;
        }
        rep.final_grad_norm = std::max(0.0, e0.residual - res_floor);
        rep.converged = rep.final_grad_norm <= cfg.grad_tol * gscale;
    }
    if (whitened) rep.minimiser = T.invert(rep.minimiser);

    // Flatness probe: non-unique minimiser (e.g. any interior point of a
    // 3-point triangle) shows as a locally constant objective.
    const double f0 = whitened ? eval(T.apply(rep.minimiser), false).f
                               : eval(rep.minimiser, false).f;
    if (f0 > 0.0) {
        const double delta = 1e-4 * wdiam;
        double var = 0.0;
        Vec xc = whitened ? T.apply(rep.minimiser) : rep.minimiser;
        for (int i = 0; i < cloud.dim; ++i) {
            for (double sgn : {-1.0, 1.0}) {
                Vec probe = xc;
                probe[i] += sgn * delta;
                var = std::max(var, std::fabs(eval(probe, false).f - f0));
            }
        }
        if (var <= 1e-12 * f0) rep.flat = true;
    }
    return rep;
}

WhiteningTransform covariance_whitening(const PointCloud& cloud, double eps_cov) {
    WhiteningTransform T;
    T.dim = cloud.dim;
    const int n = cloud.dim;
    Eigen::MatrixXd C = covariance_about_mean(cloud, &T.mean);
    Eigen::MatrixXd P;
    Eigen::VectorXd lam;
    eigen_descending(C, P, lam);
    const double lmax = std::max(lam(0), 0.0);
    for (int i = 0; i < n; ++i) T.eigenvalues[std::size_t(i)] = lam(i);
    if (lmax < 1e-300) {
        T.degenerate = true;
        for (int i = 0; i < n; ++i) T.W[std::size_t(i)][std::size_t(i)] = 1.0;
        for (int i = 0; i < n; ++i) T.Winv[std::size_t(i)][std::size_t(i)] = 1.0;
        return T;
    }
    for (int i = 0; i < n; ++i) {
        const double li = std::max(lam(i), eps_cov * lmax);
        const double s = 1.0 / std::sqrt(li);
        for (int j = 0; j < n; ++j) {
            T.W[std::size_t(i)][std::size_t(j)] = s * P(j, i);
            T.Winv[std::size_t(j)][std::size_t(i)] = P(j, i) / s;
        }
    }
    return T;
}

SolverReport trl1_median(const PointCloud& cloud, const SolverConfig& cfg) {
    const double diam = cloud.diameter();
    if (diam <= 0.0) {
        SolverReport rep;
        rep.minimiser = cloud.pts.front();
        rep.converged = true;
        return rep;
    }
    WhiteningTransform T = covariance_whitening(cloud);
    if (T.degenerate) {
        SolverReport rep;
        rep.minimiser = componentwise_median(cloud);
        rep.degenerate = true;
        return rep;
    }
    PointCloud work = cloud;
    for (Vec& p : work.pts) p = T.apply(p);
    SolverReport rep = l1_median(work, cfg);
    rep.minimiser = T.invert(rep.minimiser);
    return rep;
}

PointCloud regularize_simplex(const PointCloud& cloud, double h) {
    PointCloud out;
    out.dim = cloud.dim;
    out.pts.reserve(cloud.size() * std::size_t(cloud.dim + 1));
    // Regular n-simplex corners of circumradius 1, fixed orientation.
    std::vector<Vec> corners;
    if (cloud.dim == 1) {
        corners = {Vec::scalar(1.0), Vec::scalar(-1.0)};
    } else if (cloud.dim == 2) {
        // first corner along +y, then 210 and 330 degrees
        const double s3 = std::sqrt(3.0) / 2.0;
        corners = {Vec(0.0, 1.0), Vec(-s3, -0.5), Vec(s3, -0.5)};
    } else {
        // one vertex at +z, base ring at z=-1/3
        const double r = 2.0 * std::sqrt(2.0) / 3.0;
        const double s6 = std::sqrt(6.0) / 3.0, s2 = std::sqrt(2.0) / 3.0;
        corners = {Vec(0.0, 0.0, 1.0), Vec(r, 0.0, -1.0 / 3.0), Vec(-s2, s6, -1.0 / 3.0),
                   Vec(-s2, -s6, -1.0 / 3.0)};
    }
    for (const Vec& p : cloud.pts)
        for (const Vec& d : corners) out.pts.push_back(p + h * d);
    return out;
}

}  // namespace mmf
