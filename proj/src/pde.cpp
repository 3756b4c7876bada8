#include "mmf/pde.hpp"

#include <cmath>

#include "mmf/coeffs.hpp"

namespace mmf {

namespace {

double second(const Eigen::MatrixXd& H, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.dot(H * b);
}

void check_shape(const JetPoint& jet, int n, int m, const char* what) {
    if (jet.n != n || jet.m != m || jet.D.rows() != n || jet.D.cols() != m ||
        jet.H.size() != std::size_t(n))
        throw std::invalid_argument(std::string(what) + ": jet must be " + std::to_string(n) +
                                    "x" + std::to_string(m));
}

}  // namespace

StructureTensorFrame structure_frame(const JetPoint& jet) {
    if (jet.m != 2) throw std::invalid_argument("structure_frame: domain dimension must be 2");
    StructureTensorFrame fr;
    fr.J = (jet.D.transpose() * jet.D).block<2, 2>(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(fr.J);
    fr.lambda1 = es.eigenvalues()(1);
    fr.lambda2 = es.eigenvalues()(0);
    fr.eta = es.eigenvectors().col(1);
    fr.xi = es.eigenvectors().col(0);
    if (fr.lambda1 - fr.lambda2 <= 1e-12 * std::max(std::abs(fr.lambda1), 1e-300)) {
        fr.isotropic = true;
        fr.eta = Eigen::Vector2d(1, 0);
        fr.xi = Eigen::Vector2d(0, 1);
        return fr;
    }
    auto fix_sign = [](Eigen::Vector2d& v) {
        double lead = std::abs(v(0)) > 1e-14 ? v(0) : v(1);
        if (lead < 0) v = -v;
    };
    fix_sign(fr.eta);
    fix_sign(fr.xi);
    return fr;
}

PdeUpdate l1_rhs_22(const JetPoint& jet, double rho) {
    check_shape(jet, 2, 2, "l1_rhs_22");
    const Eigen::Matrix2d D = jet.D;
    const double det = D.determinant();
    if (std::abs(det) <= 1e-14 * std::max(D.squaredNorm(), 1e-300))
        throw PdeUndefined("singular Jacobian");

    const StructureTensorFrame fr = structure_frame(jet);
    const double seta = std::sqrt(std::max(fr.lambda1, 0.0));
    const double sxi = std::sqrt(std::max(fr.lambda2, 0.0));
    if (sxi <= 0.0) throw PdeUndefined("singular Jacobian");
    const double mu = seta / sxi;

    Eigen::Matrix2d P;
    P.col(0) = fr.eta;
    P.col(1) = fr.xi;
    const Eigen::Matrix2d R =
        D.inverse().transpose() * P * Eigen::Vector2d(seta, sxi).asDiagonal();

    const Eigen::Matrix2d S =
        R * Eigen::Vector2d(q1(mu), q2(mu)).asDiagonal() * R.transpose();
    const Eigen::Matrix2d T =
        R * Eigen::Vector2d(q2(1.0 / mu), q1(1.0 / mu)).asDiagonal() * R.transpose();
    Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
    M(0, 1) = mu * q1(mu);
    M(1, 0) = (1.0 / mu) * q1(1.0 / mu);
    const Eigen::Matrix2d W = R * M * R.transpose();

    Eigen::Vector2d dee, dxx, dxe;
    for (int c = 0; c < 2; ++c) {
        dee(c) = second(jet.H[c], fr.eta, fr.eta);
        dxx(c) = second(jet.H[c], fr.xi, fr.xi);
        dxe(c) = second(jet.H[c], fr.xi, fr.eta);
    }

    PdeUpdate up;
    up.rhs = S * dee + T * dxx - 2.0 * W * dxe;
    up.tau = rho * rho / 6.0;
    up.coeffs = {{"S", S}, {"T", T}, {"W", W}};
    return up;
}

PdeUpdate oja_rhs_22(const JetPoint& jet, double rho) {
    check_shape(jet, 2, 2, "oja_rhs_22");
    const double ux = jet.D(0, 0), uy = jet.D(0, 1), vx = jet.D(1, 0), vy = jet.D(1, 1);
    const double det = ux * vy - uy * vx;
    if (std::abs(det) <= 1e-14 * std::max(jet.D.squaredNorm(), 1e-300))
        throw PdeUndefined("singular Jacobian");

    Eigen::Matrix2d A, B;
    A << ux * vy + uy * vx, 2.0 * ux * uy, 2.0 * vx * vy, ux * vy + uy * vx;
    A /= det;
    B << -ux * vx + uy * vy, ux * ux - uy * uy, -vx * vx + vy * vy, ux * vx - uy * vy;
    B *= 2.0 / det;

    Eigen::Vector2d lap, diff, mix;
    for (int c = 0; c < 2; ++c) {
        lap(c) = jet.H[c](0, 0) + jet.H[c](1, 1);
        mix(c) = jet.H[c](0, 1);
    }
    diff(0) = jet.H[0](0, 0) - jet.H[0](1, 1);
    diff(1) = jet.H[1](1, 1) - jet.H[1](0, 0);

    PdeUpdate up;
    up.rhs = 2.0 * lap - A * diff - B * mix;
    up.tau = rho * rho / 24.0;
    up.coeffs = {{"A", A}, {"B", B}};
    return up;
}

PdeUpdate oja_rhs_33(const JetPoint& jet, double rho) {
    check_shape(jet, 3, 3, "oja_rhs_33");
    const Eigen::Matrix3d D = jet.D;
    if (std::abs(D.determinant()) <= 1e-14 * std::max(std::pow(D.norm(), 3), 1e-300))
        throw PdeUndefined("singular Jacobian");
    const Eigen::Matrix3d Dinv = D.inverse();
    const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();

    auto basis = [](int r, int c) {
        Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
        M(r, c) = 1.0;
        return M;
    };
    const Eigen::Matrix3d A1 = I - 3.0 * D * basis(1, 1) * Dinv;
    const Eigen::Matrix3d A2 = I - 3.0 * D * basis(2, 2) * Dinv;
    const Eigen::Matrix3d B1 = D * (basis(0, 1) + basis(1, 0)) * Dinv;
    const Eigen::Matrix3d B2 = D * (basis(0, 2) + basis(2, 0)) * Dinv;
    const Eigen::Matrix3d B3 = D * (basis(1, 2) + basis(2, 1)) * Dinv;

    Eigen::Vector3d lap, d_yx, d_zx, xy, xz, yz;
    for (int c = 0; c < 3; ++c) {
        const Eigen::MatrixXd& H = jet.H[std::size_t(c)];
        lap(c) = H(0, 0) + H(1, 1) + H(2, 2);
        d_yx(c) = H(1, 1) - H(0, 0);
        d_zx(c) = H(2, 2) - H(0, 0);
        xy(c) = H(0, 1);
        xz(c) = H(0, 2);
        yz(c) = H(1, 2);
    }

    PdeUpdate up;
    up.rhs = 5.0 * lap + A1 * d_yx + A2 * d_zx - 3.0 * (B1 * xy + B2 * xz + B3 * yz);
    up.tau = rho * rho / 60.0;
    up.coeffs = {{"A1", A1}, {"A2", A2}, {"B1", B1}, {"B2", B2}, {"B3", B3}};
    return up;
}

Eigen::Matrix3d build_d3(const Eigen::MatrixXd& D) {
    if (D.rows() != 3 || D.cols() != 2) throw std::invalid_argument("build_d3: need 3x2");
    const Eigen::Vector3d c1 = D.col(0), c2 = D.col(1);
    const Eigen::Vector3d c3 = c1.cross(c2);
    if (c3.norm() <= 1e-12 * std::max(c1.norm() * c2.norm(), 1e-300))
        throw PdeUndefined("rank-deficient Jacobian");
    Eigen::Matrix3d D3;
    D3.col(0) = c1;
    D3.col(1) = c2;
    D3.col(2) = c3;
    return D3;
}

PdeUpdate oja_rhs_23(const JetPoint& jet, double rho) {
    check_shape(jet, 3, 2, "oja_rhs_23");
    const Eigen::Matrix3d D3 = build_d3(jet.D);
    const Eigen::Matrix3d D3inv = D3.inverse();
    Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
    S(0, 0) = 1.0;
    S(1, 1) = -1.0;
    Eigen::Matrix3d X = Eigen::Matrix3d::Zero();
    X(0, 1) = X(1, 0) = 1.0;
    const Eigen::Matrix3d A = D3 * S * D3inv;
    const Eigen::Matrix3d B = D3 * X * D3inv;

    Eigen::Vector3d lap, d_yx, xy;
    for (int c = 0; c < 3; ++c) {
        const Eigen::MatrixXd& H = jet.H[std::size_t(c)];
        lap(c) = H(0, 0) + H(1, 1);
        d_yx(c) = H(1, 1) - H(0, 0);
        xy(c) = H(0, 1);
    }

    PdeUpdate up;
    up.rhs = 2.0 * lap + A * d_yx - 2.0 * B * xy;
    up.tau = rho * rho / 24.0;
    up.coeffs = {{"A", A}, {"B", B}};
    return up;
}

PdeUpdate l1_rhs_23_aligned(const JetPoint& jet, double rho) {
    check_shape(jet, 3, 2, "l1_rhs_23_aligned");
    const double ux = jet.D(0, 0), vy = jet.D(1, 1);
    const Eigen::MatrixXd off = jet.D - [&] {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3, 2);
        M(0, 0) = ux;
        M(1, 1) = vy;
        return M;
    }();
    if (ux <= 0.0 || vy <= 0.0 || off.norm() > 1e-12 * std::max(jet.D.norm(), 1.0))
        throw PdeUndefined("Jacobian not in positive diagonal form");

    const double mu = ux / vy;
    PdeUpdate up;
    up.rhs = Eigen::Vector3d::Zero();
    up.rhs(0) = q1(mu) * jet.H[0](0, 0) + q2(1.0 / mu) * jet.H[0](1, 1) -
                2.0 * mu * q1(mu) * jet.H[1](0, 1);
    up.rhs(1) = q2(mu) * jet.H[1](0, 0) + q1(1.0 / mu) * jet.H[1](1, 1) -
                2.0 * (1.0 / mu) * q1(1.0 / mu) * jet.H[0](0, 1);
    up.rhs(2) = q3(mu) * jet.H[2](0, 0) + q3(1.0 / mu) * jet.H[2](1, 1);
    up.tau = rho * rho / 6.0;
    return up;
}

JetPoint jet_from_analytic(const AnalyticField& field, const Vec& location) {
    const int m = field.domain_dim, n = field.value_dim;
    JetPoint jet = JetPoint::zero(n, m);
    const double d1 = 1e-5, d2 = 1e-3;

    auto at = [&](int axis_a, double sa, int axis_b, double sb) {
        Vec p = location;
        p.c[std::size_t(axis_a)] += sa;
        if (axis_b >= 0) p.c[std::size_t(axis_b)] += sb;
        return field.eval(p);
    };

    const Vec f0 = field.eval(location);
    for (int a = 0; a < m; ++a) {
        const Vec fp = at(a, d1, -1, 0), fm = at(a, -d1, -1, 0);
        for (int c = 0; c < n; ++c)
            jet.D(c, a) = (fp.c[std::size_t(c)] - fm.c[std::size_t(c)]) / (2.0 * d1);
        const Vec gp = at(a, d2, -1, 0), gm = at(a, -d2, -1, 0);
        for (int c = 0; c < n; ++c)
            jet.H[std::size_t(c)](a, a) =
                (gp.c[std::size_t(c)] - 2.0 * f0.c[std::size_t(c)] + gm.c[std::size_t(c)]) /
                (d2 * d2);
    }
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
            const Vec fpp = at(a, d2, b, d2), fpm = at(a, d2, b, -d2);
            const Vec fmp = at(a, -d2, b, d2), fmm = at(a, -d2, b, -d2);
            for (int c = 0; c < n; ++c) {
                const double v = (fpp.c[std::size_t(c)] - fpm.c[std::size_t(c)] -
                                  fmp.c[std::size_t(c)] + fmm.c[std::size_t(c)]) /
                                 (4.0 * d2 * d2);
                jet.H[std::size_t(c)](a, b) = v;
                jet.H[std::size_t(c)](b, a) = v;
            }
        }
    return jet;
}

}  // namespace mmf
