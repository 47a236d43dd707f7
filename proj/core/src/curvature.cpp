#include "cgb/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "cgb/errors.hpp"

namespace cgb {

namespace {

/// Dense pointer view over a packed symmetric jet matrix.
struct DenseView {
    const Jet* m[4][4] = {};
};

DenseView dense_view(std::span<const Jet> packed, int n) {
    DenseView v;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v.m[i][j] = &packed[packed_index(n, i, j)];
    return v;
}

Jet det2(const DenseView& v, int r0, int r1, int c0, int c1) {
    return (*v.m[r0][c0]) * (*v.m[r1][c1]) - (*v.m[r0][c1]) * (*v.m[r1][c0]);
}

Jet det3(const DenseView& v, const int r[3], const int c[3]) {
    Jet d = (*v.m[r[0]][c[0]]) * det2(v, r[1], r[2], c[1], c[2]);
    d -= (*v.m[r[0]][c[1]]) * det2(v, r[1], r[2], c[0], c[2]);
    d += (*v.m[r[0]][c[2]]) * det2(v, r[1], r[2], c[0], c[1]);
    return d;
}

Jet cofactor(const DenseView& v, int n, int i, int j) {
    bool even = (i + j) % 2 == 0;
    if (n == 2) {
        const Jet& minor = *v.m[1 - i][1 - j];
        return even ? minor : -minor;
    }
    int rows[3], cols[3];
    int nr = 0, nc = 0;
    for (int r = 0; r < n; ++r)
        if (r != i) rows[nr++] = r;
    for (int c = 0; c < n; ++c)
        if (c != j) cols[nc++] = c;
    Jet minor = (n == 3) ? det2(v, rows[0], rows[1], cols[0], cols[1]) : det3(v, rows, cols);
    return even ? minor : -minor;
}

/// All 24 permutations of {0,1,2,3} with parity signs.
const std::vector<std::pair<std::array<int, 4>, int>>& s4_permutations() {
    static const auto perms = [] {
        std::vector<std::pair<std::array<int, 4>, int>> out;
        std::array<int, 4> p = {0, 1, 2, 3};
        do {
            int inversions = 0;
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j)
                    if (p[i] > p[j]) ++inversions;
            out.push_back({p, inversions % 2 == 0 ? 1 : -1});
        } while (std::next_permutation(p.begin(), p.end()));
        return out;
    }();
    return perms;
}

} // namespace

int packed_index(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    return i * (2 * n - i + 1) / 2 + (j - i);
}

Jet packed_sym_det(std::span<const Jet> m, int n) {
    DenseView v = dense_view(m, n);
    Jet d = (*v.m[0][0]) * cofactor(v, n, 0, 0);
    for (int k = 1; k < n; ++k) d += (*v.m[0][k]) * cofactor(v, n, 0, k);
    return d;
}

void packed_sym_inverse(std::span<const Jet> m, int n, std::span<Jet> out) {
    int npack = n * (n + 1) / 2;
    if (static_cast<int>(m.size()) != npack || static_cast<int>(out.size()) != npack)
        throw input_error("packed symmetric matrix has the wrong entry count");
    DenseView v = dense_view(m, n);
    // The cofactor matrix of a symmetric matrix is symmetric, so the adjugate
    // transpose is free.
    std::array<Jet, 10> cof;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) cof[packed_index(n, i, j)] = cofactor(v, n, i, j);
    Jet det = (*v.m[0][0]) * cof[packed_index(n, 0, 0)];
    for (int k = 1; k < n; ++k) det += (*v.m[0][k]) * cof[packed_index(n, 0, k)];
    Jet inv_det = jet_inverse(det);
    for (int k = 0; k < npack; ++k) out[k] = cof[k] * inv_det;
}

MetricGeometry::MetricGeometry(int n) : n_(n), npack_(n * (n + 1) / 2) {
    if (n < 2 || n > 4) throw input_error("metric geometry supports dimensions 2 to 4");
}

void MetricGeometry::compute(std::span<const Jet> metric_packed) {
    if (static_cast<int>(metric_packed.size()) != npack_)
        throw input_error("packed metric has the wrong entry count");
    deg_ = metric_packed[0].degree();
    for (const Jet& entry : metric_packed) {
        if (entry.num_vars() != n_ || entry.degree() != deg_)
            throw input_error("metric jets must share variable count and degree");
    }
    if (deg_ < 2) throw input_error("metric jets need degree >= 2");
    std::copy(metric_packed.begin(), metric_packed.end(), g_.begin());

    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) gval_[i][j] = g_[packed_index(n_, i, j)].value();

    // Cholesky pass: positive-definiteness gate and the determinant value.
    {
        double a[4][4];
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) a[i][j] = gval_[i][j];
        det_ = 1.0;
        for (int k = 0; k < n_; ++k) {
            double pivot = a[k][k];
            for (int r = 0; r < k; ++r) pivot -= a[k][r] * a[k][r];
            if (!(pivot > 0.0) || !std::isfinite(pivot))
                throw numerical_error("metric is not positive definite at the base point");
            det_ *= pivot;
            double root = std::sqrt(pivot);
            a[k][k] = root;
            for (int i = k + 1; i < n_; ++i) {
                double v = a[i][k];
                for (int r = 0; r < k; ++r) v -= a[i][r] * a[k][r];
                a[i][k] = v / root;
            }
        }
    }

    // Inverse metric one degree down.
    {
        std::array<Jet, 10> work;
        for (int k = 0; k < npack_; ++k) work[k] = g_[k].truncated(deg_ - 1);
        packed_sym_inverse(std::span<const Jet>(work.data(), npack_), n_,
                           std::span<Jet>(ginv_.data(), npack_));
    }
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) ginvval_[i][j] = ginv_[packed_index(n_, i, j)].value();

    // E_{m,jk} = d_j g_{mk} + d_k g_{mj} - d_m g_{jk}
    std::array<Jet, 40> e;
    for (int m = 0; m < n_; ++m) {
        for (int j = 0; j < n_; ++j) {
            for (int k = j; k < n_; ++k) {
                Jet s = metric(m, k).derivative(j);
                s += metric(m, j).derivative(k);
                s -= metric(j, k).derivative(m);
                e[m * npack_ + packed_index(n_, j, k)] = std::move(s);
            }
        }
    }

    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            for (int k = j; k < n_; ++k) {
                Jet s = Jet::constant(0.0, n_, deg_ - 1);
                for (int m = 0; m < n_; ++m)
                    s.add_product(ginv_[packed_index(n_, i, m)],
                                  e[m * npack_ + packed_index(n_, j, k)]);
                s *= 0.5;
                gamma_[i * npack_ + packed_index(n_, j, k)] = std::move(s);
            }
        }
    }

    std::array<int, 4> alpha{};
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            for (int k = j; k < n_; ++k) {
                const Jet& gm = christoffel(i, j, k);
                double val = gm.value();
                gammaval_[i][j][k] = gammaval_[i][k][j] = val;
                for (int axis = 0; axis < n_; ++axis) {
                    alpha.fill(0);
                    alpha[axis] = 1;
                    double d = gm.partial(std::span<const int>(alpha.data(), n_));
                    dgamma_[i][j][k][axis] = dgamma_[i][k][j][axis] = d;
                }
            }
        }
    }

    // Contraction Gamma^i_{ij}, the gradient of log sqrt(det g).
    std::array<Jet, 4> trace;
    for (int j = 0; j < n_; ++j) {
        trace[j] = Jet::constant(0.0, n_, deg_ - 1);
        for (int i = 0; i < n_; ++i) trace[j] += christoffel(i, i, j);
    }

    for (int j = 0; j < n_; ++j) {
        for (int l = j; l < n_; ++l) {
            Jet r = Jet::constant(0.0, n_, deg_ - 2);
            for (int i = 0; i < n_; ++i) r += christoffel(i, l, j).derivative(i);
            r -= trace[j].derivative(l);
            for (int m = 0; m < n_; ++m) r.add_product(trace[m], christoffel(m, l, j));
            for (int i = 0; i < n_; ++i)
                for (int m = 0; m < n_; ++m)
                    r.sub_product(christoffel(i, l, m), christoffel(m, i, j));
            ric_[packed_index(n_, j, l)] = std::move(r);
        }
    }

    scalar_ = Jet::constant(0.0, n_, deg_ - 2);
    for (int j = 0; j < n_; ++j) {
        for (int l = j; l < n_; ++l) {
            scalar_.add_product(ginv_[packed_index(n_, j, l)], ric_[packed_index(n_, j, l)]);
            if (l != j)
                scalar_.add_product(ginv_[packed_index(n_, j, l)], ric_[packed_index(n_, j, l)]);
        }
    }

    std::fill(&riem_[0][0][0][0], &riem_[0][0][0][0] + 4 * 4 * 4 * 4, 0.0);
    for (int j = 0; j < n_; ++j) {
        for (int k = 0; k < n_; ++k) {
            for (int l = k + 1; l < n_; ++l) {
                double a_up[4];
                for (int m = 0; m < n_; ++m) {
                    double am = dgamma_[m][l][j][k] - dgamma_[m][k][j][l];
                    for (int r = 0; r < n_; ++r)
                        am += gammaval_[m][k][r] * gammaval_[r][l][j] -
                              gammaval_[m][l][r] * gammaval_[r][k][j];
                    a_up[m] = am;
                }
                for (int i = 0; i < n_; ++i) {
                    double low = 0.0;
                    for (int m = 0; m < n_; ++m) low -= gval_[i][m] * a_up[m];
                    riem_[i][j][k][l] = low;
                    riem_[i][j][l][k] = -low;
                }
            }
        }
    }
}

double MetricGeometry::laplacian(const Jet& f) const {
    if (f.num_vars() != n_ || f.degree() < 2)
        throw input_error("laplacian needs a degree >= 2 jet in the chart variables");
    std::array<int, 4> alpha{};
    double f1[4];
    for (int k = 0; k < n_; ++k) {
        alpha.fill(0);
        alpha[k] = 1;
        f1[k] = f.partial(std::span<const int>(alpha.data(), n_));
    }
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            alpha.fill(0);
            ++alpha[i];
            ++alpha[j];
            double t = f.partial(std::span<const int>(alpha.data(), n_));
            for (int k = 0; k < n_; ++k) t -= gammaval_[k][i][j] * f1[k];
            acc += ginvval_[i][j] * t;
        }
    }
    return acc;
}

Jet MetricGeometry::laplacian_jet(const Jet& f) const {
    if (f.num_vars() != n_ || f.degree() < 2)
        throw input_error("laplacian needs a degree >= 2 jet in the chart variables");
    int target = f.degree() - 2;
    std::array<Jet, 4> df;
    for (int k = 0; k < n_; ++k) df[k] = f.derivative(k);
    Jet out = Jet::constant(0.0, n_, target);
    for (int i = 0; i < n_; ++i) {
        for (int j = i; j < n_; ++j) {
            Jet t = df[i].derivative(j);
            for (int k = 0; k < n_; ++k) t.sub_product(christoffel(k, i, j), df[k]);
            out.add_product(ginv_[packed_index(n_, i, j)], t);
            if (j != i) out.add_product(ginv_[packed_index(n_, i, j)], t);
        }
    }
    return out;
}

InteriorQuantities interior_quantities(const MetricGeometry& geo) {
    if (geo.dim() != 4) throw input_error("interior quantities need a 4-dimensional chart");
    if (geo.degree() < 4) throw input_error("interior quantities need degree-4 metric jets");

    InteriorQuantities out;
    double g[4][4], gi[4][4], ric[4][4], riem[4][4][4][4];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            g[i][j] = geo.metric_value(i, j);
            gi[i][j] = geo.metric_inverse_value(i, j);
            ric[i][j] = geo.ricci_value(i, j);
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) riem[i][j][k][l] = geo.riemann(i, j, k, l);
        }
    }

    out.scal = geo.scalar_value();
    out.lap_scal = geo.laplacian(geo.scalar());

    double ric_up[4][4];
    {
        double t[4][4] = {};
        for (int a = 0; a < 4; ++a)
            for (int j = 0; j < 4; ++j)
                for (int i = 0; i < 4; ++i) t[a][j] += gi[a][i] * ric[i][j];
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double acc = 0.0;
                for (int j = 0; j < 4; ++j) acc += gi[b][j] * t[a][j];
                ric_up[a][b] = acc;
            }
    }
    out.ric_norm2 = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out.ric_norm2 += ric[i][j] * ric_up[i][j];

    double p_up[4][4];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            out.p[i][j] = 0.5 * ric[i][j] - out.scal / 12.0 * g[i][j];
            p_up[i][j] = 0.5 * ric_up[i][j] - out.scal / 12.0 * gi[i][j];
        }
    }
    out.j_trace = 0.0;
    out.p_norm2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            out.j_trace += gi[i][j] * out.p[i][j];
            out.p_norm2 += out.p[i][j] * p_up[i][j];
        }
    }

    // Raise the curvature one slot at a time.
    static thread_local double r1[4][4][4][4], r2[4][4][4][4], r3[4][4][4][4],
        riem_up[4][4][4][4];
    auto raise_slot0 = [&gi](const double src[4][4][4][4], double dst[4][4][4][4]) {
        for (int a = 0; a < 4; ++a)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k)
                    for (int l = 0; l < 4; ++l) {
                        double acc = 0.0;
                        for (int i = 0; i < 4; ++i) acc += gi[a][i] * src[i][j][k][l];
                        dst[a][j][k][l] = acc;
                    }
    };
    raise_slot0(riem, r1);
    // Cycle the slots so raise_slot0 can do all four contractions.
    auto cycle = [](const double src[4][4][4][4], double dst[4][4][4][4]) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k)
                    for (int l = 0; l < 4; ++l) dst[j][k][l][i] = src[i][j][k][l];
    };
    cycle(r1, r2);
    raise_slot0(r2, r3);
    cycle(r3, r2);
    raise_slot0(r2, r3);
    cycle(r3, r2);
    raise_slot0(r2, r3);
    cycle(r3, riem_up);

    out.riem_norm2 = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) out.riem_norm2 += riem[i][j][k][l] * riem_up[i][j][k][l];

    out.weyl_norm2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            for (int k = 0; k < 4; ++k) {
                for (int l = 0; l < 4; ++l) {
                    double low = riem[i][j][k][l] -
                                 (out.p[i][l] * g[j][k] + out.p[j][k] * g[i][l] -
                                  out.p[i][k] * g[j][l] - out.p[j][l] * g[i][k]);
                    double up = riem_up[i][j][k][l] -
                                (p_up[i][l] * gi[j][k] + p_up[j][k] * gi[i][l] -
                                 p_up[i][k] * gi[j][l] - p_up[j][l] * gi[i][k]);
                    out.weyl[i][j][k][l] = low;
                    out.weyl_norm2 += low * up;
                }
            }
        }
    }

    out.q = 2.0 * (out.j_trace * out.j_trace - out.p_norm2) - out.lap_scal / 6.0;
    out.q_scalar_form =
        (-out.lap_scal + out.scal * out.scal - 3.0 * out.ric_norm2) / 6.0;

    double eps_rr = 0.0;
    for (const auto& [pi, sign_pi] : s4_permutations()) {
        for (const auto& [rho, sign_rho] : s4_permutations()) {
            eps_rr += sign_pi * sign_rho * riem[pi[0]][pi[1]][rho[0]][rho[1]] *
                      riem[pi[2]][pi[3]][rho[2]][rho[3]];
        }
    }

    constexpr double inv_four_pi2 = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
    out.pfaffian_density = eps_rr / (32.0 * geo.det()) * inv_four_pi2;
    out.psi_decomposition =
        (0.125 * out.weyl_norm2 - out.p_norm2 + out.j_trace * out.j_trace) * inv_four_pi2;
    out.gb_density = 0.125 * out.weyl_norm2 + 0.5 * out.q;
    out.integrand = (out.gb_density + out.lap_scal / 12.0) * inv_four_pi2;
    return out;
}

} // namespace cgb
