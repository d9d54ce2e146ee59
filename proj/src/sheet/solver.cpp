#include "emms/sheet/solver.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "emms/util/parallel.hpp"

namespace emms::sheet {

using em::cdouble;
using em::MatrixXc;
using em::VectorXc;

namespace {

// Fourier coefficient of the mask at harmonic offset (u, v), centered phase:
//   Yhat(u, v) = (Y/N^2) sum_{i,j} mask[i,j] exp(-j 2 pi (u (i-N/2) + v (j-N/2)) / N)
cdouble fourier_coeff(const PixelMask& mask, int u, int v, cdouble y_metal)
{
    constexpr int n = kMaskSize;
    // Separable row/column twiddles.
    std::array<cdouble, n> tw_u, tw_v;
    for (int i = 0; i < n; ++i) {
        const double a = -2.0 * std::numbers::pi * u * (i - n / 2) / n;
        const double b = -2.0 * std::numbers::pi * v * (i - n / 2) / n;
        tw_u[static_cast<std::size_t>(i)] = {std::cos(a), std::sin(a)};
        tw_v[static_cast<std::size_t>(i)] = {std::cos(b), std::sin(b)};
    }
    cdouble acc = 0.0;
    for (int j = 0; j < n; ++j) {
        cdouble row = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask.at(i, j))
                row += tw_u[static_cast<std::size_t>(i)];
        acc += row * tw_v[static_cast<std::size_t>(j)];
    }
    return acc * y_metal / static_cast<double>(kMaskPixels);
}

} // namespace

MatrixXc coupling_matrix(const PixelMask& mask, const ScreenContext& context,
                         const em::FloquetModeSet& modes, double freq_ghz)
{
    (void)freq_ghz;
    const int m = modes.count();
    const int d = 2 * m;

    // Distinct harmonic offsets needed by this mode set.
    std::map<std::pair<int, int>, cdouble> coeffs;
    for (int q = 0; q < m; ++q)
        for (int p = 0; p < m; ++p)
            coeffs[{modes.mode(q).m - modes.mode(p).m,
                    modes.mode(q).n - modes.mode(p).n}] = 0.0;
    for (auto& [uv, c] : coeffs)
        c = fourier_coeff(mask, uv.first, uv.second, context.y_metal);

    // Polarization vectors in block layout order.
    std::vector<std::array<double, 2>> e(static_cast<std::size_t>(d));
    for (int q = 0; q < m; ++q) {
        e[static_cast<std::size_t>(q)] = modes.unit_te(q);
        e[static_cast<std::size_t>(m + q)] = modes.unit_tm(q);
    }

    MatrixXc g(d, d);
    for (int r = 0; r < d; ++r) {
        const int qr = r % m;
        for (int c = 0; c < d; ++c) {
            const int qc = c % m;
            const auto it = coeffs.find({modes.mode(qr).m - modes.mode(qc).m,
                                         modes.mode(qr).n - modes.mode(qc).n});
            const double dot = e[static_cast<std::size_t>(r)][0] * e[static_cast<std::size_t>(c)][0] +
                               e[static_cast<std::size_t>(r)][1] * e[static_cast<std::size_t>(c)][1];
            g(r, c) = it->second * dot;
        }
    }
    return g;
}

em::Gsm screen_gsm(const PixelMask& mask, const ScreenContext& context,
                   const em::FloquetModeSet& modes, double freq_ghz)
{
    const int d = 2 * modes.count();
    const VectorXc ya = em::admittance_diagonal(modes, context.medium_a, freq_ghz);
    const VectorXc yb = em::admittance_diagonal(modes, context.medium_b, freq_ghz);
    const MatrixXc g = coupling_matrix(mask, context, modes, freq_ghz);

    MatrixXc sys = g;
    sys += MatrixXc((ya + yb).asDiagonal());

    Eigen::PartialPivLU<MatrixXc> lu(sys);
    const double rcond = 1.0 / (sys.cwiseAbs().rowwise().sum().maxCoeff() *
                                lu.inverse().cwiseAbs().rowwise().sum().maxCoeff());
    if (!(rcond > 1e-14))
        throw NumericalError("sheet solver degenerate at " + std::to_string(freq_ghz) +
                             " GHz (rcond ~ " + std::to_string(rcond) + ")");

    const MatrixXc ta = lu.solve(MatrixXc(2.0 * VectorXc(ya).asDiagonal()));
    const MatrixXc tb = lu.solve(MatrixXc(2.0 * VectorXc(yb).asDiagonal()));
    const MatrixXc eye = MatrixXc::Identity(d, d);

    em::Gsm out;
    out.s21 = ta;
    out.s11 = ta - eye;
    out.s12 = tb;
    out.s22 = tb - eye;
    out.medium1 = context.medium_a;
    out.medium2 = context.medium_b;
    out.freq_ghz = freq_ghz;
    return out;
}

std::vector<em::Gsm> SheetAdmittanceSolver::solve(const PixelMask& mask,
                                                  const ScreenContext& context,
                                                  const em::FloquetModeSet& modes,
                                                  const em::FrequencyGrid& grid) const
{
    std::vector<em::Gsm> out(static_cast<std::size_t>(grid.n_points));
    parallel_for(0, out.size(), [&](std::size_t i) {
        out[i] = screen_gsm(mask, context, modes, grid.freq_ghz(static_cast<int>(i)));
    });
    return out;
}

} // namespace emms::sheet
