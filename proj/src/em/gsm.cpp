#include "emms/em/gsm.hpp"

#include <cmath>

namespace emms::em {

VectorXc admittance_diagonal(const FloquetModeSet& modes, const Medium& medium,
                             double freq_ghz)
{
    const int m = modes.count();
    VectorXc y(2 * m);
    for (int q = 0; q < m; ++q) {
        y(q) = modal_admittance(modes, q, Pol::TE, medium, freq_ghz);
        y(m + q) = modal_admittance(modes, q, Pol::TM, medium, freq_ghz);
    }
    return y;
}

Gsm identity_gsm(const FloquetModeSet& modes, const Medium& medium, double freq_ghz)
{
    const int d = 2 * modes.count();
    Gsm g;
    g.s11 = MatrixXc::Zero(d, d);
    g.s22 = MatrixXc::Zero(d, d);
    g.s12 = MatrixXc::Identity(d, d);
    g.s21 = MatrixXc::Identity(d, d);
    g.medium1 = medium;
    g.medium2 = medium;
    g.freq_ghz = freq_ghz;
    return g;
}

Gsm slab_gsm(const Medium& medium, double thickness_mm, const FloquetModeSet& modes,
             double freq_ghz)
{
    if (thickness_mm < 0.0)
        throw InvalidArgument("slab thickness must be non-negative");
    const int m = modes.count();
    const int d = 2 * m;
    const double thickness_m = thickness_mm * 1e-3;
    VectorXc phase(d);
    for (int q = 0; q < m; ++q) {
        const cdouble kz = longitudinal_k(modes, q, medium, freq_ghz);
        const cdouble p = std::exp(cdouble(0.0, -1.0) * kz * thickness_m);
        phase(q) = p;
        phase(m + q) = p;
    }
    Gsm g;
    g.s11 = MatrixXc::Zero(d, d);
    g.s22 = MatrixXc::Zero(d, d);
    g.s12 = phase.asDiagonal();
    g.s21 = phase.asDiagonal();
    g.medium1 = medium;
    g.medium2 = medium;
    g.freq_ghz = freq_ghz;
    return g;
}

Gsm interface_gsm(const Medium& medium_a, const Medium& medium_b,
                  const FloquetModeSet& modes, double freq_ghz)
{
    const int d = 2 * modes.count();
    const VectorXc ya = admittance_diagonal(modes, medium_a, freq_ghz);
    const VectorXc yb = admittance_diagonal(modes, medium_b, freq_ghz);
    VectorXc r_a(d), t_ab(d), r_b(d), t_ba(d);
    for (int i = 0; i < d; ++i) {
        const cdouble den = ya(i) + yb(i);
        r_a(i) = (ya(i) - yb(i)) / den;
        t_ab(i) = 1.0 + r_a(i);
        r_b(i) = (yb(i) - ya(i)) / den;
        t_ba(i) = 1.0 + r_b(i);
    }
    Gsm g;
    g.s11 = r_a.asDiagonal();
    g.s21 = t_ab.asDiagonal();
    g.s22 = r_b.asDiagonal();
    g.s12 = t_ba.asDiagonal();
    g.medium1 = medium_a;
    g.medium2 = medium_b;
    g.freq_ghz = freq_ghz;
    return g;
}

Gsm cascade(const Gsm& first, const Gsm& second, const FloquetModeSet& modes)
{
    (void)modes;
    if (!(first.medium2 == second.medium1))
        throw InvalidArgument("cascade: adjoining media do not match");
    if (first.freq_ghz != second.freq_ghz)
        throw InvalidArgument("cascade: frequency mismatch");
    if (first.dim() != second.dim())
        throw InvalidArgument("cascade: block size mismatch");

    const int d = first.dim();
    const MatrixXc eye = MatrixXc::Identity(d, d);
    const MatrixXc m1 = eye - second.s11 * first.s22;
    const MatrixXc m2 = eye - first.s22 * second.s11;

    Eigen::PartialPivLU<MatrixXc> lu1(m1);
    Eigen::PartialPivLU<MatrixXc> lu2(m2);
    const double rcond1 = 1.0 / (m1.cwiseAbs().rowwise().sum().maxCoeff() *
                                 lu1.inverse().cwiseAbs().rowwise().sum().maxCoeff());
    if (!(rcond1 > 1e-13))
        throw NumericalError("ill-conditioned cascade at " +
                             std::to_string(first.freq_ghz) +
                             " GHz (rcond ~ " + std::to_string(rcond1) + ")");

    Gsm g;
    g.s11 = first.s11 + first.s12 * lu1.solve(second.s11 * first.s21);
    g.s12 = first.s12 * lu1.solve(second.s12);
    g.s21 = second.s21 * lu2.solve(first.s21);
    g.s22 = second.s22 + second.s21 * lu2.solve(first.s22 * second.s12);
    g.medium1 = first.medium1;
    g.medium2 = second.medium2;
    g.freq_ghz = first.freq_ghz;
    return g;
}

Transmission extract_transmission(const Gsm& g, const FloquetModeSet& modes)
{
    if (!(g.medium1 == air()) || !(g.medium2 == air()))
        throw InvalidArgument("extract_transmission requires air on both ports");
    const int m = modes.count();
    const cdouble y_in_te = modal_admittance(modes, 0, Pol::TE, g.medium1, g.freq_ghz);
    const cdouble y_out_te = modal_admittance(modes, 0, Pol::TE, g.medium2, g.freq_ghz);
    const cdouble y_in_tm = modal_admittance(modes, 0, Pol::TM, g.medium1, g.freq_ghz);
    const cdouble y_out_tm = modal_admittance(modes, 0, Pol::TM, g.medium2, g.freq_ghz);
    const double s_te = std::sqrt(y_out_te.real() / y_in_te.real());
    const double s_tm = std::sqrt(y_out_tm.real() / y_in_tm.real());
    return {g.s21(0, 0) * s_te, g.s21(m, m) * s_tm};
}

Gsm power_normalized(const Gsm& g, const FloquetModeSet& modes)
{
    const VectorXc y1 = admittance_diagonal(modes, g.medium1, g.freq_ghz);
    const VectorXc y2 = admittance_diagonal(modes, g.medium2, g.freq_ghz);
    const int d = g.dim();
    VectorXc d1(d), d2(d);
    for (int i = 0; i < d; ++i) {
        d1(i) = std::sqrt(y1(i));
        d2(i) = std::sqrt(y2(i));
    }
    Gsm out = g;
    out.s11 = d1.asDiagonal() * g.s11 * d1.cwiseInverse().asDiagonal();
    out.s12 = d1.asDiagonal() * g.s12 * d2.cwiseInverse().asDiagonal();
    out.s21 = d2.asDiagonal() * g.s21 * d1.cwiseInverse().asDiagonal();
    out.s22 = d2.asDiagonal() * g.s22 * d2.cwiseInverse().asDiagonal();
    return out;
}

} // namespace emms::em
