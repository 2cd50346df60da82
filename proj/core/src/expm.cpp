#include "ewjn/expm.hpp"

#include <cmath>

#include <Eigen/LU>

namespace ewjn {

namespace {

double norm_inf(const Matrix16cd& a) {
    double best = 0.0;
    for (int i = 0; i < 16; ++i) {
        double row = 0.0;
        for (int j = 0; j < 16; ++j) row += std::abs(a(i, j));
        best = std::max(best, row);
    }
    return best;
}

Matrix16cd taylor_exp(const Matrix16cd& a, int order) {
    // Horner form: I + A (I + A/2 (I + A/3 (...))).
    Matrix16cd acc = Matrix16cd::Identity() + a / static_cast<double>(order);
    for (int k = order - 1; k >= 1; --k) {
        acc = Matrix16cd::Identity() + (a * acc) / static_cast<double>(k);
    }
    return acc;
}

Matrix16cd pade13(const Matrix16cd& a) {
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const Matrix16cd a2 = a * a;
    const Matrix16cd a4 = a2 * a2;
    const Matrix16cd a6 = a2 * a4;
    const Matrix16cd id = Matrix16cd::Identity();
    const Matrix16cd u =
        a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    const Matrix16cd v =
        a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    return Matrix16cd((v - u).partialPivLu().solve(v + u));
}

}  // namespace

Matrix16cd expm16(const Matrix16cd& a) {
    const double nrm = norm_inf(a);
    if (nrm < 1e-300) return Matrix16cd::Identity() + a;
    if (nrm < 0.05) return taylor_exp(a, 7);
    if (nrm < 0.25) return taylor_exp(a, 10);

    int s = 0;
    double scaled = nrm;
    while (scaled > 2.0) {
        scaled *= 0.5;
        ++s;
    }
    Matrix16cd e = pade13(a / std::pow(2.0, s));
    for (int k = 0; k < s; ++k) e = e * e;
    return e;
}

}  // namespace ewjn
