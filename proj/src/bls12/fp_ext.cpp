#include "permadid/bls12/fp_ext.hpp"

namespace permadid::bls12 {

namespace {

using detail::VarUint;

struct TowerParams {
    std::vector<detail::u64> exp_pm3_over_4;  // (p-3)/4
    std::vector<detail::u64> exp_pm1_over_2;  // (p-1)/2
    Fp2 gamma_v;  // xi^((p-1)/3): Frobenius factor for v
    Fp2 gamma_w;  // xi^((p-1)/6): Frobenius factor for w
};

const TowerParams& tower_params() {
    static const TowerParams tp = [] {
        TowerParams t;
        VarUint p = VarUint::from_hex(FpTag::modulus_hex());
        VarUint one = VarUint::from_u64(1);
        VarUint pm1 = VarUint::sub(p, one);
        t.exp_pm3_over_4 = VarUint::div_u64(VarUint::sub(pm1, VarUint::from_u64(2)), 4).words_msb_trimmed();
        t.exp_pm1_over_2 = VarUint::div_u64(pm1, 2).words_msb_trimmed();
        auto exp_third = VarUint::div_u64(pm1, 3).words_msb_trimmed();
        auto exp_sixth = VarUint::div_u64(pm1, 6).words_msb_trimmed();
        t.gamma_v = pow_words(Fp2::xi(), exp_third);
        t.gamma_w = pow_words(Fp2::xi(), exp_sixth);
        return t;
    }();
    return tp;
}

}  // namespace

Fp2 Fp2::operator*(const Fp2& o) const {
    Fp t0 = c0 * o.c0;
    Fp t1 = c1 * o.c1;
    Fp mixed = (c0 + c1) * (o.c0 + o.c1);
    return {t0 - t1, mixed - t0 - t1};
}

Fp2 Fp2::square() const {
    Fp a = (c0 + c1) * (c0 - c1);
    Fp b = (c0 * c1).doubled();
    return {a, b};
}

Fp2 Fp2::inverse() const {
    Fp norm = c0.square() + c1.square();
    Fp d = norm.inverse();
    return {c0 * d, -(c1 * d)};
}

std::optional<Fp2> Fp2::sqrt() const {
    if (is_zero()) return Fp2::zero();
    const auto& tp = tower_params();
    Fp2 a1 = pow_words(*this, tp.exp_pm3_over_4);
    Fp2 alpha = a1.square() * *this;  // self^((p-1)/2)
    Fp2 x0 = a1 * *this;              // self^((p+1)/4)
    Fp2 cand;
    if (alpha == -Fp2::one()) {
        cand = Fp2{-x0.c1, x0.c0};  // x0 * u
    } else {
        cand = pow_words(alpha + Fp2::one(), tp.exp_pm1_over_2) * x0;
    }
    if (cand.square() != *this) return std::nullopt;
    return cand;
}

Fp6 Fp6::operator*(const Fp6& o) const {
    Fp2 aa = c0 * o.c0;
    Fp2 bb = c1 * o.c1;
    Fp2 cc = c2 * o.c2;
    Fp2 r0 = ((c1 + c2) * (o.c1 + o.c2) - bb - cc).mul_by_xi() + aa;
    Fp2 r1 = (c0 + c1) * (o.c0 + o.c1) - aa - bb + cc.mul_by_xi();
    Fp2 r2 = (c0 + c2) * (o.c0 + o.c2) - aa - cc + bb;
    return {r0, r1, r2};
}

Fp6 Fp6::inverse() const {
    Fp2 t0 = c0.square() - (c1 * c2).mul_by_xi();
    Fp2 t1 = c2.square().mul_by_xi() - c0 * c1;
    Fp2 t2 = c1.square() - c0 * c2;
    Fp2 f = c0 * t0 + (c1 * t2).mul_by_xi() + (c2 * t1).mul_by_xi();
    Fp2 finv = f.inverse();
    return {t0 * finv, t1 * finv, t2 * finv};
}

Fp6 Fp6::frobenius() const {
    const auto& tp = tower_params();
    Fp2 g1 = tp.gamma_v;
    Fp2 g2 = g1.square();
    return {c0.conjugate(), c1.conjugate() * g1, c2.conjugate() * g2};
}

Fp12 Fp12::operator*(const Fp12& o) const {
    Fp6 aa = c0 * o.c0;
    Fp6 bb = c1 * o.c1;
    Fp6 mixed = (c0 + c1) * (o.c0 + o.c1);
    return {aa + bb.mul_by_v(), mixed - aa - bb};
}

Fp12 Fp12::square() const {
    Fp6 t = c0 * c1;
    Fp6 a = (c0 + c1) * (c0 + c1.mul_by_v()) - t - t.mul_by_v();
    return {a, t + t};
}

Fp12 Fp12::inverse() const {
    Fp6 d = (c0.square() - c1.square().mul_by_v()).inverse();
    return {c0 * d, -(c1 * d)};
}

Fp12 Fp12::frobenius() const {
    const auto& tp = tower_params();
    Fp6 a = c0.frobenius();
    Fp6 b = c1.frobenius().mul_by_fp2(tp.gamma_w);
    return {a, b};
}

}  // namespace permadid::bls12
